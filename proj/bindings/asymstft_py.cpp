// Python bindings for the streaming STFT library. Signals cross the
// boundary as numpy arrays (copied, never aliased); errors surface as a
// small exception hierarchy rooted at asymstft.Error.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "asymstft/errors.hpp"
#include "asymstft/metrics.hpp"
#include "asymstft/nalr.hpp"
#include "asymstft/process.hpp"
#include "asymstft/resample.hpp"
#include "asymstft/stft.hpp"
#include "asymstft/wav.hpp"
#include "asymstft/window.hpp"

namespace py = pybind11;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const DoubleArray& array) {
  if (array.ndim() != 1) {
    throw asymstft::ShapeError("expected a 1-D array, got " +
                               std::to_string(array.ndim()) + " dimensions");
  }
  const auto view = array.unchecked<1>();
  std::vector<double> out(static_cast<std::size_t>(view.shape(0)));
  for (py::ssize_t i = 0; i < view.shape(0); ++i) {
    out[static_cast<std::size_t>(i)] = view(i);
  }
  return out;
}

std::vector<std::vector<double>> to_channels(const DoubleArray& array) {
  if (array.ndim() == 1) {
    return {to_vector(array)};
  }
  if (array.ndim() != 2) {
    throw asymstft::ShapeError("expected a 1-D or 2-D array");
  }
  const auto view = array.unchecked<2>();
  std::vector<std::vector<double>> out(static_cast<std::size_t>(view.shape(0)));
  for (py::ssize_t c = 0; c < view.shape(0); ++c) {
    out[static_cast<std::size_t>(c)].resize(
        static_cast<std::size_t>(view.shape(1)));
    for (py::ssize_t t = 0; t < view.shape(1); ++t) {
      out[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] = view(c, t);
    }
  }
  return out;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  auto view = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < v.size(); ++i) {
    view(static_cast<py::ssize_t>(i)) = v[i];
  }
  return out;
}

py::array_t<std::complex<double>> to_array(
    const std::vector<std::complex<double>>& v) {
  py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(v.size()));
  auto view = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < v.size(); ++i) {
    view(static_cast<py::ssize_t>(i)) = v[i];
  }
  return out;
}

asymstft::TailVariant parse_tail(const std::string& name) {
  if (name == "continuous") {
    return asymstft::TailVariant::kContinuous;
  }
  if (name == "verbatim") {
    return asymstft::TailVariant::kVerbatim;
  }
  throw asymstft::ParameterError("tail must be 'continuous' or 'verbatim', got '" +
                                 name + "'");
}

asymstft::WindowParams build_params(int n1, int n2, int hop,
                                    double sample_rate,
                                    const std::string& tail) {
  asymstft::WindowParams params;
  params.n1 = n1;
  params.n2 = n2;
  params.hop = hop;
  params.sample_rate = sample_rate;
  params.tail = parse_tail(tail);
  return params;
}

asymstft::MultiResConfig build_loss_config(const std::vector<int>& windows,
                                           int hop_divisor) {
  asymstft::MultiResConfig config;
  config.window_sizes = windows;
  config.hop_divisor = hop_divisor;
  return config;
}

asymstft::Audiogram build_audiogram(const std::vector<double>& levels) {
  return asymstft::make_audiogram(levels);
}

asymstft::WavEncoding parse_encoding(const std::string& name) {
  if (name == "float32") {
    return asymstft::WavEncoding::kFloat32;
  }
  if (name == "pcm16") {
    return asymstft::WavEncoding::kPcm16;
  }
  if (name == "pcm24") {
    return asymstft::WavEncoding::kPcm24;
  }
  throw asymstft::ParameterError(
      "encoding must be 'float32', 'pcm16', or 'pcm24', got '" + name + "'");
}

/// Owns a FrameProcessor so Python can drive the processing seam.
class PyProcessor {
 public:
  explicit PyProcessor(std::unique_ptr<asymstft::FrameProcessor> impl)
      : impl_(std::move(impl)) {}

  asymstft::SpectrumFrame process(const asymstft::SpectrumFrame& frame) {
    return impl_->process(frame);
  }

  asymstft::FrameProcessor* get() { return impl_.get(); }

 private:
  std::unique_ptr<asymstft::FrameProcessor> impl_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Streaming low-latency STFT analysis/synthesis with an "
            "asymmetric analysis/synthesis window pair, plus hearing-aid "
            "amplification, evaluation metrics, resampling, and WAV I/O.";

  // Exceptions, parallel to the C++ hierarchy.
  auto base = py::register_exception<asymstft::Error>(m, "Error",
                                                      PyExc_RuntimeError);
  auto parameter =
      py::register_exception<asymstft::ParameterError>(m, "ParameterError",
                                                       base);
  py::register_exception<asymstft::ShapeError>(m, "ShapeError", base);
  py::register_exception<asymstft::StateError>(m, "StateError", base);
  py::register_exception<asymstft::DegenerateWindowError>(
      m, "DegenerateWindowError", base);
  auto io = py::register_exception<asymstft::IoError>(m, "IoError", base);
  py::register_exception<asymstft::UnsupportedFormatError>(
      m, "UnsupportedFormatError", io);
  py::register_exception<asymstft::SampleRateError>(m, "SampleRateError",
                                                    parameter);

  // ------------------------------------------------------------- windows
  py::class_<asymstft::WindowPair>(m, "WindowPair")
      .def_property_readonly(
          "analysis",
          [](const asymstft::WindowPair& p) { return to_array(p.analysis); })
      .def_property_readonly(
          "synthesis",
          [](const asymstft::WindowPair& p) { return to_array(p.synthesis); })
      .def_property_readonly(
          "n1", [](const asymstft::WindowPair& p) { return p.params.n1; })
      .def_property_readonly(
          "n2", [](const asymstft::WindowPair& p) { return p.params.n2; })
      .def_property_readonly(
          "hop", [](const asymstft::WindowPair& p) { return p.params.hop; })
      .def_property_readonly("sample_rate",
                             [](const asymstft::WindowPair& p) {
                               return p.params.sample_rate;
                             })
      .def_property_readonly(
          "tail",
          [](const asymstft::WindowPair& p) {
            return p.params.tail == asymstft::TailVariant::kContinuous
                       ? "continuous"
                       : "verbatim";
          })
      .def_property_readonly(
          "normalized",
          [](const asymstft::WindowPair& p) { return p.normalized; })
      .def("__len__",
           [](const asymstft::WindowPair& p) { return p.params.length(); });

  m.def(
      "make_window_pair",
      [](int n1, int n2, int hop, double sample_rate, const std::string& tail) {
        return asymstft::make_window_pair(
            build_params(n1, n2, hop, sample_rate, tail));
      },
      py::arg("n1") = 64, py::arg("n2") = 448, py::arg("hop") = 64,
      py::arg("sample_rate") = 32000.0, py::arg("tail") = "continuous",
      "Build the asymmetric analysis/synthesis window pair.");
  m.def(
      "cola_envelope",
      [](const asymstft::WindowPair& pair) {
        return to_array(asymstft::cola_envelope(pair));
      },
      py::arg("pair"),
      "Overlap-add envelope of the pair, one value per hop phase.");
  m.def("normalize_synthesis", &asymstft::normalize_synthesis,
        py::arg("pair"),
        "Scale the synthesis window so the overlap-add envelope is one.");

  // ------------------------------------------------------------ streaming
  py::class_<asymstft::SpectrumFrame>(m, "SpectrumFrame")
      .def(py::init<>())
      .def_property(
          "bins",
          [](const asymstft::SpectrumFrame& f) { return to_array(f.bins); },
          [](asymstft::SpectrumFrame& f,
             py::array_t<std::complex<double>,
                         py::array::c_style | py::array::forcecast>
                 bins) {
            const auto view = bins.unchecked<1>();
            f.bins.resize(static_cast<std::size_t>(view.shape(0)));
            for (py::ssize_t k = 0; k < view.shape(0); ++k) {
              f.bins[static_cast<std::size_t>(k)] = view(k);
            }
          })
      .def_readwrite("frame_index", &asymstft::SpectrumFrame::frame_index)
      .def_readwrite("channel", &asymstft::SpectrumFrame::channel);

  py::class_<PyProcessor>(m, "Processor")
      .def("process", &PyProcessor::process, py::arg("frame"),
           "Process one spectrum frame, returning the new frame.");

  m.def(
      "identity_processor",
      []() { return PyProcessor(asymstft::make_identity_processor()); },
      "Processor that passes frames through bit-exactly.");
  m.def(
      "magnitude_gain_processor",
      [](double alpha, double beta, double gain_floor) {
        asymstft::MagnitudeGainConfig config;
        config.alpha = alpha;
        config.beta = beta;
        config.gain_floor = gain_floor;
        return PyProcessor(asymstft::make_magnitude_gain_processor(config));
      },
      py::arg("alpha") = 0.98, py::arg("beta") = 1.0,
      py::arg("gain_floor") = 0.1,
      "Noise-floor tracking magnitude gain; phase is preserved.");

  py::class_<asymstft::StftEngine>(m, "StftEngine")
      .def(py::init([](const asymstft::WindowPair& pair, int fft_size,
                       int num_channels, double sample_rate) {
             asymstft::StftConfig config;
             config.window = pair;
             config.fft_size = fft_size;
             config.num_channels = num_channels;
             config.sample_rate = sample_rate;
             return asymstft::StftEngine(config);
           }),
           py::arg("pair"), py::arg("fft_size") = 0,
           py::arg("num_channels") = 1, py::arg("sample_rate") = 32000.0)
      .def_property_readonly("latency", &asymstft::StftEngine::latency)
      .def_property_readonly("samples_consumed",
                             &asymstft::StftEngine::samples_consumed)
      .def_property_readonly("frames_emitted",
                             &asymstft::StftEngine::frames_emitted)
      .def(
          "analyze",
          [](asymstft::StftEngine& engine, const DoubleArray& block) {
            if (block.ndim() == 1) {
              const auto samples = to_vector(block);
              return engine.analyze(std::span<const double>(samples));
            }
            return engine.analyze(to_channels(block));
          },
          py::arg("block"),
          "Feed samples (1-D mono or channels x samples); returns the "
          "frames completed by this block.")
      .def(
          "synthesize",
          [](asymstft::StftEngine& engine,
             const asymstft::SpectrumFrame& frame) {
            return to_array(engine.synthesize(frame));
          },
          py::arg("frame"),
          "Overlap-add one frame; returns hop final output samples for "
          "the frame's channel.")
      .def(
          "flush",
          [](asymstft::StftEngine& engine, PyProcessor* tail_processor) {
            const auto tails = engine.flush(
                tail_processor ? tail_processor->get() : nullptr);
            std::vector<py::array_t<double>> out;
            out.reserve(tails.size());
            for (const auto& tail : tails) {
              out.push_back(to_array(tail));
            }
            return out;
          },
          py::arg("tail_processor") = static_cast<PyProcessor*>(nullptr),
          "Complete the stream; returns the remaining samples per channel.");

  // -------------------------------------------------------- amplification
  m.def(
      "nalr_gains",
      [](const std::vector<double>& levels) {
        const auto gains = asymstft::nalr_gains(build_audiogram(levels));
        return to_array(std::vector<double>(gains.begin(), gains.end()));
      },
      py::arg("levels_db_hl"),
      "Insertion gains in dB at 250/500/1000/2000/4000/6000 Hz for one "
      "ear's hearing levels.");
  m.def(
      "design_fir",
      [](const std::vector<double>& gains_db, int nfir, double sample_rate) {
        if (gains_db.size() != 6) {
          throw asymstft::ParameterError("expected 6 gains, got " +
                                         std::to_string(gains_db.size()));
        }
        std::array<double, 6> gains{};
        std::copy(gains_db.begin(), gains_db.end(), gains.begin());
        return to_array(asymstft::design_fir(gains, nfir, sample_rate));
      },
      py::arg("gains_db"), py::arg("nfir") = asymstft::kDefaultNfir,
      py::arg("sample_rate") = 32000.0,
      "Linear-phase FIR whose magnitude matches the gains at the catalog "
      "frequencies.");
  m.def(
      "apply_amplification",
      [](const DoubleArray& signal, const std::vector<double>& levels,
         int nfir, double sample_rate) {
        return to_array(asymstft::apply_amplification(
            to_vector(signal), build_audiogram(levels), nfir, sample_rate));
      },
      py::arg("signal"), py::arg("levels_db_hl"),
      py::arg("nfir") = asymstft::kDefaultNfir,
      py::arg("sample_rate") = 32000.0,
      "Prescribe for one ear and filter the signal, delay-compensated.");
  m.def(
      "fir_response_db",
      [](const DoubleArray& fir, double frequency, double sample_rate) {
        const auto taps = to_vector(fir);
        return asymstft::fir_response_db(taps, frequency, sample_rate);
      },
      py::arg("fir"), py::arg("frequency"), py::arg("sample_rate") = 32000.0,
      "Magnitude response of an FIR in dB at one frequency.");

  // --------------------------------------------------------------- metrics
  m.def(
      "multires_mag_loss",
      [](const DoubleArray& reference, const DoubleArray& estimate,
         const std::vector<int>& windows, int hop_divisor) {
        return asymstft::multires_mag_loss(
            to_vector(reference), to_vector(estimate),
            build_loss_config(windows, hop_divisor));
      },
      py::arg("reference"), py::arg("estimate"),
      py::arg("windows") = std::vector<int>{128, 256, 512, 1024, 2048},
      py::arg("hop_divisor") = 4,
      "Mean multi-resolution magnitude-spectrogram L2 loss.");
  m.def(
      "multires_mag_loss_detail",
      [](const DoubleArray& reference, const DoubleArray& estimate,
         const std::vector<int>& windows, int hop_divisor) {
        const auto result = asymstft::multires_mag_loss_detail(
            to_vector(reference), to_vector(estimate),
            build_loss_config(windows, hop_divisor));
        return py::make_tuple(to_array(result.per_resolution),
                              result.aggregate);
      },
      py::arg("reference"), py::arg("estimate"),
      py::arg("windows") = std::vector<int>{128, 256, 512, 1024, 2048},
      py::arg("hop_divisor") = 4,
      "Per-resolution losses and their mean, as (array, float).");
  m.def(
      "measure_delay_snr",
      [](const DoubleArray& reference, const DoubleArray& estimate,
         int max_delay) {
        const auto ds = asymstft::measure_delay_snr(
            to_vector(reference), to_vector(estimate), max_delay);
        return py::make_tuple(ds.delay, ds.snr_db);
      },
      py::arg("reference"), py::arg("estimate"), py::arg("max_delay"),
      "Best alignment delay and the SNR at that delay, as (int, float).");

  // ------------------------------------------------------------- utilities
  m.def(
      "resample",
      [](const DoubleArray& signal, double from_rate, double to_rate,
         int taps_per_phase) {
        return to_array(asymstft::resample(to_vector(signal), from_rate,
                                           to_rate, taps_per_phase));
      },
      py::arg("signal"), py::arg("from_rate"), py::arg("to_rate"),
      py::arg("taps_per_phase") = 64,
      "Rational-ratio polyphase resampler.");
  m.def(
      "read_wav",
      [](const std::string& path) {
        const auto wav = asymstft::read_wav(path);
        std::vector<py::array_t<double>> channels;
        channels.reserve(wav.channels.size());
        for (const auto& channel : wav.channels) {
          channels.push_back(to_array(channel));
        }
        return py::make_tuple(channels, wav.sample_rate);
      },
      py::arg("path"),
      "Load a WAV file as (list of per-channel arrays, sample_rate).");
  m.def(
      "write_wav",
      [](const std::string& path, const DoubleArray& channels,
         double sample_rate, const std::string& encoding,
         std::uint64_t dither_seed) {
        asymstft::WavData wav;
        wav.sample_rate = sample_rate;
        wav.channels = to_channels(channels);
        asymstft::write_wav(path, wav, parse_encoding(encoding), dither_seed);
      },
      py::arg("path"), py::arg("channels"), py::arg("sample_rate") = 32000.0,
      py::arg("encoding") = "float32", py::arg("dither_seed") = 0,
      "Write a WAV file from a 1-D or channels x samples array.");
}
