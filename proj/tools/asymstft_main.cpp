// Command-line front end: window export/verification, file processing,
// latency measurement, and loss evaluation.
//
// Exit codes: 0 ok, 2 parameter, 3 shape, 4 state, 5 degenerate window,
// 6 verification failure, 7 I/O, 8 unsupported WAV encoding,
// 9 sample-rate mismatch.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "asymstft/errors.hpp"
#include "asymstft/metrics.hpp"
#include "asymstft/nalr.hpp"
#include "asymstft/process.hpp"
#include "asymstft/resample.hpp"
#include "asymstft/stft.hpp"
#include "asymstft/wav.hpp"
#include "asymstft/window.hpp"

namespace {

using asymstft::TailVariant;
using asymstft::WindowParams;

constexpr int kExitOk = 0;
constexpr int kExitParameter = 2;
constexpr int kExitShape = 3;
constexpr int kExitState = 4;
constexpr int kExitDegenerateWindow = 5;
constexpr int kExitVerification = 6;
constexpr int kExitIo = 7;
constexpr int kExitUnsupportedFormat = 8;
constexpr int kExitSampleRate = 9;

/// Round-trip-exact formatting; every number the CLI prints must equal
/// the library's double bit-for-bit when parsed back.
std::string fmt(double value) {
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string fmt_ms(double samples, double rate) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", 1000.0 * samples / rate);
  return buf;
}

enum class ReportFormat { kText, kCsv, kJsonl };

/// Ordered key/value report emitted as labeled text, `key,value` CSV
/// rows, or a single JSON object per record.
class Report {
 public:
  explicit Report(ReportFormat format) : format_(format) {}

  void add(const std::string& key, const std::string& value) {
    rows_.emplace_back(key, value);
  }
  void add(const std::string& key, double value) { add(key, fmt(value)); }
  void add(const std::string& key, std::int64_t value) {
    add(key, std::to_string(value));
  }

  void print(std::ostream& out) const {
    if (format_ == ReportFormat::kJsonl) {
      nlohmann::ordered_json record;
      for (const auto& [key, value] : rows_) {
        record[key] = value;
      }
      out << record.dump() << "\n";
      return;
    }
    const char* sep = format_ == ReportFormat::kCsv ? "," : ": ";
    for (const auto& [key, value] : rows_) {
      out << key << sep << value << "\n";
    }
  }

 private:
  ReportFormat format_;
  std::vector<std::pair<std::string, std::string>> rows_;
};

struct WindowFlags {
  int n1 = 64;
  int n2 = 448;
  int hop = 64;
  double rate = 32000.0;
  TailVariant tail = TailVariant::kContinuous;

  WindowParams params() const {
    WindowParams p;
    p.n1 = n1;
    p.n2 = n2;
    p.hop = hop;
    p.sample_rate = rate;
    p.tail = tail;
    return p;
  }
};

void add_window_flags(CLI::App* cmd, WindowFlags& flags) {
  cmd->add_option("--n1", flags.n1, "End of the rising analysis segment");
  cmd->add_option("--n2", flags.n2, "Start of the analysis tail");
  cmd->add_option("--hop", flags.hop, "Hop size R in samples");
  cmd->add_option("--rate", flags.rate, "Sample rate in Hz");
  const std::map<std::string, TailVariant> tails{
      {"continuous", TailVariant::kContinuous},
      {"verbatim", TailVariant::kVerbatim}};
  cmd->add_option("--tail", flags.tail, "Analysis tail variant")
      ->transform(CLI::CheckedTransformer(tails, CLI::ignore_case));
}

void add_format_flag(CLI::App* cmd, ReportFormat& format) {
  const std::map<std::string, ReportFormat> formats{
      {"text", ReportFormat::kText},
      {"csv", ReportFormat::kCsv},
      {"jsonl", ReportFormat::kJsonl}};
  cmd->add_option("--format", format, "Report format")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
}

// ---------------------------------------------------------------- gen-windows

int cmd_gen_windows(const WindowFlags& flags, const std::string& output,
                    bool normalize, ReportFormat format) {
  auto pair = asymstft::make_window_pair(flags.params());
  if (normalize) {
    pair = asymstft::normalize_synthesis(pair);
  }
  std::string csv;
  for (int n = 0; n < pair.params.length(); ++n) {
    csv += std::to_string(n);
    csv += ',';
    csv += fmt(pair.analysis[static_cast<std::size_t>(n)]);
    csv += ',';
    csv += fmt(pair.synthesis[static_cast<std::size_t>(n)]);
    csv += '\n';
  }

  const int length = pair.params.length();
  const int hop = pair.params.hop;
  const double rate = pair.params.sample_rate;
  Report report(format);
  report.add("window_samples", static_cast<std::int64_t>(length));
  report.add("window_ms", fmt_ms(length, rate));
  report.add("hop_samples", static_cast<std::int64_t>(hop));
  report.add("hop_ms", fmt_ms(hop, rate));
  report.add("latency_samples", static_cast<std::int64_t>(2 * hop));
  report.add("latency_ms", fmt_ms(2 * hop, rate));

  if (output.empty()) {
    std::cout << csv;
    report.print(std::cerr);
  } else {
    std::ofstream file(output, std::ios::trunc);
    if (!file) {
      throw asymstft::IoError("cannot open for writing: " + output);
    }
    file << csv;
    if (!file) {
      throw asymstft::IoError("write failed: " + output);
    }
    report.print(std::cout);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- verify-cola

int cmd_verify_cola(const WindowFlags& flags, double tolerance,
                    bool normalize, ReportFormat format) {
  auto pair = asymstft::make_window_pair(flags.params());

  const auto deviation = [](const std::vector<double>& envelope) {
    double max_dev = 0.0;
    int offender = 0;
    for (int s = 0; s < static_cast<int>(envelope.size()); ++s) {
      const double dev = std::abs(envelope[static_cast<std::size_t>(s)] - 1.0);
      if (dev > max_dev) {
        max_dev = dev;
        offender = s;
      }
    }
    return std::pair<double, int>(max_dev, offender);
  };

  Report report(format);
  auto [dev, phase] = deviation(asymstft::cola_envelope(pair));
  report.add("max_deviation", dev);
  report.add("phase", static_cast<std::int64_t>(phase));
  report.add("verdict", dev <= tolerance ? "pass" : "fail");
  bool ok = dev <= tolerance;
  if (normalize) {
    pair = asymstft::normalize_synthesis(pair);
    auto [ndev, nphase] = deviation(asymstft::cola_envelope(pair));
    report.add("normalized_max_deviation", ndev);
    report.add("normalized_phase", static_cast<std::int64_t>(nphase));
    report.add("normalized_verdict", ndev <= tolerance ? "pass" : "fail");
    ok = ndev <= tolerance;
  }
  report.print(std::cout);
  return ok ? kExitOk : kExitVerification;
}

// -------------------------------------------------------------------- process

struct ProcessFlags {
  WindowFlags window;
  std::string input;
  std::string output;
  std::string processor = "identity";
  double alpha = 0.98;
  double beta = 1.0;
  double gain_floor = 0.1;
  std::string audiogram_path;
  int nfir = asymstft::kDefaultNfir;
  std::string reference_path;
  int fft_size = 0;
  int max_delay = 512;
  bool normalize = true;
  bool do_resample = false;
  bool pcm16 = false;
  std::uint64_t dither_seed = 0;
};

std::unique_ptr<asymstft::FrameProcessor> build_processor(
    const ProcessFlags& flags) {
  if (flags.processor == "identity") {
    return asymstft::make_identity_processor();
  }
  asymstft::MagnitudeGainConfig config;
  config.alpha = flags.alpha;
  config.beta = flags.beta;
  config.gain_floor = flags.gain_floor;
  return asymstft::make_magnitude_gain_processor(config);
}

/// Brings a WAV to the target rate, resampling per channel when allowed
/// and differing; a disallowed mismatch is a distinct error class.
void conform_rate(asymstft::WavData& wav, double rate, bool allow_resample) {
  if (wav.sample_rate == rate) {
    return;
  }
  if (!allow_resample) {
    throw asymstft::SampleRateError(
        "input is " + fmt(wav.sample_rate) + " Hz but the pipeline runs at " +
        fmt(rate) + " Hz; pass --resample to convert");
  }
  for (auto& channel : wav.channels) {
    channel = asymstft::resample(channel, wav.sample_rate, rate);
  }
  wav.sample_rate = rate;
}

void report_reference_metrics(Report& report,
                              const std::vector<std::vector<double>>& outputs,
                              const ProcessFlags& flags) {
  asymstft::WavData ref = asymstft::read_wav(flags.reference_path);
  conform_rate(ref, flags.window.rate, flags.do_resample);
  if (ref.channels.size() != outputs.size()) {
    throw asymstft::ShapeError("reference has " +
                               std::to_string(ref.channels.size()) +
                               " channels, output has " +
                               std::to_string(outputs.size()));
  }
  for (std::size_t c = 0; c < outputs.size(); ++c) {
    const std::size_t len = std::min(ref.channels[c].size(), outputs[c].size());
    std::span<const double> r(ref.channels[c].data(), len);
    std::span<const double> e(outputs[c].data(), len);
    const int max_delay = std::min<int>(
        flags.max_delay, static_cast<int>((len + 1) / 2) - 1);
    const auto ds = asymstft::measure_delay_snr(r, e, max_delay);
    const std::string prefix = "ch" + std::to_string(c) + "_";
    report.add(prefix + "delay", static_cast<std::int64_t>(ds.delay));
    report.add(prefix + "snr_db", ds.snr_db);
    const auto loss = asymstft::multires_mag_loss_detail(r, e);
    asymstft::MultiResConfig config;
    for (std::size_t i = 0; i < loss.per_resolution.size(); ++i) {
      report.add(prefix + "loss_w" + std::to_string(config.window_sizes[i]),
                 loss.per_resolution[i]);
    }
    report.add(prefix + "loss", loss.aggregate);
  }
}

int cmd_process(const ProcessFlags& flags, ReportFormat format) {
  asymstft::WavData wav = asymstft::read_wav(flags.input);
  conform_rate(wav, flags.window.rate, flags.do_resample);

  auto pair = asymstft::make_window_pair(flags.window.params());
  if (flags.normalize) {
    pair = asymstft::normalize_synthesis(pair);
  }
  asymstft::StftConfig config;
  config.window = pair;
  config.fft_size = flags.fft_size;
  config.num_channels = static_cast<int>(wav.channels.size());
  config.sample_rate = flags.window.rate;
  asymstft::StftEngine engine(config);
  auto processor = build_processor(flags);

  std::vector<std::vector<double>> outputs(wav.channels.size());
  for (const auto& frame : engine.analyze(wav.channels)) {
    const auto processed = processor->process(frame);
    const auto hop = engine.synthesize(processed);
    auto& channel_out = outputs[static_cast<std::size_t>(processed.channel)];
    channel_out.insert(channel_out.end(), hop.begin(), hop.end());
  }
  auto tails = engine.flush(processor.get());
  for (std::size_t c = 0; c < outputs.size(); ++c) {
    outputs[c].insert(outputs[c].end(), tails[c].begin(), tails[c].end());
  }

  Report report(format);
  report.add("channels", static_cast<std::int64_t>(wav.channels.size()));
  report.add("input_samples", wav.frames());
  report.add("output_samples", static_cast<std::int64_t>(outputs[0].size()));
  report.add("latency_samples", static_cast<std::int64_t>(engine.latency()));
  report.add("latency_ms", fmt_ms(engine.latency(), flags.window.rate));

  if (!flags.audiogram_path.empty()) {
    auto ears = asymstft::load_audiogram_file(flags.audiogram_path);
    outputs = asymstft::apply_amplification(outputs, ears, flags.nfir,
                                            flags.window.rate);
    for (std::size_t e = 0; e < ears.size(); ++e) {
      const auto gains = asymstft::nalr_gains(ears[e]);
      std::string line;
      for (std::size_t j = 0; j < gains.size(); ++j) {
        line += (j > 0 ? " " : "") + fmt(gains[j]);
      }
      report.add("ear" + std::to_string(e) + "_gains_db", line);
    }
  }

  if (!flags.reference_path.empty()) {
    report_reference_metrics(report, outputs, flags);
  }

  asymstft::WavData out_wav;
  out_wav.sample_rate = flags.window.rate;
  out_wav.channels = outputs;
  asymstft::write_wav(flags.output, out_wav,
                      flags.pcm16 ? asymstft::WavEncoding::kPcm16
                                  : asymstft::WavEncoding::kFloat32,
                      flags.dither_seed);
  report.print(std::cout);
  return kExitOk;
}

// ------------------------------------------------------------ measure-latency

int measure_impulse_offset(const WindowParams& params, int fft_size) {
  asymstft::StftConfig config;
  config.window = asymstft::normalize_synthesis(
      asymstft::make_window_pair(params));
  config.fft_size = fft_size;
  config.sample_rate = params.sample_rate;
  asymstft::StftEngine engine(config);
  auto processor = asymstft::make_identity_processor();

  const int length = params.length();
  const int position = 4 * length;
  std::vector<double> signal(static_cast<std::size_t>(position + 4 * length),
                             0.0);
  signal[static_cast<std::size_t>(position)] = 1.0;

  std::vector<double> output;
  for (const auto& frame : engine.analyze(std::span<const double>(signal))) {
    const auto hop = engine.synthesize(processor->process(frame));
    output.insert(output.end(), hop.begin(), hop.end());
  }
  const auto tails = engine.flush(processor.get());
  output.insert(output.end(), tails[0].begin(), tails[0].end());

  for (std::size_t t = 0; t < output.size(); ++t) {
    if (std::abs(output[t]) > 1e-12) {
      return static_cast<int>(t) - position;
    }
  }
  return -1;
}

int cmd_measure_latency(const WindowFlags& flags,
                        const std::vector<int>& sweep_lengths, int fft_size,
                        ReportFormat format) {
  const WindowParams params = flags.params();
  Report report(format);
  const int offset = measure_impulse_offset(params, fft_size);
  report.add("window_samples",
             static_cast<std::int64_t>(params.length()));
  report.add("latency_samples", static_cast<std::int64_t>(offset));
  report.add("latency_ms", fmt_ms(offset, params.sample_rate));

  for (const int length : sweep_lengths) {
    WindowParams swept = params;
    swept.n2 = length - params.hop;
    swept.n1 = std::min(params.n1, swept.n2 - swept.hop - 1);
    const int swept_offset = measure_impulse_offset(swept, 0);
    const std::string prefix = "sweep_w" + std::to_string(length) + "_";
    report.add(prefix + "latency_samples",
               static_cast<std::int64_t>(swept_offset));
    report.add(prefix + "latency_ms",
               fmt_ms(swept_offset, swept.sample_rate));
  }
  report.print(std::cout);
  return kExitOk;
}

// ------------------------------------------------------------------ eval-loss

int cmd_eval_loss(const std::string& reference_path,
                  const std::string& estimate_path, double rate,
                  bool do_resample, int max_delay,
                  const std::vector<int>& window_sizes, int hop_divisor,
                  ReportFormat format) {
  asymstft::WavData ref = asymstft::read_wav(reference_path);
  asymstft::WavData est = asymstft::read_wav(estimate_path);
  if (do_resample) {
    conform_rate(ref, rate, true);
    conform_rate(est, rate, true);
  } else if (ref.sample_rate != est.sample_rate) {
    throw asymstft::SampleRateError(
        "sample rates differ: " + fmt(ref.sample_rate) + " vs " +
        fmt(est.sample_rate) + " Hz; pass --resample to convert both");
  }
  if (ref.channels.size() != est.channels.size()) {
    throw asymstft::ShapeError("channel counts differ: " +
                               std::to_string(ref.channels.size()) + " vs " +
                               std::to_string(est.channels.size()));
  }
  if (ref.frames() != est.frames()) {
    throw asymstft::ShapeError("lengths differ: " +
                               std::to_string(ref.frames()) + " vs " +
                               std::to_string(est.frames()) + " frames");
  }

  asymstft::MultiResConfig config;
  config.window_sizes = window_sizes;
  config.hop_divisor = hop_divisor;

  Report report(format);
  for (std::size_t c = 0; c < ref.channels.size(); ++c) {
    const std::string prefix = "ch" + std::to_string(c) + "_";
    const auto loss = asymstft::multires_mag_loss_detail(
        ref.channels[c], est.channels[c], config);
    for (std::size_t i = 0; i < loss.per_resolution.size(); ++i) {
      report.add(prefix + "loss_w" + std::to_string(config.window_sizes[i]),
                 loss.per_resolution[i]);
    }
    report.add(prefix + "loss", loss.aggregate);
    const int clamped = std::min<int>(
        max_delay, static_cast<int>((ref.channels[c].size() + 1) / 2) - 1);
    const auto ds =
        asymstft::measure_delay_snr(ref.channels[c], est.channels[c], clamped);
    report.add(prefix + "delay", static_cast<std::int64_t>(ds.delay));
    report.add(prefix + "snr_db", ds.snr_db);
  }
  report.print(std::cout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming low-latency spectral processing tool"};
  app.require_subcommand(1);

  // gen-windows
  WindowFlags gen_flags;
  std::string gen_output;
  bool gen_normalize = false;
  ReportFormat gen_format = ReportFormat::kText;
  auto* gen = app.add_subcommand(
      "gen-windows", "Export the analysis/synthesis window pair as CSV");
  add_window_flags(gen, gen_flags);
  gen->add_option("-o,--output", gen_output,
                  "CSV path (default: CSV to stdout, summary to stderr)");
  gen->add_flag("--normalize", gen_normalize,
                "Export the envelope-normalized synthesis window");
  add_format_flag(gen, gen_format);

  // verify-cola
  WindowFlags cola_flags;
  double cola_tolerance = 1e-10;
  bool cola_normalize = false;
  ReportFormat cola_format = ReportFormat::kText;
  auto* cola = app.add_subcommand(
      "verify-cola", "Check the overlap-add envelope against a tolerance");
  add_window_flags(cola, cola_flags);
  cola->add_option("--tolerance", cola_tolerance,
                   "Maximum allowed |envelope - 1|");
  cola->add_flag("--normalize", cola_normalize,
                 "Also verify after synthesis-window normalization");
  add_format_flag(cola, cola_format);

  // process
  ProcessFlags process_flags;
  ReportFormat process_format = ReportFormat::kText;
  auto* process = app.add_subcommand(
      "process", "Run a WAV through analysis, processing, and synthesis");
  add_window_flags(process, process_flags.window);
  process->add_option("-i,--input", process_flags.input, "Input WAV")
      ->required();
  process->add_option("-o,--output", process_flags.output, "Output WAV")
      ->required();
  process->add_option("--processor", process_flags.processor,
                      "Spectral processor")
      ->check(CLI::IsMember({"identity", "gain"}));
  process->add_option("--alpha", process_flags.alpha,
                      "Gain processor: noise-floor smoothing");
  process->add_option("--beta", process_flags.beta,
                      "Gain processor: over-subtraction factor");
  process->add_option("--gain-floor", process_flags.gain_floor,
                      "Gain processor: minimum gain");
  process->add_option("--nalr", process_flags.audiogram_path,
                      "Audiogram file enabling amplification");
  process->add_option("--nfir", process_flags.nfir,
                      "Amplification FIR tap count (even)");
  process->add_option("--reference", process_flags.reference_path,
                      "Reference WAV for delay/SNR and loss reporting");
  process->add_option("--fft-size", process_flags.fft_size,
                      "Transform size (0 = window length)");
  process->add_option("--max-delay", process_flags.max_delay,
                      "Delay search bound for --reference metrics");
  process->add_flag("--normalize,!--no-normalize", process_flags.normalize,
                    "Normalize the synthesis window (default on)");
  process->add_flag("--resample", process_flags.do_resample,
                    "Resample inputs to the pipeline rate when they differ");
  process->add_flag("--pcm16", process_flags.pcm16,
                    "Write dithered PCM16 instead of float32");
  process->add_option("--dither-seed", process_flags.dither_seed,
                      "Seed for PCM dither");
  add_format_flag(process, process_format);

  // measure-latency
  WindowFlags latency_flags;
  std::vector<int> sweep_lengths{256, 512, 1024};
  int latency_fft_size = 0;
  ReportFormat latency_format = ReportFormat::kText;
  auto* latency = app.add_subcommand(
      "measure-latency",
      "Measure end-to-end impulse latency and sweep window lengths");
  add_window_flags(latency, latency_flags);
  latency->add_option("--sweep", sweep_lengths,
                      "Window lengths to sweep at the configured hop");
  latency->add_option("--fft-size", latency_fft_size,
                      "Transform size (0 = window length)");
  add_format_flag(latency, latency_format);

  // eval-loss
  std::string eval_reference;
  std::string eval_estimate;
  double eval_rate = 32000.0;
  bool eval_resample = false;
  int eval_max_delay = 512;
  std::vector<int> eval_windows{128, 256, 512, 1024, 2048};
  int eval_hop_divisor = 4;
  ReportFormat eval_format = ReportFormat::kText;
  auto* eval = app.add_subcommand(
      "eval-loss",
      "Multi-resolution magnitude loss and delay/SNR between two WAVs");
  eval->add_option("reference", eval_reference, "Reference WAV")->required();
  eval->add_option("estimate", eval_estimate, "Estimate WAV")->required();
  eval->add_option("--rate", eval_rate, "Target rate for --resample");
  eval->add_flag("--resample", eval_resample,
                 "Resample both files to --rate first");
  eval->add_option("--max-delay", eval_max_delay, "Delay search bound");
  eval->add_option("--windows", eval_windows, "Loss window sizes");
  eval->add_option("--hop-divisor", eval_hop_divisor,
                   "Hop = window / hop-divisor");
  add_format_flag(eval, eval_format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParameter;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen_windows(gen_flags, gen_output, gen_normalize, gen_format);
    }
    if (cola->parsed()) {
      return cmd_verify_cola(cola_flags, cola_tolerance, cola_normalize,
                             cola_format);
    }
    if (process->parsed()) {
      return cmd_process(process_flags, process_format);
    }
    if (latency->parsed()) {
      return cmd_measure_latency(latency_flags, sweep_lengths,
                                 latency_fft_size, latency_format);
    }
    if (eval->parsed()) {
      return cmd_eval_loss(eval_reference, eval_estimate, eval_rate,
                           eval_resample, eval_max_delay, eval_windows,
                           eval_hop_divisor, eval_format);
    }
  } catch (const asymstft::DegenerateWindowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerateWindow;
  } catch (const asymstft::UnsupportedFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnsupportedFormat;
  } catch (const asymstft::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const asymstft::SampleRateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSampleRate;
  } catch (const asymstft::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitShape;
  } catch (const asymstft::StateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitState;
  } catch (const asymstft::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParameter;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
