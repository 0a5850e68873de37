#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace asymstft {

enum class WavEncoding {
  kPcm16,
  kPcm24,
  kFloat32,
};

/// Audio loaded from or destined for a RIFF/WAVE file. Samples are kept
/// in double precision, one vector per channel, nominal range [-1, 1].
struct WavData {
  double sample_rate = 32000.0;
  std::vector<std::vector<double>> channels;

  std::int64_t frames() const noexcept {
    return channels.empty() ? 0 : static_cast<std::int64_t>(channels[0].size());
  }
};

/// Reads PCM16, PCM24, or float32 WAV (plain or WAVE_FORMAT_EXTENSIBLE).
/// Throws IoError on malformed files and UnsupportedFormatError on other
/// encodings.
WavData read_wav(const std::string& path);

/// Writes a WAV file. Float32 output preserves precision; PCM16 applies
/// TPDF dither from a deterministic seeded generator before quantizing.
void write_wav(const std::string& path, const WavData& data,
               WavEncoding encoding = WavEncoding::kFloat32,
               std::uint64_t dither_seed = 0);

}  // namespace asymstft
