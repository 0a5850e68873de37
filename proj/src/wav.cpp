#include "asymstft/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "asymstft/errors.hpp"

namespace asymstft {

namespace {

static_assert(std::endian::native == std::endian::little,
              "RIFF I/O below assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct FmtInfo {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void append_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void append_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

double decode_sample(const unsigned char* p, std::uint16_t format,
                     std::uint16_t bits) {
  if (format == kFormatPcm && bits == 16) {
    const auto raw = static_cast<std::int16_t>(read_u16(p));
    return static_cast<double>(raw) / 32768.0;
  }
  if (format == kFormatPcm && bits == 24) {
    std::int32_t raw = static_cast<std::int32_t>(p[0]) |
                       (static_cast<std::int32_t>(p[1]) << 8) |
                       (static_cast<std::int32_t>(p[2]) << 16);
    if ((raw & 0x800000) != 0) {
      raw |= ~0xFFFFFF;  // sign extend
    }
    return static_cast<double>(raw) / 8388608.0;
  }
  // float32
  float value = 0.0F;
  std::uint32_t raw = read_u32(p);
  std::memcpy(&value, &raw, sizeof(value));
  return static_cast<double>(value);
}

/// Deterministic uniform double in [0, 1) from a 64-bit LCG-free engine
/// state; avoids std::uniform_real_distribution so output bytes do not
/// depend on the standard library implementation.
class DitherSource {
 public:
  explicit DitherSource(std::uint64_t seed) : state_(seed + 0x9E3779B97F4A7C15ULL) {}

  double next_unit() {
    // splitmix64 step
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }

  /// Triangular dither in (-1, 1) least-significant-bit units.
  double next_tpdf() { return next_unit() - next_unit(); }

 private:
  std::uint64_t state_;
};

}  // namespace

WavData read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open WAV file: " + path);
  }
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0) {
    throw IoError("not a RIFF/WAVE file: " + path);
  }
  const auto* data_ptr = reinterpret_cast<const unsigned char*>(bytes.data());

  FmtInfo fmt;
  bool have_fmt = false;
  std::size_t payload_offset = 0;
  std::size_t payload_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const std::uint32_t chunk_size = read_u32(data_ptr + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) {
      throw IoError("truncated chunk '" + id + "' in " + path);
    }
    if (id == "fmt ") {
      if (chunk_size < 16) {
        throw IoError("fmt chunk too small in " + path);
      }
      fmt.format = read_u16(data_ptr + body);
      fmt.channels = read_u16(data_ptr + body + 2);
      fmt.sample_rate = read_u32(data_ptr + body + 4);
      fmt.bits = read_u16(data_ptr + body + 14);
      if (fmt.format == kFormatExtensible) {
        if (chunk_size < 40) {
          throw IoError("extensible fmt chunk too small in " + path);
        }
        // The real format code is the first two bytes of the SubFormat
        // GUID at offset 24 of the chunk body.
        fmt.format = read_u16(data_ptr + body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      payload_offset = body;
      payload_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size % 2);  // chunks are word-aligned
  }

  if (!have_fmt) {
    throw IoError("missing fmt chunk in " + path);
  }
  if (payload_offset == 0) {
    throw IoError("missing data chunk in " + path);
  }
  if (fmt.channels == 0 || fmt.sample_rate == 0) {
    throw IoError("malformed fmt chunk in " + path);
  }

  const bool pcm16 = fmt.format == kFormatPcm && fmt.bits == 16;
  const bool pcm24 = fmt.format == kFormatPcm && fmt.bits == 24;
  const bool float32 = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!pcm16 && !pcm24 && !float32) {
    throw UnsupportedFormatError(
        "unsupported WAV encoding (format " + std::to_string(fmt.format) +
        ", " + std::to_string(fmt.bits) + " bits) in " + path +
        "; supported: PCM16, PCM24, float32");
  }

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  const std::size_t frames = payload_size / frame_bytes;

  WavData out;
  out.sample_rate = static_cast<double>(fmt.sample_rate);
  out.channels.assign(fmt.channels, std::vector<double>(frames));
  const unsigned char* payload = data_ptr + payload_offset;
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::uint16_t c = 0; c < fmt.channels; ++c) {
      out.channels[c][f] = decode_sample(
          payload + f * frame_bytes + c * bytes_per_sample, fmt.format,
          fmt.bits);
    }
  }
  return out;
}

void write_wav(const std::string& path, const WavData& data,
               WavEncoding encoding, std::uint64_t dither_seed) {
  if (data.channels.empty()) {
    throw ParameterError("cannot write a WAV file with zero channels");
  }
  const std::size_t frames = data.channels[0].size();
  for (const auto& channel : data.channels) {
    if (channel.size() != frames) {
      throw ShapeError("all channels must have the same length");
    }
  }
  if (!(data.sample_rate > 0.0)) {
    throw ParameterError("sample_rate must be positive");
  }

  const auto num_channels = static_cast<std::uint16_t>(data.channels.size());
  const auto rate = static_cast<std::uint32_t>(std::llround(data.sample_rate));
  const bool is_float = encoding == WavEncoding::kFloat32;
  const std::uint16_t bits = encoding == WavEncoding::kPcm16   ? 16
                             : encoding == WavEncoding::kPcm24 ? 24
                                                               : 32;
  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * num_channels;
  const std::size_t payload_size = frames * frame_bytes;

  std::string payload;
  payload.reserve(payload_size);
  DitherSource dither(dither_seed);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::uint16_t c = 0; c < num_channels; ++c) {
      const double sample = data.channels[c][f];
      if (is_float) {
        const auto value = static_cast<float>(sample);
        std::uint32_t raw = 0;
        std::memcpy(&raw, &value, sizeof(raw));
        append_u32(payload, raw);
      } else if (encoding == WavEncoding::kPcm16) {
        const double scaled = sample * 32768.0 + dither.next_tpdf();
        const auto q = static_cast<std::int32_t>(std::llround(scaled));
        const auto clamped =
            static_cast<std::int16_t>(std::clamp(q, -32768, 32767));
        append_u16(payload, static_cast<std::uint16_t>(clamped));
      } else {
        const double scaled = sample * 8388608.0 + dither.next_tpdf();
        const auto q = static_cast<std::int32_t>(std::llround(scaled));
        const std::int32_t clamped = std::clamp(q, -8388608, 8388607);
        payload.push_back(static_cast<char>(clamped & 0xFF));
        payload.push_back(static_cast<char>((clamped >> 8) & 0xFF));
        payload.push_back(static_cast<char>((clamped >> 16) & 0xFF));
      }
    }
  }

  std::string out;
  out.reserve(payload_size + 64);
  out.append("RIFF");
  append_u32(out, 0);  // patched below
  out.append("WAVE");
  out.append("fmt ");
  append_u32(out, 16);
  append_u16(out, is_float ? kFormatFloat : kFormatPcm);
  append_u16(out, num_channels);
  append_u32(out, rate);
  append_u32(out, static_cast<std::uint32_t>(rate * frame_bytes));
  append_u16(out, static_cast<std::uint16_t>(frame_bytes));
  append_u16(out, bits);
  if (is_float) {
    // Non-PCM formats carry a fact chunk with the per-channel frame count.
    out.append("fact");
    append_u32(out, 4);
    append_u32(out, static_cast<std::uint32_t>(frames));
  }
  out.append("data");
  append_u32(out, static_cast<std::uint32_t>(payload_size));
  out.append(payload);
  if (payload_size % 2 != 0) {
    out.push_back('\0');
  }
  const std::uint32_t riff_size = static_cast<std::uint32_t>(out.size() - 8);
  out[4] = static_cast<char>(riff_size & 0xFF);
  out[5] = static_cast<char>((riff_size >> 8) & 0xFF);
  out[6] = static_cast<char>((riff_size >> 16) & 0xFF);
  out[7] = static_cast<char>((riff_size >> 24) & 0xFF);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw IoError("cannot open for writing: " + path);
  }
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) {
    throw IoError("write failed: " + path);
  }
}

}  // namespace asymstft
