#pragma once

// Multi-channel lane probability maps and their on-disk formats.
//
// Binary raster ("LPM1", little-endian):
//   magic "LPM1" | u32 width | u32 height | u32 channels | f32 values...
// values are channel-major, then row-major. PGM input is plain P5, one
// file per channel, maxval 255.

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "lanetrack/errors.hpp"

namespace lanetrack {

class ProbabilityMap {
 public:
  ProbabilityMap() = default;

  ProbabilityMap(std::uint32_t width, std::uint32_t height, std::uint32_t channels,
                 std::vector<float> values)
      : width_(width), height_(height), channels_(channels), values_(std::move(values)) {
    if (width_ < 2 || height_ < 2) {
      throw PreconditionError("probability map must be at least 2x2");
    }
    if (channels_ < 1) {
      throw PreconditionError("probability map needs at least one channel");
    }
    if (values_.size() != static_cast<std::size_t>(width_) * height_ * channels_) {
      throw PreconditionError("probability map value count does not match width*height*channels");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] >= 0.0f && values_[i] <= 1.0f)) {
        throw RangeError("probability map value " + std::to_string(i) + " outside [0,1]");
      }
    }
  }

  // All-zero map.
  ProbabilityMap(std::uint32_t width, std::uint32_t height, std::uint32_t channels)
      : ProbabilityMap(width, height, channels,
                       std::vector<float>(static_cast<std::size_t>(width) * height * channels, 0.0f)) {}

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  std::uint32_t channels() const noexcept { return channels_; }
  std::span<const float> values() const noexcept { return values_; }

  float at(std::uint32_t channel, std::uint32_t x, std::uint32_t y) const {
    return values_[index(channel, x, y)];
  }

  // Mutable access for builders (renderers, tests). Callers keep values in [0,1].
  float& at(std::uint32_t channel, std::uint32_t x, std::uint32_t y) {
    return values_[index(channel, x, y)];
  }

  std::span<const float> row(std::uint32_t channel, std::uint32_t y) const {
    return std::span<const float>(values_).subspan(index(channel, 0, y), width_);
  }

  bool contains(double x, double y) const noexcept {
    return x >= 0.0 && y >= 0.0 && x <= width_ - 1.0 && y <= height_ - 1.0;
  }

  // Bilinear interpolation; exact at grid points.
  double sample(std::uint32_t channel, double x, double y) const {
    if (channel >= channels_) {
      throw RangeError("channel " + std::to_string(channel) + " out of range");
    }
    if (!contains(x, y)) {
      throw RangeError("sample coordinate outside raster");
    }
    const auto x0 = std::min(static_cast<std::uint32_t>(x), width_ - 2);
    const auto y0 = std::min(static_cast<std::uint32_t>(y), height_ - 2);
    const double fx = x - x0;
    const double fy = y - y0;
    const double v00 = at(channel, x0, y0);
    const double v10 = at(channel, x0 + 1, y0);
    const double v01 = at(channel, x0, y0 + 1);
    const double v11 = at(channel, x0 + 1, y0 + 1);
    const double top = v00 + fx * (v10 - v00);
    const double bottom = v01 + fx * (v11 - v01);
    return top + fy * (bottom - top);
  }

  friend bool operator==(const ProbabilityMap&, const ProbabilityMap&) = default;

 private:
  std::size_t index(std::uint32_t channel, std::uint32_t x, std::uint32_t y) const {
    return (static_cast<std::size_t>(channel) * height_ + y) * width_ + x;
  }

  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::uint32_t channels_ = 0;
  std::vector<float> values_;
};

namespace detail {

inline std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint32_t read_u32_le(std::span<const unsigned char> bytes, std::size_t offset) {
  return static_cast<std::uint32_t>(bytes[offset]) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 8) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 3]) << 24);
}

inline void write_u32_le(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

// PGM header token reader: skips whitespace and '#' comments.
inline std::size_t pgm_token(std::span<const unsigned char> bytes, std::size_t& pos, const char* what) {
  for (;;) {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  const std::size_t start = pos;
  std::size_t value = 0;
  while (pos < bytes.size() && std::isdigit(bytes[pos])) {
    value = value * 10 + (bytes[pos] - '0');
    if (value > 0xFFFFFFFFu) throw FormatError(std::string("PGM ") + what + " too large", start);
    ++pos;
  }
  if (pos == start) {
    throw FormatError(std::string("PGM header: expected ") + what, start);
  }
  return value;
}

}  // namespace detail

inline constexpr std::array<unsigned char, 4> kRasterMagic = {'L', 'P', 'M', '1'};

inline ProbabilityMap parse_raster(std::span<const unsigned char> bytes) {
  constexpr std::size_t header = 16;
  if (bytes.size() < header) {
    throw FormatError("raster header truncated", bytes.size());
  }
  if (!std::equal(kRasterMagic.begin(), kRasterMagic.end(), bytes.begin())) {
    throw FormatError("bad raster magic", 0);
  }
  const auto width = detail::read_u32_le(bytes, 4);
  const auto height = detail::read_u32_le(bytes, 8);
  const auto channels = detail::read_u32_le(bytes, 12);
  if (width < 2 || height < 2) throw FormatError("raster dimensions below 2x2", 4);
  if (channels < 1) throw FormatError("raster declares zero channels", 12);

  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() - header != count * 4) {
    throw FormatError("raster declares " + std::to_string(count) + " values but payload holds " +
                          std::to_string((bytes.size() - header) / 4) + " (+" +
                          std::to_string((bytes.size() - header) % 4) + " bytes)",
                      header + std::min(count * 4, bytes.size() - header));
  }
  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t off = header + 4 * i;
    const float v = std::bit_cast<float>(detail::read_u32_le(bytes, off));
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw FormatError("raster value outside [0,1]", off);
    }
    values[i] = v;
  }
  return ProbabilityMap(width, height, channels, std::move(values));
}

inline std::vector<unsigned char> encode_raster(const ProbabilityMap& map) {
  std::vector<unsigned char> out(kRasterMagic.begin(), kRasterMagic.end());
  out.reserve(16 + map.values().size() * 4);
  detail::write_u32_le(out, map.width());
  detail::write_u32_le(out, map.height());
  detail::write_u32_le(out, map.channels());
  for (float v : map.values()) detail::write_u32_le(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

// Single-channel map from a P5 PGM with maxval 255.
inline ProbabilityMap parse_pgm(std::span<const unsigned char> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw FormatError("not a P5 PGM", 0);
  }
  std::size_t pos = 2;
  const auto width = detail::pgm_token(bytes, pos, "width");
  const auto height = detail::pgm_token(bytes, pos, "height");
  const std::size_t maxval_at = pos;
  const auto maxval = detail::pgm_token(bytes, pos, "maxval");
  if (maxval != 255) throw FormatError("PGM maxval must be 255", maxval_at);
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw FormatError("PGM header must end with one whitespace byte", pos);
  }
  ++pos;
  if (width < 2 || height < 2) throw FormatError("PGM dimensions below 2x2", 2);
  const std::size_t count = width * height;
  if (bytes.size() - pos != count) {
    throw FormatError("PGM declares " + std::to_string(count) + " pixels but payload holds " +
                          std::to_string(bytes.size() - pos),
                      pos + std::min(count, bytes.size() - pos));
  }
  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = static_cast<float>(bytes[pos + i] / 255.0);
  return ProbabilityMap(static_cast<std::uint32_t>(width), static_cast<std::uint32_t>(height), 1,
                        std::move(values));
}

inline std::vector<unsigned char> encode_pgm(const ProbabilityMap& map, std::uint32_t channel) {
  const std::string header =
      "P5\n" + std::to_string(map.width()) + " " + std::to_string(map.height()) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  for (std::uint32_t y = 0; y < map.height(); ++y) {
    for (float v : map.row(channel, y)) {
      out.push_back(static_cast<unsigned char>(std::lround(v * 255.0)));
    }
  }
  return out;
}

// Loads either format, chosen by content. PGM yields a single channel.
inline ProbabilityMap load_map(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return parse_pgm(bytes);
  return parse_raster(bytes);
}

// Stacks one PGM per channel into a multi-channel map.
inline ProbabilityMap load_pgm_channels(std::span<const std::filesystem::path> paths) {
  if (paths.empty()) throw PreconditionError("no PGM channels given");
  std::vector<float> values;
  std::uint32_t width = 0, height = 0;
  for (const auto& p : paths) {
    const auto bytes = detail::read_file_bytes(p);
    const auto channel = parse_pgm(bytes);
    if (values.empty()) {
      width = channel.width();
      height = channel.height();
    } else if (channel.width() != width || channel.height() != height) {
      throw FormatError("PGM channel " + p.string() + " size differs from first channel", 2);
    }
    values.insert(values.end(), channel.values().begin(), channel.values().end());
  }
  return ProbabilityMap(width, height, static_cast<std::uint32_t>(paths.size()), std::move(values));
}

inline void write_bytes(const std::filesystem::path& path, std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline void save_map(const ProbabilityMap& map, const std::filesystem::path& path) {
  write_bytes(path, encode_raster(map));
}

}  // namespace lanetrack
