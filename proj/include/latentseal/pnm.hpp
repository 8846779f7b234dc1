#pragma once

// Binary PNM: P5 graymaps are read and written; P6 pixmaps are accepted on
// ingest and reduced to luma. Only maxval 255 is supported.

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "latentseal/error.hpp"
#include "latentseal/file_io.hpp"
#include "latentseal/image.hpp"

namespace latentseal {

namespace detail {

class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::string magic() {
    if (data_.size() < 2) fail(ErrorKind::Format, "file too short for a PNM header");
    pos_ = 2;
    return std::string{static_cast<char>(data_[0]), static_cast<char>(data_[1])};
  }

  std::size_t number(const char* what) {
    skip_space_and_comments();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos_ < data_.size() && std::isdigit(data_[pos_])) {
      value = value * 10 + static_cast<std::size_t>(data_[pos_] - '0');
      if (value > (1u << 24)) fail(ErrorKind::Format, std::string("PNM ") + what + " is too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) fail(ErrorKind::Format, std::string("PNM header is missing the ") + what);
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= data_.size() || !std::isspace(data_[pos_])) {
      fail(ErrorKind::Format, "PNM header must end with a single whitespace byte");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      if (std::isspace(data_[pos_])) {
        ++pos_;
      } else if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline GrayImage decode_pnm(std::span<const std::uint8_t> data) {
  detail::PnmHeaderReader reader(data);
  const std::string magic = reader.magic();
  if (magic != "P5" && magic != "P6") fail(ErrorKind::Format, "unsupported PNM type '" + magic + "'");
  const std::size_t width = reader.number("width");
  const std::size_t height = reader.number("height");
  const std::size_t maxval = reader.number("maxval");
  if (width == 0 || height == 0) fail(ErrorKind::Format, "PNM dimensions must be non-zero");
  if (maxval != 255) fail(ErrorKind::Format, "PNM maxval must be 255, got " + std::to_string(maxval));
  const std::size_t offset = reader.raster_offset();

  const std::size_t channels = magic == "P5" ? 1 : 3;
  const std::size_t expected = width * height * channels;
  if (data.size() - offset < expected) fail(ErrorKind::Format, "PNM raster is truncated");

  GrayImage img(width, height);
  auto out = img.pixels();
  const auto raster = data.subspan(offset, expected);
  if (channels == 1) {
    std::copy(raster.begin(), raster.end(), out.begin());
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = luma(raster[3 * i], raster[3 * i + 1], raster[3 * i + 2]);
    }
  }
  return img;
}

inline Bytes encode_pgm(const GrayImage& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

inline GrayImage read_image(const std::filesystem::path& path) { return decode_pnm(read_file(path)); }

inline void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  write_file_atomic(path, encode_pgm(img));
}

}  // namespace latentseal
