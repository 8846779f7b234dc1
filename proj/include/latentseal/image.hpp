#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "latentseal/error.hpp"

namespace latentseal {

/// Single-channel 8-bit raster, row-major.
class GrayImage {
 public:
  GrayImage() = default;

  GrayImage(std::size_t width, std::size_t height, std::uint8_t fill = 0)
      : width_(width), height_(height), pixels_(checked_area(width, height), fill) {}

  GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (pixels_.size() != checked_area(width, height)) {
      fail(ErrorKind::DimMismatch, "pixel buffer size does not equal width*height");
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  std::uint8_t& at(std::size_t row, std::size_t col) { return pixels_[row * width_ + col]; }
  std::uint8_t at(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  bool same_shape(const GrayImage& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const GrayImage&) const = default;

 private:
  static std::size_t checked_area(std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) fail(ErrorKind::InvalidArgument, "image dimensions must be >= 1");
    return width * height;
  }

  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Rounds half-to-even and clamps into [0, 255].
inline std::uint8_t to_pixel(double value) {
  double r = std::nearbyint(value);
  if (!(r >= 0.0)) r = 0.0;  // also maps NaN to 0
  if (r > 255.0) r = 255.0;
  return static_cast<std::uint8_t>(r);
}

/// BT.601 luma, rounded half-to-even.
inline std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return to_pixel(0.299 * r + 0.587 * g + 0.114 * b);
}

}  // namespace latentseal
