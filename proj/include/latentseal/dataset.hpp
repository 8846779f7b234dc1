#pragma once

// Seeded synthetic grayscale images for desk-scale codec training. Index 0 is
// always the smooth-gradient reference image.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "latentseal/error.hpp"
#include "latentseal/image.hpp"
#include "latentseal/pnm.hpp"

namespace latentseal {

namespace detail {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline double axis(std::size_t i, std::size_t n) {
  return n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
}

}  // namespace detail

/// Tilted ramp plus one low-frequency bump; values stay inside [0.1, 0.9] * 255.
inline GrayImage smooth_gradient(std::size_t size) {
  GrayImage img(size, size);
  for (std::size_t r = 0; r < size; ++r) {
    const double t = detail::axis(r, size);
    for (std::size_t c = 0; c < size; ++c) {
      const double u = detail::axis(c, size);
      const double v = 0.1 + 0.55 * (0.6 * u + 0.4 * t) +
                       0.25 * std::sin(std::numbers::pi * u) * std::sin(std::numbers::pi * t);
      img.at(r, c) = to_pixel(255.0 * v);
    }
  }
  return img;
}

/// Random mixture of a linear gradient, Gaussian blobs and a sinusoidal stripe pattern.
inline GrayImage synthetic_image(std::size_t size, std::mt19937_64& rng) {
  const double angle = detail::uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double ramp = detail::uniform(rng, 0.1, 0.5);
  const double base = detail::uniform(rng, 0.2, 0.6);

  struct Blob {
    double cx, cy, radius, amp;
  };
  std::vector<Blob> blobs(1 + rng() % 4);
  for (auto& b : blobs) {
    b = {detail::uniform(rng, 0.0, 1.0), detail::uniform(rng, 0.0, 1.0), detail::uniform(rng, 0.05, 0.3),
         detail::uniform(rng, -0.4, 0.4)};
  }
  const double stripe_amp = detail::uniform(rng, 0.0, 0.2);
  const double stripe_freq = detail::uniform(rng, 1.0, 6.0);
  const double stripe_dir = detail::uniform(rng, 0.0, std::numbers::pi);
  const double stripe_phase = detail::uniform(rng, 0.0, 2.0 * std::numbers::pi);

  GrayImage img(size, size);
  for (std::size_t r = 0; r < size; ++r) {
    const double y = detail::axis(r, size);
    for (std::size_t c = 0; c < size; ++c) {
      const double x = detail::axis(c, size);
      double v = base + ramp * ((x - 0.5) * std::cos(angle) + (y - 0.5) * std::sin(angle));
      for (const auto& b : blobs) {
        const double d2 = (x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy);
        v += b.amp * std::exp(-d2 / (2.0 * b.radius * b.radius));
      }
      const double along = x * std::cos(stripe_dir) + y * std::sin(stripe_dir);
      v += stripe_amp * std::sin(2.0 * std::numbers::pi * stripe_freq * along + stripe_phase);
      img.at(r, c) = to_pixel(255.0 * v);
    }
  }
  return img;
}

/// `count` images; image 0 is smooth_gradient(size), the rest are synthetic.
inline std::vector<GrayImage> make_dataset(std::size_t count, std::size_t size, std::uint64_t seed) {
  if (size == 0) fail(ErrorKind::InvalidArgument, "image size must be >= 1");
  std::vector<GrayImage> images;
  images.reserve(count);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    images.push_back(i == 0 ? smooth_gradient(size) : synthetic_image(size, rng));
  }
  return images;
}

inline std::string dataset_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "img_%04zu.pgm", index);
  return buf;
}

inline void write_dataset(const std::filesystem::path& dir, std::size_t count, std::size_t size,
                          std::uint64_t seed) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create '" + dir.string() + "'");
  const auto images = make_dataset(count, size, seed);
  for (std::size_t i = 0; i < images.size(); ++i) write_pgm(dir / dataset_file_name(i), images[i]);
}

/// Every *.pgm / *.ppm / *.pnm file in `dir`, sorted by name.
inline std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) fail(ErrorKind::IoError, "cannot list '" + dir.string() + "'");
  std::vector<std::filesystem::path> out;
  for (const auto& entry : it) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".ppm" || ext == ".pnm")) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace latentseal
