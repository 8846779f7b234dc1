#pragma once

// Deterministic reference codec: orthonormal 2-D DCT-II of the image scaled
// to [0, 1], truncated to the first m coefficients in zigzag order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "latentseal/error.hpp"
#include "latentseal/image.hpp"
#include "latentseal/latent.hpp"

namespace latentseal {

/// Coefficient grid of an H x W transform, row-major (row = vertical frequency).
struct DctCoefficients {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;
};

namespace detail {

/// basis[k*n + i] = alpha(k) * cos(pi * (2i + 1) * k / (2n))
inline std::vector<double> dct_basis(std::size_t n) {
  std::vector<double> basis(n * n);
  const double dc = std::sqrt(1.0 / static_cast<double>(n));
  const double ac = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double alpha = k == 0 ? dc : ac;
    for (std::size_t i = 0; i < n; ++i) {
      const double angle = std::numbers::pi * static_cast<double>((2 * i + 1) * k) / static_cast<double>(2 * n);
      basis[k * n + i] = alpha * std::cos(angle);
    }
  }
  return basis;
}

// out = left * in, where left is n x n and in is n x cols (row-major).
inline std::vector<double> left_multiply(std::span<const double> left, std::span<const double> in, std::size_t n,
                                         std::size_t cols) {
  std::vector<double> out(n * cols, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double* dst = out.data() + r * cols;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = left[r * n + k];
      const double* src = in.data() + k * cols;
      for (std::size_t c = 0; c < cols; ++c) dst[c] += w * src[c];
    }
  }
  return out;
}

// out = in * right^T, where in is rows x n and right is n x n.
inline std::vector<double> right_multiply_transposed(std::span<const double> in, std::span<const double> right,
                                                     std::size_t rows, std::size_t n) {
  std::vector<double> out(rows * n, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* src = in.data() + r * n;
    for (std::size_t k = 0; k < n; ++k) {
      const double* basis = right.data() + k * n;
      double acc = 0.0;
      for (std::size_t c = 0; c < n; ++c) acc += src[c] * basis[c];
      out[r * n + k] = acc;
    }
  }
  return out;
}

inline std::vector<double> transpose(std::span<const double> m, std::size_t n) {
  std::vector<double> t(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) t[c * n + r] = m[r * n + c];
  return t;
}

}  // namespace detail

/// Full-precision forward transform, no truncation or float rounding.
inline DctCoefficients dct_forward(const GrayImage& img) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  std::vector<double> x(img.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = img.pixels()[i] / 255.0;
  const auto basis_h = detail::dct_basis(h);
  const auto basis_w = detail::dct_basis(w);
  auto cols_done = detail::left_multiply(basis_h, x, h, w);
  return {w, h, detail::right_multiply_transposed(cols_done, basis_w, h, w)};
}

/// Inverse transform back to the [0, 1]-scaled pixel domain.
inline std::vector<double> dct_inverse(const DctCoefficients& coeffs) {
  const std::size_t w = coeffs.width;
  const std::size_t h = coeffs.height;
  const auto basis_h_t = detail::transpose(detail::dct_basis(h), h);
  const auto basis_w_t = detail::transpose(detail::dct_basis(w), w);
  auto rows_done = detail::left_multiply(basis_h_t, coeffs.values, h, w);
  return detail::right_multiply_transposed(rows_done, basis_w_t, h, w);
}

/// Grid indices in zigzag order: anti-diagonals of increasing frequency,
/// alternating direction, starting (0,0), (0,1), (1,0), (2,0), (1,1), (0,2)...
inline std::vector<std::size_t> zigzag_order(std::size_t width, std::size_t height) {
  std::vector<std::size_t> order;
  order.reserve(width * height);
  for (std::size_t diag = 0; diag + 1 < width + height; ++diag) {
    const std::size_t row_lo = diag >= width ? diag - width + 1 : 0;
    const std::size_t row_hi = std::min(diag, height - 1);
    if (diag % 2 == 0) {
      for (std::size_t row = row_hi + 1; row-- > row_lo;) order.push_back(row * width + (diag - row));
    } else {
      for (std::size_t row = row_lo; row <= row_hi; ++row) order.push_back(row * width + (diag - row));
    }
  }
  return order;
}

inline LatentVector dct_encode(const GrayImage& img, std::size_t m) {
  if (m == 0) fail(ErrorKind::InvalidArgument, "latent size must be >= 1");
  if (m > img.size()) fail(ErrorKind::MTooLarge, "m exceeds width*height");
  const auto coeffs = dct_forward(img);
  const auto order = zigzag_order(img.width(), img.height());
  LatentVector v;
  v.values.reserve(m);
  for (std::size_t i = 0; i < m; ++i) v.values.push_back(round_to_f32(coeffs.values[order[i]]));
  return v;
}

/// Unscaled [0, 1] reconstruction before rounding; exposed for truncation analysis.
inline std::vector<double> dct_reconstruct(const LatentVector& v, std::size_t width, std::size_t height) {
  if (v.size() > width * height) fail(ErrorKind::MTooLarge, "latent longer than width*height");
  require_finite(v);
  DctCoefficients coeffs{width, height, std::vector<double>(width * height, 0.0)};
  const auto order = zigzag_order(width, height);
  for (std::size_t i = 0; i < v.size(); ++i) coeffs.values[order[i]] = v.values[i];
  return dct_inverse(coeffs);
}

inline GrayImage dct_decode(const LatentVector& v, std::size_t width, std::size_t height) {
  const auto unit = dct_reconstruct(v, width, height);
  GrayImage img(width, height);
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = to_pixel(unit[i] * 255.0);
  return img;
}

}  // namespace latentseal
