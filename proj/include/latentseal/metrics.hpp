#pragma once

// Reconstruction quality (SSIM, MSE, PSNR) and wall-clock timing.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>

#include "latentseal/error.hpp"
#include "latentseal/image.hpp"

namespace latentseal {

inline double mse(const GrayImage& a, const GrayImage& b) {
  if (!a.same_shape(b)) fail(ErrorKind::DimMismatch, "images differ in size");
  double sum = 0.0;
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = static_cast<double>(pa[i]) - static_cast<double>(pb[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(pa.size());
}

/// 10 log10((2^bits - 1)^2 / mse); +inf when mse is zero.
inline double psnr_from_mse(double mse_value, unsigned bits = 8) {
  if (mse_value < 0.0 || bits == 0 || bits > 32) fail(ErrorKind::InvalidArgument, "bad PSNR inputs");
  if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
  const double peak = std::ldexp(1.0, static_cast<int>(bits)) - 1.0;
  return 10.0 * std::log10(peak * peak / mse_value);
}

inline double psnr(const GrayImage& a, const GrayImage& b, unsigned bits = 8) {
  return psnr_from_mse(mse(a, b), bits);
}

struct SsimParams {
  enum class Mode { Global, Windowed };

  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
  Mode mode = Mode::Global;
  std::size_t window = 7;  // side of the uniform window in windowed mode

  double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }

  static SsimParams windowed(std::size_t side) {
    SsimParams p;
    p.mode = Mode::Windowed;
    p.window = side;
    return p;
  }
};

namespace detail {

// Population moments over one rectangle, then the structural similarity
// formula. Used for both modes so full-image windows agree exactly with the
// global value.
inline double ssim_region(const GrayImage& a, const GrayImage& b, std::size_t row0, std::size_t col0,
                          std::size_t rows, std::size_t cols, double c1, double c2) {
  const double n = static_cast<double>(rows * cols);
  double sum_a = 0.0, sum_b = 0.0;
  for (std::size_t r = row0; r < row0 + rows; ++r) {
    for (std::size_t c = col0; c < col0 + cols; ++c) {
      sum_a += a.at(r, c);
      sum_b += b.at(r, c);
    }
  }
  const double mu_a = sum_a / n;
  const double mu_b = sum_b / n;
  double var_a = 0.0, var_b = 0.0, cov = 0.0;
  for (std::size_t r = row0; r < row0 + rows; ++r) {
    for (std::size_t c = col0; c < col0 + cols; ++c) {
      const double da = a.at(r, c) - mu_a;
      const double db = b.at(r, c) - mu_b;
      var_a += da * da;
      var_b += db * db;
      cov += da * db;
    }
  }
  var_a /= n;
  var_b /= n;
  cov /= n;
  const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
  const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
  return num / den;
}

}  // namespace detail

inline double ssim(const GrayImage& a, const GrayImage& b, const SsimParams& params = {}) {
  if (!a.same_shape(b)) fail(ErrorKind::DimMismatch, "images differ in size");
  const double c1 = params.c1();
  const double c2 = params.c2();
  if (!(c1 > 0.0 && c2 > 0.0)) fail(ErrorKind::InvalidArgument, "SSIM stabilizers must be positive");
  if (params.mode == SsimParams::Mode::Global) {
    return detail::ssim_region(a, b, 0, 0, a.height(), a.width(), c1, c2);
  }
  const std::size_t w = params.window;
  if (w == 0 || w > a.width() || w > a.height()) fail(ErrorKind::WindowTooLarge, "SSIM window exceeds image");
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r + w <= a.height(); ++r) {
    for (std::size_t c = 0; c + w <= a.width(); ++c) {
      total += detail::ssim_region(a, b, r, c, w, w, c1, c2);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

// ---------------------------------------------------------------------------
// Timing

template <class T>
struct Timed {
  T result;
  double seconds;
};

template <>
struct Timed<void> {
  double seconds;
};

/// Runs `f` and measures it on the steady clock.
template <class F>
auto timed(F&& f) {
  using R = std::invoke_result_t<F>;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  if constexpr (std::is_void_v<R>) {
    std::forward<F>(f)();
    return Timed<void>{elapsed()};
  } else {
    R r = std::forward<F>(f)();
    const double s = elapsed();
    return Timed<R>{std::move(r), s};
  }
}

// ---------------------------------------------------------------------------
// One evaluation row.

struct QualityReport {
  double ssim = 0.0;
  double mse = 0.0;
  double psnr = 0.0;  // dB, +inf for identical images
  double encrypt_seconds = 0.0;
  double decrypt_seconds = 0.0;
};

inline constexpr const char* kQualityCsvHeader = "ssim,psnr_db,mse,encrypt_s,decrypt_s";

namespace detail {

inline std::string sig6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

inline std::string to_csv_row(const QualityReport& r) {
  using detail::sig6;
  return sig6(r.ssim) + "," + sig6(r.psnr) + "," + sig6(r.mse) + "," + sig6(r.encrypt_seconds) + "," +
         sig6(r.decrypt_seconds);
}

}  // namespace latentseal
