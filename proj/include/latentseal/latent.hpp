#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "latentseal/error.hpp"

namespace latentseal {

inline constexpr std::size_t kDefaultLatentSize = 100;

/// Compressed representation of an image. Encoders keep every value exactly
/// representable as a 32-bit float so the wire form round-trips bitwise.
struct LatentVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  bool operator==(const LatentVector&) const = default;
};

inline double round_to_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

inline void require_finite(const LatentVector& v) {
  for (double x : v.values) {
    if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, "latent vector contains a non-finite value");
  }
}

}  // namespace latentseal
