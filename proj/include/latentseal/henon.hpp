#pragma once

// Henon-map orbits keyed by a symmetric key, and the argsort permutation
// used to scramble latent vectors.
//
//   x' = 1 - a*x^2 + y
//   y' = b*x

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "latentseal/error.hpp"

namespace latentseal {

/// Orbit components beyond this magnitude are treated as escaped.
inline constexpr double kHenonDivergenceBound = 100.0;
inline constexpr std::uint64_t kDefaultBurnIn = 1000;

struct HenonParams {
  double a = 1.4;
  double b = 0.3;

  bool operator==(const HenonParams&) const = default;
};

struct HenonState {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const HenonState&) const = default;
};

struct SymKey {
  double x0 = 0.0;
  double y0 = 0.0;
  HenonParams params{};
  std::uint64_t burn_in = kDefaultBurnIn;

  bool operator==(const SymKey&) const = default;
};

/// Keyed bijection on {0..m-1}; indices[k] is the source position of output slot k.
struct Permutation {
  std::vector<std::size_t> indices;

  std::size_t size() const noexcept { return indices.size(); }
  bool operator==(const Permutation&) const = default;

  static Permutation identity(std::size_t m) {
    Permutation p;
    p.indices.resize(m);
    std::iota(p.indices.begin(), p.indices.end(), std::size_t{0});
    return p;
  }
};

namespace detail {

inline bool within_guard(double v) noexcept {
  return std::isfinite(v) && std::fabs(v) <= kHenonDivergenceBound;
}

}  // namespace detail

inline bool is_valid(const HenonParams& p) noexcept { return std::isfinite(p.a) && std::isfinite(p.b); }

inline bool is_valid(const HenonState& s) noexcept {
  return detail::within_guard(s.x) && detail::within_guard(s.y);
}

inline bool is_bijection(const Permutation& p) {
  std::vector<bool> seen(p.size(), false);
  for (std::size_t idx : p.indices) {
    if (idx >= p.size() || seen[idx]) return false;
    seen[idx] = true;
  }
  return true;
}

/// One application of the map. Evaluation order is fixed so orbits are bitwise reproducible.
inline HenonState henon_step(const HenonState& state, const HenonParams& params) {
  const double x_sq = state.x * state.x;
  const double ax_sq = params.a * x_sq;
  const double next_x = (1.0 - ax_sq) + state.y;
  const double next_y = params.b * state.x;
  if (!detail::within_guard(next_x) || !detail::within_guard(next_y)) {
    fail(ErrorKind::Divergence, "Henon orbit left the |x|,|y| <= 100 region");
  }
  return {next_x, next_y};
}

/// Checks the key's starting point and that its orbit survives `burn_in + m` steps.
inline void validate_sym_key(const SymKey& key, std::size_t m) {
  if (!is_valid(key.params)) fail(ErrorKind::InvalidKey, "Henon parameters must be finite");
  if (!is_valid(HenonState{key.x0, key.y0})) {
    fail(ErrorKind::InvalidKey, "key point must be finite with |x0|,|y0| <= 100");
  }
  HenonState s{key.x0, key.y0};
  const std::uint64_t steps = key.burn_in + static_cast<std::uint64_t>(m);
  for (std::uint64_t i = 0; i < steps; ++i) s = henon_step(s, key.params);
}

/// Runs the orbit from the key point; invokes `visit(state)` for each of the
/// `n` states after the burn-in.
template <class Visitor>
void henon_orbit(const SymKey& key, std::size_t n, Visitor&& visit) {
  if (!is_valid(key.params)) fail(ErrorKind::InvalidKey, "Henon parameters must be finite");
  HenonState s{key.x0, key.y0};
  if (!is_valid(s)) fail(ErrorKind::InvalidKey, "key point must be finite with |x0|,|y0| <= 100");
  for (std::uint64_t i = 0; i < key.burn_in; ++i) s = henon_step(s, key.params);
  for (std::size_t i = 0; i < n; ++i) {
    s = henon_step(s, key.params);
    visit(s);
  }
}

/// x-components of the n states that follow the burn-in. The key point itself is never emitted.
inline std::vector<double> henon_sequence(const SymKey& key, std::size_t n) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "sequence length must be >= 1");
  std::vector<double> out;
  out.reserve(n);
  henon_orbit(key, n, [&](const HenonState& s) { out.push_back(s.x); });
  return out;
}

/// Ascending argsort; equal values keep their original relative order.
inline Permutation permutation_from_sequence(std::span<const double> seq) {
  if (seq.empty()) fail(ErrorKind::InvalidArgument, "cannot rank an empty sequence");
  for (double v : seq) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "sequence values must be finite");
  }
  Permutation p = Permutation::identity(seq.size());
  std::stable_sort(p.indices.begin(), p.indices.end(),
                   [&](std::size_t lhs, std::size_t rhs) { return seq[lhs] < seq[rhs]; });
  return p;
}

inline Permutation permutation_from_key(const SymKey& key, std::size_t m) {
  const auto seq = henon_sequence(key, m);
  return permutation_from_sequence(seq);
}

/// out[k] = v[p.indices[k]]
template <class T>
std::vector<T> shuffle(std::span<const T> v, const Permutation& p) {
  if (v.size() != p.size()) fail(ErrorKind::LengthMismatch, "vector and permutation lengths differ");
  std::vector<T> out;
  out.reserve(v.size());
  for (std::size_t src : p.indices) out.push_back(v[src]);
  return out;
}

/// out[p.indices[k]] = v[k]
template <class T>
std::vector<T> deshuffle(std::span<const T> v, const Permutation& p) {
  if (v.size() != p.size()) fail(ErrorKind::LengthMismatch, "vector and permutation lengths differ");
  std::vector<T> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[p.indices[k]] = v[k];
  return out;
}

template <class T>
std::vector<T> shuffle(const std::vector<T>& v, const Permutation& p) {
  return shuffle(std::span<const T>(v), p);
}

template <class T>
std::vector<T> deshuffle(const std::vector<T>& v, const Permutation& p) {
  return deshuffle(std::span<const T>(v), p);
}

// ---------------------------------------------------------------------------
// SYM_KEY text format
//
//   line 1: x0 y0
//   line 2: a b        (optional, defaults 1.4 0.3)
//   line 3: burn_in    (optional, default 1000)
//
// Doubles are written in shortest round-trip form.

namespace detail {

inline std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& tok) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) fail(ErrorKind::InvalidKey, "bad number '" + tok + "'");
  return v;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> toks;
  for (std::string t; in >> t;) toks.push_back(t);
  return toks;
}

}  // namespace detail

inline std::string format_sym_key(const SymKey& key) {
  using detail::shortest;
  return shortest(key.x0) + " " + shortest(key.y0) + "\n" + shortest(key.params.a) + " " +
         shortest(key.params.b) + "\n" + std::to_string(key.burn_in) + "\n";
}

inline SymKey parse_sym_key(const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    auto toks = detail::split_ws(line);
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  if (lines.empty() || lines.size() > 3) fail(ErrorKind::InvalidKey, "SYM_KEY must have 1 to 3 lines");

  SymKey key;
  if (lines[0].size() != 2) fail(ErrorKind::InvalidKey, "SYM_KEY line 1 must be 'x0 y0'");
  key.x0 = detail::parse_double(lines[0][0]);
  key.y0 = detail::parse_double(lines[0][1]);
  if (lines.size() >= 2) {
    if (lines[1].size() != 2) fail(ErrorKind::InvalidKey, "SYM_KEY line 2 must be 'a b'");
    key.params.a = detail::parse_double(lines[1][0]);
    key.params.b = detail::parse_double(lines[1][1]);
  }
  if (lines.size() == 3) {
    if (lines[2].size() != 1) fail(ErrorKind::InvalidKey, "SYM_KEY line 3 must be 'burn_in'");
    const std::string& tok = lines[2][0];
    std::uint64_t burn = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), burn);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
      fail(ErrorKind::InvalidKey, "bad burn_in '" + tok + "'");
    }
    key.burn_in = burn;
  }
  if (!is_valid(key.params) || !is_valid(HenonState{key.x0, key.y0})) {
    fail(ErrorKind::InvalidKey, "SYM_KEY values out of range");
  }
  return key;
}

}  // namespace latentseal
