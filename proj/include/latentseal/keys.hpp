#pragma once

// The three keys of the scheme: PUB_KEY / PRIV_KEY for ECIES and SYM_KEY for
// the Henon permutation.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>

#include "latentseal/ecies.hpp"
#include "latentseal/file_io.hpp"
#include "latentseal/henon.hpp"

namespace latentseal {

/// Region SYM_KEY points are drawn from.
inline constexpr double kSymKeyMaxX = 0.5;
inline constexpr double kSymKeyMaxY = 0.2;
/// Generated keys must survive this many post-burn-in steps, the largest m a payload header can carry.
inline constexpr std::size_t kSymKeyValidationLength = 0xffff;

struct KeySet {
  EciesKeypair ecies;
  SymKey sym;
};

/// Uniform draw from |x0| <= 0.5, |y0| <= 0.2 with classical parameters,
/// rejected and redrawn if the orbit escapes.
inline SymKey random_sym_key(std::mt19937_64& rng, std::uint64_t burn_in = kDefaultBurnIn,
                             std::size_t validate_for = kSymKeyValidationLength) {
  for (;;) {
    SymKey key;
    key.x0 = (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0) * kSymKeyMaxX;
    key.y0 = (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0) * kSymKeyMaxY;
    key.burn_in = burn_in;
    try {
      validate_sym_key(key, validate_for);
      return key;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Divergence) throw;
    }
  }
}

inline KeySet generate_keys(std::optional<std::uint64_t> seed = std::nullopt) {
  std::uint64_t sym_seed = 0;
  std::optional<Seed32> ecies_seed;
  if (seed) {
    Bytes material{'l', 's', '-', 'k', 'e', 'y', 'g', 'e', 'n'};
    for (int i = 0; i < 8; ++i) material.push_back(static_cast<std::uint8_t>(*seed >> (8 * i)));
    ecies_seed = detail::sha256(material);
    sym_seed = *seed;
  } else {
    const Seed32 entropy = detail::system_seed();
    for (int i = 0; i < 8; ++i) sym_seed = (sym_seed << 8) | entropy[static_cast<std::size_t>(i)];
  }
  std::mt19937_64 rng(sym_seed);
  return {keygen(ecies_seed), random_sym_key(rng)};
}

/// Writes <prefix>.priv, <prefix>.pub and <prefix>.sym.
inline void write_keys(const std::string& prefix, const KeySet& keys) {
  write_text_atomic(prefix + ".priv", format_private_key(keys.ecies.priv));
  write_text_atomic(prefix + ".pub", format_public_key(keys.ecies.pub));
  write_text_atomic(prefix + ".sym", format_sym_key(keys.sym));
}

inline SymKey load_sym_key(const std::filesystem::path& path) { return parse_sym_key(read_text_file(path)); }
inline PublicKey load_public_key(const std::filesystem::path& path) { return parse_public_key(read_text_file(path)); }
inline PrivateKey load_private_key(const std::filesystem::path& path) {
  return parse_private_key(read_text_file(path));
}

}  // namespace latentseal
