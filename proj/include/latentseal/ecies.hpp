#pragma once

// ECIES over secp256r1.
//
// KEM: ephemeral k_e, K = k_e*G (33-byte compressed), shared = x(k_e*Pub).
// KDF: HKDF-SHA-256(salt = "", ikm = shared || K, info = "latentseal-v1")
//      -> 32-byte AES key || 12-byte GCM nonce.
// DEM: AES-256-GCM, empty AAD, 16-byte tag.
//
// Serialized ciphertext is K || C || T with no framing.

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/kdf.h>
#include <openssl/obj_mac.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latentseal/error.hpp"

namespace latentseal {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kScalarBytes = 32;
inline constexpr std::size_t kPointBytes = 33;
inline constexpr std::size_t kTagBytes = 16;
inline constexpr std::size_t kAeadKeyBytes = 32;
inline constexpr std::size_t kNonceBytes = 12;
inline constexpr std::size_t kEciesOverhead = kPointBytes + kTagBytes;
inline constexpr std::string_view kKdfInfo = "latentseal-v1";

using Seed32 = std::array<std::uint8_t, 32>;

struct PrivateKey {
  std::array<std::uint8_t, kScalarBytes> scalar{};  // big-endian
  bool operator==(const PrivateKey&) const = default;
};

struct PublicKey {
  std::array<std::uint8_t, kPointBytes> point{};  // SEC1 compressed
  bool operator==(const PublicKey&) const = default;
};

struct EciesKeypair {
  PrivateKey priv;
  PublicKey pub;
};

/// The {K, C, T} tuple.
struct EciesCiphertext {
  std::array<std::uint8_t, kPointBytes> ephemeral{};
  Bytes body;
  std::array<std::uint8_t, kTagBytes> tag{};

  std::size_t serialized_size() const noexcept { return kPointBytes + body.size() + kTagBytes; }
  bool operator==(const EciesCiphertext&) const = default;
};

namespace detail {

struct GroupDeleter {
  void operator()(EC_GROUP* g) const noexcept { EC_GROUP_free(g); }
};
struct PointDeleter {
  void operator()(EC_POINT* p) const noexcept { EC_POINT_free(p); }
};
struct BnDeleter {
  void operator()(BIGNUM* b) const noexcept { BN_clear_free(b); }
};
struct BnCtxDeleter {
  void operator()(BN_CTX* c) const noexcept { BN_CTX_free(c); }
};
struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const noexcept { EVP_CIPHER_CTX_free(c); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* c) const noexcept { EVP_PKEY_CTX_free(c); }
};

using GroupPtr = std::unique_ptr<EC_GROUP, GroupDeleter>;
using PointPtr = std::unique_ptr<EC_POINT, PointDeleter>;
using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;
using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxDeleter>;
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;
using PkeyCtxPtr = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter>;

inline void check(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::InvalidArgument, std::string("OpenSSL failure: ") + what);
}

/// Read-only after construction; OpenSSL group objects are safe to share for const use.
inline const EC_GROUP* curve() {
  static const GroupPtr group{EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1)};
  check(group != nullptr, "EC_GROUP_new_by_curve_name");
  return group.get();
}

inline BnPtr bn_from_bytes(std::span<const std::uint8_t> bytes) {
  BnPtr bn{BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr)};
  check(bn != nullptr, "BN_bin2bn");
  return bn;
}

inline bool scalar_in_range(std::span<const std::uint8_t, kScalarBytes> candidate) {
  const BnPtr k = bn_from_bytes(candidate);
  return !BN_is_zero(k.get()) && BN_cmp(k.get(), EC_GROUP_get0_order(curve())) < 0;
}

inline Seed32 sha256(std::span<const std::uint8_t> data) {
  Seed32 out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

/// Rejection sampling: the seed itself is the first candidate, each rejected
/// candidate is replaced by its SHA-256 digest.
inline PrivateKey scalar_from_seed(const Seed32& seed) {
  Seed32 candidate = seed;
  while (!scalar_in_range(candidate)) candidate = sha256(candidate);
  PrivateKey key;
  key.scalar = candidate;
  return key;
}

inline Seed32 system_seed() {
  Seed32 seed{};
  if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1) {
    fail(ErrorKind::EntropyFailure, "RAND_bytes failed");
  }
  return seed;
}

inline PointPtr decode_point(std::span<const std::uint8_t, kPointBytes> encoded, ErrorKind on_error) {
  if (encoded[0] != 0x02 && encoded[0] != 0x03) fail(on_error, "point is not SEC1-compressed");
  PointPtr p{EC_POINT_new(curve())};
  check(p != nullptr, "EC_POINT_new");
  BnCtxPtr ctx{BN_CTX_new()};
  if (EC_POINT_oct2point(curve(), p.get(), encoded.data(), encoded.size(), ctx.get()) != 1 ||
      EC_POINT_is_at_infinity(curve(), p.get()) ||
      EC_POINT_is_on_curve(curve(), p.get(), ctx.get()) != 1) {
    fail(on_error, "point does not decode to a curve point");
  }
  return p;
}

inline std::array<std::uint8_t, kPointBytes> encode_point(const EC_POINT* p) {
  std::array<std::uint8_t, kPointBytes> out{};
  BnCtxPtr ctx{BN_CTX_new()};
  const std::size_t n =
      EC_POINT_point2oct(curve(), p, POINT_CONVERSION_COMPRESSED, out.data(), out.size(), ctx.get());
  check(n == kPointBytes, "EC_POINT_point2oct");
  return out;
}

inline PointPtr mul_generator(const PrivateKey& k) {
  const BnPtr scalar = bn_from_bytes(k.scalar);
  PointPtr p{EC_POINT_new(curve())};
  BnCtxPtr ctx{BN_CTX_new()};
  check(EC_POINT_mul(curve(), p.get(), scalar.get(), nullptr, nullptr, ctx.get()) == 1, "EC_POINT_mul");
  return p;
}

/// x-coordinate of k*P, 32 bytes big-endian.
inline std::array<std::uint8_t, 32> ecdh_x(const PrivateKey& k, const EC_POINT* peer) {
  const BnPtr scalar = bn_from_bytes(k.scalar);
  PointPtr shared{EC_POINT_new(curve())};
  BnCtxPtr ctx{BN_CTX_new()};
  check(EC_POINT_mul(curve(), shared.get(), nullptr, peer, scalar.get(), ctx.get()) == 1, "EC_POINT_mul");
  check(!EC_POINT_is_at_infinity(curve(), shared.get()), "shared point at infinity");
  BnPtr x{BN_new()};
  check(EC_POINT_get_affine_coordinates(curve(), shared.get(), x.get(), nullptr, ctx.get()) == 1,
        "EC_POINT_get_affine_coordinates");
  std::array<std::uint8_t, 32> out{};
  check(BN_bn2binpad(x.get(), out.data(), static_cast<int>(out.size())) == 32, "BN_bn2binpad");
  return out;
}

inline void validate_private(const PrivateKey& k) {
  if (!scalar_in_range(k.scalar)) fail(ErrorKind::InvalidKey, "private scalar outside [1, n)");
}

}  // namespace detail

/// HKDF-SHA-256 with an empty salt.
inline Bytes hkdf_sha256(std::span<const std::uint8_t> ikm, std::span<const std::uint8_t> info,
                         std::size_t length) {
  detail::PkeyCtxPtr ctx{EVP_PKEY_CTX_new_id(EVP_PKEY_HKDF, nullptr)};
  detail::check(ctx != nullptr, "EVP_PKEY_CTX_new_id(HKDF)");
  detail::check(EVP_PKEY_derive_init(ctx.get()) == 1, "EVP_PKEY_derive_init");
  detail::check(EVP_PKEY_CTX_set_hkdf_md(ctx.get(), EVP_sha256()) == 1, "set_hkdf_md");
  detail::check(EVP_PKEY_CTX_set1_hkdf_key(ctx.get(), ikm.data(), static_cast<int>(ikm.size())) == 1,
                "set1_hkdf_key");
  if (!info.empty()) {
    detail::check(EVP_PKEY_CTX_add1_hkdf_info(ctx.get(), info.data(), static_cast<int>(info.size())) == 1,
                  "add1_hkdf_info");
  }
  Bytes out(length);
  std::size_t out_len = length;
  detail::check(EVP_PKEY_derive(ctx.get(), out.data(), &out_len) == 1 && out_len == length, "EVP_PKEY_derive");
  return out;
}

inline PublicKey public_from_private(const PrivateKey& priv) {
  detail::validate_private(priv);
  PublicKey pub;
  pub.point = detail::encode_point(detail::mul_generator(priv).get());
  return pub;
}

/// Deterministic under a fixed seed; otherwise draws from the system CSPRNG.
inline EciesKeypair keygen(std::optional<Seed32> seed = std::nullopt) {
  EciesKeypair kp;
  kp.priv = detail::scalar_from_seed(seed ? *seed : detail::system_seed());
  kp.pub = public_from_private(kp.priv);
  return kp;
}

inline void validate_public(const PublicKey& pub) {
  detail::decode_point(pub.point, ErrorKind::InvalidPublicKey);
}

namespace detail {

struct DemKeys {
  std::array<std::uint8_t, kAeadKeyBytes> key{};
  std::array<std::uint8_t, kNonceBytes> nonce{};
};

inline DemKeys derive_dem_keys(const std::array<std::uint8_t, 32>& shared,
                               const std::array<std::uint8_t, kPointBytes>& ephemeral) {
  std::array<std::uint8_t, 32 + kPointBytes> ikm{};
  std::copy(shared.begin(), shared.end(), ikm.begin());
  std::copy(ephemeral.begin(), ephemeral.end(), ikm.begin() + 32);
  const auto* info = reinterpret_cast<const std::uint8_t*>(kKdfInfo.data());
  const Bytes okm = hkdf_sha256(ikm, std::span(info, kKdfInfo.size()), kAeadKeyBytes + kNonceBytes);
  DemKeys keys;
  std::copy_n(okm.begin(), kAeadKeyBytes, keys.key.begin());
  std::copy_n(okm.begin() + kAeadKeyBytes, kNonceBytes, keys.nonce.begin());
  return keys;
}

}  // namespace detail

/// `eph_seed` pins the ephemeral scalar (test vectors only; reusing it reuses the nonce).
inline EciesCiphertext ecies_encrypt(std::span<const std::uint8_t> plaintext, const PublicKey& pub,
                                     std::optional<Seed32> eph_seed = std::nullopt) {
  if (plaintext.empty()) fail(ErrorKind::InvalidArgument, "plaintext must be non-empty");
  const detail::PointPtr recipient = detail::decode_point(pub.point, ErrorKind::InvalidPublicKey);

  const EciesKeypair eph = keygen(eph_seed);
  EciesCiphertext ct;
  ct.ephemeral = eph.pub.point;
  const auto keys = detail::derive_dem_keys(detail::ecdh_x(eph.priv, recipient.get()), ct.ephemeral);

  detail::CipherCtxPtr ctx{EVP_CIPHER_CTX_new()};
  detail::check(ctx != nullptr, "EVP_CIPHER_CTX_new");
  detail::check(EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) == 1, "EncryptInit");
  detail::check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceBytes, nullptr) == 1, "SET_IVLEN");
  detail::check(EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, keys.key.data(), keys.nonce.data()) == 1,
                "EncryptInit key");
  ct.body.resize(plaintext.size());
  int len = 0;
  detail::check(EVP_EncryptUpdate(ctx.get(), ct.body.data(), &len, plaintext.data(),
                                  static_cast<int>(plaintext.size())) == 1,
                "EncryptUpdate");
  int fin = 0;
  detail::check(EVP_EncryptFinal_ex(ctx.get(), ct.body.data() + len, &fin) == 1, "EncryptFinal");
  detail::check(static_cast<std::size_t>(len + fin) == plaintext.size(), "GCM length");
  detail::check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagBytes, ct.tag.data()) == 1, "GET_TAG");
  return ct;
}

inline Bytes ecies_decrypt(const EciesCiphertext& ct, const PrivateKey& priv) {
  detail::validate_private(priv);
  if (ct.body.empty()) fail(ErrorKind::InvalidArgument, "ciphertext body is empty");
  const detail::PointPtr ephemeral = detail::decode_point(ct.ephemeral, ErrorKind::InvalidPoint);
  const auto keys = detail::derive_dem_keys(detail::ecdh_x(priv, ephemeral.get()), ct.ephemeral);

  detail::CipherCtxPtr ctx{EVP_CIPHER_CTX_new()};
  detail::check(ctx != nullptr, "EVP_CIPHER_CTX_new");
  detail::check(EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) == 1, "DecryptInit");
  detail::check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceBytes, nullptr) == 1, "SET_IVLEN");
  detail::check(EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, keys.key.data(), keys.nonce.data()) == 1,
                "DecryptInit key");
  Bytes plain(ct.body.size());
  int len = 0;
  detail::check(EVP_DecryptUpdate(ctx.get(), plain.data(), &len, ct.body.data(),
                                  static_cast<int>(ct.body.size())) == 1,
                "DecryptUpdate");
  std::array<std::uint8_t, kTagBytes> tag = ct.tag;
  detail::check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagBytes, tag.data()) == 1, "SET_TAG");
  int fin = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), plain.data() + len, &fin) != 1) {
    OPENSSL_cleanse(plain.data(), plain.size());
    fail(ErrorKind::AuthFailure, "authentication tag mismatch");
  }
  return plain;
}

inline Bytes serialize(const EciesCiphertext& ct) {
  Bytes out;
  out.reserve(ct.serialized_size());
  out.insert(out.end(), ct.ephemeral.begin(), ct.ephemeral.end());
  out.insert(out.end(), ct.body.begin(), ct.body.end());
  out.insert(out.end(), ct.tag.begin(), ct.tag.end());
  return out;
}

/// Splits K || C || T. Only the length is checked here; K is validated on decrypt.
inline EciesCiphertext deserialize_ciphertext(std::span<const std::uint8_t> bytes) {
  if (bytes.size() <= kEciesOverhead) fail(ErrorKind::Format, "ciphertext shorter than K || T");
  EciesCiphertext ct;
  std::copy_n(bytes.begin(), kPointBytes, ct.ephemeral.begin());
  ct.body.assign(bytes.begin() + kPointBytes, bytes.end() - kTagBytes);
  std::copy(bytes.end() - kTagBytes, bytes.end(), ct.tag.begin());
  return ct;
}

// ---------------------------------------------------------------------------
// Key files: lowercase hex plus a trailing newline.

namespace detail {

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0f]);
  }
  return out;
}

inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

template <std::size_t N>
std::array<std::uint8_t, N> from_hex_file(std::string_view text, const char* what) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.remove_suffix(1);
  if (text.size() != 2 * N) {
    fail(ErrorKind::InvalidKey, std::string(what) + " must be " + std::to_string(2 * N) + " hex characters");
  }
  std::array<std::uint8_t, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    const int hi = hex_value(text[2 * i]);
    const int lo = hex_value(text[2 * i + 1]);
    if (hi < 0 || lo < 0) fail(ErrorKind::InvalidKey, std::string(what) + " contains a non-hex character");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

}  // namespace detail

inline std::string format_private_key(const PrivateKey& k) { return detail::to_hex(k.scalar) + "\n"; }
inline std::string format_public_key(const PublicKey& k) { return detail::to_hex(k.point) + "\n"; }

inline PrivateKey parse_private_key(std::string_view text) {
  PrivateKey k;
  k.scalar = detail::from_hex_file<kScalarBytes>(text, "private key");
  detail::validate_private(k);
  return k;
}

inline PublicKey parse_public_key(std::string_view text) {
  PublicKey k;
  k.point = detail::from_hex_file<kPointBytes>(text, "public key");
  validate_public(k);
  return k;
}

}  // namespace latentseal
