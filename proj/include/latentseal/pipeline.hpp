#pragma once

// Compress-then-encrypt and its inverse:
//
//   encrypt: image -> encode -> Henon permutation -> shuffle -> f32 LE bytes -> ECIES
//   decrypt: ECIES -> f32 LE bytes -> Henon permutation -> deshuffle -> decode -> image
//
// Payload layout (little-endian):
//   "LSP1" | version u8 | codec_id u8 | m u16 | width u16 | height u16 | K(33) | C(4m) | T(16)

#include <bit>
#include <cmath>
#include <optional>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>

#include "latentseal/codec.hpp"
#include "latentseal/ecies.hpp"
#include "latentseal/error.hpp"
#include "latentseal/henon.hpp"
#include "latentseal/image.hpp"
#include "latentseal/latent.hpp"
#include "latentseal/metrics.hpp"

namespace latentseal {

inline constexpr std::uint8_t kPayloadVersion = 1;
inline constexpr std::size_t kPayloadHeaderBytes = 12;
inline constexpr std::size_t kMaxHeaderField = 0xffff;

struct PayloadHeader {
  std::uint8_t version = kPayloadVersion;
  std::uint8_t codec_id = 0;
  std::uint16_t m = 0;
  std::uint16_t width = 0;
  std::uint16_t height = 0;

  bool operator==(const PayloadHeader&) const = default;
};

struct EncryptedPayload {
  PayloadHeader header;
  EciesCiphertext body;

  std::size_t serialized_size() const { return kPayloadHeaderBytes + body.serialized_size(); }
  bool operator==(const EncryptedPayload&) const = default;
};

inline constexpr std::size_t payload_size_for(std::size_t m) { return kPayloadHeaderBytes + 4 * m + kEciesOverhead; }

inline Bytes serialize(const EncryptedPayload& p) {
  Bytes out{'L', 'S', 'P', '1', p.header.version, p.header.codec_id};
  for (std::uint16_t v : {p.header.m, p.header.width, p.header.height}) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  const Bytes body = serialize(p.body);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

/// Validates magic, version and the length law before anything else touches the bytes.
inline EncryptedPayload parse_payload(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPayloadHeaderBytes) fail(ErrorKind::BadHeader, "payload shorter than its header");
  if (std::memcmp(bytes.data(), "LSP1", 4) != 0) fail(ErrorKind::BadHeader, "bad payload magic");
  EncryptedPayload p;
  p.header.version = bytes[4];
  if (p.header.version != kPayloadVersion) fail(ErrorKind::BadHeader, "unsupported payload version");
  p.header.codec_id = bytes[5];
  auto u16 = [&](std::size_t at) { return static_cast<std::uint16_t>(bytes[at] | (bytes[at + 1] << 8)); };
  p.header.m = u16(6);
  p.header.width = u16(8);
  p.header.height = u16(10);
  if (p.header.m == 0 || p.header.width == 0 || p.header.height == 0) {
    fail(ErrorKind::BadHeader, "zero-valued header field");
  }
  if (bytes.size() != payload_size_for(p.header.m)) {
    fail(ErrorKind::BadHeader, "payload length " + std::to_string(bytes.size()) + " does not match m = " +
                                   std::to_string(p.header.m));
  }
  p.body = deserialize_ciphertext(bytes.subspan(kPayloadHeaderBytes));
  return p;
}

// ---------------------------------------------------------------------------
// Latent wire form: m 32-bit little-endian floats.

inline Bytes latent_to_bytes(std::span<const double> values) {
  Bytes out;
  out.reserve(values.size() * 4);
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "latent value is not finite");
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  return out;
}

inline std::vector<double> latent_from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 4 != 0) fail(ErrorKind::Format, "latent byte length is not a multiple of 4");
  std::vector<double> out;
  out.reserve(bytes.size() / 4);
  for (std::size_t i = 0; i < bytes.size(); i += 4) {
    const std::uint32_t bits = static_cast<std::uint32_t>(bytes[i]) | static_cast<std::uint32_t>(bytes[i + 1]) << 8 |
                               static_cast<std::uint32_t>(bytes[i + 2]) << 16 |
                               static_cast<std::uint32_t>(bytes[i + 3]) << 24;
    out.push_back(static_cast<double>(std::bit_cast<float>(bits)));
  }
  return out;
}

// ---------------------------------------------------------------------------

struct EncryptResult {
  EncryptedPayload payload;
  double seconds = 0.0;
};

struct DecryptResult {
  GrayImage image;
  double seconds = 0.0;
};

namespace detail {

inline void check_header_fits(const CodecModel& codec) {
  if (codec.latent_size() > kMaxHeaderField || codec.width() > kMaxHeaderField ||
      codec.height() > kMaxHeaderField) {
    fail(ErrorKind::ShapeMismatch, "codec shape does not fit the 16-bit payload header");
  }
}

}  // namespace detail

inline EncryptResult compress_encrypt(const GrayImage& img, const CodecModel& codec, const SymKey& sym,
                                      const PublicKey& pub, std::optional<Seed32> eph_seed = std::nullopt) {
  detail::check_header_fits(codec);
  auto run = [&] {
    const LatentVector latent = codec.encode(img);
    const Permutation perm = permutation_from_key(sym, latent.size());
    const auto scrambled = shuffle(latent.values, perm);
    const Bytes plain = latent_to_bytes(scrambled);
    EncryptedPayload p;
    p.header.codec_id = codec.codec_id();
    p.header.m = static_cast<std::uint16_t>(codec.latent_size());
    p.header.width = static_cast<std::uint16_t>(codec.width());
    p.header.height = static_cast<std::uint16_t>(codec.height());
    p.body = ecies_encrypt(plain, pub, eph_seed);
    return p;
  };
  auto t = timed(run);
  return {std::move(t.result), t.seconds};
}

/// The header is checked against the model before any decryption. A wrong
/// SYM_KEY cannot be detected: it yields a well-formed but scrambled latent.
inline LatentVector decrypt_latent(const EncryptedPayload& payload, const CodecModel& codec, const SymKey& sym,
                                   const PrivateKey& priv) {
  const auto& h = payload.header;
  if (h.version != kPayloadVersion) fail(ErrorKind::BadHeader, "unsupported payload version");
  if (h.codec_id != codec.codec_id()) fail(ErrorKind::BadHeader, "payload was produced by a different codec kind");
  if (payload.body.body.size() != 4 * static_cast<std::size_t>(h.m)) {
    fail(ErrorKind::BadHeader, "ciphertext length does not match header m");
  }
  if (h.m != codec.latent_size() || h.width != codec.width() || h.height != codec.height()) {
    fail(ErrorKind::ShapeMismatch, "payload shape does not match the codec model");
  }
  const Bytes plain = ecies_decrypt(payload.body, priv);
  const auto scrambled = latent_from_bytes(plain);
  const Permutation perm = permutation_from_key(sym, scrambled.size());
  return LatentVector{deshuffle(scrambled, perm)};
}

inline DecryptResult decrypt_reconstruct(const EncryptedPayload& payload, const CodecModel& codec,
                                         const SymKey& sym, const PrivateKey& priv) {
  auto t = timed([&] { return codec.decode(decrypt_latent(payload, codec, sym, priv)); });
  return {std::move(t.result), t.seconds};
}

inline QualityReport evaluate(const GrayImage& img, const CodecModel& codec, const SymKey& sym,
                              const PublicKey& pub, const PrivateKey& priv, const SsimParams& ssim_params = {}) {
  const auto enc = compress_encrypt(img, codec, sym, pub);
  const auto dec = decrypt_reconstruct(enc.payload, codec, sym, priv);
  QualityReport r;
  r.ssim = ssim(img, dec.image, ssim_params);
  r.mse = mse(img, dec.image);
  r.psnr = psnr_from_mse(r.mse);
  r.encrypt_seconds = enc.seconds;
  r.decrypt_seconds = dec.seconds;
  return r;
}

}  // namespace latentseal
