#include <gtest/gtest.h>

#include <random>
#include <string>

#include "latentseal/ecies.hpp"
#include "test_support.hpp"

using namespace latentseal;

namespace {

Bytes from_hex(const std::string& hex) {
  Bytes out;
  for (std::size_t i = 0; i < hex.size(); i += 2) out.push_back(static_cast<std::uint8_t>(std::stoi(hex.substr(i, 2), nullptr, 16)));
  return out;
}

Bytes random_bytes(std::size_t n, std::mt19937_64& rng) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

Seed32 filled(std::uint8_t v) {
  Seed32 s;
  s.fill(v);
  return s;
}

// Golden values computed independently with Python's `cryptography` package
// (SECP256R1, HKDF-SHA256 with salt=None, AESGCM).
constexpr const char* kZeroSeedPrivate = "66687aadf862bd776c8fc18b8e9f8e20089714856ee233b3902a591d0d5f2925";
constexpr const char* kZeroSeedPublic = "03893829bebc73eb4d24d7ed2f1444c907080834bd33671436269280bc603037af";
constexpr const char* kGoldenCiphertext =
    "026ff03b949241ce1dadd43519e6960e0a85b41a69a05c328103aa2bce1594ca16"
    "58acbc915b4602f0ed065ae39ba51bf1"
    "679db2f5dc8912ec414b386758c93b07";

}  // namespace

TEST(Keygen, ZeroSeedIsResampledToGoldenKeypair) {
  const EciesKeypair kp = keygen(Seed32{});
  EXPECT_EQ(format_private_key(kp.priv), std::string(kZeroSeedPrivate) + "\n");
  EXPECT_EQ(format_public_key(kp.pub), std::string(kZeroSeedPublic) + "\n");
}

TEST(Keygen, DeterministicUnderSeed) {
  EXPECT_EQ(keygen(filled(7)).priv, keygen(filled(7)).priv);
  EXPECT_NE(keygen(filled(7)).priv, keygen(filled(8)).priv);
}

TEST(Keygen, FreshWithoutSeed) {
  EXPECT_NE(keygen().priv, keygen().priv);
}

TEST(Keygen, OutOfRangeCandidateIsResampled) {
  // 0xff..ff exceeds the group order and must be replaced by its digest.
  const EciesKeypair kp = keygen(filled(0xff));
  EXPECT_NE(kp.priv.scalar, filled(0xff));
  EXPECT_EQ(kp.priv.scalar, detail::sha256(filled(0xff)));
}

TEST(Keygen, PublicMatchesPrivate) {
  const EciesKeypair kp = keygen(filled(3));
  EXPECT_EQ(public_from_private(kp.priv), kp.pub);
  EXPECT_NO_THROW(validate_public(kp.pub));
}

TEST(Hkdf, Rfc5869EmptySaltAndInfo) {
  // RFC 5869 test case 3.
  const Bytes ikm(22, 0x0b);
  const Bytes okm = hkdf_sha256(ikm, {}, 42);
  EXPECT_EQ(okm, from_hex("8da4e775a563c18f715f802a063c5a31b8a11f5c5ee1879ec3454e5f3c738d2d9d201395faa4b61a96c8"));
}

TEST(Ecies, GoldenVectorMatchesIndependentImplementation) {
  const EciesKeypair recipient = keygen(Seed32{});
  Bytes plain(16);
  for (std::size_t i = 0; i < plain.size(); ++i) plain[i] = static_cast<std::uint8_t>(i);
  const EciesCiphertext ct = ecies_encrypt(plain, recipient.pub, filled(1));
  EXPECT_EQ(serialize(ct), from_hex(kGoldenCiphertext));
  EXPECT_EQ(ecies_decrypt(deserialize_ciphertext(from_hex(kGoldenCiphertext)), recipient.priv), plain);
}

TEST(Ecies, RoundTripAndLengthLaw) {
  std::mt19937_64 rng(17);
  const EciesKeypair kp = keygen();
  for (std::size_t n : {1u, 2u, 15u, 16u, 17u, 400u, 4096u, 65536u}) {
    const Bytes plain = random_bytes(n, rng);
    const EciesCiphertext ct = ecies_encrypt(plain, kp.pub);
    const Bytes wire = serialize(ct);
    EXPECT_EQ(wire.size(), n + kEciesOverhead);
    EXPECT_EQ(ct.body.size(), n);
    EXPECT_EQ(ecies_decrypt(deserialize_ciphertext(wire), kp.priv), plain);
  }
}

TEST(Ecies, FourHundredBytesSerializeTo449) {
  const Bytes plain(400, 0x5a);
  EXPECT_EQ(serialize(ecies_encrypt(plain, keygen().pub)).size(), 449u);
}

TEST(Ecies, FreshEphemeralEachTime) {
  const EciesKeypair kp = keygen();
  const Bytes plain(64, 1);
  const EciesCiphertext a = ecies_encrypt(plain, kp.pub);
  const EciesCiphertext b = ecies_encrypt(plain, kp.pub);
  EXPECT_NE(a.ephemeral, b.ephemeral);
  EXPECT_NE(a.body, b.body);
}

TEST(Ecies, FixedEphemeralSeedIsDeterministic) {
  const EciesKeypair kp = keygen(filled(9));
  const Bytes plain(40, 2);
  EXPECT_EQ(ecies_encrypt(plain, kp.pub, filled(4)), ecies_encrypt(plain, kp.pub, filled(4)));
}

TEST(Ecies, WrongPrivateKeyFailsAuthentication) {
  const EciesKeypair alice = keygen();
  const EciesKeypair mallory = keygen();
  const EciesCiphertext ct = ecies_encrypt(Bytes(32, 7), alice.pub);
  EXPECT_THROW_KIND(ecies_decrypt(ct, mallory.priv), ErrorKind::AuthFailure);
}

TEST(Ecies, EverySingleBitFlipIsRejected) {
  std::mt19937_64 rng(23);
  const EciesKeypair kp = keygen();
  const Bytes plain = random_bytes(48, rng);
  const Bytes wire = serialize(ecies_encrypt(plain, kp.pub));
  for (std::size_t bit = 0; bit < wire.size() * 8; ++bit) {
    Bytes tampered = wire;
    tampered[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    try {
      (void)ecies_decrypt(deserialize_ciphertext(tampered), kp.priv);
      ADD_FAILURE() << "bit " << bit << " flip went undetected";
    } catch (const Error& e) {
      EXPECT_TRUE(e.kind() == ErrorKind::AuthFailure || e.kind() == ErrorKind::InvalidPoint) << e.what();
      if (bit >= kPointBytes * 8) {
        EXPECT_EQ(e.kind(), ErrorKind::AuthFailure);
      }
    }
  }
}

TEST(Ecies, InvalidPointsAreRejected) {
  const EciesKeypair kp = keygen();
  EciesCiphertext ct = ecies_encrypt(Bytes(8, 1), kp.pub);
  ct.ephemeral[0] = 0x04;
  EXPECT_THROW_KIND(ecies_decrypt(ct, kp.priv), ErrorKind::InvalidPoint);

  PublicKey bogus;
  bogus.point.fill(0);
  bogus.point[0] = 0x02;
  bogus.point[32] = 0x01;  // x = 1 is not on P-256
  EXPECT_THROW_KIND(ecies_encrypt(Bytes(8, 1), bogus), ErrorKind::InvalidPublicKey);
}

TEST(Ecies, EmptyPlaintextRejected) {
  EXPECT_THROW_KIND(ecies_encrypt(Bytes{}, keygen().pub), ErrorKind::InvalidArgument);
  EXPECT_THROW_KIND(deserialize_ciphertext(Bytes(kEciesOverhead, 0)), ErrorKind::Format);
}

TEST(KeyFiles, HexFormatsRoundTrip) {
  const EciesKeypair kp = keygen();
  const std::string priv = format_private_key(kp.priv);
  const std::string pub = format_public_key(kp.pub);
  EXPECT_EQ(priv.size(), 65u);
  EXPECT_EQ(pub.size(), 67u);
  EXPECT_EQ(priv.back(), '\n');
  EXPECT_EQ(parse_private_key(priv), kp.priv);
  EXPECT_EQ(parse_public_key(pub), kp.pub);
}

TEST(KeyFiles, RejectMalformed) {
  EXPECT_THROW_KIND(parse_private_key("abcd\n"), ErrorKind::InvalidKey);
  EXPECT_THROW_KIND(parse_private_key(std::string(64, 'g') + "\n"), ErrorKind::InvalidKey);
  EXPECT_THROW_KIND(parse_private_key(std::string(64, '0') + "\n"), ErrorKind::InvalidKey);
  EXPECT_THROW_KIND(parse_public_key("02" + std::string(62, '0') + "01\n"), ErrorKind::InvalidPublicKey);
}
