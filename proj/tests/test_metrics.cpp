#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "latentseal/metrics.hpp"
#include "test_support.hpp"

using namespace latentseal;

namespace {

GrayImage checkerboard(std::size_t n, bool inverted) {
  GrayImage img(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) img.at(r, c) = ((r + c) % 2 == 0) != inverted ? 255 : 0;
  return img;
}

// Structural similarity from moments accumulated in one pass over raw sums,
// a different route from the two-pass implementation.
double ssim_from_raw_sums(const GrayImage& a, const GrayImage& b) {
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.pixels()[i];
    const double y = b.pixels()[i];
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
    sab += x * y;
  }
  const double mu_a = sa / n, mu_b = sb / n;
  const double var_a = saa / n - mu_a * mu_a;
  const double var_b = sbb / n - mu_b * mu_b;
  const double cov = sab / n - mu_a * mu_b;
  const double c1 = (0.01 * 255) * (0.01 * 255);
  const double c2 = (0.03 * 255) * (0.03 * 255);
  return ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
}

}  // namespace

TEST(Mse, Basics) {
  const GrayImage a(3, 3, 10);
  EXPECT_EQ(mse(a, a), 0.0);
  EXPECT_EQ(mse(a, GrayImage(3, 3, 11)), 1.0);
  const GrayImage x(2, 2, std::vector<std::uint8_t>{0, 255, 0, 255});
  const GrayImage y(2, 2, std::vector<std::uint8_t>{255, 0, 255, 0});
  EXPECT_EQ(mse(x, y), 65025.0);
  EXPECT_THROW_KIND(mse(a, GrayImage(3, 2)), ErrorKind::DimMismatch);
}

TEST(Psnr, ReferenceValues) {
  EXPECT_TRUE(std::isinf(psnr(GrayImage(2, 2, 3), GrayImage(2, 2, 3))));
  EXPECT_NEAR(psnr_from_mse(1.0, 8), 48.1308036086791, 1e-9);
  EXPECT_NEAR(psnr_from_mse(65025.0, 8), 0.0, 1e-12);
  EXPECT_NEAR(psnr(GrayImage(3, 3, 10), GrayImage(3, 3, 11)), 48.1308, 1e-3);
  EXPECT_THROW_KIND(psnr(GrayImage(3, 3), GrayImage(2, 3)), ErrorKind::DimMismatch);
}

TEST(Psnr, StrictlyDecreasingInMse) {
  const GrayImage base(8, 8, 100);
  double previous = INFINITY;
  for (int delta = 1; delta < 120; ++delta) {
    const double value = psnr(base, GrayImage(8, 8, static_cast<std::uint8_t>(100 + delta)));
    EXPECT_LT(value, previous);
    previous = value;
  }
}

TEST(Ssim, IdenticalImagesScoreOne) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const GrayImage img = test::random_image(9, 7, rng);
    EXPECT_NEAR(ssim(img, img), 1.0, 1e-12);
    EXPECT_NEAR(ssim(img, img, SsimParams::windowed(5)), 1.0, 1e-12);
  }
  EXPECT_EQ(ssim(GrayImage(4, 4, 77), GrayImage(4, 4, 77)), 1.0);
}

TEST(Ssim, CheckerboardAgainstHandMoments) {
  const GrayImage a = checkerboard(4, false);
  const GrayImage b = checkerboard(4, true);
  // mu = 127.5 for both, var = 127.5^2, cov = -127.5^2.
  const double c1 = 6.5025, c2 = 58.5225, v = 127.5 * 127.5;
  const double by_hand = ((2 * v + c1) * (-2 * v + c2)) / ((2 * v + c1) * (2 * v + c2));
  EXPECT_NEAR(ssim(a, b), by_hand, 1e-12);
  EXPECT_NEAR(ssim(a, b), ssim_from_raw_sums(a, b), 1e-12);
  EXPECT_LT(ssim(a, b), 0.0);
}

TEST(Ssim, MatchesRawSumRouteOnRandomPairs) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 50; ++i) {
    const GrayImage a = test::random_image(10, 10, rng);
    const GrayImage b = test::random_image(10, 10, rng);
    EXPECT_NEAR(ssim(a, b), ssim_from_raw_sums(a, b), 1e-9);
  }
}

TEST(Ssim, SymmetricAndBounded) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) {
    const GrayImage a = test::random_image(6, 6, rng);
    GrayImage b = test::random_image(6, 6, rng);
    if (i % 3 == 0) {
      for (std::size_t k = 0; k < b.size(); ++k) b.pixels()[k] = static_cast<std::uint8_t>(255 - a.pixels()[k]);
    }
    const double s = ssim(a, b);
    EXPECT_EQ(s, ssim(b, a));
    EXPECT_EQ(mse(a, b), mse(b, a));
    EXPECT_GE(s, -1.0);
    EXPECT_LE(s, 1.0);
    const double w = ssim(a, b, SsimParams::windowed(3));
    EXPECT_GE(w, -1.0);
    EXPECT_LE(w, 1.0);
  }
}

TEST(Ssim, FullSideWindowEqualsGlobal) {
  std::mt19937_64 rng(10);
  const GrayImage a = test::random_image(12, 12, rng);
  const GrayImage b = test::random_image(12, 12, rng);
  EXPECT_EQ(ssim(a, b, SsimParams::windowed(12)), ssim(a, b));
}

TEST(Ssim, Errors) {
  EXPECT_THROW_KIND(ssim(GrayImage(4, 4), GrayImage(4, 5)), ErrorKind::DimMismatch);
  EXPECT_THROW_KIND(ssim(GrayImage(4, 6), GrayImage(4, 6), SsimParams::windowed(5)), ErrorKind::WindowTooLarge);
  EXPECT_THROW_KIND(ssim(GrayImage(4, 4), GrayImage(4, 4), SsimParams::windowed(0)), ErrorKind::WindowTooLarge);
}

TEST(Timing, NoOpIsFast) {
  const auto t = timed([] {});
  EXPECT_GE(t.seconds, 0.0);
  EXPECT_LT(t.seconds, 0.01);
}

TEST(Timing, SleepIsMeasured) {
  const auto t = timed([] {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    return 42;
  });
  EXPECT_EQ(t.result, 42);
  EXPECT_GE(t.seconds, 0.05);
  EXPECT_LE(t.seconds, 0.5);
}

TEST(Timing, NestedComposes) {
  double inner = 0.0;
  const auto outer = timed([&] {
    inner = timed([] { std::this_thread::sleep_for(std::chrono::milliseconds(5)); }).seconds;
  });
  EXPECT_GE(outer.seconds, inner);
}

TEST(QualityReport, CsvRow) {
  QualityReport r;
  r.ssim = 0.4254;
  r.psnr = 27.736;
  r.mse = 109.5;
  r.encrypt_seconds = 0.1933;
  r.decrypt_seconds = 0.3718;
  EXPECT_EQ(to_csv_row(r), "0.4254,27.736,109.5,0.1933,0.3718");
  r.psnr = INFINITY;
  r.ssim = 1.0;
  r.mse = 0.0;
  r.encrypt_seconds = 0.123456789;
  EXPECT_EQ(to_csv_row(r), "1,inf,0,0.123457,0.3718");
  EXPECT_STREQ(kQualityCsvHeader, "ssim,psnr_db,mse,encrypt_s,decrypt_s");
}
