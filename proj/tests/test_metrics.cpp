#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mpis/builder.hpp"
#include "mpis/geometry.hpp"
#include "mpis/metrics.hpp"

#include "helpers.hpp"

using namespace mpis;

TEST_CASE("l1 closed forms and loop oracle") {
  ImageBuffer a(4, 4, 3, 0.5f);
  ImageBuffer b(4, 4, 3, 0.3f);
  CHECK(l1(a, a) == 0.0);
  CHECK(l1(a, b) == doctest::Approx(0.2).epsilon(1e-7));

  std::mt19937 rng(41);
  ImageBuffer x = testutil::randomImage(rng, 32, 32, 3);
  ImageBuffer y = testutil::randomImage(rng, 32, 32, 3);
  double oracle = 0.0;
  for (size_t i = 0; i < x.data.size(); ++i)
    oracle += std::abs(static_cast<double>(x.data[i]) - y.data[i]);
  oracle /= static_cast<double>(x.data.size());
  CHECK(std::abs(l1(x, y) - oracle) <= 1e-7);
}

TEST_CASE("l1 rejects mismatched shapes") {
  ImageBuffer a(2, 2, 3, 0.5f);
  ImageBuffer b(2, 3, 3, 0.5f);
  try {
    l1(a, b);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("psnr closed forms") {
  ImageBuffer a(8, 8, 3, 0.5f);
  CHECK(psnr(a, a) == doctest::Approx(100.0).epsilon(1e-6));

  ImageBuffer b(8, 8, 3, 0.6f);
  CHECK(std::abs(psnr(a, b) - 20.0) <= 0.01);

  ImageBuffer c(8, 8, 3, 0.51f);
  CHECK(std::abs(psnr(a, c) - 40.0) <= 0.02);
}

TEST_CASE("psnr strictly decreases with uniform error") {
  ImageBuffer a(8, 8, 1, 0.2f);
  double prev = 1e9;
  for (float eps : {0.01f, 0.02f, 0.05f, 0.1f}) {
    ImageBuffer b(8, 8, 1, 0.2f + eps);
    double p = psnr(a, b);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("ssim self-similarity is 1") {
  std::mt19937 rng(42);
  ImageBuffer a = testutil::randomImage(rng, 24, 24, 3);
  CHECK(std::abs(ssim(a, a) - 1.0) <= 1e-9);
}

TEST_CASE("ssim constant-patch closed form") {
  double ua = 0.5, ub = 0.6;
  ImageBuffer a(24, 24, 1, static_cast<float>(ua));
  ImageBuffer b(24, 24, 1, static_cast<float>(ub));
  double c1 = 0.01 * 0.01;  // (K1 * dynamic_range)^2
  double expect = (2 * ua * ub + c1) / (ua * ua + ub * ub + c1);
  CHECK(std::abs(ssim(a, b) - expect) <= 1e-6);
}

TEST_CASE("ssim degrades monotonically with noise strength") {
  ImageBuffer base = testutil::smoothImage(32, 32, 1);
  std::mt19937 rng(43);
  std::normal_distribution<float> n1(0.0f, 0.05f), n2(0.0f, 0.2f);
  ImageBuffer small = base, big = base;
  for (size_t i = 0; i < base.data.size(); ++i) {
    small.data[i] = std::clamp(base.data[i] + n1(rng), 0.0f, 1.0f);
    big.data[i] = std::clamp(base.data[i] + n2(rng), 0.0f, 1.0f);
  }
  CHECK(ssim(base, small) > ssim(base, big));
}

TEST_CASE("l1, psnr and ssim are symmetric") {
  std::mt19937 rng(44);
  ImageBuffer a = testutil::randomImage(rng, 16, 16, 3);
  ImageBuffer b = testutil::randomImage(rng, 16, 16, 3);
  CHECK(std::abs(l1(a, b) - l1(b, a)) <= 1e-9);
  CHECK(std::abs(psnr(a, b) - psnr(b, a)) <= 1e-9);
  CHECK(std::abs(ssim(a, b) - ssim(b, a)) <= 1e-9);
}

TEST_CASE("maskLoss is zero on exact one-hot assignment") {
  // 5 planes -> step 0.25, exactly representable in float
  PlaneSpec spec = makePlaneSpec(5, 0.0f, 1.0f);
  DepthMap depth(3, 3, static_cast<float>(spec.disparities[1]));
  AssignMasks m = assignMasksFromDepth(depth, spec, AssignMode::Hard);
  CHECK(maskLoss(m, depth, spec) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("maskLoss closed form for uniform masks") {
  PlaneSpec spec = makePlaneSpec(4, 0.0f, 1.0f);
  int h = 3, w = 5;
  float q = 0.37f;
  AssignMasks m(h, w, 4);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int n = 0; n < 4; ++n) m.at(y, x, n) = 0.25f;
  DepthMap depth(h, w, q);
  double expect = 0.0;
  for (int n = 0; n < 4; ++n)
    expect += 0.25 * std::abs(q - spec.disparities[n]);
  CHECK(std::abs(maskLoss(m, depth, spec) - expect) <= 1e-6);
}

TEST_CASE("maskLoss matches the loop oracle on tent masks") {
  std::mt19937 rng(45);
  PlaneSpec spec = makePlaneSpec(8, 0.0f, 1.0f);
  DepthMap depth = testutil::randomDepth(rng, 10, 7);
  AssignMasks m = assignMasksFromDepth(depth, spec, AssignMode::Tent);
  double oracle = 0.0;
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 7; ++x)
      for (int n = 0; n < 8; ++n)
        oracle += static_cast<double>(m.at(y, x, n)) *
                  std::abs(depth.at(y, x) - spec.disparities[n]);
  oracle /= 10.0 * 7.0;
  CHECK(std::abs(maskLoss(m, depth, spec) - oracle) <= 1e-6);
}

TEST_CASE("depthLoss hand case 0.4/0.5/0.5 with zero mask term") {
  PlaneSpec spec = makePlaneSpec(3, 0.0f, 1.0f);  // middle plane at 0.5
  int h = 4, w = 4;
  DepthMap ref(h, w, 0.5f);
  DepthMap coarse(h, w, 0.4f);
  DepthMap fine(h, w, 0.5f);
  AssignMasks m = assignMasksFromDepth(ref, spec, AssignMode::Hard);
  CHECK(std::abs(depthLoss(coarse, fine, ref, m, spec) - 0.1) <= 1e-6);
}

TEST_CASE("depthLoss scales linearly in lambda") {
  std::mt19937 rng(46);
  PlaneSpec spec = makePlaneSpec(4, 0.0f, 1.0f);
  DepthMap ref = testutil::randomDepth(rng, 6, 6);
  DepthMap coarse = testutil::randomDepth(rng, 6, 6);
  DepthMap fine = testutil::randomDepth(rng, 6, 6);
  AssignMasks m = assignMasksFromDepth(testutil::randomDepth(rng, 6, 6), spec,
                                       AssignMode::Tent);
  MetricOptions o1, o2;
  o2.lambdaMask = 2.0 * o1.lambdaMask;
  double diff = depthLoss(coarse, fine, ref, m, spec, o2) -
                depthLoss(coarse, fine, ref, m, spec, o1);
  CHECK(std::abs(diff - o1.lambdaMask * maskLoss(m, ref, spec)) <= 1e-9);
}

TEST_CASE("mpiLoss is zero on identical inputs") {
  std::mt19937 rng(47);
  ImageBuffer img = testutil::randomImage(rng, 16, 16, 3);
  DepthMap d = testutil::randomDepth(rng, 16, 16);
  MpiLossReport r = mpiLoss(img, img, d, d);
  CHECK(std::abs(r.total) <= 1e-9);
}

TEST_CASE("mpiLoss uniform-offset case follows l1 and ssim closed forms") {
  ImageBuffer gt(24, 24, 3, 0.5f);
  ImageBuffer pred(24, 24, 3, 0.6f);
  DepthMap d(24, 24, 0.5f);
  MpiLossReport r = mpiLoss(pred, gt, d, d);
  CHECK(std::abs(r.l1Term - 0.1) <= 1e-6);
  CHECK(std::abs(r.ssimTerm - (1.0 - ssim(pred, gt))) <= 1e-9);
  CHECK(std::abs(r.depthTerm) <= 1e-9);
}

TEST_CASE("mpiLoss components sum to the total") {
  std::mt19937 rng(48);
  ImageBuffer a = testutil::randomImage(rng, 16, 16, 3);
  ImageBuffer b = testutil::randomImage(rng, 16, 16, 3);
  DepthMap da = testutil::randomDepth(rng, 16, 16);
  DepthMap db = testutil::randomDepth(rng, 16, 16);
  MpiLossReport r = mpiLoss(a, b, da, db);
  CHECK(std::abs(r.l1Term + r.ssimTerm + r.depthTerm - r.total) <= 1e-7);
}

TEST_CASE("totalLoss recomposes depth and mpi parts") {
  CHECK(totalLoss(0.0, 0.0) == 0.0);
  CHECK(totalLoss(0.3, 0.2) == doctest::Approx(0.5).epsilon(1e-12));

  std::mt19937 rng(49);
  PlaneSpec spec = makePlaneSpec(4, 0.0f, 1.0f);
  ImageBuffer a = testutil::randomImage(rng, 12, 12, 3);
  ImageBuffer b = testutil::randomImage(rng, 12, 12, 3);
  DepthMap ref = testutil::randomDepth(rng, 12, 12);
  DepthMap coarse = testutil::randomDepth(rng, 12, 12);
  DepthMap fine = testutil::randomDepth(rng, 12, 12);
  AssignMasks m = assignMasksFromDepth(ref, spec, AssignMode::Tent);
  double dl = depthLoss(coarse, fine, ref, m, spec);
  MpiLossReport ml = mpiLoss(a, b, fine, ref);
  CHECK(std::abs(totalLoss(dl, ml.total) - (dl + ml.total)) <= 1e-7);
}

TEST_CASE("psnr and ssim match loop oracles on random fixtures") {
  std::mt19937 rng(50);
  ImageBuffer a = testutil::randomImage(rng, 32, 32, 1);
  ImageBuffer b = testutil::randomImage(rng, 32, 32, 1);

  // psnr oracle
  double mse = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    double d = static_cast<double>(a.data[i]) - b.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.data.size());
  CHECK(std::abs(psnr(a, b) - 10.0 * std::log10(1.0 / mse)) <= 1e-6);

  // ssim oracle: direct per-window Gaussian statistics
  const int win = 11, rad = 5;
  const double sigma = 1.5;
  double kernel[win][win];
  double ksum = 0.0;
  for (int dy = -rad; dy <= rad; ++dy)
    for (int dx = -rad; dx <= rad; ++dx) {
      double g = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
      kernel[dy + rad][dx + rad] = g;
      ksum += g;
    }
  for (auto& row : kernel)
    for (double& v : row) v /= ksum;
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double acc = 0.0;
  int count = 0;
  for (int y = rad; y < 32 - rad; ++y)
    for (int x = rad; x < 32 - rad; ++x) {
      double ma = 0, mb = 0, va = 0, vb = 0, cov = 0;
      for (int dy = -rad; dy <= rad; ++dy)
        for (int dx = -rad; dx <= rad; ++dx) {
          double k = kernel[dy + rad][dx + rad];
          ma += k * a.at(y + dy, x + dx);
          mb += k * b.at(y + dy, x + dx);
        }
      for (int dy = -rad; dy <= rad; ++dy)
        for (int dx = -rad; dx <= rad; ++dx) {
          double k = kernel[dy + rad][dx + rad];
          double da = a.at(y + dy, x + dx) - ma;
          double db = b.at(y + dy, x + dx) - mb;
          va += k * da * da;
          vb += k * db * db;
          cov += k * da * db;
        }
      acc += ((2 * ma * mb + c1) * (2 * cov + c2)) /
             ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  CHECK(std::abs(ssim(a, b) - acc / count) <= 1e-6);
}
