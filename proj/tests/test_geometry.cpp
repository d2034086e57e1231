#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mpis/geometry.hpp"

#include "helpers.hpp"

using namespace mpis;

TEST_CASE("makePlaneSpec endpoints and midpoints") {
  PlaneSpec two = makePlaneSpec(2, 0.0f, 1.0f);
  CHECK(two.disparities == std::vector<double>{1.0, 0.0});

  PlaneSpec three = makePlaneSpec(3, 0.0f, 1.0f);
  REQUIRE(three.disparities.size() == 3);
  CHECK(three.disparities[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(three.disparities[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(three.disparities[2] == doctest::Approx(0.0).epsilon(1e-6));

  PlaneSpec sixteen = makePlaneSpec(16, 0.0f, 1.0f);
  REQUIRE(sixteen.disparities.size() == 16);
  for (int n = 0; n + 1 < 16; ++n)
    CHECK(sixteen.disparities[n] - sixteen.disparities[n + 1] ==
          doctest::Approx(1.0 / 15).epsilon(1e-12));
  CHECK_NOTHROW(validateSpec(sixteen));
}

TEST_CASE("makePlaneSpec rejects bad ranges") {
  for (auto [lo, hi] : std::vector<std::pair<float, float>>{
           {0.5f, 0.5f}, {0.7f, 0.2f}}) {
    try {
      makePlaneSpec(4, lo, hi);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BadRange);
    }
  }
}

namespace {

CameraRig rigWithK(double f, double cx, double cy, double baseline) {
  CameraRig rig;
  rig.focalPx = static_cast<float>(f);
  rig.baseline = static_cast<float>(baseline);
  rig.direction = BaselineDirection::RightToLeft;  // sign = +1, tx = -b
  Mat3 k{};
  k[0][0] = f;
  k[0][2] = cx;
  k[1][1] = f;
  k[1][2] = cy;
  k[2][2] = 1.0;
  rig.intrinsics = k;
  return rig;
}

// Numeric oracle: literally multiply K * (I - t n^T / z) * K^-1.
Mat3 homographyOracle(const Mat3& k, double tx, double z) {
  Mat3 mid{};
  mid[0][0] = mid[1][1] = mid[2][2] = 1.0;
  mid[0][2] = -tx / z;
  return mat3Mul(mat3Mul(k, mid), mat3Inverse(k));
}

}  // namespace

TEST_CASE("homography with zero translation is the identity") {
  CameraRig rig = rigWithK(100.0, 50.0, 40.0, 0.5);
  Mat3 h = homographyMatrix(rig, 2.0, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(h[i][j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("homography is identity except entry (0,2) = -f*b/z") {
  double f = 120.0, b = 0.3, z = 2.5;
  CameraRig rig = rigWithK(f, 64.0, 48.0, b);
  Mat3 h = homographyMatrix(rig, z, b);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double expect = (i == j) ? 1.0 : 0.0;
      if (i == 0 && j == 2) expect = -f * b / z;
      CHECK(h[i][j] == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("homography shifts pixels by -f*b/z, row-preserving") {
  double f = 90.0, b = 0.4, z = 3.0;
  CameraRig rig = rigWithK(f, 30.0, 20.0, b);
  Mat3 h = homographyMatrix(rig, z, b);
  Mat3 oracle = homographyOracle(*rig.intrinsics, b, z);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> px(0.0, 200.0);
  for (int i = 0; i < 10; ++i) {
    double xt = px(rng), yt = px(rng), xs, ys, xo, yo;
    applyHomography(h, xt, yt, xs, ys);
    applyHomography(oracle, xt, yt, xo, yo);
    CHECK(xs == doctest::Approx(xt - f * b / z).epsilon(1e-9));
    CHECK(ys == doctest::Approx(yt).epsilon(1e-6));
    CHECK(xs == doctest::Approx(xo).epsilon(1e-9));
    CHECK(ys == doctest::Approx(yo).epsilon(1e-9));
  }
}

TEST_CASE("homography approaches identity as z grows") {
  CameraRig rig = rigWithK(1.0, 10.0, 10.0, 1.0);  // f*b = 1
  Mat3 h = homographyMatrix(rig, 1e9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(h[i][j] - (i == j ? 1.0 : 0.0)) <= 1e-6);
}

TEST_CASE("mat3Inverse rejects singular matrices") {
  Mat3 m{};  // all zeros
  try {
    mat3Inverse(m);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularIntrinsics);
  }
}

TEST_CASE("shift table hand example [20, 10, 0]") {
  PlaneSpec spec = makePlaneSpec(3, 0.0f, 1.0f);
  CameraRig rig;
  rig.shiftScale = 20.0f;
  rig.direction = BaselineDirection::RightToLeft;  // sign = +1
  ShiftTable t = makeShiftTable(spec, rig);
  REQUIRE(t.shifts.size() == 3);
  CHECK(t.shifts[0] == doctest::Approx(20.0f).epsilon(1e-7));
  CHECK(t.shifts[1] == doctest::Approx(10.0f).epsilon(1e-7));
  CHECK(t.shifts[2] == doctest::Approx(0.0f).epsilon(1e-6));

  rig.direction = BaselineDirection::LeftToRight;
  ShiftTable neg = makeShiftTable(spec, rig);
  CHECK(neg.shifts[0] == doctest::Approx(-20.0f).epsilon(1e-7));
}

TEST_CASE("zero shift_scale zeroes every entry") {
  PlaneSpec spec = makePlaneSpec(16, 0.0f, 1.0f);
  CameraRig rig;
  rig.shiftScale = 0.0f;
  for (float s : makeShiftTable(spec, rig).shifts) CHECK(s == 0.0f);
}

TEST_CASE("shift magnitudes decrease with plane index") {
  PlaneSpec spec = makePlaneSpec(16, 0.1f, 0.9f);
  CameraRig rig;
  rig.shiftScale = 12.0f;
  ShiftTable t = makeShiftTable(spec, rig);
  for (int n = 0; n + 1 < 16; ++n)
    CHECK(std::abs(t.shifts[n]) > std::abs(t.shifts[n + 1]));
}

TEST_CASE("shift table agrees with the homography (0,2) entry") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> fd(50.0, 500.0);
  std::uniform_real_distribution<double> bd(0.05, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    double f = fd(rng), b = bd(rng);
    CameraRig rig = rigWithK(f, 32.0, 24.0, b);
    rig.shiftScale = static_cast<float>(f * b);
    PlaneSpec spec = makePlaneSpec(4, 0.1f, 1.0f);
    ShiftTable t = makeShiftTable(spec, rig);
    for (int n = 0; n < 4; ++n) {
      double z = 1.0 / spec.disparities[n];
      Mat3 h = homographyMatrix(rig, z);
      // the rig's own direction picks t, so s_n equals the (0,2) entry
      // up to the float rounding of the table itself
      CHECK(std::abs(t.shifts[n] - static_cast<float>(h[0][2])) <=
            1e-5 * std::max(1.0, std::abs(h[0][2])));
    }
  }
}
