#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mpis/dibr.hpp"
#include "mpis/geometry.hpp"

#include "helpers.hpp"

using namespace mpis;

TEST_CASE("zero shift is the identity with no holes") {
  std::mt19937 rng(61);
  ImageBuffer image = testutil::randomImage(rng, 6, 8, 3);
  DepthMap depth = testutil::randomDepth(rng, 6, 8);
  CameraRig rig;
  rig.shiftScale = 0.0f;
  WarpResult r = forwardWarp(image, depth, rig);
  CHECK(testutil::maxAbsDiff(r.image, image) <= 1e-6);
  for (uint8_t h : r.holes) CHECK(h == 0);
  ImageBuffer out = dibrRender(image, depth, rig);
  CHECK(testutil::maxAbsDiff(out, image) <= 1e-6);
}

TEST_CASE("constant disparity 0.5 at scale 16 shifts 8 px, trailing holes") {
  ImageBuffer image = testutil::smoothImage(4, 32, 3);
  DepthMap depth(4, 32, 0.5f);
  CameraRig rig;
  rig.shiftScale = 16.0f;
  rig.direction = BaselineDirection::RightToLeft;  // shift = +8
  WarpResult r = forwardWarp(image, depth, rig);
  for (int y = 0; y < 4; ++y) {
    for (int x = 8; x < 32; ++x) {
      CHECK(r.holes[static_cast<size_t>(y) * 32 + x] == 0);
      for (int c = 0; c < 3; ++c)
        CHECK(r.image.at(y, x, c) ==
              doctest::Approx(image.at(y, x - 8, c)).epsilon(1e-6));
    }
    // trailing strip: nothing maps into the first 8 columns
    for (int x = 0; x < 8; ++x)
      CHECK(r.holes[static_cast<size_t>(y) * 32 + x] == 1);
  }
}

TEST_CASE("step fixture: hole band at the foreground trailing edge") {
  // foreground block d=0.5 over background d=0, shift scale 16:
  // the foreground moves 8 px right, background stays.
  int h = 4, w = 48;
  ImageBuffer image(h, w, 3, 0.2f);
  DepthMap depth(h, w, 0.0f);
  for (int y = 0; y < h; ++y)
    for (int x = 16; x < 28; ++x) {
      depth.at(y, x) = 0.5f;
      image.at(y, x, 0) = image.at(y, x, 1) = image.at(y, x, 2) = 0.9f;
    }
  CameraRig rig;
  rig.shiftScale = 16.0f;
  rig.direction = BaselineDirection::RightToLeft;
  WarpResult r = forwardWarp(image, depth, rig);
  for (int y = 0; y < h; ++y) {
    // disocclusion: 8-px band where the foreground used to be
    for (int x = 16; x < 24; ++x)
      CHECK(r.holes[static_cast<size_t>(y) * w + x] == 1);
    // foreground landed at 24..36
    for (int x = 25; x < 35; ++x)
      CHECK(r.image.at(y, x, 0) == doctest::Approx(0.9f).epsilon(1e-6));
    // untouched background well away from the edges
    for (int x = 2; x < 15; ++x)
      CHECK(r.image.at(y, x, 0) == doctest::Approx(0.2f).epsilon(1e-6));
  }

  // inpainting fills the band with background color
  ImageBuffer filled = inpaintHoles(r);
  for (int y = 0; y < h; ++y)
    for (int x = 16; x < 24; ++x)
      CHECK(filled.at(y, x, 0) == doctest::Approx(0.2f).epsilon(1e-6));
}

TEST_CASE("forward warp matches a per-pixel splat loop oracle") {
  std::mt19937 rng(62);
  int h = 6, w = 20;
  ImageBuffer image = testutil::randomImage(rng, h, w, 3);
  DepthMap depth = testutil::randomDepth(rng, h, w);
  CameraRig rig;
  rig.shiftScale = 5.0f;
  rig.direction = BaselineDirection::RightToLeft;
  WarpResult r = forwardWarp(image, depth, rig);

  for (int y = 0; y < h; ++y) {
    std::vector<double> zbuf(w, -1.0), wacc(w, 0.0);
    std::vector<std::array<double, 3>> cacc(w, {0, 0, 0});
    for (int x = 0; x < w; ++x) {
      double xt = x + 5.0 * depth.at(y, x);
      int x0 = static_cast<int>(std::floor(xt));
      double frac = xt - x0;
      for (int k = 0; k < 2; ++k) {
        int xi = x0 + k;
        double wt = k == 0 ? 1.0 - frac : frac;
        if (xi < 0 || xi >= w || wt <= 0.0) continue;
        double d = depth.at(y, x);
        if (d > zbuf[xi] + 1e-4) {
          zbuf[xi] = d;
          wacc[xi] = wt;
          for (int c = 0; c < 3; ++c) cacc[xi][c] = wt * image.at(y, x, c);
        } else if (d > zbuf[xi] - 1e-4) {
          wacc[xi] += wt;
          for (int c = 0; c < 3; ++c) cacc[xi][c] += wt * image.at(y, x, c);
        }
      }
    }
    for (int x = 0; x < w; ++x) {
      bool hole = wacc[x] <= 1e-6;
      CHECK(r.holes[static_cast<size_t>(y) * w + x] == (hole ? 1 : 0));
      if (!hole)
        for (int c = 0; c < 3; ++c)
          CHECK(std::abs(r.image.at(y, x, c) - cacc[x][c] / wacc[x]) <= 1e-5);
    }
  }
}

TEST_CASE("single-pixel hole fills from the background side") {
  WarpResult r;
  r.image = ImageBuffer(1, 3, 3);
  r.holes = {0, 1, 0};
  r.disparity = {0.1f, 0.0f, 0.9f};
  for (int c = 0; c < 3; ++c) {
    r.image.at(0, 0, c) = 0.2f;  // background (smaller disparity)
    r.image.at(0, 2, c) = 0.9f;  // foreground
  }
  ImageBuffer filled = inpaintHoles(r);
  CHECK(filled.at(0, 1, 0) == doctest::Approx(0.2f).epsilon(1e-7));
}

TEST_CASE("empty hole mask leaves the image untouched") {
  std::mt19937 rng(63);
  WarpResult r;
  r.image = testutil::randomImage(rng, 4, 5, 3);
  r.holes.assign(20, 0);
  r.disparity.assign(20, 0.5f);
  ImageBuffer filled = inpaintHoles(r);
  CHECK(filled.data == r.image.data);
}

TEST_CASE("full-row hole falls back to the nearest filled row") {
  WarpResult r;
  r.image = ImageBuffer(3, 2, 3);
  for (int x = 0; x < 2; ++x)
    for (int c = 0; c < 3; ++c) {
      r.image.at(0, x, c) = 0.3f;
      r.image.at(2, x, c) = 0.7f;
    }
  r.holes = {0, 0, 1, 1, 0, 0};
  r.disparity.assign(6, 0.5f);
  ImageBuffer filled = inpaintHoles(r);
  for (int x = 0; x < 2; ++x)
    CHECK(filled.at(1, x, 0) == doctest::Approx(0.3f).epsilon(1e-7));
}

TEST_CASE("dibr is deterministic across runs") {
  std::mt19937 rng(64);
  ImageBuffer image = testutil::randomImage(rng, 8, 12, 3);
  DepthMap depth = testutil::randomDepth(rng, 8, 12);
  CameraRig rig;
  rig.shiftScale = 6.0f;
  ImageBuffer a = dibrRender(image, depth, rig);
  ImageBuffer b = dibrRender(image, depth, rig);
  CHECK(a.data == b.data);
}
