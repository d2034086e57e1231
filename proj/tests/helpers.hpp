#ifndef MPIS_TEST_HELPERS_HPP
#define MPIS_TEST_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <random>

#include "mpis/builder.hpp"
#include "mpis/geometry.hpp"
#include "mpis/plane.hpp"

namespace testutil {

inline mpis::ImageBuffer randomImage(std::mt19937& rng, int h, int w, int c) {
  mpis::ImageBuffer img(h, w, c);
  std::uniform_real_distribution<float> dist(0.0f, 1.0f);
  for (float& v : img.data) v = dist(rng);
  return img;
}

inline mpis::DepthMap randomDepth(std::mt19937& rng, int h, int w) {
  mpis::DepthMap d(h, w);
  std::uniform_real_distribution<float> dist(0.0f, 1.0f);
  for (float& v : d.data) v = dist(rng);
  return d;
}

/// Direct-alpha stack with random colors and alphas.
inline mpis::PlaneStack randomStack(std::mt19937& rng, int h, int w,
                                    int nPlanes) {
  mpis::PlaneStack stack;
  stack.spec = mpis::makePlaneSpec(nPlanes, 0.0f, 1.0f);
  stack.densityMode = mpis::DensityMode::DirectAlpha;
  stack.planes.resize(nPlanes);
  std::uniform_real_distribution<float> dist(0.0f, 1.0f);
  for (int k = 0; k < nPlanes; ++k) {
    stack.planes[k].color = randomImage(rng, h, w, 3);
    stack.planes[k].density = mpis::ImageBuffer(h, w, 1);
    for (float& v : stack.planes[k].density.data) v = dist(rng);
  }
  return stack;
}

inline double maxAbsDiff(const mpis::ImageBuffer& a,
                         const mpis::ImageBuffer& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(static_cast<double>(a.data[i]) - b.data[i]));
  return m;
}

inline double maxAbsDiff(const mpis::DepthMap& a, const mpis::DepthMap& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(static_cast<double>(a.data[i]) - b.data[i]));
  return m;
}

/// Smooth band-limited test image: a few low-frequency sinusoids.
inline mpis::ImageBuffer smoothImage(int h, int w, int c, unsigned seed = 5) {
  mpis::ImageBuffer img(h, w, c);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> amp(0.05f, 0.15f);
  std::uniform_real_distribution<float> freq(0.02f, 0.12f);
  std::uniform_real_distribution<float> phase(0.0f, 6.28f);
  for (int ch = 0; ch < c; ++ch) {
    float a1 = amp(rng), a2 = amp(rng), f1 = freq(rng), f2 = freq(rng);
    float g1 = freq(rng), g2 = freq(rng), p1 = phase(rng), p2 = phase(rng);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        img.at(y, x, ch) = 0.5f + a1 * std::sin(f1 * x + g1 * y + p1) +
                           a2 * std::cos(f2 * x + g2 * y + p2);
  }
  for (float& v : img.data) v = std::clamp(v, 0.0f, 1.0f);
  return img;
}

/// Photo-like fixture: layered smooth gradients, occluding shapes and
/// fine multi-octave texture, clamped to [0,1].
inline mpis::ImageBuffer photoLikeImage(int h, int w, unsigned seed) {
  mpis::ImageBuffer img(h, w, 3);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  float skyR = unit(rng), skyG = unit(rng), skyB = unit(rng);
  for (int y = 0; y < h; ++y) {
    float t = static_cast<float>(y) / h;
    for (int x = 0; x < w; ++x) {
      img.at(y, x, 0) = 0.3f + 0.5f * skyR * (1 - t);
      img.at(y, x, 1) = 0.3f + 0.5f * skyG * (1 - t);
      img.at(y, x, 2) = 0.4f + 0.5f * skyB * (1 - t);
    }
  }
  for (int s = 0; s < 8; ++s) {
    int cx = static_cast<int>(unit(rng) * w);
    int cy = static_cast<int>(unit(rng) * h);
    int r = 2 + static_cast<int>(unit(rng) * (std::min(h, w) / 3));
    float cr = unit(rng), cg = unit(rng), cb = unit(rng);
    for (int y = std::max(0, cy - r); y < std::min(h, cy + r); ++y)
      for (int x = std::max(0, cx - r); x < std::min(w, cx + r); ++x) {
        int dx = x - cx, dy = y - cy;
        if (dx * dx + dy * dy < r * r) {
          img.at(y, x, 0) = cr;
          img.at(y, x, 1) = cg;
          img.at(y, x, 2) = cb;
        }
      }
  }
  // multi-octave texture
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        float n = 0.04f * std::sin(0.9f * x + 0.7f * y + c) +
                  0.02f * std::sin(2.3f * x - 1.7f * y);
        img.at(y, x, c) = std::clamp(img.at(y, x, c) + n, 0.0f, 1.0f);
      }
  return img;
}

}  // namespace testutil

#endif
