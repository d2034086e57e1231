#include "mpis/dibr.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mpis/parallel.hpp"

namespace mpis {

namespace {
constexpr float kDisparityTie = 1e-4f;   // z-buffer tie tolerance
constexpr float kMinWeight = 1e-6f;      // below this, nothing landed
}

WarpResult forwardWarp(const ImageBuffer& image, const DepthMap& depth,
                       const CameraRig& rig) {
  if (image.height != depth.height || image.width != depth.width)
    throw Error(ErrorKind::DimensionMismatch,
                "image and depth resolutions differ");
  const int h = image.height, w = image.width, c = image.channels;
  WarpResult res;
  res.image = ImageBuffer(h, w, c);
  res.holes.assign(static_cast<size_t>(h) * w, 1);
  res.disparity.assign(static_cast<size_t>(h) * w, 0.0f);

  parallelFor(0, h, [&](int y0, int y1) {
    // Per-row z-buffer with accumulated color and splat weight.
    std::vector<float> zbuf(w), wacc(w), cacc(static_cast<size_t>(w) * c);
    for (int y = y0; y < y1; ++y) {
      std::fill(zbuf.begin(), zbuf.end(), -1.0f);
      std::fill(wacc.begin(), wacc.end(), 0.0f);
      std::fill(cacc.begin(), cacc.end(), 0.0f);
      const float* src = image.row(y);
      for (int x = 0; x < w; ++x) {
        float d = depth.at(y, x);
        float xt = x + rig.sign() * rig.shiftScale * d;
        int x0 = static_cast<int>(std::floor(xt));
        float frac = xt - x0;
        const float wts[2] = {1.0f - frac, frac};
        for (int tap = 0; tap < 2; ++tap) {
          int xi = x0 + tap;
          float wt = wts[tap];
          if (xi < 0 || xi >= w || wt <= 0.0f) continue;
          if (d > zbuf[xi] + kDisparityTie) {
            // Nearer content replaces whatever accumulated before.
            zbuf[xi] = d;
            wacc[xi] = wt;
            for (int ch = 0; ch < c; ++ch)
              cacc[static_cast<size_t>(xi) * c + ch] = src[x * c + ch] * wt;
          } else if (d > zbuf[xi] - kDisparityTie) {
            wacc[xi] += wt;
            for (int ch = 0; ch < c; ++ch)
              cacc[static_cast<size_t>(xi) * c + ch] += src[x * c + ch] * wt;
          }
        }
      }
      float* dst = res.image.row(y);
      for (int x = 0; x < w; ++x) {
        if (wacc[x] > kMinWeight) {
          res.holes[static_cast<size_t>(y) * w + x] = 0;
          res.disparity[static_cast<size_t>(y) * w + x] = zbuf[x];
          float inv = 1.0f / wacc[x];
          for (int ch = 0; ch < c; ++ch)
            dst[x * c + ch] = cacc[static_cast<size_t>(x) * c + ch] * inv;
        }
      }
    }
  });
  return res;
}

ImageBuffer inpaintHoles(const WarpResult& warped) {
  const ImageBuffer& img = warped.image;
  const int h = img.height, w = img.width, c = img.channels;
  ImageBuffer out = img;

  bool anyRowFilled = false;
  std::vector<uint8_t> rowHasContent(h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (!warped.holes[static_cast<size_t>(y) * w + x]) {
        rowHasContent[y] = 1;
        anyRowFilled = true;
        break;
      }
  if (!anyRowFilled) return out;  // nothing to extend from

  for (int y = 0; y < h; ++y) {
    if (!rowHasContent[y]) continue;
    const uint8_t* holes = &warped.holes[static_cast<size_t>(y) * w];
    const float* disp = &warped.disparity[static_cast<size_t>(y) * w];
    std::vector<int> prevF(w, -1), nextF(w, -1);
    int last = -1;
    for (int x = 0; x < w; ++x) {
      if (!holes[x]) last = x;
      prevF[x] = last;
    }
    last = -1;
    for (int x = w - 1; x >= 0; --x) {
      if (!holes[x]) last = x;
      nextF[x] = last;
    }
    for (int x = 0; x < w; ++x) {
      if (!holes[x]) continue;
      int srcX;
      if (prevF[x] < 0) srcX = nextF[x];
      else if (nextF[x] < 0) srcX = prevF[x];
      else
        // background side = smaller warped disparity
        srcX = disp[prevF[x]] <= disp[nextF[x]] ? prevF[x] : nextF[x];
      for (int ch = 0; ch < c; ++ch)
        out.at(y, x, ch) = out.at(y, srcX, ch);
    }
  }
  // Full-row holes fall back to the nearest filled row.
  for (int y = 0; y < h; ++y) {
    if (rowHasContent[y]) continue;
    int best = -1;
    for (int dy = 1; dy < h; ++dy) {
      if (y - dy >= 0 && rowHasContent[y - dy]) { best = y - dy; break; }
      if (y + dy < h && rowHasContent[y + dy]) { best = y + dy; break; }
    }
    if (best >= 0)
      std::copy(out.row(best), out.row(best) + static_cast<size_t>(w) * c,
                out.row(y));
  }
  return out;
}

ImageBuffer dibrRender(const ImageBuffer& image, const DepthMap& depth,
                       const CameraRig& rig) {
  return inpaintHoles(forwardWarp(image, depth, rig));
}

}  // namespace mpis
