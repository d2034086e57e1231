#include "mpis/builder.hpp"

#include <algorithm>
#include <cmath>

#include "mpis/image.hpp"
#include "mpis/render.hpp"

namespace mpis {

AssignMasks assignMasksFromDepth(const DepthMap& depth, const PlaneSpec& spec,
                                 AssignMode mode) {
  validateDepth(depth);
  validateSpec(spec);
  const int n = spec.nPlanes;
  const float dMax = static_cast<float>(spec.disparities.front());
  const float dMin = static_cast<float>(spec.disparities.back());
  const float step = (dMax - dMin) / (n - 1);
  AssignMasks masks(depth.height, depth.width, n);

  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      float d = std::clamp(depth.at(y, x), dMin, dMax);
      // t counts planes from the front: t = 0 at d_max.
      float t = (dMax - d) / step;
      if (mode == AssignMode::Hard) {
        // Ties go to the nearer plane (smaller index).
        int k = static_cast<int>(std::ceil(t - 0.5f));
        k = std::clamp(k, 0, n - 1);
        masks.at(y, x, k) = 1.0f;
      } else {
        int k0 = std::clamp(static_cast<int>(std::floor(t)), 0, n - 1);
        int k1 = std::min(k0 + 1, n - 1);
        float frac = std::clamp(t - k0, 0.0f, 1.0f);
        masks.at(y, x, k0) += 1.0f - frac;
        masks.at(y, x, k1) += frac;
      }
    }
  }
  return masks;
}

std::vector<ImageBuffer> contextMasks(const AssignMasks& masks) {
  const int h = masks.height, w = masks.width, n = masks.nPlanes;
  std::vector<ImageBuffer> context(n, ImageBuffer(h, w, 1));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float acc = 0.0f;
      for (int k = n - 1; k >= 0; --k) {
        acc += masks.at(y, x, k);
        context[k].at(y, x) = acc;
      }
    }
  }
  return context;
}

BlendWeights blendWeights(const PlaneStack& stack, BlendIndexOrder order) {
  const int h = stack.height(), w = stack.width();
  const int n = stack.spec.nPlanes;
  BlendWeights out;
  out.height = h;
  out.width = w;
  out.perPlane.assign(n, ImageBuffer(h, w, 1, 1.0f));

  // Alphas per plane, converting from sigma when needed.
  std::vector<ImageBuffer> alphas(n);
  for (int k = 0; k < n; ++k) {
    if (stack.densityMode == DensityMode::DirectAlpha)
      alphas[k] = stack.planes[k].density;
    else
      alphas[k] = alphaFromSigma(stack.planes[k].density,
                                 static_cast<float>(stack.spec.deltas[k]));
  }

  size_t px = static_cast<size_t>(h) * w;
  if (order == BlendIndexOrder::FrontToBack) {
    // w_n = prod_{j<n} (1 - alpha_j); front-most plane is fully visible.
    for (size_t i = 0; i < px; ++i) {
      float t = 1.0f;
      for (int k = 0; k < n; ++k) {
        out.perPlane[k].data[i] = t;
        t *= 1.0f - alphas[k].data[i];
      }
    }
  } else {
    // Literal printed reading: product over planes behind.
    for (size_t i = 0; i < px; ++i) {
      float t = 1.0f;
      for (int k = n - 1; k >= 0; --k) {
        out.perPlane[k].data[i] = t;
        t *= 1.0f - alphas[k].data[i];
      }
    }
  }
  return out;
}

ImageBuffer blendColors(const ImageBuffer& source, const ImageBuffer& lowColor,
                        const ImageBuffer& lowW, int outH, int outW) {
  if (source.height != outH || source.width != outW)
    throw Error(ErrorKind::DimensionMismatch,
                "source must be at the output resolution");
  if (lowColor.height != lowW.height || lowColor.width != lowW.width)
    throw Error(ErrorKind::DimensionMismatch,
                "low-resolution inputs must share one resolution");
  ImageBuffer upC = resampleBilinear(lowColor, outH, outW);
  ImageBuffer upW = resampleBilinear(lowW, outH, outW);
  ImageBuffer out(outH, outW, source.channels);
  size_t px = static_cast<size_t>(outH) * outW;
  int c = source.channels;
  for (size_t i = 0; i < px; ++i) {
    float w = upW.data[i];
    for (int ch = 0; ch < c; ++ch)
      out.data[i * c + ch] =
          w * source.data[i * c + ch] + (1.0f - w) * upC.data[i * c + ch];
  }
  return out;
}

PlaneStack buildMpiClassical(const ImageBuffer& image, const DepthMap& depth,
                             const PlaneSpec& spec, const BuildOptions& opts) {
  validateImage(image);
  if (image.height != depth.height || image.width != depth.width)
    throw Error(ErrorKind::DimensionMismatch,
                "image and depth resolutions differ");
  AssignMasks masks = assignMasksFromDepth(depth, spec, opts.assignMode);
  std::vector<ImageBuffer> context = contextMasks(masks);

  const int h = image.height, w = image.width, n = spec.nPlanes;
  PlaneStack stack;
  stack.spec = spec;
  stack.densityMode = DensityMode::DirectAlpha;
  stack.planes.resize(n);

  for (int k = 0; k < n; ++k) {
    Plane& plane = stack.planes[k];
    plane.color = ImageBuffer(h, w, 3);
    plane.density = ImageBuffer(h, w, 1);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        plane.density.at(y, x) = masks.at(y, x, k);
        if (context[k].at(y, x) > 1e-6f)
          for (int ch = 0; ch < 3; ++ch)
            plane.color.at(y, x, ch) = image.at(y, x, ch);
      }
      if (opts.inpaint) {
        // Extend the nearest in-context pixel along the row into the
        // occluded (nearer-content) zones. prevIn/nextIn are O(W) scans.
        std::vector<int> prevIn(w, -1), nextIn(w, -1);
        int last = -1;
        for (int x = 0; x < w; ++x) {
          if (context[k].at(y, x) > 1e-6f) last = x;
          prevIn[x] = last;
        }
        last = -1;
        for (int x = w - 1; x >= 0; --x) {
          if (context[k].at(y, x) > 1e-6f) last = x;
          nextIn[x] = last;
        }
        for (int x = 0; x < w; ++x) {
          if (context[k].at(y, x) > 1e-6f) continue;
          int srcX;
          if (prevIn[x] < 0) srcX = nextIn[x];
          else if (nextIn[x] < 0) srcX = prevIn[x];
          else srcX = (nextIn[x] - x < x - prevIn[x]) ? nextIn[x] : prevIn[x];
          if (srcX < 0) continue;  // plane empty in this row
          for (int ch = 0; ch < 3; ++ch)
            plane.color.at(y, x, ch) = image.at(y, srcX, ch);
        }
      }
    }
  }
  return stack;
}

}  // namespace mpis
