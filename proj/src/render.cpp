#include "mpis/render.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mpis/geometry.hpp"
#include "mpis/parallel.hpp"

namespace mpis {

ImageBuffer alphaFromSigma(const ImageBuffer& sigma, float delta,
                           AlphaConvention conv) {
  if (!(delta > 0.0f))
    throw Error(ErrorKind::ValueOutOfRange, "delta must be positive");
  ImageBuffer alpha(sigma.height, sigma.width, sigma.channels);
  for (size_t i = 0; i < sigma.data.size(); ++i) {
    float s = sigma.data[i];
    if (s < 0.0f)
      throw Error(ErrorKind::NegativeSigma, "sigma must be non-negative");
    float e = std::exp(-s * delta);
    alpha.data[i] = conv == AlphaConvention::OneMinusExp ? 1.0f - e : e;
  }
  return alpha;
}

namespace {

// Integer/fractional decomposition of a constant horizontal shift:
// source coordinate for output x is x + base + frac.
struct ShiftDecomp {
  int base;
  float frac;
};

ShiftDecomp decomposeShift(float shiftPx) {
  double neg = -static_cast<double>(shiftPx);
  double fl = std::floor(neg);
  return {static_cast<int>(fl), static_cast<float>(neg - fl)};
}

// Warp one row of (color, alpha). Color clamps to the edge; alpha taps
// outside the source are zero.
void warpRow(const float* color, const float* alpha, int w, int channels,
             ShiftDecomp sd, float* outColor, float* outAlpha) {
  for (int x = 0; x < w; ++x) {
    int i0 = x + sd.base;
    int i1 = i0 + 1;
    float f = sd.frac;
    int c0 = std::clamp(i0, 0, w - 1);
    int c1 = std::clamp(i1, 0, w - 1);
    for (int ch = 0; ch < channels; ++ch)
      outColor[x * channels + ch] = (1.0f - f) * color[c0 * channels + ch] +
                                    f * color[c1 * channels + ch];
    float a0 = (i0 >= 0 && i0 < w) ? alpha[i0] : 0.0f;
    float a1 = (i1 >= 0 && i1 < w) ? alpha[i1] : 0.0f;
    outAlpha[x] = (1.0f - f) * a0 + f * a1;
  }
}

std::vector<ImageBuffer> stackAlphas(const PlaneStack& stack,
                                     const RenderOptions& opts) {
  std::vector<ImageBuffer> alphas(stack.spec.nPlanes);
  for (int k = 0; k < stack.spec.nPlanes; ++k) {
    if (stack.densityMode == DensityMode::DirectAlpha)
      alphas[k] = stack.planes[k].density;
    else
      alphas[k] = alphaFromSigma(stack.planes[k].density,
                                 static_cast<float>(stack.spec.deltas[k]),
                                 opts.alpha);
  }
  return alphas;
}

// Plane visit order for the running over-operator: the first visited plane
// is unattenuated.
std::vector<int> visitOrder(int n, BlendIndexOrder order) {
  std::vector<int> idx(n);
  for (int k = 0; k < n; ++k)
    idx[k] = order == BlendIndexOrder::FrontToBack ? k : n - 1 - k;
  return idx;
}

}  // namespace

std::pair<ImageBuffer, ImageBuffer> warpPlane(const ImageBuffer& color,
                                              const ImageBuffer& alpha,
                                              float shiftPx) {
  if (!std::isfinite(shiftPx))
    throw Error(ErrorKind::NonFinite, "shift must be finite");
  if (color.height != alpha.height || color.width != alpha.width)
    throw Error(ErrorKind::DimensionMismatch,
                "color and alpha resolutions differ");
  ImageBuffer outC(color.height, color.width, color.channels);
  ImageBuffer outA(alpha.height, alpha.width, 1);
  ShiftDecomp sd = decomposeShift(shiftPx);
  for (int y = 0; y < color.height; ++y)
    warpRow(color.row(y), alpha.row(y), color.width, color.channels, sd,
            outC.row(y), outA.row(y));
  return {std::move(outC), std::move(outA)};
}

ImageBuffer composite(const PlaneStack& stack, const RenderOptions& opts) {
  const int h = stack.height(), w = stack.width();
  const int n = stack.spec.nPlanes;
  std::vector<ImageBuffer> alphas = stackAlphas(stack, opts);
  std::vector<int> order = visitOrder(n, opts.blendOrder);
  ImageBuffer out(h, w, 3);
  size_t px = static_cast<size_t>(h) * w;
  for (size_t i = 0; i < px; ++i) {
    float t = 1.0f;
    float r = 0.0f, g = 0.0f, b = 0.0f;
    for (int k : order) {
      float a = alphas[k].data[i];
      float wgt = a * t;
      const float* c = &stack.planes[k].color.data[i * 3];
      r += c[0] * wgt;
      g += c[1] * wgt;
      b += c[2] * wgt;
      t *= 1.0f - a;
    }
    out.data[i * 3 + 0] = r;
    out.data[i * 3 + 1] = g;
    out.data[i * 3 + 2] = b;
  }
  return out;
}

DepthMap compositeDepth(const PlaneStack& stack, const RenderOptions& opts) {
  const int h = stack.height(), w = stack.width();
  const int n = stack.spec.nPlanes;
  std::vector<ImageBuffer> alphas = stackAlphas(stack, opts);
  std::vector<int> order = visitOrder(n, opts.blendOrder);
  DepthMap out(h, w);
  size_t px = static_cast<size_t>(h) * w;
  for (size_t i = 0; i < px; ++i) {
    float t = 1.0f;
    float acc = 0.0f, accA = 0.0f;
    for (int k : order) {
      float a = alphas[k].data[i];
      float wgt = a * t;
      acc += static_cast<float>(stack.spec.disparities[k]) * wgt;
      accA += wgt;
      t *= 1.0f - a;
    }
    out.data[i] = accA > 1e-6f ? acc / accA : 0.0f;
  }
  return out;
}

ImageBuffer renderView(const PlaneStack& stack, const CameraRig& rig,
                       const RenderOptions& opts) {
  const int h = stack.height(), w = stack.width();
  const int n = stack.spec.nPlanes;
  std::vector<ImageBuffer> alphas = stackAlphas(stack, opts);
  ShiftTable shifts = makeShiftTable(stack.spec, rig);
  std::vector<ShiftDecomp> sd(n);
  for (int k = 0; k < n; ++k) sd[k] = decomposeShift(shifts.shifts[k]);
  std::vector<int> order = visitOrder(n, opts.blendOrder);

  ImageBuffer out(h, w, 3);
  parallelFor(0, h, [&](int y0, int y1) {
    std::vector<float> rowC(static_cast<size_t>(w) * 3);
    std::vector<float> rowA(w);
    for (int y = y0; y < y1; ++y) {
      float* dst = out.row(y);
      std::vector<float> trans(w, 1.0f);
      for (int k : order) {
        warpRow(stack.planes[k].color.row(y), alphas[k].row(y), w, 3, sd[k],
                rowC.data(), rowA.data());
        for (int x = 0; x < w; ++x) {
          float a = rowA[x];
          if (a > 0.0f) {
            float wgt = a * trans[x];
            dst[x * 3 + 0] += rowC[x * 3 + 0] * wgt;
            dst[x * 3 + 1] += rowC[x * 3 + 1] * wgt;
            dst[x * 3 + 2] += rowC[x * 3 + 2] * wgt;
            trans[x] *= 1.0f - a;
          }
        }
      }
    }
  }, opts.threads);
  return out;
}

ImageBuffer renderViewNaive(const PlaneStack& stack, const CameraRig& rig,
                            const RenderOptions& opts) {
  const int h = stack.height(), w = stack.width();
  const int n = stack.spec.nPlanes;
  std::vector<ImageBuffer> alphas = stackAlphas(stack, opts);
  ShiftTable shifts = makeShiftTable(stack.spec, rig);
  std::vector<int> order = visitOrder(n, opts.blendOrder);

  ImageBuffer out(h, w, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float trans = 1.0f;
      for (int k : order) {
        float xs = x - shifts.shifts[k];
        int i0 = static_cast<int>(std::floor(xs));
        int i1 = i0 + 1;
        float f = xs - i0;
        int c0 = std::clamp(i0, 0, w - 1);
        int c1 = std::clamp(i1, 0, w - 1);
        float a0 = (i0 >= 0 && i0 < w) ? alphas[k].at(y, i0) : 0.0f;
        float a1 = (i1 >= 0 && i1 < w) ? alphas[k].at(y, i1) : 0.0f;
        float a = (1.0f - f) * a0 + f * a1;
        float wgt = a * trans;
        for (int ch = 0; ch < 3; ++ch) {
          float c = (1.0f - f) * stack.planes[k].color.at(y, c0, ch) +
                    f * stack.planes[k].color.at(y, c1, ch);
          out.at(y, x, ch) += c * wgt;
        }
        trans *= 1.0f - a;
      }
    }
  }
  return out;
}

ImageBuffer renderLowresPipeline(const ImageBuffer& source,
                                 const PlaneStack& lowStack,
                                 const CameraRig& rig, int factor,
                                 const RenderOptions& opts) {
  const int fullH = source.height, fullW = source.width;
  if (factor < 1 || lowStack.height() * factor != fullH ||
      lowStack.width() * factor != fullW)
    throw Error(ErrorKind::BadFactor,
                "source resolution must be factor * low resolution");
  const int n = lowStack.spec.nPlanes;
  BlendWeights weights = blendWeights(lowStack, opts.blendOrder);
  ShiftTable shifts = makeShiftTable(lowStack.spec, rig);
  std::vector<ImageBuffer> lowAlphas = stackAlphas(lowStack, opts);
  std::vector<int> order = visitOrder(n, opts.blendOrder);

  ImageBuffer out(fullH, fullW, 3);
  std::vector<float> trans(static_cast<size_t>(fullH) * fullW, 1.0f);
  for (int k : order) {
    ImageBuffer blended = blendColors(source, lowStack.planes[k].color,
                                      weights.perPlane[k], fullH, fullW);
    ImageBuffer upA = resampleBilinear(lowAlphas[k], fullH, fullW);
    ShiftDecomp sd = decomposeShift(shifts.shifts[k]);
    parallelFor(0, fullH, [&](int y0, int y1) {
      std::vector<float> rowC(static_cast<size_t>(fullW) * 3);
      std::vector<float> rowA(fullW);
      for (int y = y0; y < y1; ++y) {
        warpRow(blended.row(y), upA.row(y), fullW, 3, sd, rowC.data(),
                rowA.data());
        float* dst = out.row(y);
        float* t = trans.data() + static_cast<size_t>(y) * fullW;
        for (int x = 0; x < fullW; ++x) {
          float a = rowA[x];
          float wgt = a * t[x];
          dst[x * 3 + 0] += rowC[x * 3 + 0] * wgt;
          dst[x * 3 + 1] += rowC[x * 3 + 1] * wgt;
          dst[x * 3 + 2] += rowC[x * 3 + 2] * wgt;
          t[x] *= 1.0f - a;
        }
      }
    }, opts.threads);
  }
  return out;
}

ImageBuffer renderLowresFused(const ImageBuffer& source,
                              const PlaneStack& lowStack, const CameraRig& rig,
                              int factor, const RenderOptions& opts) {
  const int fullH = source.height, fullW = source.width;
  if (factor < 1 || lowStack.height() * factor != fullH ||
      lowStack.width() * factor != fullW)
    throw Error(ErrorKind::BadFactor,
                "source resolution must be factor * low resolution");
  const int lowH = lowStack.height(), lowW = lowStack.width();
  const int n = lowStack.spec.nPlanes;
  BlendWeights weights = blendWeights(lowStack, opts.blendOrder);
  std::vector<ImageBuffer> lowAlphas = stackAlphas(lowStack, opts);
  ShiftTable shifts = makeShiftTable(lowStack.spec, rig);
  std::vector<int> order = visitOrder(n, opts.blendOrder);

  // Nonzero-alpha column span per (plane, low row); planes are sparse in
  // classical stacks and the span prunes almost all sampling work.
  std::vector<std::vector<int>> spanLo(n, std::vector<int>(lowH, lowW));
  std::vector<std::vector<int>> spanHi(n, std::vector<int>(lowH, -1));
  for (int k = 0; k < n; ++k)
    for (int y = 0; y < lowH; ++y) {
      const float* a = lowAlphas[k].row(y);
      int lo = 0, hi = lowW - 1;
      while (lo < lowW && a[lo] <= 0.0f) ++lo;
      while (hi >= lo && a[hi] <= 0.0f) --hi;
      spanLo[k][y] = lo;
      spanHi[k][y] = hi;
    }

  const float invF = 1.0f / factor;
  ImageBuffer out(fullH, fullW, 3);
  parallelFor(0, fullH, [&](int yBegin, int yEnd) {
    std::vector<float> trans(fullW);
    for (int y = yBegin; y < yEnd; ++y) {
      float yl = (y + 0.5f) * invF - 0.5f;
      int ly0 = std::clamp(static_cast<int>(std::floor(yl)), 0, lowH - 1);
      int ly1 = std::min(ly0 + 1, lowH - 1);
      float fy = std::clamp(yl - std::floor(yl), 0.0f, 1.0f);
      std::fill(trans.begin(), trans.end(), 1.0f);
      float* dst = out.row(y);
      const float* srcRow = source.row(y);
      for (int k : order) {
        int sLo = std::min(spanLo[k][ly0], spanLo[k][ly1]);
        int sHi = std::max(spanHi[k][ly0], spanHi[k][ly1]);
        if (sHi < sLo) continue;
        float s = shifts.shifts[k];
        // Output columns whose sampled low coordinate can touch the span.
        int xLo = static_cast<int>(
            std::floor(s + factor * (sLo - 1 + 0.5f) + 0.5f - factor));
        int xHi = static_cast<int>(
            std::ceil(s + factor * (sHi + 1 + 0.5f) + 0.5f + factor));
        xLo = std::clamp(xLo, 0, fullW);
        xHi = std::clamp(xHi, 0, fullW);
        const float* aR0 = lowAlphas[k].row(ly0);
        const float* aR1 = lowAlphas[k].row(ly1);
        const float* wR0 = weights.perPlane[k].row(ly0);
        const float* wR1 = weights.perPlane[k].row(ly1);
        const float* cR0 = lowStack.planes[k].color.row(ly0);
        const float* cR1 = lowStack.planes[k].color.row(ly1);
        for (int x = xLo; x < xHi; ++x) {
          float xs = x - s;
          if (xs <= -1.0f || xs >= static_cast<float>(fullW)) continue;
          // Border columns mirror warpRow: alpha taps outside the source
          // are zero, color taps edge-clamp.
          int sx0 = static_cast<int>(std::floor(xs));
          int sx1 = sx0 + 1;
          float sf = xs - sx0;
          float aEdge = (sx0 >= 0 ? 1.0f - sf : 0.0f) +
                        (sx1 < fullW ? sf : 0.0f);
          if (aEdge <= 0.0f) continue;
          float xc = std::clamp(xs, 0.0f, static_cast<float>(fullW - 1));
          float xl = (xc + 0.5f) * invF - 0.5f;
          int lx0 = std::clamp(static_cast<int>(std::floor(xl)), 0, lowW - 1);
          int lx1 = std::min(lx0 + 1, lowW - 1);
          float fx = std::clamp(xl - std::floor(xl), 0.0f, 1.0f);
          float w00 = (1.0f - fy) * (1.0f - fx), w01 = (1.0f - fy) * fx;
          float w10 = fy * (1.0f - fx), w11 = fy * fx;
          float a = aEdge * (w00 * aR0[lx0] + w01 * aR0[lx1] +
                             w10 * aR1[lx0] + w11 * aR1[lx1]);
          if (a <= 0.0f) continue;
          float wv = w00 * wR0[lx0] + w01 * wR0[lx1] + w10 * wR1[lx0] +
                     w11 * wR1[lx1];
          sx0 = std::clamp(sx0, 0, fullW - 1);
          sx1 = std::clamp(sx1, 0, fullW - 1);
          float wgt = a * trans[x];
          for (int ch = 0; ch < 3; ++ch) {
            float cLow = w00 * cR0[lx0 * 3 + ch] + w01 * cR0[lx1 * 3 + ch] +
                         w10 * cR1[lx0 * 3 + ch] + w11 * cR1[lx1 * 3 + ch];
            float cSrc = (1.0f - sf) * srcRow[sx0 * 3 + ch] +
                         sf * srcRow[sx1 * 3 + ch];
            dst[x * 3 + ch] += (wv * cSrc + (1.0f - wv) * cLow) * wgt;
          }
          trans[x] *= 1.0f - a;
        }
      }
    }
  }, opts.threads);
  return out;
}

}  // namespace mpis
