#include "mpis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mpis {

namespace {

void requireSameShape(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.sameShape(b))
    throw Error(ErrorKind::DimensionMismatch, "image shapes differ");
}

std::vector<double> gaussianKernel(int window, double sigma) {
  std::vector<double> k(window);
  int half = window / 2;
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    double d = i - half;
    k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable valid-region Gaussian filtering of one channel extracted into
// a double plane.
std::vector<double> filterValid(const std::vector<double>& plane, int h, int w,
                                const std::vector<double>& kernel, int& outH,
                                int& outW) {
  int win = static_cast<int>(kernel.size());
  outW = w - win + 1;
  outH = h - win + 1;
  std::vector<double> horiz(static_cast<size_t>(h) * outW);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < outW; ++x) {
      double acc = 0.0;
      for (int i = 0; i < win; ++i)
        acc += plane[static_cast<size_t>(y) * w + x + i] * kernel[i];
      horiz[static_cast<size_t>(y) * outW + x] = acc;
    }
  std::vector<double> out(static_cast<size_t>(outH) * outW);
  for (int y = 0; y < outH; ++y)
    for (int x = 0; x < outW; ++x) {
      double acc = 0.0;
      for (int i = 0; i < win; ++i)
        acc += horiz[static_cast<size_t>(y + i) * outW + x] * kernel[i];
      out[static_cast<size_t>(y) * outW + x] = acc;
    }
  return out;
}

double ssimChannel(const std::vector<double>& pa, const std::vector<double>& pb,
                   int h, int w, const MetricOptions& opts) {
  auto kernel = gaussianKernel(opts.ssimWindow, opts.ssimSigma);
  std::vector<double> aa(pa.size()), bb(pb.size()), ab(pa.size());
  for (size_t i = 0; i < pa.size(); ++i) {
    aa[i] = pa[i] * pa[i];
    bb[i] = pb[i] * pb[i];
    ab[i] = pa[i] * pb[i];
  }
  int oh = 0, ow = 0;
  auto muA = filterValid(pa, h, w, kernel, oh, ow);
  auto muB = filterValid(pb, h, w, kernel, oh, ow);
  auto sAA = filterValid(aa, h, w, kernel, oh, ow);
  auto sBB = filterValid(bb, h, w, kernel, oh, ow);
  auto sAB = filterValid(ab, h, w, kernel, oh, ow);

  double c1 = opts.ssimK1 * opts.dynamicRange;
  c1 *= c1;
  double c2 = opts.ssimK2 * opts.dynamicRange;
  c2 *= c2;
  double total = 0.0;
  for (size_t i = 0; i < muA.size(); ++i) {
    double ma = muA[i], mb = muB[i];
    double va = sAA[i] - ma * ma;
    double vb = sBB[i] - mb * mb;
    double cov = sAB[i] - ma * mb;
    double num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
    double den = (ma * ma + mb * mb + c1) * (va + vb + c2);
    total += num / den;
  }
  return total / static_cast<double>(muA.size());
}

}  // namespace

double l1(const ImageBuffer& a, const ImageBuffer& b) {
  requireSameShape(a, b);
  double acc = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i)
    acc += std::abs(static_cast<double>(a.data[i]) - b.data[i]);
  return acc / static_cast<double>(a.data.size());
}

double l1(const DepthMap& a, const DepthMap& b) {
  if (a.height != b.height || a.width != b.width)
    throw Error(ErrorKind::DimensionMismatch, "depth shapes differ");
  double acc = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i)
    acc += std::abs(static_cast<double>(a.data[i]) - b.data[i]);
  return acc / static_cast<double>(a.data.size());
}

double psnr(const ImageBuffer& a, const ImageBuffer& b,
            const MetricOptions& opts) {
  requireSameShape(a, b);
  double mse = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    double d = static_cast<double>(a.data[i]) - b.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.data.size());
  if (mse <= 0.0) return opts.psnrCapDb;
  double db = 10.0 * std::log10(opts.dynamicRange * opts.dynamicRange / mse);
  return std::min(db, opts.psnrCapDb);
}

double ssim(const ImageBuffer& a, const ImageBuffer& b,
            const MetricOptions& opts) {
  requireSameShape(a, b);
  if (a.height < opts.ssimWindow || a.width < opts.ssimWindow)
    throw Error(ErrorKind::DimensionMismatch,
                "image smaller than the SSIM window");
  size_t px = static_cast<size_t>(a.height) * a.width;
  double total = 0.0;
  std::vector<double> pa(px), pb(px);
  for (int ch = 0; ch < a.channels; ++ch) {
    for (size_t i = 0; i < px; ++i) {
      pa[i] = a.data[i * a.channels + ch];
      pb[i] = b.data[i * b.channels + ch];
    }
    total += ssimChannel(pa, pb, a.height, a.width, opts);
  }
  return total / a.channels;
}

double maskLoss(const AssignMasks& masks, const DepthMap& refDepth,
                const PlaneSpec& spec) {
  if (masks.height != refDepth.height || masks.width != refDepth.width ||
      masks.nPlanes != spec.nPlanes)
    throw Error(ErrorKind::DimensionMismatch,
                "masks, reference depth and spec disagree");
  double acc = 0.0;
  for (int y = 0; y < masks.height; ++y)
    for (int x = 0; x < masks.width; ++x) {
      double d = refDepth.at(y, x);
      for (int n = 0; n < masks.nPlanes; ++n)
        acc += masks.at(y, x, n) * std::abs(d - spec.disparities[n]);
    }
  return acc / (static_cast<double>(masks.height) * masks.width);
}

double depthLoss(const DepthMap& dCoarse, const DepthMap& dFine,
                 const DepthMap& dRef, const AssignMasks& masks,
                 const PlaneSpec& spec, const MetricOptions& opts) {
  return l1(dCoarse, dRef) + l1(dFine, dRef) +
         opts.lambdaMask * maskLoss(masks, dRef, spec);
}

MpiLossReport mpiLoss(const ImageBuffer& pred, const ImageBuffer& gt,
                      const DepthMap& dPred, const DepthMap& dRef,
                      const MetricOptions& opts) {
  MpiLossReport r;
  r.l1Term = l1(pred, gt);
  r.ssimTerm = 1.0 - ssim(pred, gt, opts);
  r.depthTerm = l1(dPred, dRef);
  r.total = r.l1Term + r.ssimTerm + r.depthTerm;
  return r;
}

}  // namespace mpis
