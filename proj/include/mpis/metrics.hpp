#ifndef MPIS_METRICS_HPP
#define MPIS_METRICS_HPP

#include "mpis/plane.hpp"

namespace mpis {

struct MetricOptions {
  double lambdaMask = 10.0;
  int ssimWindow = 11;
  double ssimSigma = 1.5;
  double ssimK1 = 0.01;
  double ssimK2 = 0.03;
  double dynamicRange = 1.0;
  double psnrCapDb = 100.0;
};

double l1(const ImageBuffer& a, const ImageBuffer& b);
double l1(const DepthMap& a, const DepthMap& b);

double psnr(const ImageBuffer& a, const ImageBuffer& b,
            const MetricOptions& opts = {});

/// Structural similarity, Gaussian window, mean over positions where the
/// window fits; channels averaged.
double ssim(const ImageBuffer& a, const ImageBuffer& b,
            const MetricOptions& opts = {});

/// (1/HW) sum_n sum_xy M_n * |D_ref - d_n|.
double maskLoss(const AssignMasks& masks, const DepthMap& refDepth,
                const PlaneSpec& spec);

/// l1(coarse, ref) + l1(fine, ref) + lambda * maskLoss.
double depthLoss(const DepthMap& dCoarse, const DepthMap& dFine,
                 const DepthMap& dRef, const AssignMasks& masks,
                 const PlaneSpec& spec, const MetricOptions& opts = {});

struct MpiLossReport {
  double total = 0.0;
  double l1Term = 0.0;
  double ssimTerm = 0.0;   // 1 - SSIM
  double depthTerm = 0.0;
};

MpiLossReport mpiLoss(const ImageBuffer& pred, const ImageBuffer& gt,
                      const DepthMap& dPred, const DepthMap& dRef,
                      const MetricOptions& opts = {});

inline double totalLoss(double depthPart, double mpiPart) {
  return depthPart + mpiPart;
}

}  // namespace mpis

#endif
