#include "mpis/plane.hpp"

#include <cmath>
#include <string>

namespace mpis {

namespace {
constexpr double kDisparityEps = 1e-6;
}

double PlaneSpec::depthOf(int n) const {
  return 1.0 / std::max(static_cast<double>(disparities[n]), kDisparityEps);
}

void validateSpec(const PlaneSpec& spec) {
  if (spec.nPlanes < 2)
    throw Error(ErrorKind::ValueOutOfRange, "plane spec needs N >= 2");
  if (static_cast<int>(spec.disparities.size()) != spec.nPlanes)
    throw Error(ErrorKind::DimensionMismatch,
                "disparity count does not match n_planes");
  for (int n = 0; n + 1 < spec.nPlanes; ++n) {
    if (!(spec.disparities[n] > spec.disparities[n + 1]))
      throw Error(ErrorKind::ValueOutOfRange,
                  "disparities must be strictly decreasing");
  }
  if (spec.disparities.back() < 0.0f)
    throw Error(ErrorKind::ValueOutOfRange, "disparities must be >= 0");
  double step =
      static_cast<double>(spec.disparities[0]) - spec.disparities[1];
  for (int n = 0; n + 1 < spec.nPlanes; ++n) {
    double d = static_cast<double>(spec.disparities[n]) -
               spec.disparities[n + 1];
    if (std::abs(d - step) > 1e-9)
      throw Error(ErrorKind::ValueOutOfRange,
                  "disparities are not uniformly spaced");
  }
}

void validateStack(const PlaneStack& stack) {
  validateSpec(stack.spec);
  if (static_cast<int>(stack.planes.size()) != stack.spec.nPlanes)
    throw Error(ErrorKind::DimensionMismatch,
                "plane count does not match spec");
  int h = stack.height(), w = stack.width();
  for (const Plane& p : stack.planes) {
    if (p.color.height != h || p.color.width != w || p.color.channels != 3)
      throw Error(ErrorKind::DimensionMismatch,
                  "plane color maps must share one HxWx3 shape");
    if (p.density.height != h || p.density.width != w ||
        p.density.channels != 1)
      throw Error(ErrorKind::DimensionMismatch,
                  "plane density maps must share one HxWx1 shape");
    for (float v : p.color.data)
      if (!std::isfinite(v))
        throw Error(ErrorKind::NonFinite, "plane color contains non-finite");
    for (float v : p.density.data) {
      if (!std::isfinite(v))
        throw Error(ErrorKind::NonFinite, "plane density contains non-finite");
      if (v < 0.0f)
        throw Error(ErrorKind::ValueOutOfRange, "plane density is negative");
      if (stack.densityMode == DensityMode::DirectAlpha && v > 1.0f)
        throw Error(ErrorKind::ValueOutOfRange,
                    "direct-alpha density exceeds 1");
    }
  }
}

void validateMasks(const AssignMasks& masks) {
  if (masks.height <= 0 || masks.width <= 0 || masks.nPlanes <= 0)
    throw Error(ErrorKind::ZeroDimension, "assign masks are empty");
  if (masks.weights.size() !=
      static_cast<size_t>(masks.height) * masks.width * masks.nPlanes)
    throw Error(ErrorKind::DimensionMismatch,
                "mask data length does not match dimensions");
  for (int y = 0; y < masks.height; ++y) {
    for (int x = 0; x < masks.width; ++x) {
      float sum = 0.0f;
      for (int n = 0; n < masks.nPlanes; ++n) {
        float v = masks.at(y, x, n);
        if (!std::isfinite(v))
          throw Error(ErrorKind::NonFinite, "mask contains non-finite");
        if (v < 0.0f)
          throw Error(ErrorKind::ValueOutOfRange, "mask weight is negative");
        sum += v;
      }
      if (std::abs(sum - 1.0f) > 1e-5f)
        throw Error(ErrorKind::ValueOutOfRange,
                    "per-pixel mask weights do not sum to 1 (sum=" +
                        std::to_string(sum) + ")");
    }
  }
}

}  // namespace mpis
