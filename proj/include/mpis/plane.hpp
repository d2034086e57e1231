#ifndef MPIS_PLANE_HPP
#define MPIS_PLANE_HPP

#include <array>
#include <optional>
#include <vector>

#include "mpis/image.hpp"

namespace mpis {

/// N plane disparities, strictly decreasing and uniformly spaced.
/// Index 0 is the nearest plane (largest disparity).
struct PlaneSpec {
  int nPlanes = 0;
  std::vector<double> disparities;  // d_1..d_N, decreasing
  std::vector<double> deltas;  // inter-plane spacing, deltas[N-1] repeats the step

  double depthOf(int n) const;  // z_n = 1 / max(d_n, eps)
};

enum class DensityMode { RawSigma, DirectAlpha };

struct Plane {
  ImageBuffer color;    // 3 channels
  ImageBuffer density;  // 1 channel: sigma or alpha depending on mode
};

/// The MPI: N fronto-parallel planes plus their placement.
struct PlaneStack {
  PlaneSpec spec;
  std::vector<Plane> planes;
  DensityMode densityMode = DensityMode::DirectAlpha;

  int height() const { return planes.empty() ? 0 : planes[0].color.height; }
  int width() const { return planes.empty() ? 0 : planes[0].color.width; }
};

/// Per-pixel soft assignment of content to planes; sums to 1 across planes.
/// Layout is (y, x, n) so the per-pixel plane loop is contiguous.
struct AssignMasks {
  int height = 0;
  int width = 0;
  int nPlanes = 0;
  std::vector<float> weights;

  AssignMasks() = default;
  AssignMasks(int h, int w, int n)
      : height(h), width(w), nPlanes(n),
        weights(static_cast<size_t>(h) * w * n, 0.0f) {}

  float& at(int y, int x, int n) {
    return weights[(static_cast<size_t>(y) * width + x) * nPlanes + n];
  }
  float at(int y, int x, int n) const {
    return weights[(static_cast<size_t>(y) * width + x) * nPlanes + n];
  }
};

using Mat3 = std::array<std::array<double, 3>, 3>;

enum class BaselineDirection { LeftToRight, RightToLeft };

/// Stereo rig; shift_scale = f_x * b converts disparity to pixel shift.
/// Intrinsics are optional and only used by the homography validation path.
struct CameraRig {
  float shiftScale = 0.0f;
  BaselineDirection direction = BaselineDirection::LeftToRight;
  float focalPx = 0.0f;
  float baseline = 0.0f;
  std::optional<Mat3> intrinsics;

  float sign() const {
    return direction == BaselineDirection::LeftToRight ? -1.0f : 1.0f;
  }
};

void validateSpec(const PlaneSpec& spec);
void validateStack(const PlaneStack& stack);
void validateMasks(const AssignMasks& masks);

}  // namespace mpis

#endif
