#ifndef MPIS_DIBR_HPP
#define MPIS_DIBR_HPP

#include <vector>

#include "mpis/plane.hpp"

namespace mpis {

struct WarpResult {
  ImageBuffer image;
  std::vector<uint8_t> holes;      // 1 = no source pixel landed here
  std::vector<float> disparity;    // z-buffer contents, for hole filling
};

/// Forward warp with two-column subpixel splatting and a per-row z-buffer;
/// nearer (larger) disparity wins, unwritten pixels are holes.
WarpResult forwardWarp(const ImageBuffer& image, const DepthMap& depth,
                       const CameraRig& rig);

/// Fills holes by horizontal extension from the background side (smaller
/// warped disparity); full-row holes fall back to the nearest filled row.
ImageBuffer inpaintHoles(const WarpResult& warped);

/// forwardWarp then inpaintHoles.
ImageBuffer dibrRender(const ImageBuffer& image, const DepthMap& depth,
                       const CameraRig& rig);

}  // namespace mpis

#endif
