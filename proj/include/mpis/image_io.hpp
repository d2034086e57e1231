#ifndef MPIS_IMAGE_IO_HPP
#define MPIS_IMAGE_IO_HPP

#include <string>

#include "mpis/image.hpp"

namespace mpis {

/// Reads 8/16-bit PNG (gray/RGB/RGBA), PFM (Pf/PF) or PPM (P6) by
/// extension; values scaled to [0,1].
ImageBuffer readImage(const std::string& path);

/// PNG gray (value/maxval) or PFM; PFM depth is min-max normalized per
/// frame (set normalize = false to keep raw values, clamped).
DepthMap readDepth(const std::string& path, bool normalize = true);

/// bitDepth 8 or 16; PNG/PPM chosen by extension, PFM always float.
void writeImage(const std::string& path, const ImageBuffer& image,
                int bitDepth = 8);

void writeDepth(const std::string& path, const DepthMap& depth,
                int bitDepth = 16);

}  // namespace mpis

#endif
