#ifndef MPIS_IMAGE_HPP
#define MPIS_IMAGE_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "mpis/error.hpp"

namespace mpis {

/// Row-major float image, values nominally in [0,1]. Channels is 1, 3 or 4.
/// Single-channel buffers double as generic maps (alpha, blend weights,
/// densities); validateImage enforces the [0,1] range, stack validation
/// relaxes it for raw densities.
struct ImageBuffer {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;

  ImageBuffer() = default;
  ImageBuffer(int h, int w, int c, float fill = 0.0f)
      : height(h), width(w), channels(c),
        data(static_cast<size_t>(h) * w * c, fill) {}

  float& at(int y, int x, int c = 0) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  float at(int y, int x, int c = 0) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  const float* row(int y) const {
    return data.data() + static_cast<size_t>(y) * width * channels;
  }
  float* row(int y) {
    return data.data() + static_cast<size_t>(y) * width * channels;
  }
  size_t size() const { return data.size(); }
  bool sameShape(const ImageBuffer& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
};

/// Normalized disparity map in [0,1], 1 = nearest to camera.
struct DepthMap {
  int height = 0;
  int width = 0;
  std::vector<float> data;

  DepthMap() = default;
  DepthMap(int h, int w, float fill = 0.0f)
      : height(h), width(w), data(static_cast<size_t>(h) * w, fill) {}

  float& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
  float at(int y, int x) const {
    return data[static_cast<size_t>(y) * width + x];
  }
};

void validateImage(const ImageBuffer& image);
void validateDepth(const DepthMap& depth);

/// Clamps every value into [0,1] in place.
void clamp01(ImageBuffer& image);

/// Separable bilinear resampling, align-corners-false (sample centers at
/// (i+0.5)/size) with edge clamp.
ImageBuffer resampleBilinear(const ImageBuffer& src, int outH, int outW);
DepthMap resampleBilinear(const DepthMap& src, int outH, int outW);

/// Box-filter downsample by an integer factor (both dims divisible).
ImageBuffer boxDownsample(const ImageBuffer& src, int factor);

}  // namespace mpis

#endif
