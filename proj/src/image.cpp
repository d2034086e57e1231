#include "mpis/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mpis {

namespace {

void checkFiniteRange(const std::vector<float>& data, const char* what,
                      bool checkRange) {
  for (float v : data) {
    if (!std::isfinite(v))
      throw Error(ErrorKind::NonFinite,
                  std::string(what) + " contains a non-finite value");
    if (checkRange && (v < 0.0f || v > 1.0f))
      throw Error(ErrorKind::ValueOutOfRange,
                  std::string(what) + " value outside [0,1]");
  }
}

}  // namespace

void validateImage(const ImageBuffer& image) {
  if (image.height <= 0 || image.width <= 0)
    throw Error(ErrorKind::ZeroDimension, "image has empty dimensions");
  if (image.channels != 1 && image.channels != 3 && image.channels != 4)
    throw Error(ErrorKind::DimensionMismatch,
                "channels must be 1, 3 or 4, got " +
                    std::to_string(image.channels));
  size_t expected = static_cast<size_t>(image.height) * image.width *
                    image.channels;
  if (image.data.size() != expected)
    throw Error(ErrorKind::DimensionMismatch,
                "data length does not match height*width*channels");
  checkFiniteRange(image.data, "image", true);
}

void validateDepth(const DepthMap& depth) {
  if (depth.height <= 0 || depth.width <= 0)
    throw Error(ErrorKind::ZeroDimension, "depth map has empty dimensions");
  if (depth.data.size() != static_cast<size_t>(depth.height) * depth.width)
    throw Error(ErrorKind::DimensionMismatch,
                "depth data length does not match height*width");
  checkFiniteRange(depth.data, "depth", true);
}

void clamp01(ImageBuffer& image) {
  for (float& v : image.data) v = std::clamp(v, 0.0f, 1.0f);
}

namespace {

// Tap positions and weights for align-corners-false sampling with edge clamp.
struct Taps {
  std::vector<int> lo, hi;
  std::vector<float> frac;
};

Taps makeTaps(int srcSize, int outSize) {
  Taps t;
  t.lo.resize(outSize);
  t.hi.resize(outSize);
  t.frac.resize(outSize);
  double scale = static_cast<double>(srcSize) / outSize;
  for (int i = 0; i < outSize; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    double fl = std::floor(s);
    int lo = static_cast<int>(fl);
    float f = static_cast<float>(s - fl);
    t.lo[i] = std::clamp(lo, 0, srcSize - 1);
    t.hi[i] = std::clamp(lo + 1, 0, srcSize - 1);
    t.frac[i] = f;
  }
  return t;
}

}  // namespace

ImageBuffer resampleBilinear(const ImageBuffer& src, int outH, int outW) {
  if (outH < 1 || outW < 1)
    throw Error(ErrorKind::ZeroDimension, "output size must be >= 1");
  if (src.height < 1 || src.width < 1)
    throw Error(ErrorKind::ZeroDimension, "source is empty");
  if (outH == src.height && outW == src.width) return src;

  const int c = src.channels;
  Taps tx = makeTaps(src.width, outW);
  Taps ty = makeTaps(src.height, outH);
  ImageBuffer out(outH, outW, c);
  for (int y = 0; y < outH; ++y) {
    const float* r0 = src.row(ty.lo[y]);
    const float* r1 = src.row(ty.hi[y]);
    float fy = ty.frac[y];
    float* dst = out.row(y);
    for (int x = 0; x < outW; ++x) {
      int x0 = tx.lo[x] * c, x1 = tx.hi[x] * c;
      float fx = tx.frac[x];
      for (int ch = 0; ch < c; ++ch) {
        float top = r0[x0 + ch] + fx * (r0[x1 + ch] - r0[x0 + ch]);
        float bot = r1[x0 + ch] + fx * (r1[x1 + ch] - r1[x0 + ch]);
        dst[x * c + ch] = top + fy * (bot - top);
      }
    }
  }
  return out;
}

DepthMap resampleBilinear(const DepthMap& src, int outH, int outW) {
  ImageBuffer tmp(src.height, src.width, 1);
  tmp.data = src.data;
  ImageBuffer res = resampleBilinear(tmp, outH, outW);
  DepthMap out(outH, outW);
  out.data = std::move(res.data);
  return out;
}

ImageBuffer boxDownsample(const ImageBuffer& src, int factor) {
  if (factor < 1 || src.height % factor != 0 || src.width % factor != 0)
    throw Error(ErrorKind::BadFactor,
                "dimensions not divisible by factor " + std::to_string(factor));
  if (factor == 1) return src;
  int oh = src.height / factor, ow = src.width / factor, c = src.channels;
  ImageBuffer out(oh, ow, c);
  float inv = 1.0f / (factor * factor);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x)
      for (int ch = 0; ch < c; ++ch) {
        float acc = 0.0f;
        for (int dy = 0; dy < factor; ++dy)
          for (int dx = 0; dx < factor; ++dx)
            acc += src.at(y * factor + dy, x * factor + dx, ch);
        out.at(y, x, ch) = acc * inv;
      }
  return out;
}

}  // namespace mpis
