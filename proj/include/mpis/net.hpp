#ifndef MPIS_NET_HPP
#define MPIS_NET_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mpis/plane.hpp"

namespace mpis {

/// NHWC float tensor used inside the forward graph.
struct Tensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;

  Tensor() = default;
  Tensor(int h, int w, int c, float fill = 0.0f)
      : height(h), width(w), channels(c),
        data(static_cast<size_t>(h) * w * c, fill) {}

  float* px(int y, int x) {
    return data.data() + (static_cast<size_t>(y) * width + x) * channels;
  }
  const float* px(int y, int x) const {
    return data.data() + (static_cast<size_t>(y) * width + x) * channels;
  }
};

struct NetworkConfig {
  int baseChannels = 32;
  int detailDownsamples = 2;
  int semanticDownsamples = 5;
  int nPlanes = 16;
  int inputH = 256;
  int inputW = 384;

  int detailChannels() const { return 2 * baseChannels; }     // F_d
  int semanticChannels() const { return 8 * baseChannels; }   // F_c
  /// Stride-2 stage widths of the depth-semantic branch.
  std::vector<int> semanticPlan() const {
    return {baseChannels, 2 * baseChannels, 3 * baseChannels,
            4 * baseChannels, 6 * baseChannels, 8 * baseChannels};
  }
};

struct TensorEntry {
  std::string name;
  std::vector<int> shape;  // conv weights [kh, kw, in_c, out_c]; biases [out_c]
  std::vector<float> values;

  size_t numel() const {
    size_t n = 1;
    for (int d : shape) n *= static_cast<size_t>(d);
    return n;
  }
};

/// Named weight tensors validated against the layer table of a config.
struct NetworkWeights {
  std::map<std::string, TensorEntry> tensors;

  const TensorEntry& get(const std::string& name) const;
};

struct LayerShape {
  std::string name;
  std::vector<int> shape;
};

/// Every tensor the forward graph reads, with its expected shape.
std::vector<LayerShape> expectedLayerShapes(const NetworkConfig& config);

/// Binary archive: magic "LMPINW01", u32 LE manifest byte length, JSON
/// manifest [{name, shape, offset}], then contiguous little-endian float32
/// payload. Offsets are bytes from the payload start.
std::vector<uint8_t> serializeWeights(const NetworkWeights& weights);
NetworkWeights deserializeWeights(const std::vector<uint8_t>& bytes);

/// Deserialize + shape validation against the config's layer table.
NetworkWeights loadWeights(const std::vector<uint8_t>& bytes,
                           const NetworkConfig& config);

/// Seeded pseudo-random init (platform-independent draws); zero = true
/// emits the all-zero closed-form fixture.
NetworkWeights initWeights(const NetworkConfig& config, uint32_t seed,
                           bool zero = false);

struct ForwardOptions {
  bool auxiliaryDepth = false;  // depth heads are training-side; off for timing
  int threads = 0;
};

struct ForwardResult {
  PlaneStack stack;  // raw-sigma mode at network resolution
  AssignMasks masks;
  DepthMap dCoarse;  // empty unless auxiliaryDepth
  DepthMap dFine;
};

class LmpinNetwork {
 public:
  LmpinNetwork(NetworkConfig config, NetworkWeights weights);

  Tensor detailEncode(const ImageBuffer& image, int threads = 0) const;
  Tensor depthSemantic(const ImageBuffer& image, int threads = 0) const;
  Tensor deffFuse(const Tensor& fd, const Tensor& fc, int threads = 0) const;
  AssignMasks maskHeads(const Tensor& ff, const PlaneSpec& spec,
                        int threads = 0) const;
  DepthMap depthHead(const Tensor& features, bool coarse,
                     int threads = 0) const;
  PlaneStack rgbaDecode(const Tensor& fd,
                        const std::vector<ImageBuffer>& context,
                        const PlaneSpec& spec, int threads = 0) const;

  ForwardResult forward(const ImageBuffer& image,
                        const ForwardOptions& opts = {}) const;

  const NetworkConfig& config() const { return config_; }

 private:
  NetworkConfig config_;
  NetworkWeights weights_;
};

}  // namespace mpis

#endif
