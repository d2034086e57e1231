#include "mpis/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <json.hpp>

#include "mpis/builder.hpp"
#include "mpis/image.hpp"
#include "mpis/parallel.hpp"

namespace mpis {

namespace {

constexpr char kMagic[8] = {'L', 'M', 'P', 'I', 'N', 'W', '0', '1'};
constexpr int kKernel = 3;
constexpr int kPad = 1;

int convOut(int in, int stride) { return (in + 2 * kPad - kKernel) / stride + 1; }

float sigmoidf(float x) { return 1.0f / (1.0f + std::exp(-x)); }

float softplusf(float x) {
  // log(1 + e^x), stable for large |x|
  return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0f);
}

/// 3x3 convolution, padding 1, optional stride and fused ReLU.
/// Weight layout [kh, kw, in_c, out_c]; accumulation order is fixed, so
/// outputs are bitwise identical for any thread count.
Tensor conv2d(const Tensor& in, const TensorEntry& weight,
              const TensorEntry& bias, int stride, bool relu, int threads) {
  const int ic = in.channels;
  const int oc = weight.shape[3];
  const int oh = convOut(in.height, stride);
  const int ow = convOut(in.width, stride);
  Tensor out(oh, ow, oc);
  const float* w = weight.values.data();
  const float* b = bias.values.data();

  parallelFor(0, oh, [&](int y0, int y1) {
    std::vector<float> acc(oc);
    for (int oy = y0; oy < y1; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        std::copy(b, b + oc, acc.begin());
        for (int kh = 0; kh < kKernel; ++kh) {
          int iy = oy * stride - kPad + kh;
          if (iy < 0 || iy >= in.height) continue;
          for (int kw = 0; kw < kKernel; ++kw) {
            int ix = ox * stride - kPad + kw;
            if (ix < 0 || ix >= in.width) continue;
            const float* ip = in.px(iy, ix);
            const float* wp =
                w + (static_cast<size_t>(kh) * kKernel + kw) * ic * oc;
            for (int c = 0; c < ic; ++c) {
              float v = ip[c];
              const float* wr = wp + static_cast<size_t>(c) * oc;
              for (int o = 0; o < oc; ++o) acc[o] += v * wr[o];
            }
          }
        }
        float* op = out.px(oy, ox);
        if (relu)
          for (int o = 0; o < oc; ++o) op[o] = std::max(acc[o], 0.0f);
        else
          std::copy(acc.begin(), acc.end(), op);
      }
    }
  }, threads);
  return out;
}

Tensor resampleTensor(const Tensor& src, int outH, int outW) {
  ImageBuffer tmp;
  tmp.height = src.height;
  tmp.width = src.width;
  tmp.channels = src.channels;
  tmp.data = src.data;
  // resampleBilinear only checks dimensions, not channel count
  ImageBuffer res = resampleBilinear(tmp, outH, outW);
  Tensor out;
  out.height = outH;
  out.width = outW;
  out.channels = src.channels;
  out.data = std::move(res.data);
  return out;
}

Tensor toTensor(const ImageBuffer& image) {
  Tensor t;
  t.height = image.height;
  t.width = image.width;
  t.channels = image.channels;
  t.data = image.data;
  return t;
}

void addLayer(std::vector<LayerShape>& layers, const std::string& name, int ic,
              int oc) {
  layers.push_back({name + ".weight", {kKernel, kKernel, ic, oc}});
  layers.push_back({name + ".bias", {oc}});
}

}  // namespace

const TensorEntry& NetworkWeights::get(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end())
    throw Error(ErrorKind::MissingTensor, name);
  return it->second;
}

std::vector<LayerShape> expectedLayerShapes(const NetworkConfig& config) {
  if (config.semanticDownsamples != 5)
    throw Error(ErrorKind::ValueOutOfRange,
                "depth-semantic branch uses 5 downsampling stages");
  if (config.detailDownsamples != 2)
    throw Error(ErrorKind::ValueOutOfRange,
                "detail encoder uses 2 downsampling stages");
  if (config.inputH % 32 != 0 || config.inputW % 32 != 0)
    throw Error(ErrorKind::ValueOutOfRange,
                "input dims must be divisible by 2^5");
  const int b = config.baseChannels;
  std::vector<LayerShape> layers;

  addLayer(layers, "detail_enc.conv0", 3, b);
  addLayer(layers, "detail_enc.down1", b, b);
  addLayer(layers, "detail_enc.down2", b, 2 * b);
  addLayer(layers, "detail_enc.conv1", 2 * b, 2 * b);

  auto plan = config.semanticPlan();
  addLayer(layers, "sem.stem", 3, plan[0]);
  for (int i = 1; i <= 5; ++i) {
    std::string k = std::to_string(i);
    addLayer(layers, "sem.down" + k, plan[i - 1], plan[i]);
    addLayer(layers, "sem.rb" + k + ".conv1", plan[i], plan[i]);
    addLayer(layers, "sem.rb" + k + ".conv2", plan[i], plan[i]);
  }

  addLayer(layers, "deff.proj", 8 * b, 2 * b);
  addLayer(layers, "deff.gate", 8 * b, 2 * b);

  addLayer(layers, "mask_head.conv1", 2 * b + 1, b);
  addLayer(layers, "mask_head.conv2", b, 1);

  addLayer(layers, "depth_head_coarse.conv1", 8 * b, b);
  addLayer(layers, "depth_head_coarse.conv2", b, 1);
  addLayer(layers, "depth_head_fine.conv1", 2 * b, b);
  addLayer(layers, "depth_head_fine.conv2", b, 1);

  addLayer(layers, "decoder.conv0", 2 * b, 2 * b);
  addLayer(layers, "decoder.up1", 2 * b, b);
  addLayer(layers, "decoder.up2", b, b);
  addLayer(layers, "decoder.out", b, 4);
  return layers;
}

std::vector<uint8_t> serializeWeights(const NetworkWeights& weights) {
  nlohmann::json manifest = nlohmann::json::array();
  uint64_t offset = 0;
  for (const auto& [name, entry] : weights.tensors) {
    manifest.push_back(
        {{"name", name}, {"shape", entry.shape}, {"offset", offset}});
    offset += entry.numel() * sizeof(float);
  }
  std::string manifestStr = manifest.dump();

  std::vector<uint8_t> bytes;
  bytes.reserve(8 + 4 + manifestStr.size() + offset);
  bytes.insert(bytes.end(), kMagic, kMagic + 8);
  uint32_t len = static_cast<uint32_t>(manifestStr.size());
  for (int i = 0; i < 4; ++i)
    bytes.push_back(static_cast<uint8_t>((len >> (8 * i)) & 0xff));
  bytes.insert(bytes.end(), manifestStr.begin(), manifestStr.end());
  for (const auto& [name, entry] : weights.tensors) {
    size_t pos = bytes.size();
    bytes.resize(pos + entry.values.size() * sizeof(float));
    std::memcpy(bytes.data() + pos, entry.values.data(),
                entry.values.size() * sizeof(float));
  }
  return bytes;
}

NetworkWeights deserializeWeights(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw Error(ErrorKind::CorruptManifest, "bad magic or truncated header");
  uint32_t len = 0;
  for (int i = 0; i < 4; ++i)
    len |= static_cast<uint32_t>(bytes[8 + i]) << (8 * i);
  if (bytes.size() < 12 + static_cast<size_t>(len))
    throw Error(ErrorKind::CorruptManifest, "manifest truncated");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.begin() + 12,
                                     bytes.begin() + 12 + len);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptManifest, e.what());
  }
  if (!manifest.is_array())
    throw Error(ErrorKind::CorruptManifest, "manifest is not an array");

  const uint8_t* payload = bytes.data() + 12 + len;
  size_t payloadSize = bytes.size() - 12 - len;
  NetworkWeights weights;
  for (const auto& item : manifest) {
    if (!item.contains("name") || !item.contains("shape") ||
        !item.contains("offset"))
      throw Error(ErrorKind::CorruptManifest, "manifest entry missing fields");
    TensorEntry entry;
    entry.name = item["name"].get<std::string>();
    entry.shape = item["shape"].get<std::vector<int>>();
    for (int d : entry.shape)
      if (d <= 0)
        throw Error(ErrorKind::CorruptManifest,
                    "non-positive dimension in " + entry.name);
    uint64_t off = item["offset"].get<uint64_t>();
    size_t count = entry.numel();
    if (off + count * sizeof(float) > payloadSize)
      throw Error(ErrorKind::CorruptManifest,
                  "payload too small for tensor " + entry.name);
    entry.values.resize(count);
    std::memcpy(entry.values.data(), payload + off, count * sizeof(float));
    weights.tensors[entry.name] = std::move(entry);
  }
  return weights;
}

NetworkWeights loadWeights(const std::vector<uint8_t>& bytes,
                           const NetworkConfig& config) {
  NetworkWeights weights = deserializeWeights(bytes);
  for (const LayerShape& layer : expectedLayerShapes(config)) {
    auto it = weights.tensors.find(layer.name);
    if (it == weights.tensors.end())
      throw Error(ErrorKind::MissingTensor, layer.name);
    if (it->second.shape != layer.shape)
      throw Error(ErrorKind::ShapeMismatch, layer.name);
  }
  return weights;
}

namespace {

// Platform-independent uniform draws: xorshift32 state mapped into
// [-scale, scale]. std::uniform_real_distribution is implementation
// defined, so it is avoided.
struct Rng {
  uint32_t state;
  explicit Rng(uint32_t seed) : state(seed * 2654435761u + 1u) {}
  uint32_t next() {
    state ^= state << 13;
    state ^= state >> 17;
    state ^= state << 5;
    return state;
  }
  float uniform(float scale) {
    float u = (next() >> 8) * (1.0f / 16777216.0f);  // [0,1)
    return (2.0f * u - 1.0f) * scale;
  }
};

}  // namespace

NetworkWeights initWeights(const NetworkConfig& config, uint32_t seed,
                           bool zero) {
  NetworkWeights weights;
  Rng rng(seed);
  for (const LayerShape& layer : expectedLayerShapes(config)) {
    TensorEntry entry;
    entry.name = layer.name;
    entry.shape = layer.shape;
    entry.values.assign(entry.numel(), 0.0f);
    if (!zero && layer.shape.size() == 4) {
      int fanIn = layer.shape[0] * layer.shape[1] * layer.shape[2];
      float scale = std::sqrt(3.0f / static_cast<float>(fanIn));
      for (float& v : entry.values) v = rng.uniform(scale);
    }
    weights.tensors[entry.name] = std::move(entry);
  }
  return weights;
}

LmpinNetwork::LmpinNetwork(NetworkConfig config, NetworkWeights weights)
    : config_(std::move(config)), weights_(std::move(weights)) {
  for (const LayerShape& layer : expectedLayerShapes(config_)) {
    const TensorEntry& entry = weights_.get(layer.name);
    if (entry.shape != layer.shape)
      throw Error(ErrorKind::ShapeMismatch, layer.name);
  }
}

Tensor LmpinNetwork::detailEncode(const ImageBuffer& image, int threads) const {
  if (image.height != config_.inputH || image.width != config_.inputW)
    throw Error(ErrorKind::DimensionMismatch,
                "image is not at the network resolution");
  auto conv = [&](const Tensor& in, const std::string& name, int stride) {
    return conv2d(in, weights_.get(name + ".weight"),
                  weights_.get(name + ".bias"), stride, true, threads);
  };
  Tensor t = conv(toTensor(image), "detail_enc.conv0", 1);
  t = conv(t, "detail_enc.down1", 2);
  t = conv(t, "detail_enc.down2", 2);
  t = conv(t, "detail_enc.conv1", 1);
  return t;
}

Tensor LmpinNetwork::depthSemantic(const ImageBuffer& image,
                                   int threads) const {
  if (image.height != config_.inputH || image.width != config_.inputW)
    throw Error(ErrorKind::DimensionMismatch,
                "image is not at the network resolution");
  auto conv = [&](const Tensor& in, const std::string& name, int stride,
                  bool relu) {
    return conv2d(in, weights_.get(name + ".weight"),
                  weights_.get(name + ".bias"), stride, relu, threads);
  };
  Tensor t = conv(toTensor(image), "sem.stem", 1, true);
  for (int i = 1; i <= 5; ++i) {
    std::string k = std::to_string(i);
    t = conv(t, "sem.down" + k, 2, true);
    // basic residual block: y = relu(x + conv2(relu(conv1(x))))
    Tensor r = conv(t, "sem.rb" + k + ".conv1", 1, true);
    r = conv(r, "sem.rb" + k + ".conv2", 1, false);
    for (size_t j = 0; j < t.data.size(); ++j)
      t.data[j] = std::max(t.data[j] + r.data[j], 0.0f);
  }
  return t;
}

Tensor LmpinNetwork::deffFuse(const Tensor& fd, const Tensor& fc,
                              int threads) const {
  if (fc.channels != config_.semanticChannels() ||
      fd.channels != config_.detailChannels())
    throw Error(ErrorKind::DimensionMismatch, "unexpected feature channels");
  Tensor up = resampleTensor(fc, fd.height, fd.width);
  Tensor proj = conv2d(up, weights_.get("deff.proj.weight"),
                       weights_.get("deff.proj.bias"), 1, false, threads);
  Tensor gate = conv2d(up, weights_.get("deff.gate.weight"),
                       weights_.get("deff.gate.bias"), 1, false, threads);
  Tensor out(fd.height, fd.width, fd.channels);
  for (size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = fd.data[i] * sigmoidf(gate.data[i]) + proj.data[i];
  return out;
}

AssignMasks LmpinNetwork::maskHeads(const Tensor& ff, const PlaneSpec& spec,
                                    int threads) const {
  const int n = spec.nPlanes;
  const int netH = config_.inputH, netW = config_.inputW;
  std::vector<Tensor> logits(n);
  // Shared-weight head per plane, the plane's disparity concatenated as a
  // constant channel. Planes are independent, so this parallelizes across
  // planes without affecting determinism.
  parallelFor(0, n, [&](int k0, int k1) {
    for (int k = k0; k < k1; ++k) {
      Tensor in(ff.height, ff.width, ff.channels + 1);
      for (int y = 0; y < ff.height; ++y)
        for (int x = 0; x < ff.width; ++x) {
          const float* src = ff.px(y, x);
          float* dst = in.px(y, x);
          std::copy(src, src + ff.channels, dst);
          dst[ff.channels] = static_cast<float>(spec.disparities[k]);
        }
      Tensor t = conv2d(in, weights_.get("mask_head.conv1.weight"),
                        weights_.get("mask_head.conv1.bias"), 1, true, 1);
      t = conv2d(t, weights_.get("mask_head.conv2.weight"),
                 weights_.get("mask_head.conv2.bias"), 1, false, 1);
      logits[k] = resampleTensor(t, netH, netW);
    }
  }, threads);

  AssignMasks masks(netH, netW, n);
  size_t px = static_cast<size_t>(netH) * netW;
  for (size_t i = 0; i < px; ++i) {
    float maxLogit = logits[0].data[i];
    for (int k = 1; k < n; ++k) maxLogit = std::max(maxLogit, logits[k].data[i]);
    float sum = 0.0f;
    for (int k = 0; k < n; ++k) {
      float e = std::exp(logits[k].data[i] - maxLogit);
      masks.weights[i * n + k] = e;
      sum += e;
    }
    float inv = 1.0f / sum;
    for (int k = 0; k < n; ++k) masks.weights[i * n + k] *= inv;
  }
  return masks;
}

DepthMap LmpinNetwork::depthHead(const Tensor& features, bool coarse,
                                 int threads) const {
  std::string base = coarse ? "depth_head_coarse" : "depth_head_fine";
  Tensor t = conv2d(features, weights_.get(base + ".conv1.weight"),
                    weights_.get(base + ".conv1.bias"), 1, true, threads);
  t = conv2d(t, weights_.get(base + ".conv2.weight"),
             weights_.get(base + ".conv2.bias"), 1, false, threads);
  for (float& v : t.data) v = sigmoidf(v);
  Tensor up = resampleTensor(t, config_.inputH, config_.inputW);
  DepthMap out(config_.inputH, config_.inputW);
  out.data = std::move(up.data);
  return out;
}

PlaneStack LmpinNetwork::rgbaDecode(const Tensor& fd,
                                    const std::vector<ImageBuffer>& context,
                                    const PlaneSpec& spec, int threads) const {
  const int n = spec.nPlanes;
  if (static_cast<int>(context.size()) != n)
    throw Error(ErrorKind::DimensionMismatch,
                "context map count does not match plane count");
  for (const ImageBuffer& c : context)
    if (c.height != fd.height || c.width != fd.width)
      throw Error(ErrorKind::DimensionMismatch,
                  "context maps must be at the detail-feature resolution");
  PlaneStack stack;
  stack.spec = spec;
  stack.densityMode = DensityMode::RawSigma;
  stack.planes.resize(n);

  parallelFor(0, n, [&](int k0, int k1) {
    for (int k = k0; k < k1; ++k) {
      Tensor gated(fd.height, fd.width, fd.channels);
      for (int y = 0; y < fd.height; ++y)
        for (int x = 0; x < fd.width; ++x) {
          float m = context[k].at(y, x);
          const float* src = fd.px(y, x);
          float* dst = gated.px(y, x);
          for (int c = 0; c < fd.channels; ++c) dst[c] = src[c] * m;
        }
      Tensor t = conv2d(gated, weights_.get("decoder.conv0.weight"),
                        weights_.get("decoder.conv0.bias"), 1, true, 1);
      t = resampleTensor(t, t.height * 2, t.width * 2);
      t = conv2d(t, weights_.get("decoder.up1.weight"),
                 weights_.get("decoder.up1.bias"), 1, true, 1);
      t = resampleTensor(t, t.height * 2, t.width * 2);
      t = conv2d(t, weights_.get("decoder.up2.weight"),
                 weights_.get("decoder.up2.bias"), 1, true, 1);
      t = conv2d(t, weights_.get("decoder.out.weight"),
                 weights_.get("decoder.out.bias"), 1, false, 1);

      Plane& plane = stack.planes[k];
      plane.color = ImageBuffer(t.height, t.width, 3);
      plane.density = ImageBuffer(t.height, t.width, 1);
      for (int y = 0; y < t.height; ++y)
        for (int x = 0; x < t.width; ++x) {
          const float* src = t.px(y, x);
          for (int c = 0; c < 3; ++c)
            plane.color.at(y, x, c) = sigmoidf(src[c]);
          plane.density.at(y, x) = softplusf(src[3]);
        }
    }
  }, threads);
  return stack;
}

ForwardResult LmpinNetwork::forward(const ImageBuffer& image,
                                    const ForwardOptions& opts) const {
  int threads = opts.threads;
  Tensor fd = detailEncode(image, threads);
  Tensor fc = depthSemantic(image, threads);
  Tensor ff = deffFuse(fd, fc, threads);

  PlaneSpec spec;
  {
    spec.nPlanes = config_.nPlanes;
    spec.disparities.resize(spec.nPlanes);
    spec.deltas.resize(spec.nPlanes);
    double step = 1.0 / (spec.nPlanes - 1);
    for (int k = 0; k < spec.nPlanes; ++k) {
      spec.disparities[k] = 1.0 - k * step;
      spec.deltas[k] = step;
    }
  }

  ForwardResult result;
  result.masks = maskHeads(ff, spec, threads);

  std::vector<ImageBuffer> context = contextMasks(result.masks);
  // Masks gate features at the detail resolution; box-pool preserves the
  // partition of unity.
  int factor = config_.inputH / fd.height;
  std::vector<ImageBuffer> pooled(context.size());
  for (size_t k = 0; k < context.size(); ++k)
    pooled[k] = boxDownsample(context[k], factor);

  result.stack = rgbaDecode(fd, pooled, spec, threads);

  if (opts.auxiliaryDepth) {
    result.dCoarse = depthHead(fc, true, threads);
    result.dFine = depthHead(ff, false, threads);
  }
  return result;
}

}  // namespace mpis
