#ifndef MPIS_RENDER_HPP
#define MPIS_RENDER_HPP

#include <utility>

#include "mpis/builder.hpp"
#include "mpis/plane.hpp"

namespace mpis {

/// Density-to-opacity convention. OneMinusExp (default): alpha = 1-exp(-sigma*delta).
/// PaperLiteral keeps the printed exp(-sigma*delta) for comparison.
enum class AlphaConvention { OneMinusExp, PaperLiteral };

struct RenderOptions {
  AlphaConvention alpha = AlphaConvention::OneMinusExp;
  BlendIndexOrder blendOrder = BlendIndexOrder::FrontToBack;
  int threads = 0;  // 0 = pool default
};

ImageBuffer alphaFromSigma(const ImageBuffer& sigma, float delta,
                           AlphaConvention conv = AlphaConvention::OneMinusExp);

/// Horizontal translation by shift px with bilinear subpixel sampling.
/// Color clamps to the edge; alpha outside the source is 0, so newly
/// exposed borders fall through to farther planes.
std::pair<ImageBuffer, ImageBuffer> warpPlane(const ImageBuffer& color,
                                              const ImageBuffer& alpha,
                                              float shiftPx);

/// Front-to-back over-compositing of the (unwarped) stack.
ImageBuffer composite(const PlaneStack& stack, const RenderOptions& opts = {});

/// Composites per-plane disparity with the same weights, renormalized by
/// accumulated opacity (0 where nothing accumulates).
DepthMap compositeDepth(const PlaneStack& stack, const RenderOptions& opts = {});

/// Warp every plane by its shift-table entry, then composite. Row-parallel.
ImageBuffer renderView(const PlaneStack& stack, const CameraRig& rig,
                       const RenderOptions& opts = {});

/// Scalar per-pixel reference; used as the oracle in tests.
ImageBuffer renderViewNaive(const PlaneStack& stack, const CameraRig& rig,
                            const RenderOptions& opts = {});

/// Low-resolution pipeline, staged exactly: blend weights at low
/// resolution, bilinear-magnify each plane's color/weight/alpha, blend
/// against the full-resolution source, warp, composite.
ImageBuffer renderLowresPipeline(const ImageBuffer& source,
                                 const PlaneStack& lowStack,
                                 const CameraRig& rig, int factor,
                                 const RenderOptions& opts = {});

/// Fast path used by convert/bench: samples the low-resolution stack
/// directly per output pixel (no full-resolution plane materialization),
/// skipping planes with zero opacity in the sampled span. Agrees with the
/// staged pipeline wherever the upsampled maps are locally constant.
ImageBuffer renderLowresFused(const ImageBuffer& source,
                              const PlaneStack& lowStack, const CameraRig& rig,
                              int factor, const RenderOptions& opts = {});

}  // namespace mpis

#endif
