#ifndef MPIS_BUILDER_HPP
#define MPIS_BUILDER_HPP

#include <vector>

#include "mpis/plane.hpp"

namespace mpis {

enum class AssignMode { Hard, Tent };

/// Product index order for the opacity cumulative product. FrontToBack is
/// the default (planes in front attenuate); LiteralBackToFront reproduces
/// the printed j>n reading for comparison.
enum class BlendIndexOrder { FrontToBack, LiteralBackToFront };

/// Per-plane visibility maps w_n = prod over planes in front of (1 - alpha).
struct BlendWeights {
  int height = 0;
  int width = 0;
  std::vector<ImageBuffer> perPlane;  // N single-channel maps
};

struct BuildOptions {
  AssignMode assignMode = AssignMode::Hard;
  bool inpaint = true;
};

/// Soft-assigns each pixel to planes by disparity. Hard: one-hot on the
/// nearest plane (ties go to the nearer plane). Tent: linear split between
/// the two bracketing planes, so sum_n M_n * d_n reproduces the disparity.
AssignMasks assignMasksFromDepth(const DepthMap& depth, const PlaneSpec& spec,
                                 AssignMode mode);

/// context_n = sum_{j>=n} M_j: the plane and everything behind it.
std::vector<ImageBuffer> contextMasks(const AssignMasks& masks);

BlendWeights blendWeights(const PlaneStack& stack,
                          BlendIndexOrder order = BlendIndexOrder::FrontToBack);

/// C' = up(w) * source + (1 - up(w)) * up(lowColor), all at (outH, outW).
ImageBuffer blendColors(const ImageBuffer& source, const ImageBuffer& lowColor,
                        const ImageBuffer& lowW, int outH, int outW);

/// Classical MPI: alphas are the assign masks (direct-alpha mode); plane
/// color is the image over the context region, optionally extended
/// horizontally into occluded zones from the nearest farther-plane pixel.
PlaneStack buildMpiClassical(const ImageBuffer& image, const DepthMap& depth,
                             const PlaneSpec& spec,
                             const BuildOptions& opts = {});

}  // namespace mpis

#endif
