#ifndef MPIS_GEOMETRY_HPP
#define MPIS_GEOMETRY_HPP

#include <vector>

#include "mpis/plane.hpp"

namespace mpis {

/// Per-plane horizontal pixel shift; nearer planes shift more.
struct ShiftTable {
  std::vector<float> shifts;
};

/// Uniform-in-disparity plane placement: d_n = d_max - (n-1)*step.
PlaneSpec makePlaneSpec(int nPlanes, float dMin, float dMax);

/// Plane-induced homography K (I - t n^T / z) K^-1 with n = [0,0,1] and
/// horizontal translation t = [tx, 0, 0].
Mat3 homographyMatrix(const CameraRig& rig, double z, double tx);

/// Same, with tx taken from the rig's baseline and direction.
Mat3 homographyMatrix(const CameraRig& rig, double z);

/// Maps a target pixel through the homography (projective divide included).
void applyHomography(const Mat3& h, double xt, double yt, double& xs,
                     double& ys);

/// s_n = sign(direction) * shift_scale * d_n.
ShiftTable makeShiftTable(const PlaneSpec& spec, const CameraRig& rig);

Mat3 mat3Mul(const Mat3& a, const Mat3& b);
Mat3 mat3Inverse(const Mat3& m);  // throws SingularIntrinsics

}  // namespace mpis

#endif
