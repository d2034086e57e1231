#include "mpis/geometry.hpp"

#include <cmath>
#include <string>

namespace mpis {

PlaneSpec makePlaneSpec(int nPlanes, float dMin, float dMax) {
  if (nPlanes < 2)
    throw Error(ErrorKind::ValueOutOfRange, "need at least 2 planes");
  if (!(dMin < dMax) || dMin < 0.0f || dMax > 1.0f)
    throw Error(ErrorKind::BadRange,
                "require 0 <= d_min < d_max <= 1");
  PlaneSpec spec;
  spec.nPlanes = nPlanes;
  spec.disparities.resize(nPlanes);
  spec.deltas.resize(nPlanes);
  double step = (static_cast<double>(dMax) - dMin) / (nPlanes - 1);
  for (int n = 0; n < nPlanes; ++n) {
    spec.disparities[n] = dMax - n * step;
    spec.deltas[n] = step;
  }
  spec.disparities.front() = dMax;
  spec.disparities.back() = dMin;
  return spec;
}

Mat3 mat3Mul(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      r[i][j] = s;
    }
  return r;
}

Mat3 mat3Inverse(const Mat3& m) {
  double det =
      m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
      m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
      m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (std::abs(det) < 1e-12)
    throw Error(ErrorKind::SingularIntrinsics, "matrix is singular");
  double inv = 1.0 / det;
  Mat3 r;
  r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv;
  r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv;
  r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv;
  return r;
}

Mat3 homographyMatrix(const CameraRig& rig, double z, double tx) {
  if (!rig.intrinsics)
    throw Error(ErrorKind::SingularIntrinsics, "rig has no intrinsics");
  if (!(z > 0.0))
    throw Error(ErrorKind::ValueOutOfRange, "plane depth must be positive");
  const Mat3& k = *rig.intrinsics;
  Mat3 kInv = mat3Inverse(k);
  // I - t n^T / z with t = [tx,0,0], n = [0,0,1]
  Mat3 mid{};
  mid[0][0] = mid[1][1] = mid[2][2] = 1.0;
  mid[0][2] = -tx / z;
  return mat3Mul(mat3Mul(k, mid), kInv);
}

void applyHomography(const Mat3& h, double xt, double yt, double& xs,
                     double& ys) {
  double x = h[0][0] * xt + h[0][1] * yt + h[0][2];
  double y = h[1][0] * xt + h[1][1] * yt + h[1][2];
  double w = h[2][0] * xt + h[2][1] * yt + h[2][2];
  xs = x / w;
  ys = y / w;
}

Mat3 homographyMatrix(const CameraRig& rig, double z) {
  return homographyMatrix(rig, z, -rig.sign() * rig.baseline);
}

ShiftTable makeShiftTable(const PlaneSpec& spec, const CameraRig& rig) {
  if (rig.shiftScale < 0.0f)
    throw Error(ErrorKind::ValueOutOfRange, "shift_scale must be >= 0");
  ShiftTable table;
  table.shifts.resize(spec.nPlanes);
  for (int n = 0; n < spec.nPlanes; ++n)
    table.shifts[n] = static_cast<float>(rig.sign() * rig.shiftScale *
                                         spec.disparities[n]);
  return table;
}

}  // namespace mpis
