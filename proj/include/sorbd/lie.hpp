#pragma once

#include <cmath>

#include "sorbd/spatial.hpp"

namespace sorbd {

/// Rodrigues formula for the SO(3) exponential.
inline Mat3 expSO3(const Vec3& w) {
  const double th = w.norm();
  const Mat3 wx = skew<double>(w);
  if (th < 1e-12) {
    return Mat3::Identity() + wx + 0.5 * wx * wx;
  }
  return Mat3::Identity() + (std::sin(th) / th) * wx +
         ((1.0 - std::cos(th)) / (th * th)) * wx * wx;
}

/// SO(3) logarithm (rotation angle in [0, pi]).
inline Vec3 logSO3(const Mat3& r) {
  const double c = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double th = std::acos(c);
  const Vec3 axis(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (th < 1e-9) return 0.5 * axis;
  if (th > M_PI - 1e-6) {
    // near pi the skew part vanishes; recover the axis from a a^T = I + K^2
    const Mat3 aat = Mat3::Identity() + ((r + r.transpose()) * 0.5 - Mat3::Identity()) / (1.0 - c);
    Eigen::Index imax;
    aat.diagonal().maxCoeff(&imax);
    Vec3 a = aat.col(imax) / std::sqrt(std::max(aat(imax, imax), 1e-300));
    if (a.dot(axis) < 0) a = -a;
    return th * a;
  }
  return (th / (2.0 * std::sin(th))) * axis;
}

/// SE(3) exponential of a motion vector (angular first), as a homogeneous matrix.
inline Mat4 expSE3(const Vec6& xi) {
  const Vec3 w = xi.head<3>();
  const Vec3 v = xi.tail<3>();
  const double th = w.norm();
  const Mat3 wx = skew<double>(w);
  Mat3 V;
  if (th < 1e-12) {
    V = Mat3::Identity() + 0.5 * wx + (1.0 / 6.0) * wx * wx;
  } else {
    V = Mat3::Identity() + ((1.0 - std::cos(th)) / (th * th)) * wx +
        ((th - std::sin(th)) / (th * th * th)) * wx * wx;
  }
  Mat4 t = Mat4::Identity();
  t.topLeftCorner<3, 3>() = expSO3(w);
  t.topRightCorner<3, 1>() = V * v;
  return t;
}

/// SE(3) logarithm of a homogeneous transform, as a motion vector.
inline Vec6 logSE3(const Mat4& t) {
  const Mat3 r = t.topLeftCorner<3, 3>();
  const Vec3 p = t.topRightCorner<3, 1>();
  const Vec3 w = logSO3(r);
  const double th = w.norm();
  const Mat3 wx = skew<double>(w);
  Mat3 Vinv;
  if (th < 1e-9) {
    Vinv = Mat3::Identity() - 0.5 * wx + (1.0 / 12.0) * wx * wx;
  } else {
    const double half = 0.5 * th;
    const double cot = half / std::tan(half);
    Vinv = Mat3::Identity() - 0.5 * wx + ((1.0 - cot) / (th * th)) * wx * wx;
  }
  Vec6 xi;
  xi << w, Vinv * p;
  return xi;
}

/// Matrix exponential of a 4x4 Lie-algebra element by truncated power series.
/// Scalar-generic so complex-step perturbations stay analytic; `terms` = 12
/// is plenty for the small arguments this is used with.
template <class S>
Mat4t<S> expSeries(const Mat4t<S>& a, int terms = 12) {
  Mat4t<S> result = Mat4t<S>::Identity();
  Mat4t<S> term = Mat4t<S>::Identity();
  for (int k = 1; k <= terms; ++k) {
    term = Mat4t<S>(term * a) * (S(1) / S(k));
    result += term;
  }
  return result;
}

/// Project a near-rotation onto SO(3) (polar factor via SVD).
inline Mat3 polarRotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Mat3 d = Mat3::Identity();
    d(2, 2) = -1.0;
    r = svd.matrixU() * d * svd.matrixV().transpose();
  }
  return r;
}

}  // namespace sorbd
