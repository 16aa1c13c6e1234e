#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace sorbd {

template <class S> using Vec3t = Eigen::Matrix<S, 3, 1>;
template <class S> using Mat3t = Eigen::Matrix<S, 3, 3>;
template <class S> using Vec6t = Eigen::Matrix<S, 6, 1>;
template <class S> using Mat6t = Eigen::Matrix<S, 6, 6>;
template <class S> using Mat4t = Eigen::Matrix<S, 4, 4>;
template <class S> using VecXt = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S> using MatXt = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S> using Mat6Xt = Eigen::Matrix<S, 6, Eigen::Dynamic>;

using Vec3 = Vec3t<double>;
using Mat3 = Mat3t<double>;
using Vec6 = Vec6t<double>;
using Mat6 = Mat6t<double>;
using Mat4 = Mat4t<double>;
using VecXd = VecXt<double>;
using MatXd = MatXt<double>;
using Mat6Xd = Mat6Xt<double>;

/// Magnitude proxy used for pivoting in scalar-generic linear solves.
inline double pivotWeight(double x) { return std::abs(x); }

template <class S>
Mat3t<S> skew(const Vec3t<S>& v) {
  Mat3t<S> m;
  m << S(0), -v(2), v(1),
       v(2), S(0), -v(0),
      -v(1), v(0), S(0);
  return m;
}

// Spatial vectors store the angular part first, then the linear part.

/// (v x) for a motion vector v: [[w^, 0], [v^, w^]].
template <class S>
Mat6t<S> crossMotion(const Vec6t<S>& v) {
  Mat6t<S> m = Mat6t<S>::Zero();
  const Mat3t<S> wx = skew<S>(v.template head<3>());
  m.template topLeftCorner<3, 3>() = wx;
  m.template bottomRightCorner<3, 3>() = wx;
  m.template bottomLeftCorner<3, 3>() = skew<S>(v.template tail<3>());
  return m;
}

/// (v x*) for a motion vector v: [[w^, v^], [0, w^]] = -(v x)^T.
template <class S>
Mat6t<S> crossForce(const Vec6t<S>& v) {
  Mat6t<S> m = Mat6t<S>::Zero();
  const Mat3t<S> wx = skew<S>(v.template head<3>());
  m.template topLeftCorner<3, 3>() = wx;
  m.template bottomRightCorner<3, 3>() = wx;
  m.template topRightCorner<3, 3>() = skew<S>(v.template tail<3>());
  return m;
}

/// (f xbar*) for a force vector f, defined by (f xbar*) v = (v x*) f.
template <class S>
Mat6t<S> crossbarStar(const Vec6t<S>& f) {
  Mat6t<S> m = Mat6t<S>::Zero();
  const Mat3t<S> nx = skew<S>(f.template head<3>());
  const Mat3t<S> fx = skew<S>(f.template tail<3>());
  m.template topLeftCorner<3, 3>() = -nx;
  m.template topRightCorner<3, 3>() = -fx;
  m.template bottomLeftCorner<3, 3>() = -fx;
  return m;
}

/// (v x) u without forming the 6x6 operator.
template <class S>
Vec6t<S> crossMotionApply(const Vec6t<S>& v, const Vec6t<S>& u) {
  Vec6t<S> r;
  r.template head<3>() = v.template head<3>().cross(u.template head<3>());
  r.template tail<3>() = v.template tail<3>().cross(u.template head<3>()) +
                         v.template head<3>().cross(u.template tail<3>());
  return r;
}

/// (v x*) f without forming the 6x6 operator.
template <class S>
Vec6t<S> crossForceApply(const Vec6t<S>& v, const Vec6t<S>& f) {
  Vec6t<S> r;
  r.template head<3>() = v.template head<3>().cross(f.template head<3>()) +
                         v.template tail<3>().cross(f.template tail<3>());
  r.template tail<3>() = v.template head<3>().cross(f.template tail<3>());
  return r;
}

/// Body-Coriolis matrix B(I, v) = 1/2 [ (v x*) I - I (v x) + (I v) xbar* ].
template <class S>
Mat6t<S> bodyCoriolis(const Mat6t<S>& inertia, const Vec6t<S>& v) {
  return S(0.5) * (crossForce<S>(v) * inertia - inertia * crossMotion<S>(v) +
                   crossbarStar<S>(Vec6t<S>(inertia * v)));
}

/// Body-Coriolis matrix without the 1/2 factor; the convention used by the
/// second-order derivative recursions.
template <class S>
Mat6t<S> bodyCoriolis2(const Mat6t<S>& inertia, const Vec6t<S>& v) {
  return crossForce<S>(v) * inertia - inertia * crossMotion<S>(v) +
         crossbarStar<S>(Vec6t<S>(inertia * v));
}

/// hat operator: motion vector -> se(3) element [[w^, v], [0, 0]].
template <class S>
Mat4t<S> hat(const Vec6t<S>& v) {
  Mat4t<S> m = Mat4t<S>::Zero();
  m.template topLeftCorner<3, 3>() = skew<S>(v.template head<3>());
  m.template topRightCorner<3, 1>() = v.template tail<3>();
  return m;
}

/// vee operator: se(3) element -> motion vector. Rejects matrices outside the
/// se(3) pattern (skew upper-left block, zero last row) beyond tolerance.
inline Vec6 vee(const Mat4& m, double tol = 1e-10) {
  const Mat3 a = m.topLeftCorner<3, 3>();
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > tol ||
      m.row(3).cwiseAbs().maxCoeff() > tol ||
      std::abs(a(0, 0)) > tol || std::abs(a(1, 1)) > tol || std::abs(a(2, 2)) > tol) {
    throw std::invalid_argument("vee: matrix is not an se(3) element");
  }
  Vec6 v;
  v << a(2, 1), a(0, 2), a(1, 0), m(0, 3), m(1, 3), m(2, 3);
  return v;
}

/// Rigid transform mapping local (child) coordinates into the frame it is
/// expressed in (parent or ground): x_out = R x_local + p.
template <class S>
struct SpatialTransform {
  Mat3t<S> R = Mat3t<S>::Identity();
  Vec3t<S> p = Vec3t<S>::Zero();

  static SpatialTransform Identity() { return {}; }

  SpatialTransform operator*(const SpatialTransform& o) const {
    return {Mat3t<S>(R * o.R), Vec3t<S>(R * o.p + p)};
  }

  SpatialTransform inverse() const {
    return {Mat3t<S>(R.transpose()), Vec3t<S>(-(R.transpose() * p))};
  }

  /// 6x6 motion transform [[R, 0], [p^ R, R]].
  Mat6t<S> motionMatrix() const {
    Mat6t<S> x = Mat6t<S>::Zero();
    x.template topLeftCorner<3, 3>() = R;
    x.template bottomRightCorner<3, 3>() = R;
    x.template bottomLeftCorner<3, 3>() = skew<S>(p) * R;
    return x;
  }

  /// 6x6 force transform, the inverse-transpose of motionMatrix.
  Mat6t<S> forceMatrix() const {
    Mat6t<S> x = Mat6t<S>::Zero();
    x.template topLeftCorner<3, 3>() = R;
    x.template bottomRightCorner<3, 3>() = R;
    x.template topRightCorner<3, 3>() = skew<S>(p) * R;
    return x;
  }

  Vec6t<S> applyMotion(const Vec6t<S>& v) const {
    Vec6t<S> r;
    const Vec3t<S> w = R * v.template head<3>();
    r.template head<3>() = w;
    r.template tail<3>() = p.cross(w) + R * v.template tail<3>();
    return r;
  }

  Vec6t<S> applyForce(const Vec6t<S>& f) const {
    Vec6t<S> r;
    const Vec3t<S> lin = R * f.template tail<3>();
    r.template head<3>() = R * f.template head<3>() + p.cross(lin);
    r.template tail<3>() = lin;
    return r;
  }

  Vec6t<S> invApplyMotion(const Vec6t<S>& v) const {
    Vec6t<S> r;
    r.template head<3>() = R.transpose() * v.template head<3>();
    r.template tail<3>() =
        R.transpose() * (v.template tail<3>() - p.cross(v.template head<3>()));
    return r;
  }

  Mat4t<S> homogeneous() const {
    Mat4t<S> t = Mat4t<S>::Identity();
    t.template topLeftCorner<3, 3>() = R;
    t.template topRightCorner<3, 1>() = p;
    return t;
  }

  bool isOrthonormal(double tol = 1e-12) const
    requires std::is_same_v<S, double>
  {
    return (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(R.determinant() - 1.0) <= tol;
  }
};

using SpatialTransformd = SpatialTransform<double>;

/// Spatial inertia in compact form: mass m, first moment h = m c, and the
/// 3x3 rotational inertia about the frame origin. The 6x6 form is
/// [[I, h^], [h^T, m 1]] and is symmetric by construction.
template <class S>
struct SpatialInertia {
  S mass = S(0);
  Vec3t<S> h = Vec3t<S>::Zero();
  Mat3t<S> I = Mat3t<S>::Zero();

  /// Build from mass, center of mass, and rotational inertia about the COM.
  static SpatialInertia FromCom(S m, const Vec3t<S>& com, const Mat3t<S>& icom) {
    const Mat3t<S> cx = skew<S>(com);
    return {m, Vec3t<S>(m * com), Mat3t<S>(icom - m * cx * cx)};
  }

  Mat6t<S> toMat6() const {
    Mat6t<S> m6;
    const Mat3t<S> hx = skew<S>(h);
    m6.template topLeftCorner<3, 3>() = I;
    m6.template topRightCorner<3, 3>() = hx;
    m6.template bottomLeftCorner<3, 3>() = hx.transpose();
    m6.template bottomRightCorner<3, 3>() = mass * Mat3t<S>::Identity();
    return m6;
  }

  Vec6t<S> apply(const Vec6t<S>& v) const {
    Vec6t<S> f;
    f.template head<3>() = I * v.template head<3>() + h.cross(v.template tail<3>());
    f.template tail<3>() = mass * v.template tail<3>() - h.cross(v.template head<3>());
    return f;
  }

  /// Change of coordinates: the returned inertia expresses the same body in
  /// the frame that X maps into (X: local -> target).
  SpatialInertia transformedBy(const SpatialTransform<S>& X) const {
    const Vec3t<S> hr = X.R * h;
    const Mat3t<S> px = skew<S>(X.p);
    SpatialInertia out;
    out.mass = mass;
    out.h = hr + mass * X.p;
    out.I = X.R * I * X.R.transpose() - skew<S>(hr) * px - px * skew<S>(out.h);
    return out;
  }

  SpatialInertia operator+(const SpatialInertia& o) const {
    return {mass + o.mass, Vec3t<S>(h + o.h), Mat3t<S>(I + o.I)};
  }
};

using SpatialInertiad = SpatialInertia<double>;

/// Kind tags so motion- and force-valued 6-vectors cannot be mixed by accident.
struct MotionTag {};
struct ForceTag {};

template <class Tag>
struct SpatialVec {
  Vec6 value = Vec6::Zero();

  SpatialVec() = default;
  explicit SpatialVec(const Vec6& v) : value(v) {}
  SpatialVec(const Vec3& ang, const Vec3& lin) {
    value << ang, lin;
  }

  Vec3 angular() const { return value.head<3>(); }
  Vec3 linear() const { return value.tail<3>(); }

  SpatialVec operator+(const SpatialVec& o) const { return SpatialVec(value + o.value); }
  SpatialVec operator-(const SpatialVec& o) const { return SpatialVec(value - o.value); }
  SpatialVec operator*(double s) const { return SpatialVec(value * s); }
};

using SpatialMotion = SpatialVec<MotionTag>;
using SpatialForce = SpatialVec<ForceTag>;

inline Mat6 crossMotion(const SpatialMotion& v) { return crossMotion<double>(v.value); }
inline Mat6 crossForce(const SpatialMotion& v) { return crossForce<double>(v.value); }
inline Mat6 crossbarStar(const SpatialForce& f) { return crossbarStar<double>(f.value); }

inline double power(const SpatialForce& f, const SpatialMotion& v) {
  return f.value.dot(v.value);
}

}  // namespace sorbd
