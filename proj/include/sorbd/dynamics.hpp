#pragma once

#include <Eigen/Cholesky>

#include "sorbd/model.hpp"
#include "sorbd/tensor.hpp"

namespace sorbd {

/// Pose of a body in its parent's frame (joint placement composed with the
/// joint configuration). Scalar-generic so the complex-step oracles can run
/// the exact same dynamics code on perturbed inputs.
template <class S>
struct JointPose {
  Mat3t<S> R = Mat3t<S>::Identity();
  Vec3t<S> p = Vec3t<S>::Zero();
};

inline std::vector<JointPose<double>> localPoses(const Model& model,
                                                 const std::vector<JointConfig>& q) {
  if (q.size() != model.bodies.size())
    throw std::invalid_argument("localPoses: config count does not match model");
  std::vector<JointPose<double>> out(model.bodies.size());
  for (size_t i = 0; i < model.bodies.size(); ++i) {
    const SpatialTransformd xj = jointTransform(model.bodies[i].joint, q[i]);
    const SpatialTransformd x = model.bodies[i].placement * xj;
    out[i] = {x.R, x.p};
  }
  return out;
}

template <class S>
std::vector<JointPose<S>> castPoses(const std::vector<JointPose<double>>& in) {
  std::vector<JointPose<S>> out(in.size());
  for (size_t i = 0; i < in.size(); ++i) {
    out[i].R = in[i].R.template cast<S>();
    out[i].p = in[i].p.template cast<S>();
  }
  return out;
}

template <class S>
SpatialInertia<S> castInertia(const SpatialInertiad& in) {
  return {S(in.mass), in.h.template cast<S>(), in.I.template cast<S>()};
}

/// Solve A X = B for small dense systems with partial pivoting; works for any
/// scalar with a pivotWeight magnitude proxy.
template <class S>
MatXt<S> solveLinear(MatXt<S> a, MatXt<S> b) {
  const int n = static_cast<int>(a.rows());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    double best = pivotWeight(a(c, c));
    for (int r = c + 1; r < n; ++r) {
      const double w = pivotWeight(a(r, c));
      if (w > best) {
        best = w;
        piv = r;
      }
    }
    if (best == 0.0) throw std::runtime_error("solveLinear: singular matrix");
    if (piv != c) {
      a.row(piv).swap(a.row(c));
      b.row(piv).swap(b.row(c));
    }
    for (int r = c + 1; r < n; ++r) {
      const S f = a(r, c) / a(c, c);
      a.row(r).tail(n - c) -= f * a.row(c).tail(n - c);
      b.row(r) -= f * b.row(c);
    }
  }
  for (int c = n - 1; c >= 0; --c) {
    for (int r = c + 1; r < n; ++r) b.row(c) -= a(c, r) * b.row(r);
    b.row(c) /= a(c, c);
  }
  return b;
}

namespace detail {

/// World-frame motion subspace columns of a joint at pose (R, p), written
/// directly into a 6 x dof block. Axis-aligned joints avoid the generic
/// transform entirely.
template <class S, class Block>
void groundSubspace(JointKind kind, const Mat3t<S>& R, const Vec3t<S>& p, Block block) {
  auto revoluteCol = [&](int axis, int col) {
    const Vec3t<S> w = R.col(axis);
    block.col(col).template head<3>() = w;
    block.col(col).template tail<3>() = p.cross(w);
  };
  auto prismaticCol = [&](int axis, int col) {
    block.col(col).template head<3>().setZero();
    block.col(col).template tail<3>() = R.col(axis);
  };
  switch (kind) {
    case JointKind::RevoluteX: revoluteCol(0, 0); break;
    case JointKind::RevoluteY: revoluteCol(1, 0); break;
    case JointKind::RevoluteZ: revoluteCol(2, 0); break;
    case JointKind::PrismaticX: prismaticCol(0, 0); break;
    case JointKind::PrismaticY: prismaticCol(1, 0); break;
    case JointKind::PrismaticZ: prismaticCol(2, 0); break;
    case JointKind::Spherical:
      for (int a = 0; a < 3; ++a) revoluteCol(a, a);
      break;
    case JointKind::Floating:
      for (int a = 0; a < 3; ++a) revoluteCol(a, a);
      for (int a = 0; a < 3; ++a) prismaticCol(a, 3 + a);
      break;
  }
}

}  // namespace detail

namespace detail {

/// ground -> local coordinates of a motion vector under pose (R, p).
template <class S>
Vec6t<S> motionToLocal(const Mat3t<S>& R, const Vec3t<S>& p, const Vec6t<S>& v) {
  Vec6t<S> r;
  r.template head<3>() = R.transpose() * v.template head<3>();
  r.template tail<3>() = R.transpose() * (v.template tail<3>() - p.cross(v.template head<3>()));
  return r;
}

/// local -> parent coordinates of a force vector under pose (R, p).
template <class S>
Vec6t<S> forceToParent(const Mat3t<S>& R, const Vec3t<S>& p, const Vec6t<S>& f) {
  Vec6t<S> r;
  const Vec3t<S> lin = R * f.template tail<3>();
  r.template head<3>() = R * f.template head<3>() + p.cross(lin);
  r.template tail<3>() = lin;
  return r;
}

template <class S, class Seg>
void addJointRates(JointKind kind, const Seg& rates, Vec6t<S>& v) {
  switch (kind) {
    case JointKind::RevoluteX: v(0) += rates(0); break;
    case JointKind::RevoluteY: v(1) += rates(0); break;
    case JointKind::RevoluteZ: v(2) += rates(0); break;
    case JointKind::PrismaticX: v(3) += rates(0); break;
    case JointKind::PrismaticY: v(4) += rates(0); break;
    case JointKind::PrismaticZ: v(5) += rates(0); break;
    case JointKind::Spherical: v.template head<3>() += rates; break;
    case JointKind::Floating: v += rates; break;
  }
}

template <class S, class Seg>
void projectOnSubspace(JointKind kind, const Vec6t<S>& f, Seg out) {
  switch (kind) {
    case JointKind::RevoluteX: out(0) = f(0); break;
    case JointKind::RevoluteY: out(0) = f(1); break;
    case JointKind::RevoluteZ: out(0) = f(2); break;
    case JointKind::PrismaticX: out(0) = f(3); break;
    case JointKind::PrismaticY: out(0) = f(4); break;
    case JointKind::PrismaticZ: out(0) = f(5); break;
    case JointKind::Spherical: out = f.template head<3>(); break;
    case JointKind::Floating: out = f; break;
  }
}

}  // namespace detail

/// Inverse dynamics (recursive Newton-Euler). Gravity enters by rooting the
/// acceleration recursion at -a_g. The sweep runs in body-local coordinates
/// (constant joint subspaces and inertias), which is an internal optimization
/// only: outputs agree with the ground-frame formulation.
template <class S>
VecXt<S> rneaGeneric(const Model& model, const std::vector<JointPose<S>>& pose,
                     const VecXt<S>& qd, const VecXt<S>& qdd, const Vec6t<S>& gravity) {
  const int nb = model.numBodies();
  const std::vector<int>& off = model.dofOffsetsCached();

  thread_local std::vector<Vec6t<S>> v, a, f;
  v.resize(nb);
  a.resize(nb);
  f.resize(nb);

  for (int i = 0; i < nb; ++i) {
    const int par = model.bodies[i].parent;
    const int ni = model.bodies[i].joint.dof();
    const JointKind kind = model.bodies[i].joint.kind;
    const Mat3t<S> Rt = pose[i].R.transpose();
    const Vec3t<S>& p = pose[i].p;

    Vec6t<S>& vi = v[i];
    Vec6t<S>& ai = a[i];
    if (par >= 0) {
      const Vec6t<S>& vp = v[par];
      vi.template head<3>() = Rt * vp.template head<3>();
      vi.template tail<3>() = Rt * (vp.template tail<3>() - p.cross(vp.template head<3>()));
      const Vec6t<S>& app = a[par];
      ai.template head<3>() = Rt * app.template head<3>();
      ai.template tail<3>() = Rt * (app.template tail<3>() - p.cross(app.template head<3>()));
    } else {
      vi.setZero();
      ai.template head<3>() = -(Rt * gravity.template head<3>());
      ai.template tail<3>() =
          -(Rt * (gravity.template tail<3>() - p.cross(gravity.template head<3>())));
    }
    Vec6t<S> vj = Vec6t<S>::Zero();
    detail::addJointRates<S>(kind, qd.segment(off[i], ni), vj);
    vi += vj;
    ai += crossMotionApply<S>(vi, vj);
    detail::addJointRates<S>(kind, qdd.segment(off[i], ni), ai);
    const SpatialInertiad& in = model.bodies[i].inertia;
    const Vec3t<S> h = in.h.template cast<S>();
    const Mat3t<S> irot = in.I.template cast<S>();
    const S mass = S(in.mass);
    Vec6t<S> iv, iacc;
    iv.template head<3>() = irot * vi.template head<3>() + h.cross(vi.template tail<3>());
    iv.template tail<3>() = mass * vi.template tail<3>() - h.cross(vi.template head<3>());
    iacc.template head<3>() = irot * ai.template head<3>() + h.cross(ai.template tail<3>());
    iacc.template tail<3>() = mass * ai.template tail<3>() - h.cross(ai.template head<3>());
    f[i] = iacc + crossForceApply<S>(vi, iv);
  }

  VecXt<S> tau(model.nv());
  for (int i = nb - 1; i >= 0; --i) {
    const int ni = model.bodies[i].joint.dof();
    detail::projectOnSubspace<S>(model.bodies[i].joint.kind, f[i], tau.segment(off[i], ni));
    const int par = model.bodies[i].parent;
    if (par >= 0) f[par] += detail::forceToParent<S>(pose[i].R, pose[i].p, f[i]);
  }
  return tau;
}

namespace detail {

/// Column indices of the constant local motion subspace inside a 6x6 block.
inline int subspaceIndices(JointKind kind, int idx[6]) {
  switch (kind) {
    case JointKind::RevoluteX: idx[0] = 0; return 1;
    case JointKind::RevoluteY: idx[0] = 1; return 1;
    case JointKind::RevoluteZ: idx[0] = 2; return 1;
    case JointKind::PrismaticX: idx[0] = 3; return 1;
    case JointKind::PrismaticY: idx[0] = 4; return 1;
    case JointKind::PrismaticZ: idx[0] = 5; return 1;
    case JointKind::Spherical:
      idx[0] = 0;
      idx[1] = 1;
      idx[2] = 2;
      return 3;
    case JointKind::Floating:
      for (int k = 0; k < 6; ++k) idx[k] = k;
      return 6;
  }
  return 0;
}

}  // namespace detail

/// Forward dynamics (articulated body algorithm). Like the inverse-dynamics
/// sweep this runs in body-local coordinates, where the joint subspace is a
/// constant selector and lever arms stay link-sized, which keeps the
/// factorizations well conditioned on long floating-base chains.
template <class S>
VecXt<S> abaGeneric(const Model& model, const std::vector<JointPose<S>>& pose,
                    const VecXt<S>& qd, const VecXt<S>& tau, const Vec6t<S>& gravity) {
  const int nb = model.numBodies();
  const int n = model.nv();
  const std::vector<int>& off = model.dofOffsetsCached();

  std::vector<Vec6t<S>> v(nb), c(nb), pA(nb);
  std::vector<Mat6t<S>> IA(nb);
  std::vector<Eigen::Matrix<S, Eigen::Dynamic, 6, 0, 6, 6>> DinvUt(nb);
  std::vector<Eigen::Matrix<S, Eigen::Dynamic, 1, 0, 6, 1>> Dinvu(nb);

  for (int i = 0; i < nb; ++i) {
    const int par = model.bodies[i].parent;
    const int ni = model.bodies[i].joint.dof();
    const JointKind kind = model.bodies[i].joint.kind;
    Vec6t<S> vj = Vec6t<S>::Zero();
    detail::addJointRates<S>(kind, qd.segment(off[i], ni), vj);
    v[i] = (par >= 0 ? detail::motionToLocal<S>(pose[i].R, pose[i].p, v[par])
                     : Vec6t<S>::Zero().eval()) +
           vj;
    c[i] = crossMotionApply<S>(v[i], vj);
    const SpatialInertia<S> inertia = castInertia<S>(model.bodies[i].inertia);
    IA[i] = inertia.toMat6();
    pA[i] = crossForceApply<S>(v[i], inertia.apply(v[i]));
  }

  int idx[6];
  for (int i = nb - 1; i >= 0; --i) {
    const int par = model.bodies[i].parent;
    const int ni = detail::subspaceIndices(model.bodies[i].joint.kind, idx);
    Mat6Xt<S> U(6, ni);
    MatXt<S> D(ni, ni);
    MatXt<S> rhs(ni, 7);
    for (int ccol = 0; ccol < ni; ++ccol) U.col(ccol) = IA[i].col(idx[ccol]);
    for (int r = 0; r < ni; ++r) {
      for (int ccol = 0; ccol < ni; ++ccol) D(r, ccol) = IA[i](idx[r], idx[ccol]);
      rhs.row(r).template head<6>() = U.col(r).transpose();
      rhs(r, 6) = tau(off[i] + r) - pA[i](idx[r]);
    }
    MatXt<S> sol = solveLinear<S>(D, rhs);  // [D^-1 U^T, D^-1 u]
    DinvUt[i] = sol.leftCols(6);
    Dinvu[i] = sol.col(6);
    if (par >= 0) {
      const Mat6t<S> Ia = IA[i] - U * DinvUt[i];
      const Vec6t<S> pa = pA[i] + Ia * c[i] + U * Dinvu[i];
      // congruence by the force transform expresses the articulated pair in
      // the parent frame
      Mat6t<S> xf = Mat6t<S>::Zero();
      xf.template topLeftCorner<3, 3>() = pose[i].R;
      xf.template bottomRightCorner<3, 3>() = pose[i].R;
      xf.template topRightCorner<3, 3>() = skew<S>(pose[i].p) * pose[i].R;
      IA[par] += xf * Ia * xf.transpose();
      pA[par] += detail::forceToParent<S>(pose[i].R, pose[i].p, pa);
    }
  }

  VecXt<S> qdd(n);
  std::vector<Vec6t<S>> a(nb);
  for (int i = 0; i < nb; ++i) {
    const int par = model.bodies[i].parent;
    const int ni = model.bodies[i].joint.dof();
    const Vec6t<S> ap = detail::motionToLocal<S>(pose[i].R, pose[i].p,
                                                 par >= 0 ? a[par] : Vec6t<S>(-gravity)) +
                        c[i];
    qdd.segment(off[i], ni) = Dinvu[i] - DinvUt[i] * ap;
    a[i] = ap;
    detail::addJointRates<S>(model.bodies[i].joint.kind, qdd.segment(off[i], ni), a[i]);
  }
  return qdd;
}

// ---------------------------------------------------------------------------
// Real-valued front ends
// ---------------------------------------------------------------------------

inline VecXd rnea(const Model& model, const std::vector<JointConfig>& q, const VecXd& qd,
                  const VecXd& qdd, const Vec6& gravity) {
  return rneaGeneric<double>(model, localPoses(model, q), qd, qdd, gravity);
}

inline VecXd rnea(const Model& model, const std::vector<JointConfig>& q, const VecXd& qd,
                  const VecXd& qdd) {
  return rneaGeneric<double>(model, localPoses(model, q), qd, qdd, model.gravity);
}

inline VecXd aba(const Model& model, const std::vector<JointConfig>& q, const VecXd& qd,
                 const VecXd& tau, const Vec6& gravity) {
  return abaGeneric<double>(model, localPoses(model, q), qd, tau, gravity);
}

inline VecXd aba(const Model& model, const std::vector<JointConfig>& q, const VecXd& qd,
                 const VecXd& tau) {
  return abaGeneric<double>(model, localPoses(model, q), qd, tau, model.gravity);
}

// ---------------------------------------------------------------------------
// Kinematics cache shared by the derivative algorithms
// ---------------------------------------------------------------------------

/// Ground-frame kinematic and dynamic quantities for one (q, qd, qdd) state.
///
/// Composites are fully accumulated child-to-parent: because every descendant
/// of a body has a larger index, the leaves-to-root derivative sweep sees the
/// same values it would have built incrementally.
///
/// Bc2 omits the 1/2 factor of the body-Coriolis definition. All second-order
/// recursions here are written against that unhalved convention; do not mix
/// it with bodyCoriolis() without accounting for the factor 2.
template <class Sc>
struct KinematicsCacheT {
  std::vector<SpatialTransform<Sc>> X;  // ground <- body
  Mat6Xt<Sc> S;                         // motion subspaces, column blocks per body
  Mat6Xt<Sc> Sd_parent;                 // rate of S from the parent's velocity
  Mat6Xt<Sc> Sdd_parent;                // second rate of S from the parent's motion
  Mat6Xt<Sc> Sd_body;                   // rate of S from the body's own velocity
  std::vector<Vec6t<Sc>> v, a;
  std::vector<Mat6t<Sc>> I;    // per-body spatial inertia
  std::vector<Mat6t<Sc>> Ic;   // subtree composite inertia
  std::vector<Mat6t<Sc>> Bc2;  // subtree composite body-Coriolis, no 1/2 factor
  std::vector<Vec6t<Sc>> fc;   // subtree composite spatial force
  std::vector<int> off;        // flat DoF offset per body
};

struct KinematicsCache : KinematicsCacheT<double> {};

template <class S>
KinematicsCacheT<S> computeKinematicsCacheGeneric(const Model& model,
                                                  const std::vector<JointPose<S>>& pose,
                                                  const VecXt<S>& qd, const VecXt<S>& qdd,
                                                  const Vec6t<S>& gravity) {
  const int nb = model.numBodies();
  const int n = model.nv();
  KinematicsCacheT<S> kc;
  kc.off = model.dofOffsetsCached();
  kc.X.resize(nb);
  kc.S.setZero(6, n);
  kc.Sd_parent.setZero(6, n);
  kc.Sdd_parent.setZero(6, n);
  kc.Sd_body.setZero(6, n);
  kc.v.resize(nb);
  kc.a.resize(nb);
  kc.I.resize(nb);
  kc.Ic.resize(nb);
  kc.Bc2.resize(nb);
  kc.fc.resize(nb);

  for (int i = 0; i < nb; ++i) {
    const int par = model.bodies[i].parent;
    const int ni = model.bodies[i].joint.dof();
    const SpatialTransform<S> local{pose[i].R, pose[i].p};
    kc.X[i] = (par >= 0) ? kc.X[par] * local : local;
    detail::groundSubspace<S>(model.bodies[i].joint.kind, kc.X[i].R, kc.X[i].p,
                              kc.S.middleCols(kc.off[i], ni));

    const Vec6t<S> vpar = (par >= 0) ? kc.v[par] : Vec6t<S>::Zero();
    const Vec6t<S> apar = (par >= 0) ? kc.a[par] : Vec6t<S>(-gravity);
    const auto Si = kc.S.middleCols(kc.off[i], ni);
    const Vec6t<S> vj = Si * qd.segment(kc.off[i], ni);
    kc.v[i] = vpar + vj;
    kc.a[i] = apar + Si * qdd.segment(kc.off[i], ni) + crossMotionApply<S>(kc.v[i], vj);

    for (int c = 0; c < ni; ++c) {
      const Vec6t<S> sc = kc.S.col(kc.off[i] + c);
      kc.Sd_body.col(kc.off[i] + c) = crossMotionApply<S>(kc.v[i], sc);
      const Vec6t<S> sd = crossMotionApply<S>(vpar, sc);
      kc.Sd_parent.col(kc.off[i] + c) = sd;
      kc.Sdd_parent.col(kc.off[i] + c) =
          crossMotionApply<S>(apar, sc) + crossMotionApply<S>(vpar, sd);
    }

    const SpatialInertia<S> ig = castInertia<S>(model.bodies[i].inertia).transformedBy(kc.X[i]);
    kc.I[i] = ig.toMat6();
    kc.Ic[i] = kc.I[i];
    kc.Bc2[i] = bodyCoriolis2<S>(kc.I[i], kc.v[i]);
    kc.fc[i] = ig.apply(kc.a[i]) + crossForceApply<S>(kc.v[i], ig.apply(kc.v[i]));
  }

  for (int i = nb - 1; i >= 0; --i) {
    const int par = model.bodies[i].parent;
    if (par >= 0) {
      kc.Ic[par] += kc.Ic[i];
      kc.Bc2[par] += kc.Bc2[i];
      kc.fc[par] += kc.fc[i];
    }
  }
  return kc;
}

inline KinematicsCache computeKinematicsCache(const Model& model,
                                              const std::vector<JointConfig>& q,
                                              const VecXd& qd, const VecXd& qdd,
                                              const Vec6& gravity) {
  KinematicsCache kc;
  static_cast<KinematicsCacheT<double>&>(kc) =
      computeKinematicsCacheGeneric<double>(model, localPoses(model, q), qd, qdd, gravity);
  return kc;
}

inline KinematicsCache computeKinematicsCache(const Model& model,
                                              const std::vector<JointConfig>& q,
                                              const VecXd& qd, const VecXd& qdd) {
  return computeKinematicsCache(model, q, qd, qdd, model.gravity);
}

/// Mass matrix from composite inertias in the cache; the first-order
/// derivative bundle reuses this exact code path.
inline MatXd massMatrixFromCache(const Model& model, const KinematicsCacheT<double>& kc) {
  const int n = model.nv();
  MatXd m = MatXd::Zero(n, n);
  for (int i = model.numBodies() - 1; i >= 0; --i) {
    const int ni = model.bodies[i].joint.dof();
    const auto Si = kc.S.middleCols(kc.off[i], ni);
    const Mat6Xd F = kc.Ic[i] * Si;
    MatXd blk = Si.transpose() * F;
    for (int c = 0; c < ni; ++c)
      for (int r = c + 1; r < ni; ++r) blk(r, c) = blk(c, r);  // exact symmetry
    m.block(kc.off[i], kc.off[i], ni, ni) = blk;
    for (int j = model.bodies[i].parent; j >= 0; j = model.bodies[j].parent) {
      const int nj = model.bodies[j].joint.dof();
      const auto Sj = kc.S.middleCols(kc.off[j], nj);
      m.block(kc.off[j], kc.off[i], nj, ni) = Sj.transpose() * F;
      m.block(kc.off[i], kc.off[j], ni, nj) =
          m.block(kc.off[j], kc.off[i], nj, ni).transpose();
    }
  }
  return m;
}

inline MatXd crba(const Model& model, const std::vector<JointConfig>& q) {
  const VecXd zero = VecXd::Zero(model.nv());
  return massMatrixFromCache(model, computeKinematicsCache(model, q, zero, zero));
}

enum class MinvStrategy { Cholesky, Aba };

/// M^-1 B, either through a dense Cholesky factorization of the mass matrix
/// or through one zero-velocity zero-gravity ABA call per column.
inline MatXd minvApply(const Model& model, const std::vector<JointConfig>& q, const MatXd& b,
                       MinvStrategy strategy = MinvStrategy::Cholesky) {
  const int n = model.nv();
  if (b.rows() != n) throw std::invalid_argument("minvApply: B has wrong row count");
  if (strategy == MinvStrategy::Cholesky) {
    const MatXd m = crba(model, q);
    Eigen::LLT<MatXd> llt(m);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("minvApply: mass matrix is not positive definite");
    return llt.solve(b);
  }
  MatXd out(n, b.cols());
  const VecXd zero = VecXd::Zero(n);
  const std::vector<JointPose<double>> pose = localPoses(model, q);
  for (int c = 0; c < b.cols(); ++c) {
    out.col(c) = abaGeneric<double>(model, pose, zero, VecXd(b.col(c)), Vec6::Zero());
  }
  return out;
}

}  // namespace sorbd
