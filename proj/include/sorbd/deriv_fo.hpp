#pragma once

#include "sorbd/deriv_types.hpp"
#include "sorbd/dynamics.hpp"

namespace sorbd {

/// First-order analytical partial derivatives of inverse dynamics over a
/// precomputed kinematics cache. A backward sweep fills, per body i, the
/// self block and the blocks against every ancestor j:
///
///   dtau_i/dq_j  = S_i^T [ Bc2_i Sd_j + Ic_i Sdd_j ]                (j <= i)
///   dtau_j/dq_i  = S_j^T [ Bc2_i Sd_i + Ic_i Sdd_i + fc_i xbar* S_i ]  (j < i)
///   dtau_i/dqd_j = S_i^T [ Bc2_i S_j + Ic_i (Sd_j + Sdb_j) ]        (j <= i)
///   dtau_j/dqd_i = S_j^T [ Bc2_i S_i + Ic_i (Sd_i + Sdb_i) ]        (j < i)
///
/// where Sd/Sdd are the parent-induced subspace rates and Sdb the body-induced
/// rate. Bc2 is unhalved, which absorbs the factor 2 of the halved convention.
inline DerivBundleFO idsvaFo(const Model& model, const KinematicsCacheT<double>& kc) {
  const int n = model.nv();
  DerivBundleFO out;
  out.dtau_dq.setZero(n, n);
  out.dtau_dqd.setZero(n, n);
  for (int i = model.numBodies() - 1; i >= 0; --i) {
    const int ni = model.bodies[i].joint.dof();
    const int oi = kc.off[i];
    const auto Si = kc.S.middleCols(oi, ni);
    const auto Sdi = kc.Sd_parent.middleCols(oi, ni);
    const auto Sddi = kc.Sdd_parent.middleCols(oi, ni);
    const auto Sdbi = kc.Sd_body.middleCols(oi, ni);

    const MatXd rowB = Si.transpose() * kc.Bc2[i];  // ni x 6
    const MatXd rowI = Si.transpose() * kc.Ic[i];

    const Mat6Xd colQ =
        kc.Bc2[i] * Sdi + kc.Ic[i] * Sddi + crossbarStar<double>(kc.fc[i]) * Si;
    const Mat6Xd colQd = kc.Bc2[i] * Si + kc.Ic[i] * (Sdi + Sdbi);

    out.dtau_dq.block(oi, oi, ni, ni) = rowB * Sdi + rowI * Sddi;
    out.dtau_dqd.block(oi, oi, ni, ni) = rowB * Si + rowI * (Sdi + Sdbi);

    for (int j = model.bodies[i].parent; j >= 0; j = model.bodies[j].parent) {
      const int nj = model.bodies[j].joint.dof();
      const int oj = kc.off[j];
      const auto Sj = kc.S.middleCols(oj, nj);
      out.dtau_dq.block(oi, oj, ni, nj) =
          rowB * kc.Sd_parent.middleCols(oj, nj) + rowI * kc.Sdd_parent.middleCols(oj, nj);
      out.dtau_dq.block(oj, oi, nj, ni) = Sj.transpose() * colQ;
      out.dtau_dqd.block(oi, oj, ni, nj) =
          rowB * Sj +
          rowI * (kc.Sd_parent.middleCols(oj, nj) + kc.Sd_body.middleCols(oj, nj));
      out.dtau_dqd.block(oj, oi, nj, ni) = Sj.transpose() * colQd;
    }
  }
  out.dtau_dqdd = massMatrixFromCache(model, kc);
  return out;
}

inline DerivBundleFO idsvaFo(const Model& model, const std::vector<JointConfig>& q,
                             const VecXd& qd, const VecXd& qdd, const Vec6& gravity) {
  return idsvaFo(model, computeKinematicsCache(model, q, qd, qdd, gravity));
}

inline DerivBundleFO idsvaFo(const Model& model, const std::vector<JointConfig>& q,
                             const VecXd& qd, const VecXd& qdd) {
  return idsvaFo(model, q, qd, qdd, model.gravity);
}

/// (dM/dq) contracted with an arbitrary n-vector b in one O(Nd) first-order
/// sweep with zero velocity and zero gravity; entry (i,k) = sum_j dM_ij/dq_k b_j.
inline MatXd idfoza(const Model& model, const std::vector<JointConfig>& q, const VecXd& b) {
  if (b.size() != model.nv()) throw std::invalid_argument("idfoza: b has wrong length");
  return idsvaFo(model, q, VecXd::Zero(model.nv()), b, Vec6::Zero()).dtau_dq;
}

/// Batched zero-algorithm sweep: out(i,c,k) = sum_j dM_ij/dq_k B_jc. The
/// configuration-dependent kinematics are computed once and shared by all
/// columns; per column only the acceleration propagation and the O(Nd) block
/// pass rerun. With zero velocity and gravity the first-order blocks reduce to
///   rows i, pages j (j <= i):  (S_i^T Ic_i) Sdd_j
///   rows j, pages i (j < i):   S_j^T [ Ic_i Sdd_i + (fc_i xbar*) S_i ]
/// with Sdd_j the acceleration-induced subspace rate a_{parent(j)} x S_j.
inline Tensor3 idfozaBatch(const Model& model, const std::vector<JointConfig>& q,
                           const MatXd& b) {
  const int n = model.nv();
  if (b.rows() != n) throw std::invalid_argument("idfozaBatch: B has wrong row count");
  const int nb = model.numBodies();
  const VecXd zero = VecXd::Zero(n);
  const KinematicsCache kc = computeKinematicsCache(model, q, zero, zero, Vec6::Zero());

  // flat per-DoF row operators (S_ip^T Ic_i), fixed width for tight dots
  Eigen::Matrix<double, Eigen::Dynamic, 6> rowI(n, 6);
  std::vector<int> bodyOfDof(n);
  for (int i = 0; i < nb; ++i) {
    const int ni = model.bodies[i].joint.dof();
    for (int d = 0; d < ni; ++d) {
      rowI.row(kc.off[i] + d) = kc.S.col(kc.off[i] + d).transpose() * kc.Ic[i];
      bodyOfDof[kc.off[i] + d] = i;
    }
  }

  Tensor3 out(n, static_cast<int>(b.cols()), n);
  std::vector<Vec6> acc(nb), fc(nb);
  Mat6Xd sdd(6, n), colQ(6, n);
  for (int col = 0; col < b.cols(); ++col) {
    for (int i = 0; i < nb; ++i) {
      const int par = model.bodies[i].parent;
      const int ni = model.bodies[i].joint.dof();
      const Vec6 apar = par >= 0 ? acc[par] : Vec6::Zero();
      acc[i] = apar + kc.S.middleCols(kc.off[i], ni) * b.col(col).segment(kc.off[i], ni);
      for (int d = 0; d < ni; ++d)
        sdd.col(kc.off[i] + d) = crossMotionApply<double>(apar, Vec6(kc.S.col(kc.off[i] + d)));
      fc[i] = kc.I[i] * acc[i];
    }
    for (int i = nb - 1; i >= 0; --i) {
      const int par = model.bodies[i].parent;
      if (par >= 0) fc[par] += fc[i];
    }
    for (int i = 0; i < nb; ++i) {
      const int ni = model.bodies[i].joint.dof();
      const Mat6 cbs = crossbarStar<double>(fc[i]);
      for (int d = 0; d < ni; ++d) {
        const int ip = kc.off[i] + d;
        colQ.col(ip) = kc.Ic[i] * sdd.col(ip) + cbs * kc.S.col(ip);
      }
    }
    for (int ip = 0; ip < n; ++ip) {
      const int i = bodyOfDof[ip];
      const auto rowIp = rowI.row(ip);
      const Vec6 colQp = colQ.col(ip);
      // self block, including same-joint off-diagonal DoFs; the mirrored
      // (jt, ip) slots are written when the outer loop reaches jt
      for (int jt = kc.off[i]; jt < kc.off[i] + model.bodies[i].joint.dof(); ++jt) {
        out(ip, col, jt) = rowIp.dot(sdd.col(jt));
      }
      for (int j = model.bodies[i].parent; j >= 0; j = model.bodies[j].parent) {
        const int nj = model.bodies[j].joint.dof();
        for (int t = 0; t < nj; ++t) {
          const int jt = kc.off[j] + t;
          out(ip, col, jt) = rowIp.dot(sdd.col(jt));
          out(jt, col, ip) = kc.S.col(jt).dot(colQp);
        }
      }
    }
  }
  return out;
}

/// First-order forward-dynamics derivatives through the implicit-function
/// relation dFD/du = -M^-1 dID/du evaluated at qdd0 = FD(q, qd, tau).
inline FdDerivFO fdFo(const Model& model, const std::vector<JointConfig>& q, const VecXd& qd,
                      const VecXd& tau) {
  const int n = model.nv();
  FdDerivFO out;
  out.qdd0 = aba(model, q, qd, tau);
  const DerivBundleFO id = idsvaFo(model, q, qd, out.qdd0);
  Eigen::LLT<MatXd> llt(id.dtau_dqdd);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("fdFo: mass matrix is not positive definite");
  out.dfd_dq = -llt.solve(id.dtau_dq);
  out.dfd_dqd = -llt.solve(id.dtau_dqd);
  out.dfd_dtau = llt.solve(MatXd::Identity(n, n));
  return out;
}

}  // namespace sorbd
