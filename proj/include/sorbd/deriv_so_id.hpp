#pragma once

#include "sorbd/deriv_types.hpp"
#include "sorbd/dynamics.hpp"

namespace sorbd {

/// Second-order analytical partial derivatives of inverse dynamics.
///
/// Triple-loop backward pass: i runs over all bodies leaves-to-root, j from i
/// toward the root, k from j toward the root, each with an inner loop over
/// the joint's DoFs. Per (i,p) a set of 6x6 aggregates is formed once, per
/// (j,t) a set of 6-vectors, and the innermost loop writes scalars into all
/// tensor slots the (k <= j <= i) case expressions cover. Composites live in
/// the cache and are already fully accumulated, which is exactly the state an
/// incremental leaves-to-root accumulation would present to each i.
///
/// Everything uses the unhalved body-Coriolis convention (cache Bc2); the
/// factor 2 of the halved definition is absorbed there, so no expression
/// below carries an explicit doubling.
///
/// This in-place variant reallocates (zero-filled) output tensors only on
/// shape changes. On a fixed model consecutive calls write the same
/// structurally nonzero slots, so skipping the re-zeroing is exact; pass a
/// fresh bundle when switching between models of equal size.
inline void idsvaSo(const Model& model, const KinematicsCacheT<double>& kc,
                    DerivBundleSO_ID& out) {
  const int n = model.nv();
  if (out.d2tau_dq2.rows() != n || out.d2tau_dq2.cols() != n || out.d2tau_dq2.pages() != n) {
    out.d2tau_dq2 = Tensor3(n, n, n);
    out.d2tau_dqd2 = Tensor3(n, n, n);
    out.d2tau_dq_dqd = Tensor3(n, n, n);
    out.dM_dq = Tensor3(n, n, n);
  }
  Tensor3& t_qq = out.d2tau_dq2;
  Tensor3& t_vv = out.d2tau_dqd2;
  Tensor3& t_vq = out.d2tau_dq_dqd;  // qd on columns, q on pages
  Tensor3& t_mq = out.dM_dq;

  for (int i = model.numBodies() - 1; i >= 0; --i) {
    const Mat6& Ic = kc.Ic[i];
    const Mat6& Bc = kc.Bc2[i];
    const Vec6& fc = kc.fc[i];
    const int ni = model.bodies[i].joint.dof();
    for (int p = 0; p < ni; ++p) {
      const int ip = kc.off[i] + p;
      const Vec6 sp = kc.S.col(ip);
      const Vec6 psidp = kc.Sd_parent.col(ip);
      const Vec6 psiddp = kc.Sdd_parent.col(ip);
      const Vec6 phidp = kc.Sd_body.col(ip);

      const Mat6 crf_sp = crossForce<double>(sp);
      const Mat6 crm_sp = crossMotion<double>(sp);
      const Mat6 Bsp = crf_sp * Ic - Ic * crm_sp + crossbarStar<double>(Vec6(Ic * sp));
      const Mat6 Bpsidp = crossForce<double>(psidp) * Ic - Ic * crossMotion<double>(psidp) +
                          crossbarStar<double>(Vec6(Ic * psidp));
      const Mat6 a0 = crossbarStar<double>(Vec6(Ic * sp));
      const Mat6 a1 = crf_sp * Ic - Ic * crm_sp;
      const Mat6 a2 = 2.0 * a0 - Bsp;
      const Mat6 a3 = Bpsidp + crf_sp * Bc - Bc * crm_sp;
      const Mat6 a4 = crossbarStar<double>(Vec6(Bc.transpose() * sp));
      const Mat6 a5 =
          crossbarStar<double>(Vec6(Bc * psidp + Ic * psiddp + crossForceApply<double>(sp, fc)));
      const Mat6 a6 = crf_sp * Ic + a0;
      const Mat6 a7 = crossbarStar<double>(Vec6(Bc * sp + Ic * (psidp + phidp)));

      for (int j = i; j >= 0; j = model.bodies[j].parent) {
        const int nj = model.bodies[j].joint.dof();
        for (int t = 0; t < nj; ++t) {
          const int jt = kc.off[j] + t;
          const Vec6 st = kc.S.col(jt);
          const Vec6 psidt = kc.Sd_parent.col(jt);
          const Vec6 psiddt = kc.Sdd_parent.col(jt);
          const Vec6 phidt = kc.Sd_body.col(jt);

          const Vec6 u1 = a3.transpose() * st;
          const Vec6 u2 = a1.transpose() * st;
          const Vec6 u3 = a3 * psidt + a1 * psiddt + a5 * st;
          const Vec6 u4 = a6 * st;
          const Vec6 u5 = a2 * psidt + a4 * st;
          const Vec6 u6 = Bsp * psidt + a7 * st;
          const Vec6 u7 = a3 * st + a1 * (psidt + phidt);
          const Vec6 u8 = a4 * st - Bsp.transpose() * psidt;
          const Vec6 u9 = a0 * st;
          const Vec6 u10 = Bsp * st;
          const Vec6 u11 = Bsp.transpose() * st;
          const Vec6 u12 = a1 * st;

          for (int k = j; k >= 0; k = model.bodies[k].parent) {
            const int nk = model.bodies[k].joint.dof();
            for (int r = 0; r < nk; ++r) {
              const int kr = kc.off[k] + r;
              const Vec6 sr = kc.S.col(kr);
              const Vec6 psidr = kc.Sd_parent.col(kr);
              const Vec6 psiddr = kc.Sdd_parent.col(kr);
              const Vec6 phidr = kc.Sd_body.col(kr);

              const double p1 = u11.dot(psidr);
              const double p2 = u8.dot(psidr) + u9.dot(psiddr);

              t_qq(ip, jt, kr) = p2;
              t_vq(ip, jt, kr) = -p1;

              if (j != i) {
                const double qq = u1.dot(psidr) + u2.dot(psiddr);
                t_qq(jt, kr, ip) = qq;
                t_qq(jt, ip, kr) = qq;
                t_vq(jt, kr, ip) = u1.dot(sr) + u2.dot(phidr + psidr);
                t_vq(jt, ip, kr) = p1;
                const double vv = u11.dot(sr);
                t_vv(jt, kr, ip) = vv;
                t_vv(jt, ip, kr) = vv;
                const double mq = sr.dot(u12);
                t_mq(kr, jt, ip) = mq;
                t_mq(jt, kr, ip) = mq;
              }

              if (k != j) {
                t_qq(ip, kr, jt) = p2;
                t_qq(kr, ip, jt) = sr.dot(u3);
                const double vv = -u11.dot(sr);
                t_vv(ip, jt, kr) = vv;
                t_vv(ip, kr, jt) = vv;
                t_vq(ip, kr, jt) = sr.dot(u5) + u9.dot(phidr + psidr);
                t_vq(kr, ip, jt) = sr.dot(u6);
                const double mq = sr.dot(u9);
                t_mq(kr, ip, jt) = mq;
                t_mq(ip, kr, jt) = mq;
                if (j != i) {
                  t_qq(kr, jt, ip) = t_qq(kr, ip, jt);
                  t_vq(kr, jt, ip) = sr.dot(u7);
                  const double vv2 = sr.dot(u10);
                  t_vv(kr, ip, jt) = vv2;
                  t_vv(kr, jt, ip) = vv2;
                } else {
                  t_vv(kr, jt, ip) = sr.dot(u4);
                }
              } else {
                t_vv(ip, jt, kr) = -u2.dot(sr);
              }
            }
          }
        }
      }
    }
  }
}

inline DerivBundleSO_ID idsvaSo(const Model& model, const KinematicsCacheT<double>& kc) {
  DerivBundleSO_ID out;
  idsvaSo(model, kc, out);
  return out;
}

inline DerivBundleSO_ID idsvaSo(const Model& model, const std::vector<JointConfig>& q,
                                const VecXd& qd, const VecXd& qdd) {
  return idsvaSo(model, computeKinematicsCache(model, q, qd, qdd));
}

/// dM/dq alone; velocity- and acceleration-independent, so a zero-rate sweep
/// of the full pass produces it.
inline Tensor3 dMdqTensor(const Model& model, const std::vector<JointConfig>& q) {
  const VecXd zero = VecXd::Zero(model.nv());
  return idsvaSo(model, q, zero, zero).dM_dq;
}

}  // namespace sorbd
