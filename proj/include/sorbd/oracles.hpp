#pragma once

#include "sorbd/bicomplex.hpp"
#include "sorbd/deriv_fo.hpp"

namespace sorbd {

/// Step sizes for the finite-difference oracles: h steps the first (column)
/// variable, k the second (page) variable. Defaults sit in the middle of the
/// empirically optimal band for second-order central differences on these
/// dynamics.
struct StepConfig {
  double h = 3e-4;
  double k = 3e-4;
};

namespace oracle_detail {

inline std::vector<std::pair<int, int>> flatDofMap(const Model& model) {
  std::vector<std::pair<int, int>> map(model.nv());
  const auto off = model.dofOffsets();
  for (int i = 0; i < model.numBodies(); ++i)
    for (int d = 0; d < model.bodies[i].joint.dof(); ++d) map[off[i] + d] = {i, d};
  return map;
}

}  // namespace oracle_detail

/// Right-perturbation of joint configurations in the bi-complex plane.
///
/// All configuration derivatives are defined through flows q * exp(E eps)
/// applied on the right. For a nested second derivative the page-variable
/// factor multiplies first and the column-variable factor after it:
/// q * exp(E_b eps2) * exp(E_a eps1). The exponential is evaluated as a
/// truncated power series so the map stays analytic in the perturbation.
class BicomplexPerturber {
 public:
  BicomplexPerturber(const Model& model, const std::vector<JointConfig>& q)
      : model_(model),
        q_(q),
        base_(castPoses<BiComplex>(localPoses(model, q))),
        dofMap_(oracle_detail::flatDofMap(model)) {}

  const std::vector<JointPose<BiComplex>>& basePoses() const { return base_; }
  const std::vector<std::pair<int, int>>& dofMap() const { return dofMap_; }

  /// outerFlat (page variable) perturbed by eps2, innerFlat (column variable)
  /// by eps1; pass -1 to skip either.
  std::vector<JointPose<BiComplex>> poses(int outerFlat, BiComplex eps2, int innerFlat,
                                          BiComplex eps1) const {
    std::vector<JointPose<BiComplex>> out = base_;
    const int bo = outerFlat >= 0 ? dofMap_[outerFlat].first : -1;
    const int bi = innerFlat >= 0 ? dofMap_[innerFlat].first : -1;
    auto rebuild = [&](int body) {
      Mat4t<BiComplex> hom = q_[body].homogeneous().cast<BiComplex>();
      if (bo == body)
        hom = Mat4t<BiComplex>(
            hom * expSeries<BiComplex>(Mat4t<BiComplex>(
                      hat<double>(model_.bodies[body].joint.localS().col(dofMap_[outerFlat].second))
                          .cast<BiComplex>() *
                      eps2)));
      if (bi == body)
        hom = Mat4t<BiComplex>(
            hom * expSeries<BiComplex>(Mat4t<BiComplex>(
                      hat<double>(model_.bodies[body].joint.localS().col(dofMap_[innerFlat].second))
                          .cast<BiComplex>() *
                      eps1)));
      const Mat3t<BiComplex> pr = model_.bodies[body].placement.R.cast<BiComplex>();
      const Vec3t<BiComplex> pp = model_.bodies[body].placement.p.cast<BiComplex>();
      out[body].R = pr * hom.topLeftCorner<3, 3>();
      out[body].p = pr * hom.topRightCorner<3, 1>() + pp;
    };
    if (bo >= 0) rebuild(bo);
    if (bi >= 0 && bi != bo) rebuild(bi);
    return out;
  }

 private:
  const Model& model_;
  std::vector<JointConfig> q_;
  std::vector<JointPose<BiComplex>> base_;
  std::vector<std::pair<int, int>> dofMap_;
};

/// Second-order inverse-dynamics derivatives to machine precision through
/// bi-complex perturbations of RNEA; h = 1e-20 incurs no cancellation.
inline DerivBundleSO_ID bicomplexSoId(const Model& model, const std::vector<JointConfig>& q,
                                      const VecXd& qd, const VecXd& qdd, double h = 1e-20) {
  const int n = model.nv();
  DerivBundleSO_ID out{Tensor3(n, n, n), Tensor3(n, n, n), Tensor3(n, n, n), Tensor3(n, n, n)};
  BicomplexPerturber pert(model, q);
  const VecXt<BiComplex> qdC = qd.cast<BiComplex>();
  const VecXt<BiComplex> qddC = qdd.cast<BiComplex>();
  const Vec6t<BiComplex> grav = model.gravity.cast<BiComplex>();
  const BiComplex e1(0, h, 0, 0), e2(0, 0, h, 0);
  const double h2 = h * h;

  for (int b = 0; b < n; ++b) {
    const auto pagePoses = pert.poses(b, e2, -1, BiComplex());
    for (int a = 0; a < n; ++a) {
      {
        const auto poses = pert.poses(b, e2, a, e1);
        const VecXt<BiComplex> tau = rneaGeneric<BiComplex>(model, poses, qdC, qddC, grav);
        for (int i = 0; i < n; ++i) out.d2tau_dq2(i, a, b) = tau(i).i12 / h2;
      }
      {
        VecXt<BiComplex> qdP = qdC;
        qdP(a) += e1;
        qdP(b) += e2;
        const VecXt<BiComplex> tau =
            rneaGeneric<BiComplex>(model, pert.basePoses(), qdP, qddC, grav);
        for (int i = 0; i < n; ++i) out.d2tau_dqd2(i, a, b) = tau(i).i12 / h2;
      }
      {
        VecXt<BiComplex> qdP = qdC;
        qdP(a) += e1;
        const VecXt<BiComplex> tau = rneaGeneric<BiComplex>(model, pagePoses, qdP, qddC, grav);
        for (int i = 0; i < n; ++i) out.d2tau_dq_dqd(i, a, b) = tau(i).i12 / h2;
      }
      {
        VecXt<BiComplex> qddP = qddC;
        qddP(a) += e1;
        const VecXt<BiComplex> tau = rneaGeneric<BiComplex>(model, pagePoses, qdC, qddP, grav);
        for (int i = 0; i < n; ++i) out.dM_dq(i, a, b) = tau(i).i12 / h2;
      }
    }
  }
  return out;
}

/// First-order inverse-dynamics derivatives from single complex-step
/// perturbations (the i1 component of the same machinery).
inline DerivBundleFO bicomplexFoId(const Model& model, const std::vector<JointConfig>& q,
                                   const VecXd& qd, const VecXd& qdd, double h = 1e-20) {
  const int n = model.nv();
  DerivBundleFO out;
  out.dtau_dq.setZero(n, n);
  out.dtau_dqd.setZero(n, n);
  out.dtau_dqdd.setZero(n, n);
  BicomplexPerturber pert(model, q);
  const VecXt<BiComplex> qdC = qd.cast<BiComplex>();
  const VecXt<BiComplex> qddC = qdd.cast<BiComplex>();
  const Vec6t<BiComplex> grav = model.gravity.cast<BiComplex>();
  const BiComplex e1(0, h, 0, 0);
  for (int a = 0; a < n; ++a) {
    {
      const auto poses = pert.poses(-1, BiComplex(), a, e1);
      const VecXt<BiComplex> tau = rneaGeneric<BiComplex>(model, poses, qdC, qddC, grav);
      for (int i = 0; i < n; ++i) out.dtau_dq(i, a) = tau(i).i1 / h;
    }
    {
      VecXt<BiComplex> qdP = qdC;
      qdP(a) += e1;
      const VecXt<BiComplex> tau = rneaGeneric<BiComplex>(model, pert.basePoses(), qdP, qddC, grav);
      for (int i = 0; i < n; ++i) out.dtau_dqd(i, a) = tau(i).i1 / h;
    }
    {
      VecXt<BiComplex> qddP = qddC;
      qddP(a) += e1;
      const VecXt<BiComplex> tau = rneaGeneric<BiComplex>(model, pert.basePoses(), qdC, qddP, grav);
      for (int i = 0; i < n; ++i) out.dtau_dqdd(i, a) = tau(i).i1 / h;
    }
  }
  return out;
}

/// Second-order forward-dynamics derivatives through bi-complex ABA.
inline DerivBundleSO_FD bicomplexSoFd(const Model& model, const std::vector<JointConfig>& q,
                                      const VecXd& qd, const VecXd& tau, double h = 1e-20) {
  const int n = model.nv();
  DerivBundleSO_FD out{Tensor3(n, n, n), Tensor3(n, n, n), Tensor3(n, n, n), Tensor3(n, n, n),
                       Tensor3(n, n, n)};
  BicomplexPerturber pert(model, q);
  const VecXt<BiComplex> qdC = qd.cast<BiComplex>();
  const VecXt<BiComplex> tauC = tau.cast<BiComplex>();
  const Vec6t<BiComplex> grav = model.gravity.cast<BiComplex>();
  const BiComplex e1(0, h, 0, 0), e2(0, 0, h, 0);
  const double h2 = h * h;

  for (int b = 0; b < n; ++b) {
    const auto pagePoses = pert.poses(b, e2, -1, BiComplex());
    for (int a = 0; a < n; ++a) {
      {
        const auto poses = pert.poses(b, e2, a, e1);
        const VecXt<BiComplex> qdd = abaGeneric<BiComplex>(model, poses, qdC, tauC, grav);
        for (int i = 0; i < n; ++i) out.d2fd_dq2(i, a, b) = qdd(i).i12 / h2;
      }
      {
        VecXt<BiComplex> qdP = qdC;
        qdP(a) += e1;
        qdP(b) += e2;
        const VecXt<BiComplex> qdd =
            abaGeneric<BiComplex>(model, pert.basePoses(), qdP, tauC, grav);
        for (int i = 0; i < n; ++i) out.d2fd_dqd2(i, a, b) = qdd(i).i12 / h2;
      }
      {
        VecXt<BiComplex> qdP = qdC;
        qdP(a) += e1;
        const VecXt<BiComplex> qdd = abaGeneric<BiComplex>(model, pagePoses, qdP, tauC, grav);
        for (int i = 0; i < n; ++i) out.d2fd_dq_dqd(i, a, b) = qdd(i).i12 / h2;
      }
      {
        const auto poses = pert.poses(-1, BiComplex(), a, e1);
        VecXt<BiComplex> qdP = qdC;
        qdP(b) += e2;
        const VecXt<BiComplex> qdd = abaGeneric<BiComplex>(model, poses, qdP, tauC, grav);
        for (int i = 0; i < n; ++i) out.d2fd_dqd_dq(i, a, b) = qdd(i).i12 / h2;
      }
      {
        VecXt<BiComplex> tauP = tauC;
        tauP(a) += e1;
        const VecXt<BiComplex> qdd = abaGeneric<BiComplex>(model, pagePoses, qdC, tauP, grav);
        for (int i = 0; i < n; ++i) out.dminv_dq(i, a, b) = qdd(i).i12 / h2;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite-difference oracles
// ---------------------------------------------------------------------------

/// One right-perturbed configuration vector; flatDof selects the DoF, the
/// perturbation rule is the same integrateConfig flow used everywhere else.
inline std::vector<JointConfig> perturbDof(const Model& model, std::vector<JointConfig> q,
                                           int flatDof, double amount) {
  const auto map = oracle_detail::flatDofMap(model);
  const auto [body, local] = map[flatDof];
  q[body] = integrateConfigDof(q[body], local, amount);
  return q;
}

/// Pose-level perturbation engine for the real-valued stencil oracles: per
/// evaluation only the touched joints are re-posed, everything else is a flat
/// copy of the base poses. Perturbations apply in list order, which realizes
/// the page-before-column composition on same-joint pairs.
class StencilPerturber {
 public:
  StencilPerturber(const Model& model, const std::vector<JointConfig>& q)
      : model_(model),
        q_(q),
        base_(localPoses(model, q)),
        map_(oracle_detail::flatDofMap(model)) {}

  const std::vector<JointPose<double>>& basePoses() const { return base_; }

  const std::vector<JointPose<double>>& poses(
      std::initializer_list<std::pair<int, double>> perturbs) {
    work_ = base_;
    int bodies[2] = {-1, -1};
    JointConfig cfg[2];
    for (const auto& [dof, amount] : perturbs) {
      const auto [body, local] = map_[dof];
      int slot = (bodies[0] == body) ? 0 : (bodies[1] == body) ? 1 : -1;
      if (slot < 0) {
        slot = bodies[0] < 0 ? 0 : 1;
        bodies[slot] = body;
        cfg[slot] = q_[body];
      }
      cfg[slot] = integrateConfigDof(cfg[slot], local, amount);
    }
    for (int slot = 0; slot < 2; ++slot) {
      if (bodies[slot] < 0) continue;
      const int b = bodies[slot];
      const SpatialTransformd x =
          model_.bodies[b].placement * jointTransform(model_.bodies[b].joint, cfg[slot]);
      work_[b] = {x.R, x.p};
    }
    return work_;
  }

 private:
  const Model& model_;
  std::vector<JointConfig> q_;
  std::vector<JointPose<double>> base_;
  std::vector<std::pair<int, int>> map_;
  std::vector<JointPose<double>> work_;
};

/// Second-order central differences straight over RNEA, O(N^3). Page
/// perturbations are applied before column perturbations so that same-joint
/// blocks of multi-DoF joints approximate the nested (non-commuting)
/// derivative and not its symmetrization.
inline DerivBundleSO_ID finiteDiff1SoId(const Model& model, const std::vector<JointConfig>& q,
                                        const VecXd& qd, const VecXd& qdd,
                                        StepConfig cfg = {}) {
  const int n = model.nv();
  const double h = cfg.h, k = cfg.k;
  DerivBundleSO_ID out{Tensor3(n, n, n), Tensor3(n, n, n), Tensor3(n, n, n), Tensor3(n, n, n)};
  const auto map = oracle_detail::flatDofMap(model);
  StencilPerturber pert(model, q);
  const Vec6& g = model.gravity;
  auto id = [&](const std::vector<JointPose<double>>& poses, const VecXd& vqd,
                const VecXd& vqdd) { return rneaGeneric<double>(model, poses, vqd, vqdd, g); };
  const VecXd tau0 = id(pert.basePoses(), qd, qdd);

  // d2tau/dq2: diagonal by the 3-point rule, off-diagonal by the 4-point rule
  for (int a = 0; a < n; ++a) {
    const VecXd tp = id(pert.poses({{a, h}}), qd, qdd);
    const VecXd tm = id(pert.poses({{a, -h}}), qd, qdd);
    const VecXd col = (tp - 2.0 * tau0 + tm) / (h * h);
    for (int i = 0; i < n; ++i) out.d2tau_dq2(i, a, a) = col(i);
  }
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      if (a == b) continue;
      if (a > b && map[a].first != map[b].first) continue;  // mirrored below
      const VecXd col =
          (id(pert.poses({{b, k}, {a, h}}), qd, qdd) - id(pert.poses({{b, -k}, {a, h}}), qd, qdd) -
           id(pert.poses({{b, k}, {a, -h}}), qd, qdd) +
           id(pert.poses({{b, -k}, {a, -h}}), qd, qdd)) /
          (4.0 * h * k);
      for (int i = 0; i < n; ++i) out.d2tau_dq2(i, a, b) = col(i);
      if (map[a].first != map[b].first)
        for (int i = 0; i < n; ++i) out.d2tau_dq2(i, b, a) = col(i);
    }
  }

  // d2tau/dqd2: plain vector variable, mirror all off-diagonals
  for (int a = 0; a < n; ++a) {
    const VecXd tp = id(pert.basePoses(), VecXd(qd + h * VecXd::Unit(n, a)), qdd);
    const VecXd tm = id(pert.basePoses(), VecXd(qd - h * VecXd::Unit(n, a)), qdd);
    const VecXd col = (tp - 2.0 * tau0 + tm) / (h * h);
    for (int i = 0; i < n; ++i) out.d2tau_dqd2(i, a, a) = col(i);
  }
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < b; ++a) {
      const VecXd pp = qd + h * VecXd::Unit(n, a) + k * VecXd::Unit(n, b);
      const VecXd pm = qd + h * VecXd::Unit(n, a) - k * VecXd::Unit(n, b);
      const VecXd mp = qd - h * VecXd::Unit(n, a) + k * VecXd::Unit(n, b);
      const VecXd mm = qd - h * VecXd::Unit(n, a) - k * VecXd::Unit(n, b);
      const VecXd col =
          (id(pert.basePoses(), pp, qdd) - id(pert.basePoses(), pm, qdd) -
           id(pert.basePoses(), mp, qdd) + id(pert.basePoses(), mm, qdd)) /
          (4.0 * h * k);
      for (int i = 0; i < n; ++i) {
        out.d2tau_dqd2(i, a, b) = col(i);
        out.d2tau_dqd2(i, b, a) = col(i);
      }
    }
  }

  // mixed (qd on columns, q on pages) and dM/dq (qdd column, q page)
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      {
        const VecXd dp = qd + h * VecXd::Unit(n, a);
        const VecXd dm = qd - h * VecXd::Unit(n, a);
        const VecXd col =
            (id(pert.poses({{b, k}}), dp, qdd) - id(pert.poses({{b, -k}}), dp, qdd) -
             id(pert.poses({{b, k}}), dm, qdd) + id(pert.poses({{b, -k}}), dm, qdd)) /
            (4.0 * h * k);
        for (int i = 0; i < n; ++i) out.d2tau_dq_dqd(i, a, b) = col(i);
      }
      {
        const VecXd ap = qdd + h * VecXd::Unit(n, a);
        const VecXd am = qdd - h * VecXd::Unit(n, a);
        const VecXd col =
            (id(pert.poses({{b, k}}), qd, ap) - id(pert.poses({{b, -k}}), qd, ap) -
             id(pert.poses({{b, k}}), qd, am) + id(pert.poses({{b, -k}}), qd, am)) /
            (4.0 * h * k);
        for (int i = 0; i < n; ++i) out.dM_dq(i, a, b) = col(i);
      }
    }
  }
  return out;
}

/// Hybrid oracle: first-order central differences of the analytical
/// first-order derivatives, O(N^2 d). One step parameter only.
inline DerivBundleSO_ID finiteDiff2SoId(const Model& model, const std::vector<JointConfig>& q,
                                        const VecXd& qd, const VecXd& qdd, double h = 1e-5) {
  const int n = model.nv();
  DerivBundleSO_ID out{Tensor3(n, n, n), Tensor3(n, n, n), Tensor3(n, n, n), Tensor3(n, n, n)};
  StencilPerturber pert(model, q);
  auto fo = [&](const std::vector<JointPose<double>>& poses, const VecXd& vqd) {
    return idsvaFo(model,
                   computeKinematicsCacheGeneric<double>(model, poses, vqd, qdd, model.gravity));
  };
  for (int b = 0; b < n; ++b) {
    const DerivBundleFO fp = fo(pert.poses({{b, h}}), qd);
    const DerivBundleFO fm = fo(pert.poses({{b, -h}}), qd);
    out.d2tau_dq2.page(b) = (fp.dtau_dq - fm.dtau_dq) / (2.0 * h);
    out.d2tau_dq_dqd.page(b) = (fp.dtau_dqd - fm.dtau_dqd) / (2.0 * h);
    out.dM_dq.page(b) = (fp.dtau_dqdd - fm.dtau_dqdd) / (2.0 * h);
  }
  for (int b = 0; b < n; ++b) {
    const DerivBundleFO fp = fo(pert.basePoses(), VecXd(qd + h * VecXd::Unit(n, b)));
    const DerivBundleFO fm = fo(pert.basePoses(), VecXd(qd - h * VecXd::Unit(n, b)));
    out.d2tau_dqd2.page(b) = (fp.dtau_dqd - fm.dtau_dqd) / (2.0 * h);
  }
  return out;
}

/// Second-order central differences over ABA for the forward-dynamics side.
inline DerivBundleSO_FD finiteDiff1SoFd(const Model& model, const std::vector<JointConfig>& q,
                                        const VecXd& qd, const VecXd& tau,
                                        StepConfig cfg = {}) {
  const int n = model.nv();
  const double h = cfg.h, k = cfg.k;
  DerivBundleSO_FD out{Tensor3(n, n, n), Tensor3(n, n, n), Tensor3(n, n, n), Tensor3(n, n, n),
                       Tensor3(n, n, n)};
  const auto map = oracle_detail::flatDofMap(model);
  StencilPerturber pert(model, q);
  const Vec6& g = model.gravity;
  auto fd = [&](const std::vector<JointPose<double>>& poses, const VecXd& vqd,
                const VecXd& vtau) { return abaGeneric<double>(model, poses, vqd, vtau, g); };
  const VecXd qdd0 = fd(pert.basePoses(), qd, tau);

  for (int a = 0; a < n; ++a) {
    const VecXd fp = fd(pert.poses({{a, h}}), qd, tau);
    const VecXd fm = fd(pert.poses({{a, -h}}), qd, tau);
    const VecXd col = (fp - 2.0 * qdd0 + fm) / (h * h);
    for (int i = 0; i < n; ++i) out.d2fd_dq2(i, a, a) = col(i);
  }
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      if (a == b) continue;
      if (a > b && map[a].first != map[b].first) continue;
      const VecXd col =
          (fd(pert.poses({{b, k}, {a, h}}), qd, tau) - fd(pert.poses({{b, -k}, {a, h}}), qd, tau) -
           fd(pert.poses({{b, k}, {a, -h}}), qd, tau) +
           fd(pert.poses({{b, -k}, {a, -h}}), qd, tau)) /
          (4.0 * h * k);
      for (int i = 0; i < n; ++i) out.d2fd_dq2(i, a, b) = col(i);
      if (map[a].first != map[b].first)
        for (int i = 0; i < n; ++i) out.d2fd_dq2(i, b, a) = col(i);
    }
  }

  for (int a = 0; a < n; ++a) {
    const VecXd fp = fd(pert.basePoses(), VecXd(qd + h * VecXd::Unit(n, a)), tau);
    const VecXd fm = fd(pert.basePoses(), VecXd(qd - h * VecXd::Unit(n, a)), tau);
    const VecXd col = (fp - 2.0 * qdd0 + fm) / (h * h);
    for (int i = 0; i < n; ++i) out.d2fd_dqd2(i, a, a) = col(i);
  }
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < b; ++a) {
      const VecXd col =
          (fd(pert.basePoses(), VecXd(qd + h * VecXd::Unit(n, a) + k * VecXd::Unit(n, b)), tau) -
           fd(pert.basePoses(), VecXd(qd + h * VecXd::Unit(n, a) - k * VecXd::Unit(n, b)), tau) -
           fd(pert.basePoses(), VecXd(qd - h * VecXd::Unit(n, a) + k * VecXd::Unit(n, b)), tau) +
           fd(pert.basePoses(), VecXd(qd - h * VecXd::Unit(n, a) - k * VecXd::Unit(n, b)), tau)) /
          (4.0 * h * k);
      for (int i = 0; i < n; ++i) {
        out.d2fd_dqd2(i, a, b) = col(i);
        out.d2fd_dqd2(i, b, a) = col(i);
      }
    }
  }

  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      {
        const VecXd dp = qd + h * VecXd::Unit(n, a);
        const VecXd dm = qd - h * VecXd::Unit(n, a);
        const VecXd col =
            (fd(pert.poses({{b, k}}), dp, tau) - fd(pert.poses({{b, -k}}), dp, tau) -
             fd(pert.poses({{b, k}}), dm, tau) + fd(pert.poses({{b, -k}}), dm, tau)) /
            (4.0 * h * k);
        for (int i = 0; i < n; ++i) {
          out.d2fd_dq_dqd(i, a, b) = col(i);
          out.d2fd_dqd_dq(i, b, a) = col(i);
        }
      }
      {
        const VecXd tp = tau + h * VecXd::Unit(n, a);
        const VecXd tm = tau - h * VecXd::Unit(n, a);
        const VecXd col =
            (fd(pert.poses({{b, k}}), qd, tp) - fd(pert.poses({{b, -k}}), qd, tp) -
             fd(pert.poses({{b, k}}), qd, tm) + fd(pert.poses({{b, -k}}), qd, tm)) /
            (4.0 * h * k);
        for (int i = 0; i < n; ++i) out.dminv_dq(i, a, b) = col(i);
      }
    }
  }
  return out;
}

}  // namespace sorbd
