#pragma once

#include "sorbd/deriv_fo.hpp"
#include "sorbd/deriv_so_id.hpp"

namespace sorbd {

enum class MixedPair { QQ, QdQd, QdQ, QQd };

namespace fd_so_detail {

/// P_{ick} = sum_l dMdq(i,l,k) F(l,c), either as a direct tensor-matrix
/// product or through batched first-order zero-algorithm sweeps.
inline Tensor3 dMdqTimesMatrix(const Model& model, const std::vector<JointConfig>& q,
                               const Tensor3& dMdq, const MatXd& f, bool useIdfoza) {
  if (!useIdfoza) return tensorMatmul(dMdq, f);
  return idfozaBatch(model, q, f);
}

inline bool pickIdfoza(const StrategyConfig& cfg, int n) {
  switch (cfg.inner) {
    case StrategyConfig::Inner::DTM: return false;
    case StrategyConfig::Inner::IDFOZA: return true;
    case StrategyConfig::Inner::Auto: return n >= cfg.crossoverInner;
  }
  return false;
}

inline bool pickAza(const StrategyConfig& cfg, int n) {
  switch (cfg.outer) {
    case StrategyConfig::Outer::DTM: return false;
    case StrategyConfig::Outer::AZA: return true;
    case StrategyConfig::Outer::Auto: return n >= cfg.crossoverOuter;
  }
  return false;
}

}  // namespace fd_so_detail

/// The bracketed tensor of the implicit-function second-derivative relation
/// for one variable pair. The qd-qd pair needs no correction, the mixed pairs
/// exactly one, and the q-q pair both (one of them 2-3 transposed).
inline Tensor3 innerTerm(MixedPair pair, const Model& model, const std::vector<JointConfig>& q,
                         const DerivBundleSO_ID& id, const FdDerivFO& fo,
                         const StrategyConfig& cfg = {}) {
  const int n = id.dM_dq.rows();
  const bool useIdfoza = fd_so_detail::pickIdfoza(cfg, n);
  switch (pair) {
    case MixedPair::QdQd:
      return id.d2tau_dqd2;
    case MixedPair::QQ: {
      const Tensor3 p = fd_so_detail::dMdqTimesMatrix(model, q, id.dM_dq, fo.dfd_dq, useIdfoza);
      return id.d2tau_dq2 + p + transposeR(p);
    }
    case MixedPair::QdQ: {
      const Tensor3 p = fd_so_detail::dMdqTimesMatrix(model, q, id.dM_dq, fo.dfd_dqd, useIdfoza);
      return id.d2tau_dq_dqd + p;
    }
    case MixedPair::QQd: {
      const Tensor3 p = fd_so_detail::dMdqTimesMatrix(model, q, id.dM_dq, fo.dfd_dqd, useIdfoza);
      return transposeR(id.d2tau_dq_dqd + p);
    }
  }
  throw std::logic_error("innerTerm: bad pair");
}

/// -M^-1 applied to every page, through one reused dense factorization or
/// through zero-velocity zero-gravity ABA sweeps per column.
inline Tensor3 outerTerm(const Tensor3& inner, const Model& model,
                         const std::vector<JointConfig>& q, const StrategyConfig& cfg = {}) {
  const int n = inner.rows();
  Tensor3 out(inner.rows(), inner.cols(), inner.pages());
  if (!fd_so_detail::pickAza(cfg, n)) {
    const MatXd m = crba(model, q);
    Eigen::LLT<MatXd> llt(m);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("outerTerm: mass matrix is not positive definite");
    for (int k = 0; k < inner.pages(); ++k) out.page(k) = -llt.solve(MatXd(inner.page(k)));
    return out;
  }
  const std::vector<JointPose<double>> pose = localPoses(model, q);
  const VecXd zero = VecXd::Zero(model.nv());
  for (int k = 0; k < inner.pages(); ++k) {
    for (int c = 0; c < inner.cols(); ++c) {
      const VecXd col = inner.page(k).col(c);
      out.page(k).col(c) = -abaGeneric<double>(model, pose, zero, col, Vec6::Zero());
    }
  }
  return out;
}

/// dM^-1/dq as the pagewise sandwich -M^-1 (dM/dq) M^-1.
inline Tensor3 dMinvDq(const MatXd& minv, const Tensor3& dMdq) {
  Tensor3 out(dMdq.rows(), dMdq.cols(), dMdq.pages());
  for (int k = 0; k < dMdq.pages(); ++k) out.page(k) = -minv * dMdq.page(k) * minv;
  return out;
}

/// Second-order forward-dynamics derivatives assembled from the inverse-
/// dynamics first- and second-order bundles at the consistent acceleration.
inline DerivBundleSO_FD fdsvaSo(const Model& model, const std::vector<JointConfig>& q,
                                const VecXd& qd, const VecXd& tau,
                                const StrategyConfig& cfg = {}) {
  const int n = model.nv();
  const VecXd qdd0 = aba(model, q, qd, tau);
  const KinematicsCache kc = computeKinematicsCache(model, q, qd, qdd0);
  const DerivBundleFO foId = idsvaFo(model, kc);
  Eigen::LLT<MatXd> llt(foId.dtau_dqdd);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("fdsvaSo: mass matrix is not positive definite");
  FdDerivFO fo;
  fo.qdd0 = qdd0;
  fo.dfd_dq = -llt.solve(foId.dtau_dq);
  fo.dfd_dqd = -llt.solve(foId.dtau_dqd);
  fo.dfd_dtau = llt.solve(MatXd::Identity(n, n));
  const DerivBundleSO_ID so = idsvaSo(model, kc);

  const bool useAza = fd_so_detail::pickAza(cfg, n);
  auto outer = [&](const Tensor3& inner) {
    Tensor3 out(inner.rows(), inner.cols(), inner.pages());
    if (!useAza) {
      for (int k = 0; k < inner.pages(); ++k) out.page(k) = -llt.solve(MatXd(inner.page(k)));
      return out;
    }
    const std::vector<JointPose<double>> pose = localPoses(model, q);
    const VecXd zero = VecXd::Zero(n);
    for (int k = 0; k < inner.pages(); ++k)
      for (int c = 0; c < inner.cols(); ++c)
        out.page(k).col(c) =
            -abaGeneric<double>(model, pose, zero, VecXd(inner.page(k).col(c)), Vec6::Zero());
    return out;
  };

  DerivBundleSO_FD out;
  out.d2fd_dq2 = outer(innerTerm(MixedPair::QQ, model, q, so, fo, cfg));
  out.d2fd_dqd2 = outer(innerTerm(MixedPair::QdQd, model, q, so, fo, cfg));
  out.d2fd_dq_dqd = outer(innerTerm(MixedPair::QdQ, model, q, so, fo, cfg));
  out.d2fd_dqd_dq = transposeR(out.d2fd_dq_dqd);
  out.dminv_dq = dMinvDq(fo.dfd_dtau, so.dM_dq);
  return out;
}

}  // namespace sorbd
