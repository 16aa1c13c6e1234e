#pragma once

#include "sorbd/tensor.hpp"

namespace sorbd {

/// First-order inverse-dynamics derivatives.
///   dtau_dq(i,a)  = d tau_i / d q_a
///   dtau_dqd(i,a) = d tau_i / d qd_a
///   dtau_dqdd     = the mass matrix
struct DerivBundleFO {
  MatXd dtau_dq, dtau_dqd, dtau_dqdd;
};

/// First-order forward-dynamics derivatives at the consistent acceleration.
struct FdDerivFO {
  MatXd dfd_dq, dfd_dqd;
  MatXd dfd_dtau;  // M^-1
  VecXd qdd0;      // acceleration the derivatives were taken at
};

/// Second-order inverse-dynamics derivatives, all n x n x n with rows
/// indexing tau:
///   d2tau_dq2(i,a,b)    = d^2 tau_i / dq_a dq_b
///   d2tau_dqd2(i,a,b)   = d^2 tau_i / dqd_a dqd_b
///   d2tau_dq_dqd(i,a,b) = d^2 tau_i / dqd_a dq_b   (qd on columns, q on pages)
///   dM_dq(i,a,b)        = d M_{ia} / d q_b
struct DerivBundleSO_ID {
  Tensor3 d2tau_dq2, d2tau_dqd2, d2tau_dq_dqd, dM_dq;
};

/// Companion of the mixed tensor with q on columns and qd on pages, obtained
/// as a 2-3 transpose instead of a recomputation.
inline Tensor3 mixedCompanion(const DerivBundleSO_ID& b) { return transposeR(b.d2tau_dq_dqd); }

/// Second-order forward-dynamics derivatives, same conventions. d2fd_dq_dqd
/// carries qd on columns / q on pages and d2fd_dqd_dq the reverse;
/// dminv_dq(i,a,b) = d (M^-1)_{ia} / d q_b.
struct DerivBundleSO_FD {
  Tensor3 d2fd_dq2, d2fd_dqd2, d2fd_dq_dqd, d2fd_dqd_dq, dminv_dq;
};

/// Strategy switches for the forward-dynamics second-order assembly.
struct StrategyConfig {
  enum class Inner { Auto, DTM, IDFOZA };
  enum class Outer { Auto, DTM, AZA };
  Inner inner = Inner::Auto;
  Outer outer = Outer::Auto;
  int crossoverInner = 40;        // Auto picks IDFOZA at n >= this
  int crossoverOuter = 1 << 30;   // Auto stays on DTM below this
};

}  // namespace sorbd
