#pragma once

#include <cmath>
#include <vector>

#include "sorbd/deriv_types.hpp"

namespace sorbd {

/// Absolute and relative error summaries of a tensor against a reference.
/// Relative errors guard the denominator with max(|ref|, 1); RMS variants
/// divide by the element count of the compared shape.
struct ErrorReport {
  double mae = 0.0;    // max |a - ref|
  double rmsae = 0.0;  // rms of |a - ref|
  double mre = 0.0;    // max |a - ref| / max(|ref|, 1)
  double rmsre = 0.0;  // rms of the same ratio
  std::size_t count = 0;
};

inline ErrorReport errorReport(const Tensor3& a, const Tensor3& ref) {
  a.requireSameShape(ref, "errorReport");
  ErrorReport r;
  r.count = a.size();
  if (r.count == 0) return r;
  double sumAbs2 = 0.0, sumRel2 = 0.0;
  for (int k = 0; k < a.pages(); ++k)
    for (int j = 0; j < a.cols(); ++j)
      for (int i = 0; i < a.rows(); ++i) {
        const double d = a(i, j, k) - ref(i, j, k);
        const double ad = std::abs(d);
        const double rel = ad / std::max(std::abs(ref(i, j, k)), 1.0);
        r.mae = std::max(r.mae, ad);
        r.mre = std::max(r.mre, rel);
        sumAbs2 += d * d;
        sumRel2 += rel * rel;
      }
  r.rmsae = std::sqrt(sumAbs2 / static_cast<double>(r.count));
  r.rmsre = std::sqrt(sumRel2 / static_cast<double>(r.count));
  return r;
}

inline ErrorReport errorReport(const MatXd& a, const MatXd& ref) {
  if (a.rows() != ref.rows() || a.cols() != ref.cols())
    throw std::invalid_argument("errorReport: shape mismatch");
  Tensor3 ta(static_cast<int>(a.rows()), static_cast<int>(a.cols()), 1);
  Tensor3 tr(static_cast<int>(a.rows()), static_cast<int>(a.cols()), 1);
  ta.page(0) = a;
  tr.page(0) = ref;
  return errorReport(ta, tr);
}

/// Stacked second-order inverse-dynamics tensor over the concatenated input
/// (q, qd, qdd): n x 3n x 3n with 9 n^3 elements, the shape error metrics
/// are conventionally reported on. The qdd-qdd and qdd-qd blocks are
/// identically zero.
inline Tensor3 stackedSoTensor(const DerivBundleSO_ID& b) {
  const int n = b.d2tau_dq2.rows();
  Tensor3 t(n, 3 * n, 3 * n);
  for (int bb = 0; bb < n; ++bb)
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i) {
        t(i, a, bb) = b.d2tau_dq2(i, a, bb);
        t(i, n + a, n + bb) = b.d2tau_dqd2(i, a, bb);
        t(i, n + a, bb) = b.d2tau_dq_dqd(i, a, bb);          // qd column, q page
        t(i, a, n + bb) = b.d2tau_dq_dqd(i, bb, a);          // q column, qd page
        t(i, 2 * n + a, bb) = b.dM_dq(i, a, bb);             // qdd column, q page
        t(i, a, 2 * n + bb) = b.dM_dq(i, bb, a);             // q column, qdd page
      }
  return t;
}

/// Least-squares fit of log10(t) = A log10(N) + B.
struct SlopeFit {
  double A = 0.0;
  double B = 0.0;
  double residual = 0.0;  // rms of fit residuals in log10 space
};

inline SlopeFit fitLoglog(const std::vector<double>& sizes, const std::vector<double>& times) {
  if (sizes.size() != times.size())
    throw std::invalid_argument("fitLoglog: size/time count mismatch");
  if (sizes.size() < 4) throw std::invalid_argument("fitLoglog: need at least 4 points");
  const int m = static_cast<int>(sizes.size());
  double mx = 0, my = 0;
  std::vector<double> xs(m), ys(m);
  for (int i = 0; i < m; ++i) {
    if (sizes[i] <= 0.0 || times[i] <= 0.0)
      throw std::invalid_argument("fitLoglog: sizes and times must be positive");
    xs[i] = std::log10(sizes[i]);
    ys[i] = std::log10(times[i]);
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < m; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  SlopeFit fit;
  fit.A = sxy / sxx;
  fit.B = my - fit.A * mx;
  double sr = 0;
  for (int i = 0; i < m; ++i) {
    const double e = ys[i] - (fit.A * xs[i] + fit.B);
    sr += e * e;
  }
  fit.residual = std::sqrt(sr / m);
  return fit;
}

}  // namespace sorbd
