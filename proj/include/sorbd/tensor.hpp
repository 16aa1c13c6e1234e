#pragma once

#include <cassert>
#include <stdexcept>
#include <vector>

#include "sorbd/spatial.hpp"

namespace sorbd {

/// Dense third-order tensor with (row, column, page) indexing.
///
/// Storage is page-major contiguous (page stride d1*d2) with column-major
/// pages, so page(k) maps directly onto an Eigen matrix. The derivative
/// recursions write scalars at scattered (i,j,k) and the forward-dynamics
/// outer term multiplies a factorization against whole pages; both favor
/// this layout over anything fancier.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int d1, int d2, int d3)
      : d1_(d1), d2_(d2), d3_(d3), v_(static_cast<size_t>(d1) * d2 * d3, 0.0) {
    if (d1 < 0 || d2 < 0 || d3 < 0) throw std::invalid_argument("Tensor3: negative dim");
  }

  static Tensor3 Zero(int d1, int d2, int d3) { return Tensor3(d1, d2, d3); }

  int rows() const { return d1_; }
  int cols() const { return d2_; }
  int pages() const { return d3_; }
  size_t size() const { return v_.size(); }

  /// Unchecked element access for hot loops.
  double& operator()(int i, int j, int k) {
    assert(i >= 0 && i < d1_ && j >= 0 && j < d2_ && k >= 0 && k < d3_);
    return v_[static_cast<size_t>(k) * d1_ * d2_ + static_cast<size_t>(j) * d1_ + i];
  }
  double operator()(int i, int j, int k) const {
    assert(i >= 0 && i < d1_ && j >= 0 && j < d2_ && k >= 0 && k < d3_);
    return v_[static_cast<size_t>(k) * d1_ * d2_ + static_cast<size_t>(j) * d1_ + i];
  }

  /// Bounds-checked access.
  double& at(int i, int j, int k) {
    checkIndex(i, j, k);
    return (*this)(i, j, k);
  }
  double at(int i, int j, int k) const {
    checkIndex(i, j, k);
    return (*this)(i, j, k);
  }

  Eigen::Map<MatXd> page(int k) {
    assert(k >= 0 && k < d3_);
    return Eigen::Map<MatXd>(v_.data() + static_cast<size_t>(k) * d1_ * d2_, d1_, d2_);
  }
  Eigen::Map<const MatXd> page(int k) const {
    assert(k >= 0 && k < d3_);
    return Eigen::Map<const MatXd>(v_.data() + static_cast<size_t>(k) * d1_ * d2_, d1_, d2_);
  }

  void setZero() { std::fill(v_.begin(), v_.end(), 0.0); }

  const double* data() const { return v_.data(); }
  double* data() { return v_.data(); }

  bool sameShape(const Tensor3& o) const {
    return d1_ == o.d1_ && d2_ == o.d2_ && d3_ == o.d3_;
  }

  Tensor3 operator+(const Tensor3& o) const {
    requireSameShape(o, "Tensor3::operator+");
    Tensor3 r = *this;
    for (size_t idx = 0; idx < v_.size(); ++idx) r.v_[idx] += o.v_[idx];
    return r;
  }
  Tensor3& operator+=(const Tensor3& o) {
    requireSameShape(o, "Tensor3::operator+=");
    for (size_t idx = 0; idx < v_.size(); ++idx) v_[idx] += o.v_[idx];
    return *this;
  }
  Tensor3 operator-(const Tensor3& o) const {
    requireSameShape(o, "Tensor3::operator-");
    Tensor3 r = *this;
    for (size_t idx = 0; idx < v_.size(); ++idx) r.v_[idx] -= o.v_[idx];
    return r;
  }
  Tensor3 operator*(double s) const {
    Tensor3 r = *this;
    for (double& x : r.v_) x *= s;
    return r;
  }

  double maxAbs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  void requireSameShape(const Tensor3& o, const char* who) const {
    if (!sameShape(o)) throw std::invalid_argument(std::string(who) + ": shape mismatch");
  }

 private:
  void checkIndex(int i, int j, int k) const {
    if (i < 0 || i >= d1_ || j < 0 || j >= d2_ || k < 0 || k >= d3_)
      throw std::out_of_range("Tensor3::at: index out of range");
  }

  int d1_ = 0, d2_ = 0, d3_ = 0;
  std::vector<double> v_;
};

enum class MatKind { Motion, Force };

/// 6xn matrix whose columns are spatial vectors of a single kind.
struct SpatialMatrix {
  Mat6Xd M;
  MatKind kind = MatKind::Motion;

  SpatialMatrix() : M(6, 0) {}
  SpatialMatrix(const Mat6Xd& m, MatKind k) : M(m), kind(k) {}
  static SpatialMatrix Motion(const Mat6Xd& m) { return {m, MatKind::Motion}; }
  static SpatialMatrix Force(const Mat6Xd& m) { return {m, MatKind::Force}; }

  int cols() const { return static_cast<int>(M.cols()); }
  Vec6 col(int j) const { return M.col(j); }
};

inline void requireKind(const SpatialMatrix& m, MatKind k, const char* who) {
  if (m.kind != k) throw std::invalid_argument(std::string(who) + ": wrong spatial-matrix kind");
}

/// (U x~): page k is the motion cross operator of column k of U.
inline Tensor3 crossTilde(const SpatialMatrix& u) {
  requireKind(u, MatKind::Motion, "crossTilde");
  Tensor3 t(6, 6, u.cols());
  for (int k = 0; k < u.cols(); ++k) t.page(k) = crossMotion<double>(u.col(k));
  return t;
}

/// (U x~*): page k is the force cross operator of column k of U.
inline Tensor3 crossTildeStar(const SpatialMatrix& u) {
  requireKind(u, MatKind::Motion, "crossTildeStar");
  Tensor3 t(6, 6, u.cols());
  for (int k = 0; k < u.cols(); ++k) t.page(k) = crossForce<double>(u.col(k));
  return t;
}

/// (F xbar~*): page k is the swapped-order cross operator of column k of F.
inline Tensor3 crossbarTildeStar(const SpatialMatrix& f) {
  requireKind(f, MatKind::Force, "crossbarTildeStar");
  Tensor3 t(6, 6, f.cols());
  for (int k = 0; k < f.cols(); ++k) t.page(k) = crossbarStar<double>(f.col(k));
  return t;
}

/// Z_{ijk} = sum_l A_{ilk} B_{lj}. Summation runs over ascending l so the
/// result is bit-identical to the naive triple loop.
inline Tensor3 tensorMatmul(const Tensor3& a, const MatXd& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("tensorMatmul: inner dimensions do not match");
  Tensor3 z(a.rows(), static_cast<int>(b.cols()), a.pages());
  const int d1 = a.rows(), m = a.cols(), d2 = static_cast<int>(b.cols());
  for (int k = 0; k < a.pages(); ++k) {
    auto ap = a.page(k);
    auto zp = z.page(k);
    for (int j = 0; j < d2; ++j) {
      for (int l = 0; l < m; ++l) {
        const double blj = b(l, j);
        for (int i = 0; i < d1; ++i) zp(i, j) += ap(i, l) * blj;
      }
    }
  }
  return z;
}

/// Y_{ijk} = sum_l B_{il} A_{ljk}, same ascending-l summation order.
inline Tensor3 matmulTensor(const MatXd& b, const Tensor3& a) {
  if (b.cols() != a.rows())
    throw std::invalid_argument("matmulTensor: inner dimensions do not match");
  Tensor3 y(static_cast<int>(b.rows()), a.cols(), a.pages());
  const int n1 = static_cast<int>(b.rows()), n2 = a.rows();
  for (int k = 0; k < a.pages(); ++k) {
    auto ap = a.page(k);
    auto yp = y.page(k);
    for (int j = 0; j < a.cols(); ++j) {
      for (int l = 0; l < n2; ++l) {
        const double alj = ap(l, j);
        for (int i = 0; i < n1; ++i) yp(i, j) += b(i, l) * alj;
      }
    }
  }
  return y;
}

/// 1-2 transpose: out(j,i,k) = in(i,j,k).
inline Tensor3 transposeT(const Tensor3& a) {
  Tensor3 b(a.cols(), a.rows(), a.pages());
  for (int k = 0; k < a.pages(); ++k) b.page(k) = a.page(k).transpose();
  return b;
}

/// 2-3 transpose: out(i,k,j) = in(i,j,k).
inline Tensor3 transposeR(const Tensor3& a) {
  Tensor3 b(a.rows(), a.pages(), a.cols());
  for (int k = 0; k < a.pages(); ++k)
    for (int j = 0; j < a.cols(); ++j)
      for (int i = 0; i < a.rows(); ++i) b(i, k, j) = a(i, j, k);
  return b;
}

/// 2-3 transpose followed by 1-2 transpose: out(k,i,j) = in(i,j,k).
inline Tensor3 transposeRT(const Tensor3& a) {
  Tensor3 b(a.pages(), a.rows(), a.cols());
  for (int k = 0; k < a.pages(); ++k)
    for (int j = 0; j < a.cols(); ++j)
      for (int i = 0; i < a.rows(); ++i) b(k, i, j) = a(i, j, k);
  return b;
}

/// B~(I, V): page k is the body-Coriolis matrix of (I, column k of V).
inline Tensor3 bodyCoriolisTensor(const Mat6& inertia, const SpatialMatrix& v) {
  requireKind(v, MatKind::Motion, "bodyCoriolisTensor");
  Tensor3 t(6, 6, v.cols());
  for (int k = 0; k < v.cols(); ++k) t.page(k) = bodyCoriolis<double>(inertia, v.col(k));
  return t;
}

}  // namespace sorbd
