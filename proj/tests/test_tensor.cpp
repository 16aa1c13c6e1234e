#include <gtest/gtest.h>

#include <random>

#include "sorbd/tensor.hpp"
#include "spatial_matrix_properties.hpp"

using namespace sorbd;

namespace {

std::mt19937_64 rng(77123);

double unif() {
  static std::uniform_real_distribution<double> d(-1.0, 1.0);
  return d(rng);
}

MatXd randMat(int r, int c) {
  MatXd m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = unif();
  return m;
}

Tensor3 randTensor(int d1, int d2, int d3) {
  Tensor3 t(d1, d2, d3);
  for (int k = 0; k < d3; ++k) t.page(k) = randMat(d1, d2);
  return t;
}

double maxDiff(const Tensor3& a, const Tensor3& b) {
  a.requireSameShape(b, "maxDiff");
  double m = 0.0;
  for (int k = 0; k < a.pages(); ++k)
    for (int j = 0; j < a.cols(); ++j)
      for (int i = 0; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, j, k) - b(i, j, k)));
  return m;
}

}  // namespace

TEST(Tensor3, LayoutAndAccess) {
  Tensor3 t(2, 3, 4);
  EXPECT_EQ(t.size(), 24u);
  t(1, 2, 3) = 5.0;
  EXPECT_EQ(t.at(1, 2, 3), 5.0);
  EXPECT_EQ(t.data()[3 * 6 + 2 * 2 + 1], 5.0);  // page-major, column-major pages
  EXPECT_THROW(t.at(2, 0, 0), std::out_of_range);
  EXPECT_THROW(t.at(0, 3, 0), std::out_of_range);
  EXPECT_THROW(t.at(0, 0, 4), std::out_of_range);
}

TEST(Tensor3, EmptyTensorsAreLegal) {
  const SpatialMatrix u = SpatialMatrix::Motion(MatXd::Zero(6, 0));
  const Tensor3 t = crossTilde(u);
  EXPECT_EQ(t.pages(), 0);
  EXPECT_EQ(t.size(), 0u);
}

TEST(CrossTilde, SingleColumnMatchesCrossMotion) {
  const MatXd col = randMat(6, 1);
  const Tensor3 t = crossTilde(SpatialMatrix::Motion(col));
  ASSERT_EQ(t.pages(), 1);
  EXPECT_LT((t.page(0) - crossMotion<double>(Vec6(col))).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CrossTilde, PagewiseAgainstColumnLoop) {
  const MatXd u = randMat(6, 3);
  const Tensor3 t = crossTilde(SpatialMatrix::Motion(u));
  for (int k = 0; k < 3; ++k) {
    EXPECT_LT((t.page(k) - crossMotion<double>(Vec6(u.col(k)))).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(CrossTilde, KindIsChecked) {
  EXPECT_THROW(crossTilde(SpatialMatrix::Force(randMat(6, 2))), std::invalid_argument);
  EXPECT_THROW(crossbarTildeStar(SpatialMatrix::Motion(randMat(6, 2))), std::invalid_argument);
}

TEST(TensorMatmul, IdentityAndSinglePage) {
  const Tensor3 a = randTensor(6, 6, 3);
  EXPECT_EQ(maxDiff(tensorMatmul(a, MatXd::Identity(6, 6)), a), 0.0);

  const Tensor3 onePage = randTensor(4, 5, 1);
  const MatXd b = randMat(5, 2);
  const Tensor3 z = tensorMatmul(onePage, b);
  EXPECT_LT((z.page(0) - onePage.page(0) * b).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(TensorMatmul, TripleLoopOracleExact) {
  const Tensor3 a = randTensor(6, 6, 3);
  const MatXd b = randMat(6, 2);
  const Tensor3 z = tensorMatmul(a, b);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 6; ++i) {
        double s = 0.0;
        for (int l = 0; l < 6; ++l) s += a(i, l, k) * b(l, j);
        EXPECT_EQ(z(i, j, k), s);  // identical summation order, bit-exact
      }
}

TEST(TensorMatmul, ShapeMismatchRejected) {
  EXPECT_THROW(tensorMatmul(randTensor(6, 5, 2), randMat(4, 3)), std::invalid_argument);
  EXPECT_THROW(matmulTensor(randMat(3, 4), randTensor(5, 2, 2)), std::invalid_argument);
}

TEST(MatmulTensor, IdentityZeroAndOracle) {
  const Tensor3 a = randTensor(6, 3, 2);
  EXPECT_EQ(maxDiff(matmulTensor(MatXd::Identity(6, 6), a), a), 0.0);
  EXPECT_EQ(matmulTensor(MatXd::Zero(4, 6), a).maxAbs(), 0.0);

  const MatXd b = randMat(4, 6);
  const Tensor3 y = matmulTensor(b, a);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 4; ++i) {
        double s = 0.0;
        for (int l = 0; l < 6; ++l) s += b(i, l) * a(l, j, k);
        EXPECT_EQ(y(i, j, k), s);
      }
}

TEST(Transposes, InvolutionsAndPermutationOracle) {
  const Tensor3 a = randTensor(3, 4, 2);
  EXPECT_EQ(maxDiff(transposeT(transposeT(a)), a), 0.0);
  EXPECT_EQ(maxDiff(transposeR(transposeR(a)), a), 0.0);
  EXPECT_EQ(maxDiff(transposeRT(transposeRT(transposeRT(a))), a), 0.0);

  const Tensor3 t = transposeT(a), r = transposeR(a), rt = transposeRT(a);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(t(j, i, k), a(i, j, k));
        EXPECT_EQ(r(i, k, j), a(i, j, k));
        EXPECT_EQ(rt(k, i, j), a(i, j, k));
      }
}

TEST(BodyCoriolisTensor, ZeroAndSingleColumn) {
  Mat3 ar = randMat(3, 3);
  const Mat6 i6 =
      SpatialInertiad::FromCom(2.0, Vec3(0.1, -0.2, 0.3), Mat3(ar * ar.transpose() + Mat3::Identity()))
          .toMat6();
  const Tensor3 zero = bodyCoriolisTensor(i6, SpatialMatrix::Motion(MatXd::Zero(6, 4)));
  EXPECT_EQ(zero.maxAbs(), 0.0);

  const MatXd v = randMat(6, 1);
  const Tensor3 one = bodyCoriolisTensor(i6, SpatialMatrix::Motion(v));
  EXPECT_LT((one.page(0) - bodyCoriolis<double>(i6, Vec6(v))).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SpatialMatrixProperties, AllTable2PropertiesHold) {
  const auto results = sorbd::testing::runSpatialMatrixProperties(200, 991);
  ASSERT_EQ(results.size(), 27u);
  for (const auto& r : results) {
    EXPECT_LE(r.maxErr, 1e-12) << r.name << " exceeded tolerance";
  }
}
