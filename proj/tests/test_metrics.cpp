#include <gtest/gtest.h>

#include <random>

#include "sorbd/bench.hpp"
#include "sorbd/metrics.hpp"

using namespace sorbd;

namespace {

Tensor3 randTensor(int d1, int d2, int d3, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Tensor3 t(d1, d2, d3);
  for (int k = 0; k < d3; ++k)
    for (int j = 0; j < d2; ++j)
      for (int i = 0; i < d1; ++i) t(i, j, k) = u(rng);
  return t;
}

}  // namespace

TEST(ErrorReport, IdenticalTensorsGiveZero) {
  const Tensor3 a = randTensor(3, 4, 2, 1);
  const ErrorReport r = errorReport(a, a);
  EXPECT_EQ(r.mae, 0.0);
  EXPECT_EQ(r.rmsae, 0.0);
  EXPECT_EQ(r.mre, 0.0);
  EXPECT_EQ(r.rmsre, 0.0);
  EXPECT_EQ(r.count, a.size());
}

TEST(ErrorReport, ConstantAgainstZeroReference) {
  Tensor3 a(2, 2, 2), ref(2, 2, 2);
  const double c = 0.25;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) a(i, j, k) = c;
  const ErrorReport r = errorReport(a, ref);
  EXPECT_DOUBLE_EQ(r.mae, c);
  EXPECT_DOUBLE_EQ(r.rmsae, c);
  EXPECT_DOUBLE_EQ(r.mre, c);
  EXPECT_DOUBLE_EQ(r.rmsre, c);
}

TEST(ErrorReport, MatchesNaiveLoopOracle) {
  const Tensor3 a = randTensor(4, 3, 5, 2);
  const Tensor3 ref = randTensor(4, 3, 5, 3);
  const ErrorReport r = errorReport(a, ref);

  double mae = 0, mre = 0, sa = 0, sr = 0;
  size_t count = 0;
  for (int k = 0; k < 5; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 4; ++i) {
        const double d = std::abs(a(i, j, k) - ref(i, j, k));
        const double rel = d / std::max(1.0, std::abs(ref(i, j, k)));
        mae = std::max(mae, d);
        mre = std::max(mre, rel);
        sa += d * d;
        sr += rel * rel;
        ++count;
      }
  EXPECT_DOUBLE_EQ(r.mae, mae);
  EXPECT_DOUBLE_EQ(r.mre, mre);
  EXPECT_DOUBLE_EQ(r.rmsae, std::sqrt(sa / count));
  EXPECT_DOUBLE_EQ(r.rmsre, std::sqrt(sr / count));
  EXPECT_LE(r.rmsae, r.mae);
  EXPECT_LE(r.rmsre, r.mre);

  EXPECT_THROW(errorReport(a, randTensor(4, 3, 4, 1)), std::invalid_argument);
}

TEST(StackedTensor, BlocksLandWhereExpected) {
  DerivBundleSO_ID b{randTensor(2, 2, 2, 5), randTensor(2, 2, 2, 6), randTensor(2, 2, 2, 7),
                     randTensor(2, 2, 2, 8)};
  const Tensor3 t = stackedSoTensor(b);
  EXPECT_EQ(t.rows(), 2);
  EXPECT_EQ(t.cols(), 6);
  EXPECT_EQ(t.pages(), 6);
  EXPECT_EQ(t.size(), 9u * 2 * 2 * 2);
  EXPECT_EQ(t(1, 0, 1), b.d2tau_dq2(1, 0, 1));
  EXPECT_EQ(t(0, 3, 2), b.d2tau_dqd2(0, 1, 0));
  EXPECT_EQ(t(0, 2, 1), b.d2tau_dq_dqd(0, 0, 1));
  EXPECT_EQ(t(0, 1, 3), b.d2tau_dq_dqd(0, 1, 1));  // transposed companion
  EXPECT_EQ(t(1, 4, 0), b.dM_dq(1, 0, 0));
  EXPECT_EQ(t(1, 0, 5), b.dM_dq(1, 1, 0));
  // qdd-qdd and qdd-qd blocks are zero
  EXPECT_EQ(t(0, 5, 5), 0.0);
  EXPECT_EQ(t(0, 5, 3), 0.0);
  EXPECT_EQ(t(0, 3, 5), 0.0);
}

TEST(FitLoglog, ExactPowerLaws) {
  std::vector<double> sizes = {10, 20, 40, 80, 160};
  std::vector<double> cubes, quads;
  for (double n : sizes) {
    cubes.push_back(n * n * n);
    quads.push_back(5.0 * n * n);
  }
  const SlopeFit c = fitLoglog(sizes, cubes);
  EXPECT_NEAR(c.A, 3.0, 1e-12);
  EXPECT_NEAR(c.B, 0.0, 1e-12);
  EXPECT_NEAR(c.residual, 0.0, 1e-12);
  const SlopeFit q = fitLoglog(sizes, quads);
  EXPECT_NEAR(q.A, 2.0, 1e-12);
  EXPECT_NEAR(q.B, std::log10(5.0), 1e-12);

  EXPECT_THROW(fitLoglog({1, 2, 3}, {1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(fitLoglog({1, 2, 3, -4}, {1, 2, 3, 4}), std::invalid_argument);
  EXPECT_THROW(fitLoglog({1, 2, 3, 4}, {1, 2, 0, 4}), std::invalid_argument);
}

TEST(Bench, DeterministicStatesAndCsvShape) {
  ModelSpec spec;
  ASSERT_TRUE(parseModelSpec("chain", spec));
  const BenchRow row = benchOne(Algo::Rnea, spec, "chain", 5, 8, 2, 7);
  EXPECT_EQ(row.n, 5);
  EXPECT_EQ(row.nv, 5);
  EXPECT_GT(row.medianUs, 0.0);
  EXPECT_LE(row.minUs, row.medianUs);
  EXPECT_LE(row.medianUs, row.maxUs);
  const std::string csv = toCsv(row);
  EXPECT_NE(csv.find("sorbd-bench-v1,rnea,chain,5,5,8,2,7,"), std::string::npos);
  // 12 comma-separated fields
  EXPECT_EQ(std::count(csv.begin(), csv.end(), ','), 11);
}

TEST(Bench, ModelSpecParsing) {
  ModelSpec spec;
  ASSERT_TRUE(parseModelSpec("bintree:15", spec));
  EXPECT_EQ(spec.family, ModelSpec::Family::BinTree);
  EXPECT_EQ(spec.n, 15);
  EXPECT_EQ(spec.flavor, 0);
  ASSERT_TRUE(parseModelSpec("chain:10:mixed", spec));
  EXPECT_EQ(spec.family, ModelSpec::Family::Chain);
  EXPECT_EQ(spec.n, 10);
  EXPECT_EQ(spec.flavor, 1);
  ASSERT_TRUE(parseModelSpec("chain:6:float", spec));
  EXPECT_EQ(spec.flavor, 2);
  ASSERT_TRUE(parseModelSpec("models/quad.txt", spec));
  EXPECT_EQ(spec.family, ModelSpec::Family::File);
  EXPECT_FALSE(parseModelSpec("hexapod", spec));
}

TEST(Bench, CrossoverCalibrationSmoke) {
  const CrossoverResult r = calibrateCrossoverInner({4, 8}, 3, 5);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_GT(r.points[0].dtmUs, 0.0);
  EXPECT_GT(r.points[0].idfozaUs, 0.0);
}
