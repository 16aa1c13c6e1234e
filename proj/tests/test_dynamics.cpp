#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "sorbd/dynamics.hpp"
#include "test_fixtures.hpp"

using namespace sorbd;

TEST(Rnea, PendulumEquilibrium) {
  const Model m = testing_fixtures::pointMassPendulum(1.3, 0.7);
  auto q = m.neutralConfig();
  VecXd zero = VecXd::Zero(1);
  const VecXd tau = rnea(m, q, zero, zero);
  EXPECT_NEAR(tau(0), 0.0, 1e-14);
}

TEST(Rnea, PendulumHorizontal) {
  const double mass = 1.3, len = 0.7;
  const Model m = testing_fixtures::pointMassPendulum(mass, len);
  auto q = m.neutralConfig();
  q[0].scalar = M_PI / 2;
  VecXd zero = VecXd::Zero(1);
  const VecXd tau = rnea(m, q, zero, zero);
  EXPECT_NEAR(tau(0), mass * 9.81 * len, 1e-12);
}

TEST(Rnea, PendulumClosedFormAtRandomStates) {
  const double mass = 2.1, len = 0.45;
  const Model m = testing_fixtures::pointMassPendulum(mass, len);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto q = m.neutralConfig();
    q[0].scalar = u(rng);
    VecXd qd(1), qdd(1);
    qd << u(rng);
    qdd << u(rng);
    const double expected = mass * len * len * qdd(0) + mass * 9.81 * len * std::sin(q[0].scalar);
    EXPECT_NEAR(rnea(m, q, qd, qdd)(0), expected, 1e-11);
  }
}

TEST(Rnea, ZeroGravityTorqueIsMassMatrixTimesQdd) {
  const Model m = make_serial_chain(7, jointPattern(7, 1), 5);
  const State s = randomState(m, 12);
  const MatXd mass = crba(m, s.q);
  const VecXd zero = VecXd::Zero(m.nv());
  const VecXd tau = rnea(m, s.q, zero, s.qdd, Vec6::Zero());
  EXPECT_LT((tau - mass * s.qdd).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Aba, PendulumClosedForm) {
  const double mass = 1.3, len = 0.7;
  const Model m = testing_fixtures::pointMassPendulum(mass, len);
  auto q = m.neutralConfig();
  VecXd zero = VecXd::Zero(1);
  EXPECT_NEAR(aba(m, q, zero, zero)(0), 0.0, 1e-14);
  q[0].scalar = M_PI / 2;
  EXPECT_NEAR(aba(m, q, zero, zero)(0), -9.81 / len, 1e-11);
}

TEST(Aba, RoundTripWithRnea) {
  std::mt19937_64 rng(77);
  for (int flavor = 0; flavor < 3; ++flavor) {
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 1 + static_cast<int>(rng() % 10);
      const Model m = make_serial_chain(n, jointPattern(n, flavor), rng());
      const State s = randomState(m, rng());
      const VecXd qdd = aba(m, s.q, s.qd, s.tau);
      const VecXd tau = rnea(m, s.q, s.qd, qdd);
      const double scale = std::max(1.0, s.tau.cwiseAbs().maxCoeff());
      EXPECT_LT((tau - s.tau).cwiseAbs().maxCoeff() / scale, 1e-10);
    }
  }
}

TEST(Crba, MatchesRneaUnitProbes) {
  const Model m = make_serial_chain(7, jointPattern(7, 2), 21);
  const State s = randomState(m, 4);
  const MatXd mass = crba(m, s.q);
  const int n = m.nv();
  EXPECT_EQ((mass - mass.transpose()).cwiseAbs().maxCoeff(), 0.0);  // symmetric by construction
  const VecXd zero = VecXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    const VecXd col = rnea(m, s.q, zero, VecXd(VecXd::Unit(n, j)), Vec6::Zero());
    EXPECT_LT((col - mass.col(j)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Crba, PendulumScalarMass) {
  const double mass = 1.7, len = 0.3;
  const Model m = testing_fixtures::pointMassPendulum(mass, len);
  auto q = m.neutralConfig();
  q[0].scalar = 0.9;
  const MatXd mm = crba(m, q);
  EXPECT_NEAR(mm(0, 0), mass * len * len, 1e-13);
}

TEST(MinvApply, IdentityZeroAndStrategyAgreement) {
  const Model m = make_serial_chain(6, jointPattern(6, 1), 8);
  const State s = randomState(m, 19);
  const int n = m.nv();
  const MatXd mass = crba(m, s.q);

  const MatXd ident = minvApply(m, s.q, mass, MinvStrategy::Cholesky);
  EXPECT_LT((ident - MatXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);

  EXPECT_EQ(minvApply(m, s.q, MatXd::Zero(n, 3)).cwiseAbs().maxCoeff(), 0.0);

  MatXd b(n, 4);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < n; ++i) b(i, j) = u(rng);
  const MatXd byChol = minvApply(m, s.q, b, MinvStrategy::Cholesky);
  const MatXd byAba = minvApply(m, s.q, b, MinvStrategy::Aba);
  const double scale = std::max(1.0, byChol.cwiseAbs().maxCoeff());
  EXPECT_LT((byChol - byAba).cwiseAbs().maxCoeff() / scale, 1e-9);

  EXPECT_THROW(minvApply(m, s.q, MatXd::Zero(n + 1, 2)), std::invalid_argument);
}

TEST(KinematicsCache, ZeroVelocityStructure) {
  const Model m = make_serial_chain(4, jointPattern(4, 1), 2);
  const State s = randomState(m, 3);
  const VecXd zero = VecXd::Zero(m.nv());
  const KinematicsCache kc = computeKinematicsCache(m, s.q, zero, s.qdd);
  EXPECT_EQ(kc.Sd_parent.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(kc.Sd_body.cwiseAbs().maxCoeff(), 0.0);
  for (int i = 0; i < m.numBodies(); ++i) {
    const int par = m.bodies[i].parent;
    const Vec6 apar = par >= 0 ? kc.a[par] : Vec6(-m.gravity);
    for (int c = 0; c < m.bodies[i].joint.dof(); ++c) {
      const Vec6 expected = crossMotionApply<double>(apar, Vec6(kc.S.col(kc.off[i] + c)));
      EXPECT_LT((kc.Sdd_parent.col(kc.off[i] + c) - expected).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(KinematicsCache, LeafCompositeEqualsBodyInertia) {
  const Model m = make_serial_chain(1, JointKind::Spherical, 6);
  const State s = randomState(m, 10);
  const KinematicsCache kc = computeKinematicsCache(m, s.q, s.qd, s.qdd);
  EXPECT_EQ((kc.Ic[0] - kc.I[0]).cwiseAbs().maxCoeff(), 0.0);
}

TEST(KinematicsCache, CompositeForceMatchesSubtreeSum) {
  const Model m = make_serial_chain(4, jointPattern(4, 2), 31);
  const State s = randomState(m, 14);
  const KinematicsCache kc = computeKinematicsCache(m, s.q, s.qd, s.qdd);
  for (int i = 0; i < m.numBodies(); ++i) {
    Vec6 sum = Vec6::Zero();
    for (int k = i; k < m.numBodies(); ++k) {
      // chain: every k >= i is in the subtree of i
      sum += kc.I[k] * kc.a[k] + crossForceApply<double>(kc.v[k], Vec6(kc.I[k] * kc.v[k]));
    }
    EXPECT_LT((kc.fc[i] - sum).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(KinematicsCache, VelocityRecursionHolds) {
  const Model m = make_binary_tree(7, jointPattern(7, 2), 13);
  const State s = randomState(m, 15);
  const KinematicsCache kc = computeKinematicsCache(m, s.q, s.qd, s.qdd);
  for (int i = 0; i < m.numBodies(); ++i) {
    const int par = m.bodies[i].parent;
    const int ni = m.bodies[i].joint.dof();
    const Vec6 vpar = par >= 0 ? kc.v[par] : Vec6::Zero();
    const Vec6 expected =
        vpar + kc.S.middleCols(kc.off[i], ni) * s.qd.segment(kc.off[i], ni);
    EXPECT_LT((kc.v[i] - expected).cwiseAbs().maxCoeff(), 1e-13);
  }
  // torque from composite forces matches rnea
  VecXd tau(m.nv());
  for (int i = 0; i < m.numBodies(); ++i) {
    const int ni = m.bodies[i].joint.dof();
    tau.segment(kc.off[i], ni) = kc.S.middleCols(kc.off[i], ni).transpose() * kc.fc[i];
  }
  const VecXd ref = rnea(m, s.q, s.qd, s.qdd);
  EXPECT_LT((tau - ref).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SolveLinear, SingularMatrixRejected) {
  MatXd a = MatXd::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  EXPECT_THROW(solveLinear<double>(a, MatXd::Identity(3, 3)), std::runtime_error);
}

TEST(Concurrency, SharedModelParallelCallsMatchSerial) {
  Model m = make_serial_chain(6, jointPattern(6, 2), 99);
  m.finalize();
  const State s1 = randomState(m, 1), s2 = randomState(m, 2);
  const VecXd ref1 = rnea(m, s1.q, s1.qd, s1.qdd);
  const VecXd ref2 = rnea(m, s2.q, s2.qd, s2.qdd);
  VecXd got1, got2;
  MatXd mm1, mm2;
  std::thread t1([&] {
    got1 = rnea(m, s1.q, s1.qd, s1.qdd);
    mm1 = crba(m, s1.q);
  });
  std::thread t2([&] {
    got2 = rnea(m, s2.q, s2.qd, s2.qdd);
    mm2 = crba(m, s2.q);
  });
  t1.join();
  t2.join();
  EXPECT_EQ((got1 - ref1).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((got2 - ref2).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((mm1 - crba(m, s1.q)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((mm2 - crba(m, s2.q)).cwiseAbs().maxCoeff(), 0.0);
}
