#include <gtest/gtest.h>

#include <random>

#include "sorbd/dynamics.hpp"
#include "sorbd/model.hpp"
#include "sorbd/model_io.hpp"

using namespace sorbd;

TEST(SerialChain, ParentArrayAndDofs) {
  const Model m3 = make_serial_chain(3);
  ASSERT_EQ(m3.numBodies(), 3);
  EXPECT_EQ(m3.bodies[0].parent, -1);
  EXPECT_EQ(m3.bodies[1].parent, 0);
  EXPECT_EQ(m3.bodies[2].parent, 1);

  const Model m1 = make_serial_chain(1, JointKind::RevoluteZ);
  EXPECT_EQ(m1.nv(), 1);

  EXPECT_THROW(make_serial_chain(0), std::invalid_argument);
}

TEST(SerialChain, MassMatrixIsSpd) {
  const Model m = make_serial_chain(5, JointKind::RevoluteZ, 3);
  const State s = randomState(m, 42);
  const MatXd mass = crba(m, s.q);
  ASSERT_EQ(mass.rows(), 5);
  EXPECT_LT((mass - mass.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  Eigen::LLT<MatXd> llt(mass);
  EXPECT_EQ(llt.info(), Eigen::Success);
}

TEST(BinaryTree, ParentArray) {
  const Model m7 = make_binary_tree(7);
  std::vector<int> expected = {-1, 0, 0, 1, 1, 2, 2};
  for (int i = 0; i < 7; ++i) EXPECT_EQ(m7.bodies[i].parent, expected[i]) << i;

  const Model m2 = make_binary_tree(2);
  EXPECT_EQ(m2.bodies[0].parent, -1);
  EXPECT_EQ(m2.bodies[1].parent, 0);

  EXPECT_THROW(make_binary_tree(0), std::invalid_argument);
}

TEST(IntegrateConfig, ZeroStepAndScalarCase) {
  JointConfig q = JointConfig::Neutral(JointKind::RevoluteZ);
  q.scalar = 0.3;
  VecXd delta(1);
  delta << 1.0;
  EXPECT_DOUBLE_EQ(integrateConfig(q, delta, 0.0).scalar, 0.3);
  EXPECT_NEAR(integrateConfig(q, delta, 0.01).scalar, 0.31, 1e-16);
}

TEST(IntegrateConfig, SphericalMatchesSeries) {
  JointConfig q = JointConfig::Neutral(JointKind::Spherical);
  VecXd delta(3);
  delta << 1.0, 0.0, 0.0;
  const double h = 0.37;
  const JointConfig out = integrateConfig(q, delta, h);
  // exponential series oracle, enough terms for machine precision
  Mat3 series = Mat3::Zero(), term = Mat3::Identity();
  const Mat3 a = skew<double>(Vec3(h, 0, 0));
  for (int k = 0; k < 24; ++k) {
    series += term;
    term = term * a / double(k + 1);
  }
  EXPECT_LT((out.R - series).cwiseAbs().maxCoeff(), 1e-14);
  // rotation by h about joint x-axis
  EXPECT_NEAR(out.R(1, 1), std::cos(h), 1e-15);
  EXPECT_NEAR(out.R(2, 1), std::sin(h), 1e-15);
}

TEST(IntegrateConfig, LogRecoversStep) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const JointConfig q = randomConfig(JointKind::Floating, rng);
    VecXd delta(6);
    for (int i = 0; i < 6; ++i) delta(i) = std::uniform_real_distribution<double>(-1, 1)(rng);
    const double eps = 1e-3;
    const JointConfig out = integrateConfig(q, delta, eps);
    const Mat4 rel = q.homogeneous().inverse() * out.homogeneous();
    EXPECT_LT((logSE3(rel) - delta * eps).cwiseAbs().maxCoeff(), 5e-7);  // O(eps^2)
  }
}

TEST(IntegrateConfig, StaysOnManifold) {
  std::mt19937_64 rng(9);
  JointConfig q = randomConfig(JointKind::Spherical, rng);
  VecXd delta(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int step = 0; step < 10000; ++step) {
    delta << u(rng), u(rng), u(rng);
    q = integrateConfig(q, delta, 1e-3);
  }
  EXPECT_LT(q.rotationError(), 1e-10);
}

TEST(JointTransform, NeutralAndRevolutePi) {
  const JointModel jm{JointKind::RevoluteZ};
  JointConfig q = JointConfig::Neutral(JointKind::RevoluteZ);
  EXPECT_LT((jointTransform(jm, q).R - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-15);

  q.scalar = M_PI;
  const Mat3 r = jointTransform(jm, q).R;
  Mat3 expected = Mat3::Identity();
  expected(0, 0) = expected(1, 1) = -1.0;
  EXPECT_LT((r - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(JointTransform, NeutralConfigGivesPlacementAlone) {
  const Model m = make_serial_chain(3, JointKind::RevoluteY, 11);
  const auto poses = localPoses(m, m.neutralConfig());
  for (int i = 0; i < 3; ++i) {
    EXPECT_LT((poses[i].R - m.bodies[i].placement.R).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((poses[i].p - m.bodies[i].placement.p).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(JointTransform, FloatingRoundTripsThroughLog) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const JointConfig q = randomConfig(JointKind::Floating, rng);
    const SpatialTransformd x = jointTransform(JointModel{JointKind::Floating}, q);
    const Mat4 t = x.homogeneous();
    const Mat4 back = expSE3(logSE3(t));
    EXPECT_LT((back - t).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(JointTransform, MalformedRotationRejected) {
  JointConfig q = JointConfig::Neutral(JointKind::Spherical);
  q.R(0, 0) = 2.0;
  EXPECT_THROW(jointTransform(JointModel{JointKind::Spherical}, q), std::invalid_argument);
}

TEST(ModelIo, MinimalFile) {
  const std::string text =
      "sorbd-model v1\n"
      "body link1 world revolute-z 1 0 0 0 1 0 0 0 1 0 0 0 1.5 0.1 0 0 0.01 0.01 0.005 0 0 0\n";
  const Model m = loadModelString(text);
  EXPECT_EQ(m.numBodies(), 1);
  EXPECT_EQ(m.nv(), 1);
  EXPECT_DOUBLE_EQ(m.bodies[0].inertia.mass, 1.5);
}

TEST(ModelIo, CycleDetected) {
  const std::string text =
      "sorbd-model v1\n"
      "body a b revolute-z 1 0 0 0 1 0 0 0 1 0 0 0 1 0 0 0 0.1 0.1 0.1 0 0 0\n"
      "body b a revolute-z 1 0 0 0 1 0 0 0 1 0 0 0 1 0 0 0 0.1 0.1 0.1 0 0 0\n";
  try {
    loadModelString(text);
    FAIL() << "expected ModelParseError";
  } catch (const ModelParseError& e) {
    EXPECT_NE(std::string(e.what()).find("cycle detected"), std::string::npos);
  }
}

TEST(ModelIo, BadInputsRejected) {
  EXPECT_THROW(loadModelString("sorbd-model v2\n"), ModelParseError);
  EXPECT_THROW(loadModelString("sorbd-model v1\nbody a world helical 1 0 0 0 1 0 0 0 1 0 0 0 1 "
                               "0 0 0 0.1 0.1 0.1 0 0 0\n"),
               ModelParseError);
  // negative-definite rotational inertia
  EXPECT_THROW(loadModelString("sorbd-model v1\nbody a world revolute-z 1 0 0 0 1 0 0 0 1 0 0 0 "
                               "1 0 0 0 -0.1 0.1 0.1 0 0 0\n"),
               ModelParseError);
  // unknown parent
  EXPECT_THROW(loadModelString("sorbd-model v1\nbody a nope revolute-z 1 0 0 0 1 0 0 0 1 0 0 0 "
                               "1 0 0 0 0.1 0.1 0.1 0 0 0\n"),
               ModelParseError);
}

namespace {

std::string quadrupedFixture() {
  std::string text =
      "sorbd-model v1\n"
      "gravity 0 0 0 0 0 -9.81\n"
      "body trunk world floating 1 0 0 0 1 0 0 0 1 0 0 0 10 0 0 0 0.5 0.8 0.9 0 0 0\n";
  const char* legs[4] = {"fl", "fr", "hl", "hr"};
  const char* sign[4] = {"0.3 0.2", "0.3 -0.2", "-0.3 0.2", "-0.3 -0.2"};
  for (int l = 0; l < 4; ++l) {
    std::string hip = std::string("body ") + legs[l] + "_hip trunk revolute-x 1 0 0 0 1 0 0 0 1 " +
                      sign[l] + " 0 1 0 0 -0.05 0.002 0.002 0.001 0 0 0\n";
    std::string thigh = std::string("body ") + legs[l] + "_thigh " + legs[l] +
                        "_hip revolute-y 1 0 0 0 1 0 0 0 1 0 0 -0.1 1.2 0 0 -0.1 0.004 0.004 "
                        "0.001 0 0 0\n";
    std::string shank = std::string("body ") + legs[l] + "_shank " + legs[l] +
                        "_thigh revolute-y 1 0 0 0 1 0 0 0 1 0 0 -0.2 0.4 0 0 -0.1 0.002 0.002 "
                        "0.0005 0 0 0\n";
    text += hip + thigh + shank;
  }
  return text;
}

}  // namespace

TEST(ModelIo, QuadrupedFixture) {
  const Model m = loadModelString(quadrupedFixture());
  EXPECT_EQ(m.numBodies(), 13);
  EXPECT_EQ(m.nv(), 18);
  EXPECT_EQ(m.bodies[0].joint.dof(), 6);
  for (int i = 1; i < 13; ++i) EXPECT_EQ(m.bodies[i].joint.dof(), 1);
  // reachability: every body walks to the root
  for (int i = 0; i < m.numBodies(); ++i) {
    int j = i, hops = 0;
    while (j >= 0 && hops <= m.numBodies()) {
      j = m.bodies[j].parent;
      ++hops;
    }
    EXPECT_EQ(j, -1);
  }
}

TEST(ModelIo, SaveLoadRoundTrip) {
  const Model m = make_binary_tree(7, JointKind::Spherical, 99);
  std::ostringstream os;
  saveModelStream(m, os);
  const Model back = loadModelString(os.str());
  ASSERT_EQ(back.numBodies(), m.numBodies());
  for (int i = 0; i < m.numBodies(); ++i) {
    EXPECT_EQ(back.bodies[i].parent, m.bodies[i].parent);
    EXPECT_EQ(back.bodies[i].joint.kind, m.bodies[i].joint.kind);
    EXPECT_LT((back.bodies[i].placement.p - m.bodies[i].placement.p).cwiseAbs().maxCoeff(),
              1e-15);
    EXPECT_LT((back.bodies[i].inertia.toMat6() - m.bodies[i].inertia.toMat6())
                  .cwiseAbs()
                  .maxCoeff(),
              1e-14);
  }
}

TEST(RandomState, DeterministicBySeed) {
  const Model m = make_serial_chain(6, jointPattern(6, 2), 1);
  const State a = randomState(m, 7);
  const State b = randomState(m, 7);
  EXPECT_EQ(a.qd, b.qd);
  EXPECT_EQ(a.qdd, b.qdd);
  EXPECT_EQ(a.tau, b.tau);
  for (size_t i = 0; i < a.q.size(); ++i) {
    EXPECT_EQ(a.q[i].homogeneous(), b.q[i].homogeneous());
  }
  const State c = randomState(m, 8);
  EXPECT_NE(a.qd, c.qd);
}
