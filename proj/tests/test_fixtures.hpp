#pragma once

// Closed-form reference models shared across test suites.

#include "sorbd/model.hpp"

namespace testing_fixtures {

/// Point mass m at distance l below a revolute-y joint; q measured from the
/// hanging position. Lagrangian: tau = m l^2 qdd + m g l sin(q).
inline sorbd::Model pointMassPendulum(double mass, double length) {
  sorbd::Model model;
  sorbd::Body b;
  b.name = "bob";
  b.parent = -1;
  b.joint.kind = sorbd::JointKind::RevoluteY;
  b.placement = sorbd::SpatialTransformd::Identity();
  b.inertia = sorbd::SpatialInertiad::FromCom(mass, sorbd::Vec3(0, 0, -length),
                                              sorbd::Mat3::Zero());
  model.bodies.push_back(b);
  return model;
}

/// Planar double pendulum of two point masses under gravity g, both joints
/// revolute-y, angles measured from the hanging position (q2 relative).
struct DoublePendulum {
  double m1, m2, l1, l2, g = 9.81;

  sorbd::Model model() const {
    sorbd::Model md;
    sorbd::Body b1;
    b1.name = "upper";
    b1.parent = -1;
    b1.joint.kind = sorbd::JointKind::RevoluteY;
    b1.inertia = sorbd::SpatialInertiad::FromCom(m1, sorbd::Vec3(0, 0, -l1),
                                                 sorbd::Mat3::Zero());
    sorbd::Body b2;
    b2.name = "lower";
    b2.parent = 0;
    b2.joint.kind = sorbd::JointKind::RevoluteY;
    b2.placement.p = sorbd::Vec3(0, 0, -l1);
    b2.inertia = sorbd::SpatialInertiad::FromCom(m2, sorbd::Vec3(0, 0, -l2),
                                                 sorbd::Mat3::Zero());
    md.bodies = {b1, b2};
    return md;
  }

  // tau1 = (A + 2 B c2) qdd1 + (C + B c2) qdd2 - B s2 (2 qd1 qd2 + qd2^2)
  //        + G1 sin q1 + G2 sin(q1+q2)
  // tau2 = (C + B c2) qdd1 + C qdd2 + B s2 qd1^2 + G2 sin(q1+q2)
  double A() const { return (m1 + m2) * l1 * l1 + m2 * l2 * l2; }
  double B() const { return m2 * l1 * l2; }
  double C() const { return m2 * l2 * l2; }
  double G1() const { return (m1 + m2) * g * l1; }
  double G2() const { return m2 * g * l2; }

  sorbd::VecXd tau(double q1, double q2, double qd1, double qd2, double qdd1,
                   double qdd2) const {
    const double c2 = std::cos(q2), s2 = std::sin(q2);
    sorbd::VecXd t(2);
    t(0) = (A() + 2 * B() * c2) * qdd1 + (C() + B() * c2) * qdd2 -
           B() * s2 * (2 * qd1 * qd2 + qd2 * qd2) + G1() * std::sin(q1) +
           G2() * std::sin(q1 + q2);
    t(1) = (C() + B() * c2) * qdd1 + C() * qdd2 + B() * s2 * qd1 * qd1 +
           G2() * std::sin(q1 + q2);
    return t;
  }
};

}  // namespace testing_fixtures
