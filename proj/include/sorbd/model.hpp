#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sorbd/lie.hpp"
#include "sorbd/spatial.hpp"

namespace sorbd {

enum class JointKind {
  RevoluteX,
  RevoluteY,
  RevoluteZ,
  PrismaticX,
  PrismaticY,
  PrismaticZ,
  Spherical,
  Floating,
};

inline const char* jointKindName(JointKind k) {
  switch (k) {
    case JointKind::RevoluteX: return "revolute-x";
    case JointKind::RevoluteY: return "revolute-y";
    case JointKind::RevoluteZ: return "revolute-z";
    case JointKind::PrismaticX: return "prismatic-x";
    case JointKind::PrismaticY: return "prismatic-y";
    case JointKind::PrismaticZ: return "prismatic-z";
    case JointKind::Spherical: return "spherical";
    case JointKind::Floating: return "floating";
  }
  return "?";
}

inline bool jointKindFromName(const std::string& s, JointKind& out) {
  for (JointKind k : {JointKind::RevoluteX, JointKind::RevoluteY, JointKind::RevoluteZ,
                      JointKind::PrismaticX, JointKind::PrismaticY, JointKind::PrismaticZ,
                      JointKind::Spherical, JointKind::Floating}) {
    if (s == jointKindName(k)) {
      out = k;
      return true;
    }
  }
  return false;
}

struct JointModel {
  JointKind kind = JointKind::RevoluteZ;

  int dof() const {
    switch (kind) {
      case JointKind::Spherical: return 3;
      case JointKind::Floating: return 6;
      default: return 1;
    }
  }

  /// Constant motion subspace in the joint's local frame. Its columns are the
  /// se(3) generators (through the hat map) of the configuration group.
  Mat6Xd localS() const {
    Mat6Xd s(6, dof());
    s.setZero();
    switch (kind) {
      case JointKind::RevoluteX: s(0, 0) = 1.0; break;
      case JointKind::RevoluteY: s(1, 0) = 1.0; break;
      case JointKind::RevoluteZ: s(2, 0) = 1.0; break;
      case JointKind::PrismaticX: s(3, 0) = 1.0; break;
      case JointKind::PrismaticY: s(4, 0) = 1.0; break;
      case JointKind::PrismaticZ: s(5, 0) = 1.0; break;
      case JointKind::Spherical: s.topLeftCorner<3, 3>().setIdentity(); break;
      case JointKind::Floating: s.setIdentity(); break;
    }
    return s;
  }
};

/// Element of a joint's configuration group: a scalar for 1-DoF joints, a
/// rotation for spherical joints, a full pose for floating joints.
struct JointConfig {
  JointKind kind = JointKind::RevoluteZ;
  double scalar = 0.0;
  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();

  static JointConfig Neutral(JointKind k) {
    JointConfig c;
    c.kind = k;
    return c;
  }

  Mat4 homogeneous() const {
    Mat4 t = Mat4::Identity();
    switch (kind) {
      case JointKind::RevoluteX: t.topLeftCorner<3, 3>() = expSO3(Vec3(scalar, 0, 0)); break;
      case JointKind::RevoluteY: t.topLeftCorner<3, 3>() = expSO3(Vec3(0, scalar, 0)); break;
      case JointKind::RevoluteZ: t.topLeftCorner<3, 3>() = expSO3(Vec3(0, 0, scalar)); break;
      case JointKind::PrismaticX: t(0, 3) = scalar; break;
      case JointKind::PrismaticY: t(1, 3) = scalar; break;
      case JointKind::PrismaticZ: t(2, 3) = scalar; break;
      case JointKind::Spherical: t.topLeftCorner<3, 3>() = R; break;
      case JointKind::Floating:
        t.topLeftCorner<3, 3>() = R;
        t.topRightCorner<3, 1>() = p;
        break;
    }
    return t;
  }

  double rotationError() const {
    if (kind != JointKind::Spherical && kind != JointKind::Floating) return 0.0;
    return (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
  }
};

struct Body {
  std::string name;
  int parent = -1;  // -1 = ground
  JointModel joint;
  SpatialTransformd placement;  // joint frame in the parent frame
  SpatialInertiad inertia;      // about the body frame origin
};

struct Model {
  std::vector<Body> bodies;
  Vec6 gravity = (Vec6() << 0, 0, 0, 0, 0, -9.81).finished();
  std::vector<int> offsets;  // flat DoF offsets, filled by finalize()

  int numBodies() const { return static_cast<int>(bodies.size()); }

  int nv() const {
    int n = 0;
    for (const Body& b : bodies) n += b.joint.dof();
    return n;
  }

  std::vector<int> dofOffsets() const {
    std::vector<int> off(bodies.size());
    int n = 0;
    for (size_t i = 0; i < bodies.size(); ++i) {
      off[i] = n;
      n += bodies[i].joint.dof();
    }
    return off;
  }

  /// Allocation-free offsets for the kernels. Hand-built models that skip
  /// finalize() fall back to a lazy fill, which is fine single-threaded;
  /// call finalize() before sharing a model across threads.
  const std::vector<int>& dofOffsetsCached() const {
    if (offsets.size() != bodies.size()) const_cast<Model*>(this)->offsets = dofOffsets();
    return offsets;
  }

  void finalize() {
    validate();
    offsets = dofOffsets();
  }

  std::vector<JointConfig> neutralConfig() const {
    std::vector<JointConfig> q;
    q.reserve(bodies.size());
    for (const Body& b : bodies) q.push_back(JointConfig::Neutral(b.joint.kind));
    return q;
  }

  void validate() const {
    for (int i = 0; i < numBodies(); ++i) {
      if (bodies[i].parent >= i)
        throw std::invalid_argument("Model: bodies are not topologically sorted");
      if (bodies[i].parent < -1) throw std::invalid_argument("Model: bad parent index");
      if (bodies[i].inertia.mass <= 0.0)
        throw std::invalid_argument("Model: body mass must be positive");
    }
  }
};

struct State {
  std::vector<JointConfig> q;
  VecXd qd, qdd, tau;
};

/// Right-perturbation of a joint configuration: q <- q * exp((sum_j d_j E_j) eps).
/// Every numerical oracle uses this rule so that multi-DoF derivatives agree
/// with the analytical ones.
inline JointConfig integrateConfig(const JointConfig& q, const VecXd& delta, double eps) {
  JointConfig out = q;
  switch (q.kind) {
    case JointKind::Spherical: {
      out.R = q.R * expSO3(Vec3(delta.head<3>() * eps));
      break;
    }
    case JointKind::Floating: {
      const Mat4 t = q.homogeneous() * expSE3(Vec6(delta.head<6>() * eps));
      out.R = t.topLeftCorner<3, 3>();
      out.p = t.topRightCorner<3, 1>();
      break;
    }
    default:
      out.scalar = q.scalar + delta(0) * eps;
      return out;
  }
  if (out.rotationError() > 1e-10) out.R = polarRotation(out.R);
  return out;
}

/// Single-DoF variant of integrateConfig, allocation-free.
inline JointConfig integrateConfigDof(const JointConfig& q, int localDof, double eps) {
  JointConfig out = q;
  switch (q.kind) {
    case JointKind::Spherical: {
      Vec3 axis = Vec3::Zero();
      axis(localDof) = eps;
      out.R = q.R * expSO3(axis);
      break;
    }
    case JointKind::Floating: {
      Vec6 xi = Vec6::Zero();
      xi(localDof) = eps;
      const Mat4 t = q.homogeneous() * expSE3(xi);
      out.R = t.topLeftCorner<3, 3>();
      out.p = t.topRightCorner<3, 1>();
      break;
    }
    default:
      out.scalar = q.scalar + eps;
      return out;
  }
  if (out.rotationError() > 1e-10) out.R = polarRotation(out.R);
  return out;
}

/// Spatial transform of the joint alone (child frame in the joint frame).
inline SpatialTransformd jointTransform(const JointModel& jm, const JointConfig& q) {
  if (q.kind != jm.kind) throw std::invalid_argument("jointTransform: config kind mismatch");
  if (q.rotationError() > 1e-10)
    throw std::invalid_argument("jointTransform: rotation part is not orthonormal");
  const Mat4 t = q.homogeneous();
  return {t.topLeftCorner<3, 3>(), t.topRightCorner<3, 1>()};
}

namespace detail {

/// Deterministic box-link inertia: unit mass, fixed box dimensions scaled by
/// a seeded multiplier in [0.5, 1.5].
inline void applyLinkRecipe(Body& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mult(0.5, 1.5);
  const double s = mult(rng);
  const double a = 0.3 * s, bb = 0.1 * s, c = 0.1 * s;
  const double m = 1.0;
  Mat3 icom = Mat3::Zero();
  icom(0, 0) = m / 12.0 * (bb * bb + c * c);
  icom(1, 1) = m / 12.0 * (a * a + c * c);
  icom(2, 2) = m / 12.0 * (a * a + bb * bb);
  b.inertia = SpatialInertiad::FromCom(m, Vec3(0.5 * a, 0, 0), icom);
  b.placement.R.setIdentity();
  // placement translation is filled by the caller from the parent link length
}

inline double linkLength(const Body& b) {
  // box extent along x from the recipe above (com at a/2)
  return 2.0 * b.inertia.h(0) / b.inertia.mass;
}

}  // namespace detail

/// Generic tree builder used by the chain/tree generators.
inline Model makeKinematicTree(const std::vector<int>& parents,
                               const std::vector<JointKind>& kinds, std::uint64_t seed = 0) {
  if (parents.empty()) throw std::invalid_argument("makeKinematicTree: need at least one body");
  if (parents.size() != kinds.size())
    throw std::invalid_argument("makeKinematicTree: parents/kinds size mismatch");
  Model model;
  std::mt19937_64 rng(seed ^ 0x5bd1e995u);
  model.bodies.resize(parents.size());
  for (size_t i = 0; i < parents.size(); ++i) {
    Body& b = model.bodies[i];
    b.name = "link" + std::to_string(i + 1);
    b.parent = parents[i];
    b.joint.kind = kinds[i];
    detail::applyLinkRecipe(b, rng);
    if (b.parent >= 0) {
      b.placement.p = Vec3(detail::linkLength(model.bodies[b.parent]), 0, 0);
    }
  }
  model.finalize();
  return model;
}

inline Model make_serial_chain(int n, JointKind kind = JointKind::RevoluteZ,
                               std::uint64_t seed = 0) {
  if (n < 1) throw std::invalid_argument("make_serial_chain: N must be >= 1");
  std::vector<int> parents(n);
  for (int i = 0; i < n; ++i) parents[i] = i - 1;
  return makeKinematicTree(parents, std::vector<JointKind>(n, kind), seed);
}

inline Model make_serial_chain(int n, const std::vector<JointKind>& kinds,
                               std::uint64_t seed = 0) {
  if (n < 1) throw std::invalid_argument("make_serial_chain: N must be >= 1");
  std::vector<int> parents(n);
  for (int i = 0; i < n; ++i) parents[i] = i - 1;
  return makeKinematicTree(parents, kinds, seed);
}

inline Model make_binary_tree(int n, JointKind kind = JointKind::RevoluteZ,
                              std::uint64_t seed = 0) {
  if (n < 1) throw std::invalid_argument("make_binary_tree: N must be >= 1");
  std::vector<int> parents(n);
  parents[0] = -1;
  for (int i = 1; i < n; ++i) parents[i] = (i - 1) / 2;
  return makeKinematicTree(parents, std::vector<JointKind>(n, kind), seed);
}

inline Model make_binary_tree(int n, const std::vector<JointKind>& kinds,
                              std::uint64_t seed = 0) {
  if (n < 1) throw std::invalid_argument("make_binary_tree: N must be >= 1");
  std::vector<int> parents(n);
  parents[0] = -1;
  for (int i = 1; i < n; ++i) parents[i] = (i - 1) / 2;
  return makeKinematicTree(parents, kinds, seed);
}

/// Joint-kind pattern helper: plain revolute, mixed fixed-base, or mixed with
/// a floating base, cycling through multi-DoF kinds deterministically.
inline std::vector<JointKind> jointPattern(int n, int flavor) {
  std::vector<JointKind> kinds(n, JointKind::RevoluteZ);
  if (flavor == 0) return kinds;
  static const JointKind cycle[] = {JointKind::RevoluteZ, JointKind::Spherical,
                                    JointKind::RevoluteY, JointKind::PrismaticZ,
                                    JointKind::RevoluteX};
  for (int i = 0; i < n; ++i) kinds[i] = cycle[i % 5];
  if (flavor == 2) kinds[0] = JointKind::Floating;
  return kinds;
}

inline JointConfig randomConfig(JointKind kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  JointConfig c = JointConfig::Neutral(kind);
  switch (kind) {
    case JointKind::Spherical:
      c.R = expSO3(Vec3(u(rng), u(rng), u(rng)) * 1.5);
      break;
    case JointKind::Floating:
      c.R = expSO3(Vec3(u(rng), u(rng), u(rng)) * 1.5);
      c.p = Vec3(u(rng), u(rng), u(rng));
      break;
    default:
      c.scalar = u(rng) * M_PI;
      break;
  }
  return c;
}

inline State randomState(const Model& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  State s;
  s.q.reserve(model.bodies.size());
  for (const Body& b : model.bodies) s.q.push_back(randomConfig(b.joint.kind, rng));
  const int n = model.nv();
  s.qd.resize(n);
  s.qdd.resize(n);
  s.tau.resize(n);
  for (int i = 0; i < n; ++i) s.qd(i) = u(rng);
  for (int i = 0; i < n; ++i) s.qdd(i) = u(rng);
  for (int i = 0; i < n; ++i) s.tau(i) = u(rng);
  return s;
}

}  // namespace sorbd
