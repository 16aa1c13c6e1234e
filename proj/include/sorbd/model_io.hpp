#pragma once

#include <Eigen/Eigenvalues>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "sorbd/model.hpp"

namespace sorbd {

/// Text model format, one record per line:
///
///   sorbd-model v1
///   gravity <6 numbers>                      (optional, spatial a_g)
///   body <name> <parent|world> <joint-kind>
///        <r11 r12 r13 r21 r22 r23 r31 r32 r33> <px py pz>
///        <mass> <cx cy cz> <Ixx Iyy Izz Ixy Ixz Iyz>
///
/// The 9 numbers are the row-major placement rotation, p its translation,
/// c the center of mass in the body frame, and the I* entries the rotational
/// inertia about the center of mass. '#' starts a comment. Records may appear
/// in any order; bodies are topologically re-indexed on load.

struct ModelParseError : std::runtime_error {
  explicit ModelParseError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail_io {

struct BodyRecord {
  std::string name, parent;
  JointKind kind;
  SpatialTransformd placement;
  double mass;
  Vec3 com;
  Mat3 icom;
  int line;
};

inline void requireSpd(const Mat3& icom, const std::string& name, int line) {
  if ((icom - icom.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw ModelParseError("line " + std::to_string(line) + ": rotational inertia of '" + name +
                          "' is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> es(icom);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw ModelParseError("line " + std::to_string(line) + ": rotational inertia of '" + name +
                          "' is not positive definite");
}

}  // namespace detail_io

inline Model loadModelStream(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ModelParseError("empty model file");
  {
    std::istringstream hs(line);
    std::string magic, version;
    hs >> magic >> version;
    if (magic != "sorbd-model" || version != "v1")
      throw ModelParseError("bad header, expected 'sorbd-model v1'");
  }

  std::vector<detail_io::BodyRecord> records;
  Vec6 gravity = (Vec6() << 0, 0, 0, 0, 0, -9.81).finished();
  int lineNo = 1;
  while (std::getline(is, line)) {
    ++lineNo;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "gravity") {
      for (int i = 0; i < 6; ++i)
        if (!(ls >> gravity(i)))
          throw ModelParseError("line " + std::to_string(lineNo) + ": gravity needs 6 numbers");
    } else if (tag == "body") {
      detail_io::BodyRecord r;
      r.line = lineNo;
      std::string kindName;
      if (!(ls >> r.name >> r.parent >> kindName))
        throw ModelParseError("line " + std::to_string(lineNo) + ": truncated body record");
      if (!jointKindFromName(kindName, r.kind))
        throw ModelParseError("line " + std::to_string(lineNo) + ": unknown joint kind '" +
                              kindName + "'");
      double nums[22];
      for (int i = 0; i < 22; ++i)
        if (!(ls >> nums[i]))
          throw ModelParseError("line " + std::to_string(lineNo) +
                                ": body record needs 22 numbers after the joint kind");
      r.placement.R << nums[0], nums[1], nums[2], nums[3], nums[4], nums[5], nums[6], nums[7],
          nums[8];
      r.placement.p << nums[9], nums[10], nums[11];
      if ((r.placement.R.transpose() * r.placement.R - Mat3::Identity()).cwiseAbs().maxCoeff() >
          1e-6)
        throw ModelParseError("line " + std::to_string(lineNo) +
                              ": placement rotation is not orthonormal");
      r.placement.R = polarRotation(r.placement.R);
      r.mass = nums[12];
      if (r.mass <= 0.0)
        throw ModelParseError("line " + std::to_string(lineNo) + ": mass must be positive");
      r.com << nums[13], nums[14], nums[15];
      r.icom << nums[16], nums[19], nums[20],
                nums[19], nums[17], nums[21],
                nums[20], nums[21], nums[18];
      detail_io::requireSpd(r.icom, r.name, lineNo);
      records.push_back(std::move(r));
    } else {
      throw ModelParseError("line " + std::to_string(lineNo) + ": unknown record '" + tag + "'");
    }
  }
  if (records.empty()) throw ModelParseError("model has no bodies");

  std::unordered_map<std::string, int> byName;
  for (size_t i = 0; i < records.size(); ++i) {
    if (!byName.emplace(records[i].name, static_cast<int>(i)).second)
      throw ModelParseError("duplicate body name '" + records[i].name + "'");
  }

  // Topological order; a leftover record means the parent graph has a cycle.
  std::vector<int> parentIdx(records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    const std::string& p = records[i].parent;
    if (p == "world" || p == "0") {
      parentIdx[i] = -1;
    } else {
      auto it = byName.find(p);
      if (it == byName.end())
        throw ModelParseError("body '" + records[i].name + "' references unknown parent '" + p +
                              "'");
      if (it->second == static_cast<int>(i))
        throw ModelParseError("cycle detected at body '" + records[i].name + "'");
      parentIdx[i] = it->second;
    }
  }
  std::vector<int> order;
  std::vector<bool> placed(records.size(), false);
  order.reserve(records.size());
  bool progress = true;
  while (order.size() < records.size() && progress) {
    progress = false;
    for (size_t i = 0; i < records.size(); ++i) {
      if (placed[i]) continue;
      if (parentIdx[i] < 0 || placed[parentIdx[i]]) {
        placed[i] = true;
        order.push_back(static_cast<int>(i));
        progress = true;
      }
    }
  }
  if (order.size() < records.size()) throw ModelParseError("cycle detected in parent graph");

  std::vector<int> newIndex(records.size());
  for (size_t i = 0; i < order.size(); ++i) newIndex[order[i]] = static_cast<int>(i);

  Model model;
  model.gravity = gravity;
  model.bodies.resize(records.size());
  for (size_t i = 0; i < order.size(); ++i) {
    const detail_io::BodyRecord& r = records[order[i]];
    Body& b = model.bodies[i];
    b.name = r.name;
    b.parent = parentIdx[order[i]] < 0 ? -1 : newIndex[parentIdx[order[i]]];
    b.joint.kind = r.kind;
    b.placement = r.placement;
    b.inertia = SpatialInertiad::FromCom(r.mass, r.com, r.icom);
  }
  model.finalize();
  return model;
}

inline Model loadModelString(const std::string& text) {
  std::istringstream is(text);
  return loadModelStream(is);
}

inline Model loadModel(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ModelParseError("cannot open model file '" + path + "'");
  return loadModelStream(is);
}

inline void saveModelStream(const Model& model, std::ostream& os) {
  auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
  };
  os << "sorbd-model v1\n";
  os << "gravity";
  for (int i = 0; i < 6; ++i) os << ' ' << num(model.gravity(i));
  os << '\n';
  for (const Body& b : model.bodies) {
    os << "body " << b.name << ' '
       << (b.parent < 0 ? std::string("world") : model.bodies[b.parent].name) << ' '
       << jointKindName(b.joint.kind);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) os << ' ' << num(b.placement.R(r, c));
    for (int r = 0; r < 3; ++r) os << ' ' << num(b.placement.p(r));
    const double m = b.inertia.mass;
    const Vec3 com = b.inertia.h / m;
    const Mat3 cx = skew<double>(com);
    const Mat3 icom = b.inertia.I + m * cx * cx;
    os << ' ' << num(m);
    for (int r = 0; r < 3; ++r) os << ' ' << num(com(r));
    os << ' ' << num(icom(0, 0)) << ' ' << num(icom(1, 1)) << ' ' << num(icom(2, 2)) << ' '
       << num(icom(0, 1)) << ' ' << num(icom(0, 2)) << ' ' << num(icom(1, 2));
    os << '\n';
  }
}

inline void saveModel(const Model& model, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write model file '" + path + "'");
  saveModelStream(model, os);
}

}  // namespace sorbd
