#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <string>

#include "sorbd/deriv_so_fd.hpp"
#include "sorbd/metrics.hpp"
#include "sorbd/model_io.hpp"
#include "sorbd/oracles.hpp"

namespace sorbd {

enum class Algo {
  Rnea,
  Aba,
  Crba,
  IdsvaFo,
  IdsvaSo,
  FdsvaSo,
  FiniteDiff1So,
  FiniteDiff2So,
  BicomplexSo,
};

inline const char* algoName(Algo a) {
  switch (a) {
    case Algo::Rnea: return "rnea";
    case Algo::Aba: return "aba";
    case Algo::Crba: return "crba";
    case Algo::IdsvaFo: return "idsva-fo";
    case Algo::IdsvaSo: return "idsva-so";
    case Algo::FdsvaSo: return "fdsva-so";
    case Algo::FiniteDiff1So: return "fd1-so";
    case Algo::FiniteDiff2So: return "fd2-so";
    case Algo::BicomplexSo: return "bicomplex-so";
  }
  return "?";
}

inline bool algoFromName(const std::string& s, Algo& out) {
  for (Algo a : {Algo::Rnea, Algo::Aba, Algo::Crba, Algo::IdsvaFo, Algo::IdsvaSo, Algo::FdsvaSo,
                 Algo::FiniteDiff1So, Algo::FiniteDiff2So, Algo::BicomplexSo}) {
    if (s == algoName(a)) {
      out = a;
      return true;
    }
  }
  return false;
}

/// Model description strings: "chain", "bintree", optionally ":<N>" and a
/// ":mixed" or ":float" joint-pattern suffix, or a path to a model file.
struct ModelSpec {
  enum class Family { Chain, BinTree, File } family = Family::Chain;
  int n = 0;  // 0 = take N from the caller
  int flavor = 0;
  std::string path;
};

inline bool parseModelSpec(const std::string& text, ModelSpec& out) {
  if (text.find('/') != std::string::npos || text.ends_with(".txt") ||
      text.ends_with(".model")) {
    out.family = ModelSpec::Family::File;
    out.path = text;
    return true;
  }
  std::string rest = text;
  out.flavor = 0;
  out.n = 0;
  auto eat = [&](const std::string& tok) {
    const size_t pos = rest.find(tok);
    if (pos == std::string::npos) return false;
    rest.erase(pos, tok.size());
    return true;
  };
  if (eat(":mixed")) out.flavor = 1;
  if (eat(":float")) out.flavor = 2;
  const size_t colon = rest.find(':');
  std::string fam = rest.substr(0, colon);
  if (colon != std::string::npos) {
    try {
      out.n = std::stoi(rest.substr(colon + 1));
    } catch (...) {
      return false;
    }
  }
  if (fam == "chain") {
    out.family = ModelSpec::Family::Chain;
    return true;
  }
  if (fam == "bintree") {
    out.family = ModelSpec::Family::BinTree;
    return true;
  }
  return false;
}

inline Model buildModel(const ModelSpec& spec, int n, std::uint64_t seed) {
  switch (spec.family) {
    case ModelSpec::Family::Chain:
      return make_serial_chain(n, jointPattern(n, spec.flavor), seed);
    case ModelSpec::Family::BinTree:
      return make_binary_tree(n, jointPattern(n, spec.flavor), seed);
    case ModelSpec::Family::File: return loadModel(spec.path);
  }
  throw std::logic_error("buildModel: bad family");
}

inline std::string formatNumber(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct BenchRow {
  std::string algo, model;
  int n = 0, nv = 0, samples = 0, warmups = 0;
  std::uint64_t seed = 0;
  double medianUs = 0, meanUs = 0, minUs = 0, maxUs = 0;
};

inline const char* benchCsvHeader() {
  return "schema,algo,model,N,n,samples,warmups,seed,median_us,mean_us,min_us,max_us";
}

inline std::string toCsv(const BenchRow& r) {
  std::string line = "sorbd-bench-v1," + r.algo + "," + r.model + "," + std::to_string(r.n) +
                     "," + std::to_string(r.nv) + "," + std::to_string(r.samples) + "," +
                     std::to_string(r.warmups) + "," + std::to_string(r.seed);
  for (double v : {r.medianUs, r.meanUs, r.minUs, r.maxUs}) line += "," + formatNumber(v);
  return line;
}

namespace bench_detail {

inline void consume(double v) {
  thread_local volatile double sink;
  sink = v;
}

/// Reusable per-benchmark outputs; the second-order bundle persists across
/// samples of one (model, N) row so allocation and zero-fill stay outside
/// the steady-state measurement.
struct BenchWorkspace {
  DerivBundleSO_ID so;
};

inline void runOnce(Algo algo, const Model& model, const State& s, BenchWorkspace& ws) {
  switch (algo) {
    case Algo::Rnea: consume(rnea(model, s.q, s.qd, s.qdd).sum()); break;
    case Algo::Aba: consume(aba(model, s.q, s.qd, s.tau).sum()); break;
    case Algo::Crba: consume(crba(model, s.q)(0, 0)); break;
    case Algo::IdsvaFo: consume(idsvaFo(model, s.q, s.qd, s.qdd).dtau_dq(0, 0)); break;
    case Algo::IdsvaSo: {
      const KinematicsCache kc = computeKinematicsCache(model, s.q, s.qd, s.qdd);
      idsvaSo(model, kc, ws.so);
      consume(ws.so.d2tau_dq2(0, 0, 0));
      break;
    }
    case Algo::FdsvaSo: consume(fdsvaSo(model, s.q, s.qd, s.tau).d2fd_dq2(0, 0, 0)); break;
    case Algo::FiniteDiff1So:
      consume(finiteDiff1SoId(model, s.q, s.qd, s.qdd).d2tau_dq2(0, 0, 0));
      break;
    case Algo::FiniteDiff2So:
      consume(finiteDiff2SoId(model, s.q, s.qd, s.qdd).d2tau_dq2(0, 0, 0));
      break;
    case Algo::BicomplexSo:
      consume(bicomplexSoId(model, s.q, s.qd, s.qdd).d2tau_dq2(0, 0, 0));
      break;
  }
}

}  // namespace bench_detail

/// One (algorithm, model, N) timing row: states are regenerated per sample
/// from the seed outside the timed region, the clock covers the algorithm
/// call alone, and the row reports the median and mean over all samples.
inline BenchRow benchOne(Algo algo, const ModelSpec& spec, const std::string& modelLabel, int n,
                         int samples, int warmups, std::uint64_t seed) {
  const Model model = buildModel(spec, n, seed);
  std::vector<State> states;
  states.reserve(samples);
  for (int i = 0; i < samples; ++i) states.push_back(randomState(model, seed + 7919 * i + 1));

  bench_detail::BenchWorkspace ws;
  for (int w = 0; w < std::max(1, warmups); ++w)
    bench_detail::runOnce(algo, model, states[w % states.size()], ws);

  std::vector<double> us(samples);
  for (int i = 0; i < samples; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    bench_detail::runOnce(algo, model, states[i], ws);
    const auto t1 = std::chrono::steady_clock::now();
    us[i] = std::chrono::duration<double, std::micro>(t1 - t0).count();
  }
  std::vector<double> sorted = us;
  std::sort(sorted.begin(), sorted.end());
  BenchRow row;
  row.algo = algoName(algo);
  row.model = modelLabel;
  row.n = model.numBodies();
  row.nv = model.nv();
  row.samples = samples;
  row.warmups = warmups;
  row.seed = seed;
  row.minUs = sorted.front();
  row.maxUs = sorted.back();
  row.medianUs = (samples % 2 == 1)
                     ? sorted[samples / 2]
                     : 0.5 * (sorted[samples / 2 - 1] + sorted[samples / 2]);
  double sum = 0;
  for (double v : us) sum += v;
  row.meanUs = sum / samples;
  return row;
}

/// Inner-term strategy calibration: timings of the q-q inner term under both
/// strategies over a size grid; nStar is the first size from which the
/// zero-algorithm route stays ahead through the end of the grid.
struct CrossoverPoint {
  int n = 0;
  double dtmUs = 0, idfozaUs = 0;
};

struct CrossoverResult {
  std::vector<CrossoverPoint> points;
  int nStar = -1;  // -1: no stable crossover inside the grid
};

inline CrossoverResult calibrateCrossoverInner(const std::vector<int>& sizes, int samples,
                                               std::uint64_t seed) {
  CrossoverResult result;
  for (int n : sizes) {
    const Model model = make_serial_chain(n, JointKind::RevoluteZ, seed);
    const State s = randomState(model, seed + n);
    const VecXd qdd0 = aba(model, s.q, s.qd, s.tau);
    const KinematicsCache kc = computeKinematicsCache(model, s.q, s.qd, qdd0);
    const DerivBundleFO foId = idsvaFo(model, kc);
    Eigen::LLT<MatXd> llt(foId.dtau_dqdd);
    FdDerivFO fo;
    fo.qdd0 = qdd0;
    fo.dfd_dq = -llt.solve(foId.dtau_dq);
    fo.dfd_dqd = -llt.solve(foId.dtau_dqd);
    fo.dfd_dtau = llt.solve(MatXd::Identity(model.nv(), model.nv()));
    const DerivBundleSO_ID so = idsvaSo(model, kc);

    auto time = [&](StrategyConfig::Inner strategy) {
      StrategyConfig cfg;
      cfg.inner = strategy;
      double best = 1e300;
      for (int rep = 0; rep < samples; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        const Tensor3 inner = innerTerm(MixedPair::QQ, model, s.q, so, fo, cfg);
        const auto t1 = std::chrono::steady_clock::now();
        bench_detail::consume(inner(0, 0, 0));
        best = std::min(best, std::chrono::duration<double, std::micro>(t1 - t0).count());
      }
      return best;
    };
    CrossoverPoint pt;
    pt.n = n;
    pt.dtmUs = time(StrategyConfig::Inner::DTM);
    pt.idfozaUs = time(StrategyConfig::Inner::IDFOZA);
    result.points.push_back(pt);
  }
  for (size_t i = 0; i < result.points.size(); ++i) {
    bool ahead = true;
    for (size_t j = i; j < result.points.size(); ++j)
      ahead = ahead && result.points[j].idfozaUs < result.points[j].dtmUs;
    if (ahead) {
      result.nStar = result.points[i].n;
      break;
    }
  }
  return result;
}

}  // namespace sorbd
