// Command-line front end: model generation, oracle verification, step-size
// sweeps, run-time benchmarking with log-log slope fits, and inner-term
// strategy calibration. All tabular output is CSV with 17-digit numbers.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "sorbd/bench.hpp"

using namespace sorbd;

namespace {

struct OutStream {
  std::ofstream file;
  std::ostream* os = &std::cout;
  void open(const std::string& path) {
    if (path == "-" || path.empty()) return;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file " + path);
    os = &file;
  }
};

std::vector<int> parseSizes(const std::string& text) {
  std::vector<int> sizes;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) sizes.push_back(std::stoi(tok));
  if (sizes.empty()) throw std::runtime_error("empty size list");
  return sizes;
}

// "1e-8..1e-1" -> logarithmic grid endpoints
void parseRange(const std::string& text, double& lo, double& hi) {
  const size_t pos = text.find("..");
  if (pos == std::string::npos) {
    lo = hi = std::stod(text);
    return;
  }
  lo = std::stod(text.substr(0, pos));
  hi = std::stod(text.substr(pos + 2));
}

int verifyThreads() {
  if (const char* env = std::getenv("SORBD_VERIFY_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

Model buildFromSpec(const std::string& text, int fallbackN, std::uint64_t seed) {
  ModelSpec spec;
  if (!parseModelSpec(text, spec)) throw std::runtime_error("bad model spec '" + text + "'");
  const int n = spec.n > 0 ? spec.n : fallbackN;
  if (spec.family != ModelSpec::Family::File && n <= 0)
    throw std::runtime_error("model spec '" + text + "' needs a size, e.g. chain:10");
  return buildModel(spec, n, seed);
}

struct VerifyOutcome {
  ErrorReport worst;
  std::vector<std::pair<std::string, ErrorReport>> parts;
};

VerifyOutcome verifyOne(const std::string& algo, const Model& model, std::uint64_t seed) {
  const State s = randomState(model, seed);
  VerifyOutcome out;
  auto add = [&](const std::string& name, const ErrorReport& r) {
    out.parts.emplace_back(name, r);
    if (r.rmsre > out.worst.rmsre) out.worst = r;
  };
  if (algo == "idsva-fo") {
    const DerivBundleFO ana = idsvaFo(model, s.q, s.qd, s.qdd);
    const DerivBundleFO ref = bicomplexFoId(model, s.q, s.qd, s.qdd);
    add("dtau_dq", errorReport(ana.dtau_dq, ref.dtau_dq));
    add("dtau_dqd", errorReport(ana.dtau_dqd, ref.dtau_dqd));
    add("dtau_dqdd", errorReport(ana.dtau_dqdd, ref.dtau_dqdd));
  } else if (algo == "idsva-so" || algo == "fd1-so" || algo == "fd2-so") {
    DerivBundleSO_ID ana;
    if (algo == "idsva-so") ana = idsvaSo(model, s.q, s.qd, s.qdd);
    if (algo == "fd1-so") ana = finiteDiff1SoId(model, s.q, s.qd, s.qdd);
    if (algo == "fd2-so") ana = finiteDiff2SoId(model, s.q, s.qd, s.qdd);
    const DerivBundleSO_ID ref = bicomplexSoId(model, s.q, s.qd, s.qdd);
    add("stacked", errorReport(stackedSoTensor(ana), stackedSoTensor(ref)));
  } else if (algo == "fdsva-so") {
    const DerivBundleSO_FD ana = fdsvaSo(model, s.q, s.qd, s.tau);
    const DerivBundleSO_FD ref = bicomplexSoFd(model, s.q, s.qd, s.tau);
    add("d2fd_dq2", errorReport(ana.d2fd_dq2, ref.d2fd_dq2));
    add("d2fd_dqd2", errorReport(ana.d2fd_dqd2, ref.d2fd_dqd2));
    add("d2fd_dq_dqd", errorReport(ana.d2fd_dq_dqd, ref.d2fd_dq_dqd));
    add("d2fd_dqd_dq", errorReport(ana.d2fd_dqd_dq, ref.d2fd_dqd_dq));
    add("dminv_dq", errorReport(ana.dminv_dq, ref.dminv_dq));
  } else {
    throw std::runtime_error("verify does not support algo '" + algo + "'");
  }
  return out;
}

double defaultThreshold(const std::string& algo) {
  if (algo == "idsva-fo") return 1e-12;
  if (algo == "idsva-so") return 1e-10;
  if (algo == "fdsva-so") return 1e-8;
  if (algo == "fd1-so") return 1e-3;
  if (algo == "fd2-so") return 1e-6;
  return 1e-10;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"second-order rigid-body dynamics derivatives workbench"};
  app.require_subcommand(1);

  // ---- gen-model ----
  std::string gmType = "chain", gmJoint = "revolute-z", gmOut = "-";
  int gmN = 5;
  std::uint64_t gmSeed = 0;
  auto* gm = app.add_subcommand("gen-model", "write a synthetic model file");
  gm->add_option("--type", gmType, "chain or bintree")->check(CLI::IsMember({"chain", "bintree"}));
  gm->add_option("--n", gmN, "number of bodies")->required();
  gm->add_option("--joint", gmJoint, "joint kind name, or 'mixed'/'float' patterns");
  gm->add_option("--seed", gmSeed, "inertia recipe seed");
  gm->add_option("--out", gmOut, "output path or - for stdout");

  // ---- bench ----
  std::string bAlgo = "idsva-so", bModel = "chain", bSizes = "", bOut = "-";
  int bSamples = 100, bWarmups = 10;
  std::uint64_t bSeed = 7;
  auto* bench = app.add_subcommand("bench", "time an algorithm over model sizes, CSV output");
  bench->add_option("--algo", bAlgo, "algorithm name")->required();
  bench->add_option("--model", bModel, "chain | bintree | chain:N | file path");
  bench->add_option("--sizes", bSizes, "comma-separated body counts");
  bench->add_option("--samples", bSamples, "timed samples per size");
  bench->add_option("--warmups", bWarmups, "untimed warmup calls");
  bench->add_option("--seed", bSeed, "state generator seed");
  bench->add_option("--out", bOut, "output path or -");

  // ---- verify ----
  std::string vAlgo = "idsva-so", vOracle = "bicomplex", vModel = "chain:6", vOut = "-";
  int vStates = 1;
  std::uint64_t vSeed = 1;
  double vThreshold = -1.0;
  auto* verify = app.add_subcommand("verify", "compare an algorithm against an oracle");
  verify->add_option("--algo", vAlgo, "idsva-fo | idsva-so | fdsva-so | fd1-so | fd2-so")
      ->required();
  verify->add_option("--oracle", vOracle, "oracle name")->check(CLI::IsMember({"bicomplex"}));
  verify->add_option("--model", vModel, "model spec");
  verify->add_option("--states", vStates, "number of random states");
  verify->add_option("--seed", vSeed, "state seed");
  verify->add_option("--threshold", vThreshold, "rmsre pass threshold (default per algo)");
  verify->add_option("--out", vOut, "output path or -");

  // ---- sweep-step ----
  std::string sMethod = "fd1", sModel = "chain:10", sRange = "1e-8..1e-1", sOut = "-";
  int sPerDecade = 2;
  std::uint64_t sSeed = 3;
  auto* sweep = app.add_subcommand("sweep-step", "finite-difference step-size error sweep");
  sweep->set_help_flag("--help", "print help");  // frees -h/--h for the step range
  sweep->add_option("--method", sMethod, "fd1 or fd2")->check(CLI::IsMember({"fd1", "fd2"}));
  sweep->add_option("--model", sModel, "model spec");
  sweep->add_option("--h", sRange, "step range lo..hi");
  sweep->add_option("--per-decade", sPerDecade, "grid points per decade");
  sweep->add_option("--seed", sSeed, "state seed");
  sweep->add_option("--out", sOut, "output path or -");

  // ---- calibrate-crossover ----
  std::string cSizes = "10,15,20,25,30,40,50,65,80,100", cOut = "-";
  int cSamples = 15;
  std::uint64_t cSeed = 5;
  auto* calib =
      app.add_subcommand("calibrate-crossover", "locate the inner-term DTM/IDFOZA crossover");
  calib->add_option("--sizes", cSizes, "comma-separated body counts");
  calib->add_option("--samples", cSamples, "repetitions per size (min taken)");
  calib->add_option("--seed", cSeed, "state seed");
  calib->add_option("--out", cOut, "output path or -");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gm) {
      Model model;
      JointKind kind;
      if (jointKindFromName(gmJoint, kind)) {
        model = gmType == "chain" ? make_serial_chain(gmN, kind, gmSeed)
                                  : make_binary_tree(gmN, kind, gmSeed);
      } else if (gmJoint == "mixed" || gmJoint == "float") {
        const int flavor = gmJoint == "mixed" ? 1 : 2;
        model = gmType == "chain" ? make_serial_chain(gmN, jointPattern(gmN, flavor), gmSeed)
                                  : make_binary_tree(gmN, jointPattern(gmN, flavor), gmSeed);
      } else {
        throw std::runtime_error("unknown joint '" + gmJoint + "'");
      }
      OutStream out;
      out.open(gmOut);
      saveModelStream(model, *out.os);
      return 0;
    }

    if (*bench) {
      Algo algo;
      if (!algoFromName(bAlgo, algo)) throw std::runtime_error("unknown algo '" + bAlgo + "'");
      ModelSpec spec;
      if (!parseModelSpec(bModel, spec)) throw std::runtime_error("bad model '" + bModel + "'");
      std::vector<int> sizes;
      if (!bSizes.empty()) sizes = parseSizes(bSizes);
      else if (spec.n > 0) sizes = {spec.n};
      else if (spec.family == ModelSpec::Family::File) sizes = {0};
      else throw std::runtime_error("bench needs --sizes or a sized model spec");
      OutStream out;
      out.open(bOut);
      *out.os << benchCsvHeader() << '\n';
      for (int n : sizes) {
        const BenchRow row = benchOne(algo, spec, bModel, n, bSamples, bWarmups, bSeed);
        *out.os << toCsv(row) << '\n';
        out.os->flush();
      }
      return 0;
    }

    if (*verify) {
      const Model model = buildFromSpec(vModel, 6, vSeed);
      if (vThreshold < 0) vThreshold = defaultThreshold(vAlgo);
      OutStream out;
      out.open(vOut);
      const int threads = std::min(verifyThreads(), vStates);
      std::vector<VerifyOutcome> outcomes(vStates);
      std::atomic<int> next{0};
      auto worker = [&] {
        for (int idx = next.fetch_add(1); idx < vStates; idx = next.fetch_add(1))
          outcomes[idx] = verifyOne(vAlgo, model, vSeed + 101 * idx);
      };
      std::vector<std::thread> pool;
      for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
      worker();
      for (auto& th : pool) th.join();

      *out.os << "schema,algo,model,state,part,mae,rmsae,mre,rmsre\n";
      double worst = 0.0;
      for (int idx = 0; idx < vStates; ++idx) {
        for (const auto& [name, r] : outcomes[idx].parts) {
          *out.os << "sorbd-verify-v1," << vAlgo << ',' << vModel << ',' << idx << ',' << name
                  << ',' << formatNumber(r.mae) << ',' << formatNumber(r.rmsae) << ','
                  << formatNumber(r.mre) << ',' << formatNumber(r.rmsre) << '\n';
        }
        worst = std::max(worst, outcomes[idx].worst.rmsre);
      }
      *out.os << "# worst rmsre " << formatNumber(worst) << (worst <= vThreshold ? " PASS" : " FAIL")
              << " (threshold " << formatNumber(vThreshold) << ")\n";
      return worst <= vThreshold ? 0 : 1;
    }

    if (*sweep) {
      const Model model = buildFromSpec(sModel, 10, sSeed);
      const State s = randomState(model, sSeed);
      const DerivBundleSO_ID ref = bicomplexSoId(model, s.q, s.qd, s.qdd);
      const Tensor3 refStacked = stackedSoTensor(ref);
      double lo, hi;
      parseRange(sRange, lo, hi);
      OutStream out;
      out.open(sOut);
      *out.os << "schema,method,model,h,rmsre,mae\n";
      const double decades = std::log10(hi / lo);
      const int steps = std::max(1, static_cast<int>(std::round(decades * sPerDecade)));
      for (int i = 0; i <= steps; ++i) {
        const double h = lo * std::pow(10.0, decades * i / steps);
        DerivBundleSO_ID got;
        if (sMethod == "fd1") {
          StepConfig cfg;
          cfg.h = cfg.k = h;
          got = finiteDiff1SoId(model, s.q, s.qd, s.qdd, cfg);
        } else {
          got = finiteDiff2SoId(model, s.q, s.qd, s.qdd, h);
        }
        const ErrorReport r = errorReport(stackedSoTensor(got), refStacked);
        *out.os << "sorbd-sweep-v1," << sMethod << ',' << sModel << ',' << formatNumber(h) << ','
                << formatNumber(r.rmsre) << ',' << formatNumber(r.mae) << '\n';
        out.os->flush();
      }
      return 0;
    }

    if (*calib) {
      const CrossoverResult r = calibrateCrossoverInner(parseSizes(cSizes), cSamples, cSeed);
      OutStream out;
      out.open(cOut);
      *out.os << "schema,N,dtm_us,idfoza_us\n";
      for (const auto& p : r.points)
        *out.os << "sorbd-crossover-v1," << p.n << ',' << formatNumber(p.dtmUs) << ','
                << formatNumber(p.idfozaUs) << '\n';
      if (r.nStar > 0)
        *out.os << "# inner-term crossover N* = " << r.nStar << '\n';
      else
        *out.os << "# no stable crossover inside the measured range\n";
      return r.nStar > 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
