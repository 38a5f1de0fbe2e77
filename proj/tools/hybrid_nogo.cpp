// hybrid-nogo: command-line surface for the hybrid classical-quantum
// coupling toolkit. Subcommands: analyze, verify-theorem, search, decompose,
// sn evolve, sn distinguish. Exit codes: 0 success, 1 input/parameter error,
// 2 theorem-falsification trigger.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybrid/io.hpp"
#include "hybrid/nogo.hpp"
#include "hybrid/version.hpp"

namespace {

using namespace hybrid;

int env_threads() {
  const char* v = std::getenv("HYBRID_NOGO_THREADS");
  if (!v) return 0;
  int t = std::atoi(v);
  return t > 0 ? t : 0;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    auto d = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double, std::milli>(d).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void emit(const json& report, const std::string& out_path) {
  if (out_path.empty())
    std::cout << report.dump(2) << std::endl;
  else
    save_json(report, out_path);
}

std::vector<std::pair<int, int>> parse_dims(const std::vector<std::string>& specs) {
  std::vector<std::pair<int, int>> dims;
  for (const std::string& spec : specs) {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto x = item.find('x');
      if (x == std::string::npos)
        throw StructureError("dims entry must look like NxD: " + item);
      int n = std::stoi(item.substr(0, x));
      int d = std::stoi(item.substr(x + 1));
      if (n < 1 || d < 1) throw StructureError("dims must be positive: " + item);
      dims.emplace_back(n, d);
    }
  }
  return dims;
}

json verdict_to_json(const TheoremVerdict& v) {
  json j;
  j["conditions"] = {{"i_fully_nonclassical", v.cond_i},
                     {"ii_reversible", v.cond_ii},
                     {"iii_signalling", v.cond_iii},
                     {"iv_classical_g", v.cond_iv}};
  j["violated"] = v.violated;
  json res = json::object();
  for (const auto& [name, value] : v.residuals) res[name] = value;
  j["residuals"] = std::move(res);
  j["falsified"] = v.falsified();
  return j;
}

json base_report(const std::string& command, std::uint64_t seed, double tol) {
  json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["seed"] = seed;
  j["config"] = {{"seed", seed}, {"tol", tol}, {"threads", env_threads()}};
  return j;
}

struct SNConfig {
  int grid = 512;
  double dx = 0.1;
  double dt = 1e-3;
  int steps = 1000;
  int sample_every = 10;
  double mass = 1.0;
  double coupling = 0.0;
  double softening = 0.0;
  double width = 1.0;
  double center = 0.0;
  double momentum = 0.0;
  double offset = 2.0;  // distinguish: separation in units of width
  std::string kernel = "soft-coulomb";
  std::string in_dump, out_csv, out_dump;

  SNParams params() const {
    SNParams p;
    p.mass = mass;
    p.coupling = coupling;
    p.softening = softening;
    p.dt = dt;
    p.kernel =
        kernel == "linear-1d" ? GravityKernel::linear_1d : GravityKernel::soft_coulomb;
    return p;
  }

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--grid", grid, "grid points (power of two >= 64)");
    cmd->add_option("--dx", dx, "grid spacing");
    cmd->add_option("--dt", dt, "time step");
    cmd->add_option("--steps", steps, "number of steps");
    cmd->add_option("--sample-every", sample_every, "CSV sampling stride in steps");
    cmd->add_option("--mass", mass, "particle mass");
    cmd->add_option("--coupling", coupling, "self-gravity coupling G m^2");
    cmd->add_option("--softening", softening, "kernel softening (default 2 dx)");
    cmd->add_option("--width", width, "initial Gaussian width");
    cmd->add_option("--center", center, "initial Gaussian center");
    cmd->add_option("--momentum", momentum, "initial Gaussian momentum");
    cmd->add_option("--kernel", kernel, "gravity kernel")
        ->check(CLI::IsMember({"soft-coulomb", "linear-1d"}));
    cmd->add_option("--out", out_csv, "CSV output path (default stdout)");
  }

  json to_json() const {
    return {{"grid", grid},         {"dx", dx},
            {"dt", dt},             {"steps", steps},
            {"sample_every", sample_every},
            {"mass", mass},         {"coupling", coupling},
            {"softening", softening},
            {"width", width},       {"center", center},
            {"momentum", momentum}, {"kernel", kernel}};
  }
};

void write_csv(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw StructureError("cannot open file for writing: " + path);
  out << content;
}

int cmd_analyze(const std::string& channel_path, const std::string& generators_path,
                bool allow_unphysical, std::uint64_t seed, double tol,
                const std::string& out_path) {
  Stopwatch sw;
  Channel c = load_channel(channel_path, allow_unphysical);
  std::vector<Mat> gens;
  if (!generators_path.empty()) {
    gens = load_generators(generators_path);
  } else {
    // Default: the full matrix algebra on S, i.e. S is taken irreducible
    // unless the caller supplies the generators that superselect it.
    int d = c.in_dims().size() > 1 ? c.in_dims()[1] : c.in_dims()[0];
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        Mat e = Mat::Zero(d, d);
        e(a, b) = 1.0;
        gens.push_back(std::move(e));
      }
  }
  json report = base_report("analyze", seed, tol);
  report["config"]["channel"] = channel_path;
  report["config"]["generators"] =
      generators_path.empty() ? "<full-algebra>" : generators_path;
  report["config"]["allow_unphysical"] = allow_unphysical;

  bool falsified = false;
  try {
    TheoremVerdict v = theorem_report(c, gens, tol);
    report["verdict"] = verdict_to_json(v);
  } catch (const TheoremFalsified& e) {
    falsified = true;
    report["verdict"] = {{"falsified", true}, {"detail", e.what()}};
  }
  report["wall_time_ms"] = sw.ms();
  emit(report, out_path);
  return falsified ? 2 : 0;
}

int cmd_verify(const std::vector<std::string>& dims_spec, int samples, std::uint64_t seed,
               double tol, const std::string& out_path) {
  Stopwatch sw;
  std::vector<std::pair<int, int>> dims = parse_dims(dims_spec);
  if (dims.empty()) dims = {{2, 2}, {2, 3}, {2, 4}, {3, 2}, {3, 3}, {3, 4}};
  CampaignReport r = run_campaign(dims, samples, seed, env_threads());

  json report = base_report("verify-theorem", seed, tol);
  json jd = json::array();
  for (auto [n, d] : dims) jd.push_back(std::to_string(n) + "x" + std::to_string(d));
  report["config"]["dims"] = std::move(jd);
  report["config"]["samples"] = samples;
  report["samples"] = r.samples;
  report["residuals"] = {{"max_signalling", r.max_signalling},
                         {"max_nondisturbance", r.max_nondisturbance},
                         {"max_pointer_independence", r.max_pointer_independence},
                         {"max_factorization", r.max_factorization}};
  report["falsification_triggered"] = r.falsification_triggered;
  if (r.falsification_triggered) report["failure_detail"] = r.failure_detail;
  report["wall_time_ms"] = sw.ms();
  emit(report, out_path);
  return r.falsification_triggered ? 2 : 0;
}

int cmd_search(int n, int d, int restarts, double penalty, std::uint64_t seed, double tol,
               const std::string& out_path) {
  Stopwatch sw;
  SearchResult r = adversarial_search(n, d, restarts, penalty, seed);
  json report = base_report("search", seed, tol);
  report["config"]["n"] = n;
  report["config"]["d"] = d;
  report["config"]["restarts"] = restarts;
  report["config"]["penalty"] = penalty;
  report["best_signalling"] = r.best_signalling;
  report["best_irreversibility"] = r.best_irreversibility;
  report["best_objective"] = r.best_objective;
  report["constrained_signalling"] = r.constrained_signalling;
  report["trace"] = r.trace;
  report["wall_time_ms"] = sw.ms();
  emit(report, out_path);
  return 0;
}

int cmd_decompose(const std::string& generators_path, std::uint64_t seed, double tol,
                  const std::string& out_path) {
  Stopwatch sw;
  std::vector<Mat> gens = load_generators(generators_path);
  SectorDecomposition sd = decompose(gens, kSectorSeed);
  json report = base_report("decompose", seed, tol);
  report["config"]["generators"] = generators_path;
  report["config"]["sector_seed"] = kSectorSeed;
  report["dim"] = sd.dim;
  report["block_dims"] = sd.block_dims;
  report["off_block_residual"] = sd.off_block_residual(gens);
  report["basis_change"] = matrix_to_json(sd.basis_change);
  report["fully_nonclassical"] = sd.sector_count() == 1;
  report["wall_time_ms"] = sw.ms();
  emit(report, out_path);
  return 0;
}

std::string trajectory_csv(const WaveFunctionGrid& psi0, const SNParams& p, int steps,
                           int sample_every) {
  std::ostringstream csv;
  csv.precision(15);
  csv << "t,norm,energy,width,overlap\n";
  WaveFunctionGrid psi = psi0;
  int done = 0;
  auto row = [&]() {
    csv << done * p.dt << ',' << psi.norm() << ',' << energy(psi, p) << ',' << psi.width()
        << ',' << overlap(psi0, psi) << '\n';
  };
  row();
  while (done < steps) {
    int chunk = std::min(sample_every, steps - done);
    psi = evolve(psi, p, chunk);
    done += chunk;
    row();
  }
  return csv.str();
}

int cmd_sn_evolve(const SNConfig& cfg, std::uint64_t seed, double tol,
                  const std::string& report_path) {
  SNParams p = cfg.params();
  WaveFunctionGrid psi0 =
      cfg.in_dump.empty()
          ? WaveFunctionGrid::gaussian(cfg.grid, cfg.dx, cfg.center, cfg.width,
                                       cfg.momentum)
          : load_amplitudes(cfg.in_dump);
  check_stability(psi0, p);
  std::string csv = trajectory_csv(psi0, p, cfg.steps, cfg.sample_every);
  write_csv(cfg.out_csv, csv);
  if (!cfg.out_dump.empty())
    save_amplitudes(evolve(psi0, p, cfg.steps), cfg.out_dump);
  if (!report_path.empty()) {
    json report = base_report("sn-evolve", seed, tol);
    report["config"].update(cfg.to_json());
    save_json(report, report_path);
  }
  return 0;
}

int cmd_sn_distinguish(const SNConfig& cfg, std::uint64_t seed, double tol,
                       const std::string& report_path) {
  SNParams p = cfg.params();
  double sep = 0.5 * cfg.offset * cfg.width;
  WaveFunctionGrid a = WaveFunctionGrid::gaussian(cfg.grid, cfg.dx, cfg.center - sep,
                                                  cfg.width, cfg.momentum);
  WaveFunctionGrid b = WaveFunctionGrid::gaussian(cfg.grid, cfg.dx, cfg.center + sep,
                                                  cfg.width, cfg.momentum);
  auto curve = overlap_drift(a, b, p, cfg.steps, cfg.sample_every);
  std::ostringstream csv;
  csv.precision(15);
  csv << "t,overlap,drift\n";
  for (const auto& pt : curve)
    csv << pt.t << ',' << pt.overlap << ',' << std::abs(pt.overlap - curve.front().overlap)
        << '\n';
  write_csv(cfg.out_csv, csv.str());
  if (!report_path.empty()) {
    json report = base_report("sn-distinguish", seed, tol);
    report["config"].update(cfg.to_json());
    report["config"]["offset"] = cfg.offset;
    double max_drift = 0.0;
    for (const auto& pt : curve)
      max_drift = std::max(max_drift, std::abs(pt.overlap - curve.front().overlap));
    report["max_overlap_drift"] = max_drift;
    save_json(report, report_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for hybrid classical-quantum coupling analysis"};
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  double tol = 1e-8;
  std::string out_path;
  app.add_option("--seed", seed, "random seed (default 42)");
  app.add_option("--tol", tol, "classification tolerance");

  auto* analyze = app.add_subcommand("analyze", "classify a channel against the theorem");
  std::string channel_path, generators_path;
  bool allow_unphysical = false;
  analyze->add_option("channel", channel_path, "channel JSON file")->required();
  analyze->add_option("--generators", generators_path, "generators JSON for S");
  analyze->add_flag("--allow-unphysical", allow_unphysical, "skip CPTP validation");
  analyze->add_option("--out", out_path, "report path (default stdout)");

  auto* verify = app.add_subcommand("verify-theorem", "random reversible CQ campaign");
  std::vector<std::string> dims_spec;
  int samples = 100;
  verify->add_option("--dims", dims_spec, "dimension pairs, e.g. 2x2,3x4");
  verify->add_option("--samples", samples, "number of sampled interactions");
  verify->add_option("--out", out_path, "report path (default stdout)");

  auto* search = app.add_subcommand("search", "adversarial search for reversible signalling");
  int sn = 2, sd = 2, restarts = 20;
  double penalty = 1e4;
  search->add_option("-n,--classical-dim", sn, "classical dimension");
  search->add_option("-d,--quantum-dim", sd, "quantum dimension");
  search->add_option("--restarts", restarts, "search restarts");
  search->add_option("--penalty", penalty, "irreversibility penalty weight");
  search->add_option("--out", out_path, "report path (default stdout)");

  auto* decomp = app.add_subcommand("decompose", "sector decomposition of a generator set");
  std::string decomp_gens;
  decomp->add_option("generators", decomp_gens, "generators JSON file")->required();
  decomp->add_option("--out", out_path, "report path (default stdout)");

  auto* sn_group = app.add_subcommand("sn", "Schroedinger-Newton experiments");
  sn_group->require_subcommand(1);
  SNConfig evolve_cfg, dist_cfg;
  std::string report_path;

  auto* sn_evolve = sn_group->add_subcommand("evolve", "evolve one wavefunction");
  evolve_cfg.add_flags(sn_evolve);
  sn_evolve->add_option("--in", evolve_cfg.in_dump, "input amplitude dump");
  sn_evolve->add_option("--dump", evolve_cfg.out_dump, "final amplitude dump path");
  sn_evolve->add_option("--report", report_path, "JSON report path");

  auto* sn_dist = sn_group->add_subcommand("distinguish", "overlap drift of a Gaussian pair");
  dist_cfg.add_flags(sn_dist);
  sn_dist->add_option("--offset", dist_cfg.offset, "separation in units of width");
  sn_dist->add_option("--report", report_path, "JSON report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed())
      return cmd_analyze(channel_path, generators_path, allow_unphysical, seed, tol,
                         out_path);
    if (verify->parsed()) return cmd_verify(dims_spec, samples, seed, tol, out_path);
    if (search->parsed())
      return cmd_search(sn, sd, restarts, penalty, seed, tol, out_path);
    if (decomp->parsed()) return cmd_decompose(decomp_gens, seed, tol, out_path);
    if (sn_group->parsed()) {
      if (sn_evolve->parsed()) return cmd_sn_evolve(evolve_cfg, seed, tol, report_path);
      if (sn_dist->parsed()) return cmd_sn_distinguish(dist_cfg, seed, tol, report_path);
    }
  } catch (const hybrid::TheoremFalsified& e) {
    std::cerr << "falsification trigger: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 1;
}
