#include "commands.hpp"

#include <algorithm>
#include <cmath>

#include "canlab/app.hpp"
#include "canlab/error.hpp"
#include "canlab/estimators.hpp"
#include "canlab/exact.hpp"
#include "canlab/simulator.hpp"
#include "spec.hpp"

namespace canlab::app {

namespace {

// Stream ids for draws that are not replicas.
constexpr std::uint64_t kInitialStateStream = 0x1000000000ull;

json summary_json(const mc::Summary& s) {
  return {{"mean", s.mean}, {"stderr", s.std_error}, {"n_effective", s.n_effective}, {"n", s.n}};
}

json estimator_json(const mc::EstimatorReport& r) {
  json j{{"estimate", r.estimate}, {"stderr", r.std_error}, {"n_effective", r.n_effective}, {"seed", r.seed}};
  json params = json::object();
  for (const auto& [k, v] : r.parameters) params[k] = v;
  j["parameters"] = params;
  return j;
}

std::vector<double> number_list(const json& spec, const char* key) {
  return spec.at(key).get<std::vector<double>>();
}

mc::HatYOptions hat_options(const json& spec, std::uint64_t seed) {
  mc::HatYOptions o;
  o.burn_in = spec.at("burn_in");
  o.horizon = spec.at("horizon");
  o.thin = spec.at("thin");
  o.cap = spec.at("cap");
  o.seed = seed;
  return o;
}

json hat_run_json(const mc::HatYRun& run) {
  return {{"cap_abort", run.cap_abort},
          {"abort_time", run.abort_time},
          {"events", run.events},
          {"max_span", run.max_span},
          {"samples", run.samples.size()}};
}

void note_abort(CommandResult& r, const mc::HatYRun& run) {
  r.exit_code = kInconclusive;
  r.report["verdict"] = "no tightness at this parameter";
  r.warnings.push_back("interface span exceeded the cap at time " + std::to_string(run.abort_time) +
                       "; no tightness at this parameter");
}

CommandResult verify_algebra_cmd(const json& spec, std::uint64_t seed) {
  const AlgebraReport a = verify_algebra(spec.at("operators"), spec.at("configs"), seed, spec.at("corrupt_psi"));
  CommandResult r;
  r.report = {{"operators", a.operators},
              {"configs_per_operator", a.configs_per_operator},
              {"checks", a.checks},
              {"failures", a.failures},
              {"first_failures", a.first_failures},
              {"passed", a.passed()}};
  if (a.operators == 0) r.warnings.push_back("zero operators requested: the pass is vacuous");
  if (!a.passed()) r.exit_code = kVerificationFailure;
  return r;
}

CommandResult exact_dual_cmd(const json& spec, std::uint64_t seed) {
  const Model m = build_model(spec);
  const RateTable& rt = m.require_table("exact-dual");
  const std::string identity = spec.at("identity");
  if (identity != "both" && identity != "dual" && identity != "H")
    throw ValidationError("identity must be dual, H or both");
  const int n = spec.at("n");
  const double t = spec.at("t"), eps = spec.at("eps"), tolerance = spec.at("tolerance");
  const int trials = spec.at("trials");
  std::vector<exact::DualityReport> reports;
  if (identity != "H") reports.push_back(exact::check_duality(rt, n, t, trials, eps, seed));
  if (identity != "dual") reports.push_back(exact::check_H_duality(rt, n, t, trials, eps, seed));
  CommandResult r;
  r.table = Table{{"identity", "n", "t", "eps", "trials", "max_deviation"}, {}};
  json list = json::array();
  double worst = 0.0;
  for (const auto& d : reports) {
    list.push_back({{"identity", d.identity},
                    {"n", d.n},
                    {"t", d.t},
                    {"eps", d.eps},
                    {"trials", d.trials},
                    {"max_deviation", d.max_deviation}});
    r.table->rows.push_back({d.identity, d.n, d.t, d.eps, d.trials, d.max_deviation});
    worst = std::max(worst, d.max_deviation);
  }
  r.report = {{"reports", list}, {"tolerance", tolerance}, {"passed", worst <= tolerance}};
  if (worst > tolerance) r.exit_code = kVerificationFailure;
  return r;
}

// The table a process name refers to, for processes that need one.
RateTable process_table(const Model& m, const std::string& process, const std::string& command) {
  const DiagramClosure d = diagram_closure(m.require_table(command));
  if (process == "x") return d.x;
  if (process == "dual") return d.x_dual;
  if (process == "interface") return d.y;
  if (process == "interface_dual") return d.y_dual;
  throw ValidationError("unknown process '" + process + "'");
}

CommandResult simulate_cmd(const json& spec, std::uint64_t seed) {
  const Model m = build_model(spec);
  const std::string process = spec.at("process");
  std::shared_ptr<const mc::Dynamics> dyn;
  if (process == "x")
    dyn = m.x_dynamics();
  else
    dyn = mc::make_dynamics(process_table(m, process, "simulate"));
  const std::int64_t n = spec.at("n");
  const LatticeTag lattice = n > 0 ? LatticeTag::ring(n, dyn->lattice()) : LatticeTag::line(dyn->lattice());
  Config x0;
  if (spec.contains("x0")) {
    x0 = parse_config(spec["x0"], lattice);
  } else if (lattice.is_ring()) {
    Rng rng(seed, kInitialStateStream);
    std::string bits(static_cast<std::size_t>(n), '0');
    for (auto& b : bits) b = rng.bernoulli(0.5) ? '1' : '0';
    x0 = Config::from_bits(lattice, 0, bits);
  } else if (process == "x") {
    x0 = Config::heaviside(lattice.parity, DoubledIndex::at(lattice.parity, 1));
  } else {
    x0 = Config::from_bits(lattice, 0, "1");
  }
  mc::Simulator sim(dyn, x0, Rng(seed, 0));
  const double horizon = spec.at("horizon"), interval = spec.at("interval");
  CommandResult r;
  r.table = Table{{"time", "window_offset", "bitstring"}, {}};
  auto snapshot = [&](double t) {
    const Config c = sim.config();
    r.table->rows.push_back({t, c.bits().first(), c.bits().window_string()});
  };
  snapshot(0.0);
  for (std::int64_t k = 1;; ++k) {
    const double t = std::min(horizon, static_cast<double>(k) * interval);
    sim.run_until(t);
    snapshot(t);
    if (t >= horizon) break;
  }
  r.report = {{"process", dyn->describe()},
              {"x0", config_to_json(x0)},
              {"final", config_to_json(sim.config())},
              {"events", sim.events()},
              {"snapshots", r.table->rows.size()}};
  return r;
}

mc::HatYRun interface_run(const Model& m, const mc::HatYOptions& o) {
  if (m.table) return mc::simulate_hatY(interface_table(*m.table), o);
  return mc::simulate_hatY_via_x(m.x_dynamics(), o);
}

CommandResult tightness_cmd(const json& spec, std::uint64_t seed) {
  const Model m = build_model(spec);
  const mc::HatYRun run = interface_run(m, hat_options(spec, seed));
  CommandResult r;
  r.report["run"] = hat_run_json(run);
  if (run.cap_abort) {
    note_abort(r, run);
    return r;
  }
  const mc::TightnessReport t = mc::interface_tightness_report(run.samples, spec.at("n_max"));
  json tail = json::array();
  r.table = Table{{"n", "size", "probability", "stderr"}, {}};
  for (std::size_t k = 0; k < t.tail.size(); ++k) {
    tail.push_back(summary_json(t.tail[k]));
    r.table->rows.push_back({k, 2 * k + 1, t.tail[k].mean, t.tail[k].std_error});
  }
  r.report["p_delta0"] = summary_json(t.p_delta0);
  r.report["mean_size"] = summary_json(t.mean_size);
  r.report["tail"] = tail;
  r.report["tail_slope"] = t.tail_slope;
  r.report["total_weight"] = t.total_weight;
  return r;
}

CommandResult harmonic_cmd(const json& spec, std::uint64_t seed) {
  const Model m = build_model(spec);
  const RateTable& rt = m.require_table("harmonic");
  const mc::HatYRun run = mc::simulate_hatY(interface_table(rt), hat_options(spec, seed));
  CommandResult r;
  r.report["run"] = hat_run_json(run);
  if (run.cap_abort) {
    note_abort(r, run);
    return r;
  }
  if (!spec.contains("x")) throw ValidationError("harmonic requires \"x\"");
  const mc::HarmonicFunction h = mc::HarmonicFunction::from_samples(run.samples);
  const LatticeTag lattice = LatticeTag::line(opposite(rt.lattice()));
  r.table = Table{{"x", "size", "estimate", "stderr"}, {}};
  json values = json::array();
  for (const auto& literal : spec["x"]) {
    const Config x = parse_config(literal, lattice);
    if (!x.is_finite()) throw ValidationError("h is defined on finite configurations");
    const mc::EstimatorReport e = mc::estimate_h(run.samples, x);
    json v = estimator_json(e);
    v["x"] = config_to_json(x);
    v["size"] = x.count();
    values.push_back(v);
    r.table->rows.push_back({x.to_string(), x.count(), e.estimate, e.std_error});
  }
  r.report["c"] = h.c();
  r.report["C"] = h.C();
  r.report["distinct_states"] = h.states();
  r.report["values"] = values;
  return r;
}

CommandResult martingale_cmd(const json& spec, std::uint64_t seed, unsigned jobs) {
  const Model m = build_model(spec);
  const DiagramClosure d = diagram_closure(m.require_table("martingale"));
  const mc::HatYRun run = mc::simulate_hatY(d.y, hat_options(spec, seed));
  CommandResult r;
  r.report["run"] = hat_run_json(run);
  if (run.cap_abort) {
    note_abort(r, run);
    return r;
  }
  const mc::HarmonicFunction h = mc::HarmonicFunction::from_samples(run.samples);
  const Config x0 = parse_config(spec.at("x0"), LatticeTag::line(d.x_dual.lattice()));
  if (!x0.is_finite()) throw ValidationError("martingale needs a finite x0");
  const auto times = number_list(spec, "times");
  const std::size_t replicates = spec.at("replicates");
  // Replicates use seed + 1 so they do not reuse the interface stream.
  const mc::MartingaleResult res = mc::martingale_test(d.x_dual, h, x0, times, replicates, seed + 1, jobs);
  r.table = Table{{"time", "estimate", "stderr", "z", "replicates"}, {}};
  double worst = 0.0;
  for (const auto& p : res.points) {
    r.table->rows.push_back({p.time, p.value.mean, p.value.std_error, p.z, replicates});
    worst = std::max(worst, std::abs(p.z));
  }
  const double z_max = spec.at("z_max");
  r.report["h0"] = res.h0;
  r.report["x0"] = config_to_json(x0);
  r.report["max_abs_z"] = worst;
  r.report["passed"] = worst <= z_max;
  if (worst > z_max) r.exit_code = kVerificationFailure;
  return r;
}

CommandResult clustering_cmd(const json& spec, std::uint64_t seed, unsigned jobs) {
  const Model m = build_model(spec);
  const std::size_t replicates = spec.at("replicates");
  const auto times = number_list(spec, "times");
  const auto curve =
      mc::clustering_curve(m.x_dynamics(), spec.at("n"), spec.at("p"), times, replicates, seed, jobs);
  CommandResult r;
  r.table = Table{{"time", "estimate", "stderr", "replicates"}, {}};
  for (const auto& c : curve) r.table->rows.push_back({c.time, c.value.mean, c.value.std_error, replicates});
  r.report = {{"points", curve.size()}};
  return r;
}

CommandResult survival_cmd(const json& spec, std::uint64_t seed, unsigned jobs) {
  const Model m = build_model(spec);
  const std::string process = spec.at("process");
  if (process != "x" && process != "dual") throw ValidationError("survival process must be x or dual");
  std::shared_ptr<const mc::Dynamics> dyn =
      process == "x" ? m.x_dynamics() : mc::make_dynamics(process_table(m, "dual", "survival"));
  const Config x0 = parse_config(spec.at("x0"), LatticeTag::line(dyn->lattice()));
  if (!x0.is_finite()) throw ValidationError("survival needs a finite x0");
  const mc::EstimatorReport e =
      mc::survival_probability(dyn, x0, spec.at("horizon"), spec.at("replicates"), seed, jobs);
  CommandResult r;
  r.report = estimator_json(e);
  r.report["x0"] = config_to_json(x0);
  return r;
}

CommandResult p_estimate_cmd(const json& spec, std::uint64_t seed) {
  const Model m = build_model(spec);
  const DiagramClosure d = diagram_closure(m.require_table("p-estimate"));
  const mc::HatYRun run = mc::simulate_hatY(d.y_dual, hat_options(spec, seed));
  CommandResult r;
  r.report["run"] = hat_run_json(run);
  if (run.cap_abort) {
    note_abort(r, run);
    return r;
  }
  const double p = spec.at("p");
  if (p < 0.0 || p > 1.0) throw ValidationError("p must lie in [0, 1]");
  const mc::EstimatorReport e = mc::estimate_p(mc::product_law(p), run.samples, seed + 1, spec.at("draws"));
  r.report["p"] = estimator_json(e);
  return r;
}

CommandResult alpha_scan_cmd(const json& spec, std::uint64_t seed, unsigned jobs) {
  const std::string kind = spec.at("model");
  const FlipModelKind k = kind == "rebellious"         ? FlipModelKind::Rebellious
                          : kind == "neuhauser-pacala" ? FlipModelKind::NeuhauserPacala
                                                       : FlipModelKind::Affine;
  mc::ScanOptions o;
  o.events = spec.at("events");
  o.replicas = spec.at("replicas");
  o.cap = spec.at("cap");
  o.seed = seed;
  o.jobs = jobs;
  o.range = spec.value("range", 2);
  const auto alphas = number_list(spec, "alphas");
  for (double a : alphas)
    if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("alphas must lie in [0, 1]");
  const mc::ScanResult res = mc::alpha_scan(k, alphas, o);
  CommandResult r;
  r.table = Table{{"alpha", "verdict", "mean_mid", "mean_late", "drift_z", "p_delta0", "cap_abort_fraction"}, {}};
  json points = json::array();
  for (const auto& p : res.points) {
    r.table->rows.push_back({p.alpha, mc::to_string(p.verdict), p.mean_mid, p.mean_late, p.drift_z, p.p_delta0,
                             p.cap_abort_fraction});
    points.push_back({{"alpha", p.alpha},
                      {"verdict", mc::to_string(p.verdict)},
                      {"mean_mid", p.mean_mid},
                      {"mean_late", p.mean_late},
                      {"drift_z", p.drift_z},
                      {"p_delta0", p.p_delta0},
                      {"cap_abort_fraction", p.cap_abort_fraction}});
  }
  r.report["points"] = points;
  if (res.bracket) {
    r.report["bracket"] = {res.bracket->first, res.bracket->second};
  } else {
    r.report["bracket"] = nullptr;
    r.exit_code = kInconclusive;
    r.warnings.push_back("no growth-to-tight sign change found on this grid");
  }
  return r;
}

}  // namespace

CommandResult execute(const json& spec, std::uint64_t seed, unsigned jobs) {
  const std::string command = spec.at("command");
  if (command == "verify-algebra") return verify_algebra_cmd(spec, seed);
  if (command == "exact-dual") return exact_dual_cmd(spec, seed);
  if (command == "simulate") return simulate_cmd(spec, seed);
  if (command == "interface-tightness") return tightness_cmd(spec, seed);
  if (command == "harmonic") return harmonic_cmd(spec, seed);
  if (command == "martingale") return martingale_cmd(spec, seed, jobs);
  if (command == "clustering") return clustering_cmd(spec, seed, jobs);
  if (command == "survival") return survival_cmd(spec, seed, jobs);
  if (command == "p-estimate") return p_estimate_cmd(spec, seed);
  if (command == "alpha-scan") return alpha_scan_cmd(spec, seed, jobs);
  throw ValidationError("unknown command '" + command + "'");
}

}  // namespace canlab::app
