// Turns a RunConfig into a problem, resolves the protocol parameters (K from
// the serve window, delta and alpha from the SC-MR solver) and runs one
// scheme per seed, writing a metrics CSV and a JSON report for each.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedmeld/baselines.hpp"
#include "fedmeld/dataset.hpp"
#include "fedmeld/dispersal.hpp"
#include "fedmeld/gamma_estimate.hpp"
#include "fedmeld/geometry.hpp"
#include "fedmeld/harness/config.hpp"
#include "fedmeld/harness/metrics_io.hpp"
#include "fedmeld/models.hpp"
#include "fedmeld/partition.hpp"
#include "fedmeld/rng.hpp"
#include "fedmeld/scmr.hpp"
#include "fedmeld/simulation.hpp"

namespace fedmeld::harness {

inline Dataset make_quadratic_dataset(const DatasetConfig& d, std::uint64_t seed) {
  Rng rng = make_rng(seed, "dataset", {2});
  std::normal_distribution<double> centre(0.0, d.center_scale);
  std::uniform_real_distribution<double> curv(d.curvature_min, d.curvature_max);
  Dataset out;
  out.num_labels = d.num_labels;
  for (std::size_t n = 0; n < d.train_samples; ++n) {
    std::vector<double> c(d.num_features), a(d.num_features);
    for (auto& x : c) x = centre(rng);
    for (auto& x : a) x = curv(rng);
    Sample s = quadratic_sample(c, a);
    s.label = static_cast<int>(n % static_cast<std::size_t>(d.num_labels));
    out.samples.push_back(std::move(s));
  }
  return out;
}

struct BuiltProblem {
  FlProblem problem;
  Dataset train;
};

inline BuiltProblem build_problem(const RunConfig& c, std::uint64_t seed) {
  BuiltProblem b;
  const auto& d = c.dataset;
  if (d.kind == "gaussian") {
    GaussianClusterSpec gs;
    gs.num_samples = d.train_samples;
    gs.num_features = d.num_features;
    gs.num_labels = d.num_labels;
    gs.cluster_std = d.cluster_std;
    gs.center_scale = d.center_scale;
    gs.seed = seed;
    b.train = make_gaussian_clusters(gs, 0);
    if (d.test_samples > 0) {
      gs.num_samples = d.test_samples;
      b.problem.test = make_gaussian_clusters(gs, 1);
    }
  } else if (d.kind == "quadratic") {
    b.train = make_quadratic_dataset(d, seed);
  } else {
    b.train = load_csv_dataset(d.train_path, d.num_labels);
    if (!d.test_path.empty()) b.problem.test = load_csv_dataset(d.test_path, b.train.num_labels);
  }

  const auto& m = c.model;
  if (m.family == "quadratic") {
    if (d.kind != "quadratic") throw InvalidConfig("model.family quadratic needs dataset.kind quadratic");
    b.problem.model = std::make_shared<QuadraticModel>(d.num_features);
  } else {
    if (d.kind == "quadratic") throw InvalidConfig("dataset.kind quadratic needs model.family quadratic");
    const std::size_t f = b.train.num_features();
    if (m.family == "logistic")
      b.problem.model = std::make_shared<LogisticModel>(f, b.train.num_labels, m.l2);
    else
      b.problem.model = std::make_shared<MlpModel>(f, m.hidden, b.train.num_labels, m.l2);
  }

  PartitionSpec ps;
  ps.scheme = parse_partition_scheme(c.partition.scheme);
  ps.clients_per_area = c.partition.clients_per_area;
  if (ps.clients_per_area.size() == 1) ps.clients_per_area.assign(c.geometry.num_areas, ps.clients_per_area[0]);
  if (static_cast<int>(ps.clients_per_area.size()) != c.geometry.num_areas)
    throw InvalidConfig("partition.clients_per_area needs one entry or one per area");
  ps.labels_per_cluster = c.partition.labels_per_cluster;
  ps.labels_per_client = c.partition.labels_per_client;
  ps.seed = seed;
  b.problem.partition = partition(b.train, ps);
  return b;
}

inline ConstellationGeometry make_geometry(const GeometryConfig& g) {
  ConstellationGeometry out = ConstellationGeometry::evenly_spaced(g.num_areas, g.altitude_m, g.sats_per_orbit);
  if (!g.area_angles_rad.empty()) out.area_angles_rad = g.area_angles_rad;
  return out;
}

/// Everything the config left on "auto", after resolution.
struct ResolvedRun {
  std::size_t M = 0;
  std::vector<int> N;
  std::vector<int> U;
  double L = 0.0;
  std::uint64_t model_bits = 0;
  double nominal_round_s = 0.0;
  double serve_duration_s = 0.0;
  std::vector<double> fly_s;
  double max_fly_s = 0.0;
  int K = 1;
  bool K_clamped = false;
  int delta = 1;
  double alpha = 0.0;
  int period_rounds = 1;
  double hfl_stall_s = 0.0;
  std::optional<double> gamma_estimate;
  std::optional<ScmrReport> scmr;
};

inline std::unique_ptr<RoundTimer> make_timer(const RunConfig& c, const FlProblem& p, std::uint64_t bits) {
  if (c.timing.mode == "constant") return std::make_unique<ConstantRoundTimer>(c.timing.round_latency_s);
  ComputeProfile cp;
  cp.local_iterations = c.training.E;
  cp.batch_size = static_cast<int>(c.training.batch_size);
  cp.flops_per_sample = c.compute.flops_per_sample;
  cp.client_flops.assign(p.partition.num_clients(), c.compute.client_flops_per_s);
  cp.t_agg_s = c.compute.t_agg_s;
  cp.validate();
  const LinkBudget lb = c.link.budget();
  lb.validate();
  const double range = c.timing.slant_range_m.value_or(c.geometry.altitude_m);
  return std::make_unique<LinkRoundTimer>(cp, lb, std::vector<double>(p.num_areas(), range),
                                          static_cast<double>(bits));
}

inline BoundParams bound_params(const RunConfig& c, const ResolvedRun& r) {
  BoundParams bp;
  bp.L = r.L;
  bp.mu = std::min(c.training.mu, r.L);
  bp.G = c.scmr.G;
  bp.Gamma = r.gamma_estimate.value_or(c.scmr.Gamma.value_or(0.0));
  bp.E = c.training.E;
  bp.K = r.K;
  bp.R = c.training.R;
  bp.rho = c.scmr.rho;
  bp.N = r.N;
  bp.U = r.U;
  bp.init_gap = c.scmr.init_gap;
  if (c.scmr.sigma > 0.0)
    for (int n : r.N) bp.sigma.emplace_back(static_cast<std::size_t>(n), c.scmr.sigma);
  return bp;
}

inline ResolvedRun resolve(const RunConfig& c, const FlProblem& p, const Dataset& train, const RoundTimer& timer,
                           std::uint64_t bits) {
  ResolvedRun r;
  r.M = p.num_areas();
  for (const auto& ids : p.partition.area_clients) {
    const int n = static_cast<int>(ids.size());
    r.N.push_back(n);
    r.U.push_back(std::clamp(static_cast<int>(std::lround(c.training.participation * n)), 1, n));
  }
  r.L = c.training.smoothness.value_or(p.model->smoothness_bound(train));
  r.model_bits = bits;
  {
    const auto& ids = p.partition.area_clients[0];
    const std::vector<std::size_t> first(ids.begin(), ids.begin() + r.U[0]);
    r.nominal_round_s = timer.round_latency(0, first);
  }
  const ConstellationGeometry g = make_geometry(c.geometry);
  r.serve_duration_s = serve_duration(g);
  if (c.fedmeld.K) {
    r.K = *c.fedmeld.K;
  } else {
    const auto k = rounds_per_serve(r.serve_duration_s, r.nominal_round_s);
    r.K = k.K;
    r.K_clamped = k.clamped;
  }
  if (r.M >= 2) {
    g.validate();
    if (c.timing.use_fly_time) r.fly_s = fly_times(g);
    r.max_fly_s = *std::max_element(r.fly_s.begin(), r.fly_s.end());
  }
  if (r.fly_s.empty()) r.max_fly_s = r.nominal_round_s;

  const bool need_delta = !c.fedmeld.delta && (c.scheme == "fedmeld" || !c.baseline.period_rounds);
  const bool need_alpha = c.scheme == "fedmeld" && !c.fedmeld.alpha;
  if (need_alpha && !c.scmr.Gamma && p.model->convex())
    r.gamma_estimate = estimate_gamma_noniid(p.partition, *p.model).gamma;
  const BoundParams bp = bound_params(c, r);
  if (need_delta) {
    r.delta = optimal_delta(c.training.R, c.training.E, c.scmr.T_max_s, r.max_fly_s, r.K);
  } else {
    r.delta = c.fedmeld.delta.value_or(1);
  }
  if (c.scheme == "fedmeld") {
    if (need_alpha) {
      ScmrReport rep;
      if (!c.fedmeld.delta) {
        rep = solve_scmr(bp, c.scmr.T_max_s, r.max_fly_s);
      } else {
        rep.delta_star = r.delta;
        rep.delta_real = static_cast<double>(r.delta);
        rep.zeta = zetas(bp);
        rep.alpha = optimal_alpha(r.delta, bp);
        rep.feasible = rep.alpha.feasible;
        rep.diagnostic = rep.alpha.diagnostic;
        if (rep.feasible) {
          const Kappas k = kappas(rep.alpha.alpha_star, r.delta, bp.K, bp.E, bp.G, bp.rho);
          rep.kappa1 = k.k1;
          rep.kappa2 = k.k2;
          rep.bound_value = bound(r.delta, rep.alpha.alpha_star, bp);
        }
      }
      r.alpha = rep.alpha.alpha_star;
      r.scmr = rep;
    } else {
      r.alpha = *c.fedmeld.alpha;
    }
  }
  r.period_rounds = c.baseline.period_rounds.value_or(r.K + r.delta);
  if (c.scheme == "hfl" && r.M >= 1)
    r.hfl_stall_s = hfl_contact_delay(g, c.baseline.ground_stations_rad, c.baseline.ground_delay_s);
  return r;
}

inline nlohmann::json to_json(const ResolvedRun& r) {
  nlohmann::json j;
  j["M"] = r.M;
  j["N"] = r.N;
  j["U"] = r.U;
  j["L"] = r.L;
  j["model_bits"] = r.model_bits;
  j["nominal_round_s"] = r.nominal_round_s;
  j["serve_duration_s"] = r.serve_duration_s;
  j["fly_s"] = r.fly_s;
  j["max_fly_s"] = r.max_fly_s;
  j["K"] = r.K;
  j["K_clamped"] = r.K_clamped;
  j["delta"] = r.delta;
  j["alpha"] = r.alpha;
  j["period_rounds"] = r.period_rounds;
  j["hfl_stall_s"] = r.hfl_stall_s;
  j["gamma_estimate"] = r.gamma_estimate ? nlohmann::json(*r.gamma_estimate) : nlohmann::json();
  return j;
}

struct RunOutcome {
  std::uint64_t seed = 0;
  ResolvedRun resolved;
  RunResult result;
  CostReport cost;  // per exchange round, with cumulative tallies
  std::string csv_path;
  std::string report_path;
};

inline RunResult execute(const RunConfig& c, const FlProblem& p, const ResolvedRun& r, const RoundTimer& timer,
                         std::uint64_t seed) {
  TrainingParams tp;
  tp.E = c.training.E;
  tp.batch_size = c.training.batch_size;
  tp.R = c.training.R;
  tp.lr = LrSchedule{std::min(c.training.mu, r.L), r.L, c.training.E};
  tp.participants_per_area = r.U;
  tp.seed = seed;
  tp.model_bits = r.model_bits;
  RunOptions opt;
  opt.eval_every = c.training.eval_every;
  opt.time_budget_s = c.training.time_budget_s;

  BaselineParams bp;
  bp.period_rounds = r.period_rounds;
  bp.hfl_stall_s = r.hfl_stall_s;
  bp.isl_rate_bps = c.baseline.isl_rate_bps;
  if (c.scheme == "fedmeld") {
    FedMeldParams fm;
    fm.K = r.K;
    fm.delta = r.delta;
    fm.alpha = r.alpha;
    fm.fly_s = r.fly_s;
    return run_fedmeld(p, tp, fm, timer, opt);
  }
  if (c.scheme == "hfl") return run_hfl(p, tp, bp, timer, opt);
  if (c.scheme == "pfl") return run_pfl(p, tp, bp, timer, opt);
  if (c.scheme == "ring") return run_ring_allreduce(p, tp, bp, timer, opt);
  return run_area_fedavg(p, tp, timer, opt);
}

inline std::string run_stem(const RunConfig& c, std::uint64_t seed) { return c.name + "_s" + std::to_string(seed); }

/// Runs one seed and writes <out>/<name>_s<seed>.csv and .json.
inline RunOutcome run_one(const RunConfig& c, std::uint64_t seed, const std::string& out_dir) {
  BuiltProblem b = build_problem(c, seed);
  const std::uint64_t bits = c.timing.model_bits.value_or(32ULL * b.problem.model->dim());
  const auto timer = make_timer(c, b.problem, bits);
  RunOutcome o;
  o.seed = seed;
  o.resolved = resolve(c, b.problem, b.train, *timer, bits);
  o.result = execute(c, b.problem, o.resolved, *timer, seed);

  std::uint64_t u_total = 0;
  for (int u : o.resolved.U) u_total += static_cast<std::uint64_t>(u);
  const Scheme s = c.scheme == "area_fedavg" ? Scheme::FedMeld : parse_scheme(c.scheme);
  o.cost = comm_cost(s, u_total, o.resolved.M, bits);
  o.cost.rounds = static_cast<std::uint64_t>(o.result.rounds_completed);
  o.cost.exchange_rounds = static_cast<std::uint64_t>(o.result.exchange_rounds);
  o.cost.cumulative_bits = o.result.traffic_bits;

  std::filesystem::create_directories(out_dir);
  const std::string stem = (std::filesystem::path(out_dir) / run_stem(c, seed)).string();
  o.csv_path = stem + ".csv";
  o.report_path = stem + ".json";
  write_metrics_csv(o.csv_path, o.result.records);

  nlohmann::json rep;
  rep["name"] = c.name;
  rep["scheme"] = c.scheme;
  rep["seed"] = seed;
  rep["resolved"] = to_json(o.resolved);
  rep["scmr"] = o.resolved.scmr ? to_json(*o.resolved.scmr) : nlohmann::json();
  rep["cost"] = {{"scheme", c.scheme},
                 {"traffic_bits_per_exchange_round", o.cost.traffic_bits},
                 {"link_count_min", o.cost.link_count_min},
                 {"link_count_max", o.cost.link_count_max},
                 {"rounds", o.cost.rounds},
                 {"exchange_rounds", o.cost.exchange_rounds},
                 {"cumulative_bits", o.cost.cumulative_bits}};
  const auto& last = o.result.records.empty() ? MetricsRecord{} : o.result.records.back();
  rep["final"] = {{"k", last.k},
                  {"t_sim_s", o.result.time_s},
                  {"loss_global", format_double(last.loss_global)},
                  {"acc_test", format_double(last.acc_test)},
                  {"area_loss", last.area_loss},
                  {"traffic_bits", o.result.traffic_bits}};
  std::ofstream(o.report_path) << rep.dump(2) << '\n';
  return o;
}

struct SweepRow {
  double value = 0.0;
  RunOutcome outcome;
};

/// Runs every seed, or every (sweep value, seed) pair. Sweeps also write
/// <out>/<name>_sweep.csv with one row per pair.
inline std::vector<SweepRow> run_experiment(const RunConfig& c, const std::string& out_dir) {
  std::vector<SweepRow> rows;
  if (!c.sweep) {
    for (auto seed : c.seeds) rows.push_back({0.0, run_one(c, seed, out_dir)});
    return rows;
  }
  const std::string field = c.sweep->parameter.substr(c.sweep->parameter.rfind('.') + 1);
  for (double v : c.sweep->values) {
    RunConfig sub = c;
    sub.sweep.reset();
    set_numeric(sub, c.sweep->parameter, v);
    sub.name = c.name + "_" + field + "-" + format_double(v);
    for (auto seed : c.seeds) rows.push_back({v, run_one(sub, seed, out_dir)});
  }
  std::ofstream out((std::filesystem::path(out_dir) / (c.name + "_sweep.csv")).string());
  out << "value,seed,serve_duration_s,K,delta,alpha,t_sim_s,loss_global,acc_test,traffic_bits\n";
  for (const auto& r : rows) {
    const auto& o = r.outcome;
    const auto& last = o.result.records.empty() ? MetricsRecord{} : o.result.records.back();
    out << format_double(r.value) << ',' << o.seed << ',' << format_double(o.resolved.serve_duration_s) << ','
        << o.resolved.K << ',' << o.resolved.delta << ',' << format_double(o.resolved.alpha) << ','
        << format_double(o.result.time_s) << ',' << format_double(last.loss_global) << ','
        << format_double(last.acc_test) << ',' << o.result.traffic_bits << '\n';
  }
  return rows;
}

/// SC-MR solve for the config's scenario without training.
inline std::pair<ResolvedRun, ScmrReport> solve_config(const RunConfig& c, std::uint64_t seed) {
  RunConfig fm = c;
  fm.scheme = "fedmeld";
  fm.fedmeld.alpha.reset();
  BuiltProblem b = build_problem(fm, seed);
  const std::uint64_t bits = fm.timing.model_bits.value_or(32ULL * b.problem.model->dim());
  const auto timer = make_timer(fm, b.problem, bits);
  ResolvedRun r = resolve(fm, b.problem, b.train, *timer, bits);
  return {r, *r.scmr};
}

}  // namespace fedmeld::harness
