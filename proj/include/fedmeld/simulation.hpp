// Shared machinery for all training schemes: per-area client rounds,
// round timing and metrics.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedmeld/errors.hpp"
#include "fedmeld/linkmodel.hpp"
#include "fedmeld/model_vector.hpp"
#include "fedmeld/models.hpp"
#include "fedmeld/partition.hpp"
#include "fedmeld/rng.hpp"
#include "fedmeld/training.hpp"

namespace fedmeld {

struct FlProblem {
  std::shared_ptr<const Model> model;
  Partition partition;
  Dataset test;  // may be empty (accuracy is then reported as NaN)

  std::size_t num_areas() const { return partition.num_areas(); }
};

struct TrainingParams {
  int E = 5;
  std::size_t batch_size = 64;
  long R = 0;
  LrSchedule lr;
  std::vector<int> participants_per_area;  // U_i; empty means full participation
  std::uint64_t seed = 1;
  std::optional<ModelVector> init;  // defaults to model.initial_model(seeded "init" stream)
  std::uint64_t model_bits = 0;     // q; 0 means 32 bits per parameter
};

/// Latency of one global round of one area for a given participant set.
class RoundTimer {
 public:
  virtual ~RoundTimer() = default;
  virtual double round_latency(std::size_t area, std::span<const std::size_t> participants) const = 0;
};

class ConstantRoundTimer final : public RoundTimer {
 public:
  explicit ConstantRoundTimer(double seconds) : seconds_(seconds) {}
  double round_latency(std::size_t, std::span<const std::size_t>) const override { return seconds_; }

 private:
  double seconds_;
};

/// Round latency from the compute profile and link budget; every participant
/// of area a sits at slant range distance_m[a].
class LinkRoundTimer final : public RoundTimer {
 public:
  LinkRoundTimer(ComputeProfile compute, LinkBudget link, std::vector<double> area_distance_m, double model_bits)
      : compute_(std::move(compute)), link_(link), distance_(std::move(area_distance_m)), bits_(model_bits) {}

  double round_latency(std::size_t area, std::span<const std::size_t> participants) const override {
    const std::vector<double> d(participants.size(), distance_.at(area));
    return fedmeld::round_latency(compute_, link_, participants, d, bits_);
  }

 private:
  ComputeProfile compute_;
  LinkBudget link_;
  std::vector<double> distance_;
  double bits_;
};

struct MetricsRecord {
  long k = 0;      // global round
  long step = 0;   // kE
  double t_sim_s = 0.0;
  double loss_global = 0.0;
  double acc_test = 0.0;
  std::vector<double> area_loss;
  std::uint64_t traffic_bits = 0;
  std::string event;
};

struct MixEvent {
  long step = 0;
  std::size_t area = 0;
  std::size_t source_area = 0;
  long operand_step = 0;  // step stamp of the carried aggregate
};

/// Timing of one SCF flight as seen by the receiving area.
struct FlightCheck {
  long step = 0;
  std::size_t area = 0;
  double idle_s = 0.0;
  double rounds_s = 0.0;  // latency of the delta rounds since the SCF left
  double fly_s = 0.0;
};

struct RunOptions {
  int eval_every = 1;
  std::optional<double> time_budget_s;  // stop before starting a round at or past this time
  bool evaluate = true;
  bool keep_trajectory = false;  // store area models after every round
};

struct RunResult {
  std::string scheme;
  std::vector<MetricsRecord> records;
  std::vector<ModelVector> area_models;
  ModelVector global_model;
  std::vector<MixEvent> mixes;
  std::vector<FlightCheck> flights;
  std::vector<std::vector<ModelVector>> trajectory;
  double time_s = 0.0;
  std::uint64_t traffic_bits = 0;
  long rounds_completed = 0;
  long exchange_rounds = 0;
  std::uint64_t participant_rounds = 0;  // sum over rounds of participating clients
};

/// Owns the per-client batch streams and per-area models of one run. Client
/// selection for (area, round) and batching for each client come from
/// independent seeded streams, so every scheme sees identical local work for
/// identical starting models.
class FederatedEngine {
 public:
  FederatedEngine(const FlProblem& problem, const TrainingParams& params) : problem_(problem), params_(params) {
    if (!problem.model) throw InvalidConfig("engine: no model");
    params.lr.validate();
    if (params.E < 1) throw InvalidConfig("engine: E must be >= 1");
    if (params.R < params.E) throw InvalidConfig("engine: R must cover at least one round");
    const std::size_t m = problem.num_areas();
    if (m == 0) throw InvalidConfig("engine: no areas");
    participants_ = params.participants_per_area;
    if (participants_.empty())
      for (const auto& ids : problem.partition.area_clients) participants_.push_back(static_cast<int>(ids.size()));
    if (participants_.size() != m) throw InvalidConfig("engine: one participant count per area is required");
    for (std::size_t a = 0; a < m; ++a)
      if (participants_[a] < 1 || participants_[a] > static_cast<int>(problem.partition.area_clients[a].size()))
        throw InvalidConfig("engine: U_i must be in [1, N_i]");
    for (std::size_t c = 0; c < problem.partition.num_clients(); ++c) {
      if (problem.partition.clients[c].empty()) throw InvalidConfig("engine: client without data");
      streams_.emplace_back(problem.partition.clients[c].size(), derive_seed(params.seed, "batching", {c}));
    }
    ModelVector init;
    if (params.init) {
      init = *params.init;
    } else {
      Rng rng = make_rng(params.seed, "init");
      init = problem.model->initial_model(rng);
    }
    if (init.dim() != problem.model->dim()) throw InvalidConfig("engine: initial model has wrong dimension");
    areas_.assign(m, init);
    bits_ = params.model_bits > 0 ? params.model_bits : 32ULL * problem.model->dim();
  }

  std::size_t num_areas() const { return areas_.size(); }
  long num_rounds() const { return params_.R / params_.E; }
  std::uint64_t model_bits() const { return bits_; }
  const std::vector<int>& participants_per_area() const { return participants_; }

  std::vector<ModelVector>& area_models() { return areas_; }
  const std::vector<ModelVector>& area_models() const { return areas_; }

  struct AreaRound {
    ModelVector v_bar;
    std::vector<std::size_t> participants;
  };

  /// Global round k for area a: select U_a clients, run E local steps from
  /// the current area model with eta_{(k-1)E+1..kE}, and FedAvg the results.
  AreaRound train_round(std::size_t a, long k) {
    const auto& ids = problem_.partition.area_clients[a];
    Rng sel = make_rng(params_.seed, "selection", {a, static_cast<std::uint64_t>(k)});
    AreaRound out;
    out.participants = select_clients(ids, participants_[a], sel);
    std::vector<ModelVector> local;
    local.reserve(out.participants.size());
    const long t0 = (k - 1) * params_.E + 1;
    for (std::size_t c : out.participants)
      local.push_back(local_train(*problem_.model, areas_[a], problem_.partition.clients[c], streams_[c], params_.E,
                                  params_.lr, t0, params_.batch_size));
    out.v_bar = fedavg_uniform(local);
    if (!out.v_bar.all_finite()) throw NumericError("non-finite area aggregate in round " + std::to_string(k));
    return out;
  }

  ModelVector global_average() const { return fedavg_uniform(areas_); }

  MetricsRecord evaluate(long k, double t, std::uint64_t traffic, std::string event) const {
    MetricsRecord r;
    r.k = k;
    r.step = k * params_.E;
    r.t_sim_s = t;
    r.traffic_bits = traffic;
    r.event = std::move(event);
    const ModelVector g = global_average();
    const Model& model = *problem_.model;
    r.loss_global = global_loss(model, g, problem_.partition);
    r.acc_test = problem_.test.empty() ? std::numeric_limits<double>::quiet_NaN() : accuracy(model, g, problem_.test);
    for (std::size_t a = 0; a < areas_.size(); ++a) {
      double s = 0.0;
      const auto& ids = problem_.partition.area_clients[a];
      for (std::size_t c : ids) s += dataset_loss(model, areas_[a], problem_.partition.clients[c]);
      r.area_loss.push_back(s / static_cast<double>(ids.size()));
    }
    return r;
  }

 private:
  const FlProblem& problem_;
  const TrainingParams& params_;
  std::vector<int> participants_;
  std::vector<BatchStream> streams_;
  std::vector<ModelVector> areas_;
  std::uint64_t bits_ = 0;
};

inline std::string join_events(const std::vector<std::string>& events) {
  std::string out;
  for (const auto& e : events) {
    if (e.empty()) continue;
    if (!out.empty()) out += '|';
    out += e;
  }
  return out;
}

/// Shared end-of-round bookkeeping: optional trajectory and evaluation.
inline void finish_round(FederatedEngine& engine, RunResult& res, const RunOptions& opt, long k, long last_round,
                         double t, std::string event) {
  res.rounds_completed = k;
  res.time_s = t;
  if (opt.keep_trajectory) res.trajectory.push_back(engine.area_models());
  const bool due = opt.eval_every > 0 && (k % opt.eval_every == 0 || k == last_round);
  if (opt.evaluate && due) res.records.push_back(engine.evaluate(k, t, res.traffic_bits, std::move(event)));
}

inline void finalize(FederatedEngine& engine, RunResult& res, const RunOptions& opt, double t) {
  // Budget stops can leave the last completed round unevaluated.
  if (opt.evaluate && res.rounds_completed > 0 &&
      (res.records.empty() || res.records.back().k != res.rounds_completed))
    res.records.push_back(engine.evaluate(res.rounds_completed, t, res.traffic_bits, ""));
  res.area_models = engine.area_models();
  res.global_model = engine.global_average();
}

}  // namespace fedmeld
