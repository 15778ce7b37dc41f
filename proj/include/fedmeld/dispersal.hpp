// FedMeld protocol: SCF satellites carry an area's aggregate to the next area
// and blend it in with ratio alpha once per K + delta rounds.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fedmeld/errors.hpp"
#include "fedmeld/model_vector.hpp"
#include "fedmeld/schedule.hpp"
#include "fedmeld/simulation.hpp"

namespace fedmeld {

/// (1 - alpha a_t) v_bar + alpha a_t w_hist, computed as v + alpha(w - v) so
/// that a zero mixing weight returns v_bar bit for bit.
inline ModelVector mix_models(const ModelVector& v_bar, const ModelVector& w_hist, double alpha, bool a_t) {
  if (v_bar.dim() != w_hist.dim()) throw InvalidArgument("mix_models: dimension mismatch");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("mix_models: alpha must be in [0, 1)");
  const double w = a_t ? alpha : 0.0;
  if (w == 0.0) return v_bar;
  ModelVector out(v_bar.dim());
  for (std::size_t i = 0; i < v_bar.dim(); ++i) out[i] = v_bar[i] + w * (w_hist[i] - v_bar[i]);
  return out;
}

struct FedMeldParams {
  int K = 1;
  int delta = 1;
  double alpha = 0.0;
  /// fly_s[i] is the SCF travel time from area i to area i+1. Empty disables
  /// idle insertion: the mix round then follows the previous round directly.
  std::vector<double> fly_s;
};

namespace detail {

// Sync aggregates per area keyed by step, pruned to the mixing depth.
class AggregateHistory {
 public:
  AggregateHistory(std::size_t areas, long depth) : hist_(areas), depth_(depth) {}

  void record(std::size_t area, long step, const ModelVector& w) {
    auto& h = hist_[area];
    h.emplace_back(step, w);
    while (!h.empty() && h.front().first < step - depth_) h.pop_front();
  }

  const ModelVector& at(std::size_t area, long step) const {
    for (const auto& [s, w] : hist_[area])
      if (s == step) return w;
    throw NumericError("history: no aggregate for area " + std::to_string(area) + " at step " + std::to_string(step));
  }

  std::size_t size(std::size_t area) const { return hist_[area].size(); }

 private:
  std::vector<std::deque<std::pair<long, ModelVector>>> hist_;
  long depth_;
};

}  // namespace detail

/// Runs Algorithm-1 style FedMeld over the engine's areas. Areas advance in
/// lockstep: a round lasts as long as the slowest area. The mix round of area
/// i completes when the SCF from area i-1 lands, i.e. fly_s[i-1] after it
/// left; the clock then moves to the latest landing.
inline RunResult run_fedmeld(const FlProblem& problem, const TrainingParams& params, const FedMeldParams& fm,
                             const RoundTimer& timer, const RunOptions& opt = {}) {
  FederatedEngine engine(problem, params);
  const std::size_t m = engine.num_areas();
  const MixSchedule sched = build_schedule(params.E, fm.K, fm.delta, params.R, static_cast<int>(m));
  if (!(fm.alpha >= 0.0 && fm.alpha < 1.0)) throw InvalidConfig("fedmeld: alpha must be in [0, 1)");
  if (!fm.fly_s.empty() && fm.fly_s.size() != m) throw InvalidConfig("fedmeld: one fly time per area is required");

  RunResult res;
  res.scheme = "fedmeld";
  const long depth = static_cast<long>(fm.delta) * params.E;
  detail::AggregateHistory history(m, depth);
  for (std::size_t a = 0; a < m; ++a) history.record(a, 0, engine.area_models()[a]);

  const std::uint64_t q = engine.model_bits();
  double t = 0.0;
  double departed_at = 0.0;
  double since_departure = 0.0;
  const long rounds = sched.num_rounds;
  for (long k = 1; k <= rounds; ++k) {
    if (opt.time_budget_s && t >= *opt.time_budget_s) break;
    const long step = k * params.E;
    const RoundPhase phase = sched.phase_of_round(k);

    std::vector<ModelVector> v(m);
    double round_time = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      auto r = engine.train_round(a, k);
      round_time = std::max(round_time, timer.round_latency(a, r.participants));
      res.traffic_bits += 2ULL * r.participants.size() * q;
      res.participant_rounds += r.participants.size();
      v[a] = std::move(r.v_bar);
    }

    std::string event;
    if (phase == RoundPhase::Mix) {
      const long operand = sched.operand_step(step);
      auto& areas = engine.area_models();
      for (std::size_t a = 0; a < m; ++a) {
        const std::size_t src = (a + m - 1) % m;
        areas[a] = mix_models(v[a], history.at(src, operand), fm.alpha, true);
        res.mixes.push_back({step, a, src, operand});
      }
      const double rounds_s = since_departure + round_time;
      if (fm.fly_s.empty()) {
        t += round_time;
      } else {
        double latest = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
          const double fly = fm.fly_s[(a + m - 1) % m];
          const double idle = fly - rounds_s;
          if (idle < -1e-9)
            throw InfeasibleSchedule("fedmeld: delta rounds take " + std::to_string(rounds_s) +
                                     " s but the SCF flight to area " + std::to_string(a) + " takes " +
                                     std::to_string(fly) + " s");
          res.flights.push_back({step, a, std::max(idle, 0.0), rounds_s, fly});
          latest = std::max(latest, fly);
        }
        t = departed_at + std::max(latest, rounds_s);
      }
      ++res.exchange_rounds;
      event = "mix";
    } else {
      engine.area_models() = std::move(v);
      t += round_time;
      if (sched.is_departure_round(k)) {
        departed_at = t;
        since_departure = 0.0;
        event = "handover";
      } else if (phase == RoundPhase::NonScf) {
        since_departure += round_time;
      }
    }
    for (std::size_t a = 0; a < m; ++a) history.record(a, step, engine.area_models()[a]);
    finish_round(engine, res, opt, k, rounds, t, event);
  }
  finalize(engine, res, opt, t);
  return res;
}

/// Independent per-area FedAvg with no cross-area exchange.
inline RunResult run_area_fedavg(const FlProblem& problem, const TrainingParams& params, const RoundTimer& timer,
                                 const RunOptions& opt = {}) {
  FederatedEngine engine(problem, params);
  const std::size_t m = engine.num_areas();
  RunResult res;
  res.scheme = "area_fedavg";
  const std::uint64_t q = engine.model_bits();
  double t = 0.0;
  const long rounds = engine.num_rounds();
  for (long k = 1; k <= rounds; ++k) {
    if (opt.time_budget_s && t >= *opt.time_budget_s) break;
    double round_time = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      auto r = engine.train_round(a, k);
      round_time = std::max(round_time, timer.round_latency(a, r.participants));
      res.traffic_bits += 2ULL * r.participants.size() * q;
      res.participant_rounds += r.participants.size();
      engine.area_models()[a] = std::move(r.v_bar);
    }
    t += round_time;
    finish_round(engine, res, opt, k, rounds, t, "");
  }
  finalize(engine, res, opt, t);
  return res;
}

/// Linear weight of every area's initial aggregate in each area's aggregate
/// after the first `steps` steps, with local training switched off.
inline std::vector<std::vector<double>> influence_matrix(const MixSchedule& sched, double alpha, long steps) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("influence_matrix: alpha must be in (0, 1)");
  const std::size_t m = static_cast<std::size_t>(sched.M);
  using Matrix = std::vector<std::vector<double>>;
  Matrix cur(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) cur[i][i] = 1.0;
  std::map<long, Matrix> hist{{0, cur}};
  const long last = std::min(steps / sched.E, sched.num_rounds);
  for (long k = 1; k <= last; ++k) {
    const long step = k * sched.E;
    if (sched.phase_of_round(k) == RoundPhase::Mix) {
      const Matrix& old = hist.at(sched.operand_step(step));
      Matrix next = cur;
      for (std::size_t a = 0; a < m; ++a) {
        const std::size_t src = (a + m - 1) % m;
        for (std::size_t s = 0; s < m; ++s) next[a][s] = (1.0 - alpha) * cur[a][s] + alpha * old[src][s];
      }
      cur = std::move(next);
    }
    hist[step] = cur;
    hist.erase(hist.begin(), hist.lower_bound(step - static_cast<long>(sched.delta) * sched.E));
  }
  return cur;
}

}  // namespace fedmeld
