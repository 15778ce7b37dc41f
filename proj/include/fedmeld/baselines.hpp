// Reference schemes: ground-station HFL, neighbour-exchange PFL and Ring
// Allreduce, plus the per-round traffic and link accounting.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fedmeld/errors.hpp"
#include "fedmeld/geometry.hpp"
#include "fedmeld/model_vector.hpp"
#include "fedmeld/simulation.hpp"
#include "fedmeld/training.hpp"

namespace fedmeld {

enum class Scheme { FedMeld, Hfl, Pfl, Ring };

inline Scheme parse_scheme(std::string_view s) {
  if (s == "fedmeld") return Scheme::FedMeld;
  if (s == "hfl") return Scheme::Hfl;
  if (s == "pfl") return Scheme::Pfl;
  if (s == "ring") return Scheme::Ring;
  throw InvalidArgument("unknown scheme '" + std::string(s) + "'");
}

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::FedMeld: return "fedmeld";
    case Scheme::Hfl: return "hfl";
    case Scheme::Pfl: return "pfl";
    case Scheme::Ring: return "ring";
  }
  return "?";
}

struct LinkWeights {
  std::uint64_t u2s = 1;
  std::uint64_t s2g = 1;
  std::uint64_t isl = 1;
};

/// Traffic and established links for one exchange round with U participating
/// clients over M areas and q-bit models.
struct CostReport {
  Scheme scheme = Scheme::FedMeld;
  std::uint64_t traffic_bits = 0;
  std::uint64_t link_count_min = 0;
  std::uint64_t link_count_max = 0;
  std::uint64_t rounds = 0;  // filled by run accounting
  std::uint64_t exchange_rounds = 0;
  std::uint64_t cumulative_bits = 0;
};

inline CostReport comm_cost(Scheme s, std::uint64_t U, std::uint64_t M, std::uint64_t q, LinkWeights l = {}) {
  CostReport c;
  c.scheme = s;
  switch (s) {
    case Scheme::Hfl:
      c.traffic_bits = 2 * (U + M) * q;
      c.link_count_min = c.link_count_max = 2 * (U * l.u2s + M * l.s2g);
      break;
    case Scheme::Pfl:
      c.traffic_bits = 2 * (U + 2 * M) * q;
      c.link_count_min = 2 * (U * l.u2s + 2 * M * l.isl);
      c.link_count_max = 2 * (U * l.u2s + 4 * M * l.s2g);
      break;
    case Scheme::Ring:
      c.traffic_bits = 2 * (U + (M - 1)) * q;
      c.link_count_min = 2 * (U * l.u2s + M * (M - 1) * l.isl);
      c.link_count_max = 2 * (U * l.u2s + 2 * M * (M - 1) * l.s2g);
      break;
    case Scheme::FedMeld:
      c.traffic_bits = 2 * U * q;
      c.link_count_min = c.link_count_max = 2 * U * l.u2s;
      break;
  }
  return c;
}

inline CostReport comm_cost(std::string_view scheme, std::uint64_t U, std::uint64_t M, std::uint64_t q,
                            LinkWeights l = {}) {
  return comm_cost(parse_scheme(scheme), U, M, q, l);
}

/// Reduce-scatter then allgather over a ring of M satellites, one chunk per
/// hop. Chunks are contiguous index ranges [c*dim/chunks, (c+1)*dim/chunks),
/// so a dimension not divisible by the chunk count just gives uneven chunks.
/// Every output is a copy of the same reduced vector.
inline std::vector<ModelVector> ring_allreduce_exchange(const std::vector<ModelVector>& models,
                                                        std::size_t chunks = 0) {
  const std::size_t m = models.size();
  if (m == 0) throw InvalidArgument("ring_allreduce: no models");
  if (m == 1) return models;
  const std::size_t dim = models.front().dim();
  for (const auto& w : models)
    if (w.dim() != dim) throw InvalidArgument("ring_allreduce: dimension mismatch");
  if (chunks == 0) chunks = m;
  auto begin = [&](std::size_t c) { return c * dim / chunks; };

  // Reduce-scatter: after M-1 hops, the partial sum of chunk c held by
  // satellite (c + M - 1) mod M covers every satellite, accumulated in ring
  // order starting at satellite c mod M.
  ModelVector reduced(dim);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t start = c % m;
    for (std::size_t d = begin(c); d < begin(c + 1); ++d) {
      double s = models[start][d];
      for (std::size_t h = 1; h < m; ++h) s += models[(start + h) % m][d];
      reduced[d] = s / static_cast<double>(m);
    }
  }
  // Allgather: the finished chunks travel another M-1 hops unchanged.
  return std::vector<ModelVector>(m, reduced);
}

/// Uniform average of each area with its ring neighbours (the distinct members
/// of {i-1, i, i+1}).
inline std::vector<ModelVector> neighbour_average(const std::vector<ModelVector>& models) {
  const std::size_t m = models.size();
  std::vector<ModelVector> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::set<std::size_t> ids{(i + m - 1) % m, i, (i + 1) % m};
    std::vector<ModelVector> group;
    for (std::size_t j : ids) group.push_back(models[j]);
    out[i] = fedavg_uniform(group);
  }
  return out;
}

/// Ground-station stall for one HFL sync: every area's satellite flies on to
/// the next station to upload, then the global model is carried from the
/// station preceding each area back to it. Stations sit at fixed angles on
/// the ground track.
inline double hfl_contact_delay(const ConstellationGeometry& g, const std::vector<double>& station_angles_rad,
                                double ground_delay_s = 0.0) {
  if (station_angles_rad.empty()) throw InvalidConfig("hfl: at least one ground station is required");
  const double two_pi = 2.0 * std::numbers::pi;
  const double omega = two_pi / orbital_period(g);
  auto wrap = [&](double a) {
    a = std::fmod(a, two_pi);
    return a < 0.0 ? a + two_pi : a;
  };
  double up = 0.0;
  double down = 0.0;
  for (double area : g.area_angles_rad) {
    double to_station = two_pi;
    double from_station = two_pi;
    for (double st : station_angles_rad) {
      to_station = std::min(to_station, wrap(st - area));
      from_station = std::min(from_station, wrap(area - st));
    }
    up = std::max(up, to_station / omega);
    down = std::max(down, from_station / omega);
  }
  return up + ground_delay_s + down;
}

struct BaselineParams {
  int period_rounds = 1;  // K + delta
  LinkWeights links;
  double hfl_stall_s = 0.0;    // per sync, usually from hfl_contact_delay
  double isl_rate_bps = 1e9;   // PFL and Ring exchange hops
};

namespace detail {

template <typename Exchange>
RunResult run_periodic(const FlProblem& problem, const TrainingParams& params, const BaselineParams& bp,
                       const RoundTimer& timer, const RunOptions& opt, Scheme scheme, double exchange_time_s,
                       Exchange&& exchange) {
  if (bp.period_rounds < 1) throw InvalidConfig("baseline: period_rounds must be >= 1");
  FederatedEngine engine(problem, params);
  const std::size_t m = engine.num_areas();
  const std::uint64_t q = engine.model_bits();
  RunResult res;
  res.scheme = to_string(scheme);
  double t = 0.0;
  const long rounds = engine.num_rounds();
  for (long k = 1; k <= rounds; ++k) {
    if (opt.time_budget_s && t >= *opt.time_budget_s) break;
    double round_time = 0.0;
    std::uint64_t u = 0;
    for (std::size_t a = 0; a < m; ++a) {
      auto r = engine.train_round(a, k);
      round_time = std::max(round_time, timer.round_latency(a, r.participants));
      u += r.participants.size();
      engine.area_models()[a] = std::move(r.v_bar);
    }
    res.participant_rounds += u;
    t += round_time;
    std::string event;
    if (k % bp.period_rounds == 0) {
      engine.area_models() = exchange(engine.area_models());
      t += exchange_time_s;
      res.traffic_bits += comm_cost(scheme, u, m, q, bp.links).traffic_bits;
      ++res.exchange_rounds;
      event = "exchange";
    } else {
      res.traffic_bits += comm_cost(Scheme::FedMeld, u, m, q).traffic_bits;
    }
    finish_round(engine, res, opt, k, rounds, t, event);
  }
  finalize(engine, res, opt, t);
  return res;
}

}  // namespace detail

/// Per-area FedAvg; every period the area models are averaged globally via
/// ground stations, stalling all areas for hfl_stall_s.
inline RunResult run_hfl(const FlProblem& problem, const TrainingParams& params, const BaselineParams& bp,
                         const RoundTimer& timer, const RunOptions& opt = {}) {
  return detail::run_periodic(problem, params, bp, timer, opt, Scheme::Hfl, bp.hfl_stall_s,
                              [](const std::vector<ModelVector>& w) {
                                return std::vector<ModelVector>(w.size(), fedavg_uniform(w));
                              });
}

/// Per-area FedAvg with a neighbour exchange over ISLs every period.
inline RunResult run_pfl(const FlProblem& problem, const TrainingParams& params, const BaselineParams& bp,
                         const RoundTimer& timer, const RunOptions& opt = {}) {
  const double hop = static_cast<double>(params.model_bits > 0 ? params.model_bits : 32ULL * problem.model->dim()) /
                     bp.isl_rate_bps;
  return detail::run_periodic(problem, params, bp, timer, opt, Scheme::Pfl, problem.num_areas() > 1 ? hop : 0.0,
                              [](const std::vector<ModelVector>& w) { return neighbour_average(w); });
}

/// Per-area FedAvg with a Ring Allreduce every period; the collective costs
/// 2(M-1) hops of q/M bits.
inline RunResult run_ring_allreduce(const FlProblem& problem, const TrainingParams& params, const BaselineParams& bp,
                                    const RoundTimer& timer, const RunOptions& opt = {}) {
  const double m = static_cast<double>(problem.num_areas());
  const double q = static_cast<double>(params.model_bits > 0 ? params.model_bits : 32ULL * problem.model->dim());
  const double time = 2.0 * (m - 1.0) * (q / m) / bp.isl_rate_bps;
  return detail::run_periodic(problem, params, bp, timer, opt, Scheme::Ring, time,
                              [](const std::vector<ModelVector>& w) { return ring_allreduce_exchange(w); });
}

}  // namespace fedmeld
