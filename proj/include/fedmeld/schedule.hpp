// Mix schedule: which global rounds are served by the store-carry-forward
// (SCF) satellite, which by ordinary satellites, and where mixing happens.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fedmeld/errors.hpp"

namespace fedmeld {

enum class RoundPhase { Scf, NonScf, Mix };

inline std::string to_string(RoundPhase p) {
  switch (p) {
    case RoundPhase::Scf: return "scf";
    case RoundPhase::NonScf: return "non_scf";
    case RoundPhase::Mix: return "mix";
  }
  return "?";
}

/// Each cycle of K + delta global rounds is: K rounds with the SCF satellite,
/// delta - 1 rounds with non-SCF satellites, then one round in which the
/// arriving SCF satellite mixes the carried model. All areas follow the same
/// cadence; area i always receives area i-1's model (ring order).
struct MixSchedule {
  int E = 1;
  int K = 1;
  int delta = 1;
  long R = 0;  // total local iterations (steps)
  int M = 1;
  long num_rounds = 0;             // floor(R / E)
  std::vector<RoundPhase> phases;  // phases[k-1] for round k
  std::vector<long> sync_steps;    // kE for k = 1..num_rounds

  long cycle_rounds() const { return K + delta; }
  long cycle_len_steps() const { return static_cast<long>(K + delta) * E; }

  bool is_sync_step(long t) const { return t > 0 && t % E == 0 && t / E <= num_rounds; }

  RoundPhase phase_of_round(long k) const { return phases.at(static_cast<std::size_t>(k - 1)); }

  /// A_t: true only at the sync step of a mixing round.
  bool mix_at_step(long t) const { return is_sync_step(t) && phase_of_round(t / E) == RoundPhase::Mix; }

  /// Step whose aggregate of area i-1 is mixed into area i at mix step t.
  long operand_step(long mix_step) const { return mix_step - static_cast<long>(delta) * E; }

  /// The last SCF round of a cycle: the SCF satellite leaves after it.
  bool is_departure_round(long k) const { return (k - 1) % cycle_rounds() + 1 == K; }

  std::vector<long> mix_steps() const {
    std::vector<long> out;
    for (long t : sync_steps)
      if (mix_at_step(t)) out.push_back(t);
    return out;
  }

  /// Per area, the ordered sync steps at which its SCF satellite mixes.
  std::vector<std::vector<long>> scf_assignments() const {
    return std::vector<std::vector<long>>(static_cast<std::size_t>(M), mix_steps());
  }

  bool operator==(const MixSchedule&) const = default;
};

inline MixSchedule build_schedule(int E, int K, int delta, long R, int M) {
  if (E < 1) throw InvalidConfig("schedule: E must be >= 1");
  if (K < 1) throw InvalidConfig("schedule: K must be >= 1");
  if (delta < 1) throw InvalidConfig("schedule: delta must be >= 1");
  if (M < 1) throw InvalidConfig("schedule: M must be >= 1");
  const long cycle = static_cast<long>(K + delta) * E;
  if (R < cycle)
    throw InvalidConfig("schedule: R = " + std::to_string(R) + " does not cover one mix cycle of " +
                        std::to_string(cycle) + " steps");
  MixSchedule s;
  s.E = E;
  s.K = K;
  s.delta = delta;
  s.R = R;
  s.M = M;
  s.num_rounds = R / E;
  s.phases.reserve(static_cast<std::size_t>(s.num_rounds));
  for (long k = 1; k <= s.num_rounds; ++k) {
    const long pos = (k - 1) % (K + delta) + 1;
    s.phases.push_back(pos <= K ? RoundPhase::Scf : pos < K + delta ? RoundPhase::NonScf : RoundPhase::Mix);
    s.sync_steps.push_back(k * E);
  }
  return s;
}

}  // namespace fedmeld
