// Constellation kinematics for a single circular orbit whose ground track
// passes over a ring of training areas.
#pragma once

#include <cmath>
#include <cstddef>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "fedmeld/errors.hpp"

namespace fedmeld {

inline constexpr double kEarthRadiusM = 6371e3;
inline constexpr double kEarthMu = 3.986e14;  // m^3/s^2

struct ConstellationGeometry {
  double altitude_m = 550e3;
  int sats_per_orbit = 66;
  /// Angular position of each area along the ground track [rad], strictly
  /// increasing in [0, 2*pi).
  std::vector<double> area_angles_rad;
  double earth_radius_m = kEarthRadiusM;
  double gravitational_parameter = kEarthMu;

  std::size_t num_areas() const { return area_angles_rad.size(); }

  /// M areas spread uniformly along the orbit, first one at angle 0.
  static ConstellationGeometry evenly_spaced(int num_areas, double altitude_m = 550e3,
                                             int sats_per_orbit = 66) {
    ConstellationGeometry g;
    g.altitude_m = altitude_m;
    g.sats_per_orbit = sats_per_orbit;
    for (int i = 0; i < num_areas; ++i)
      g.area_angles_rad.push_back(2.0 * std::numbers::pi * i / num_areas);
    return g;
  }

  void validate() const {
    if (!(altitude_m > 0.0)) throw InvalidConfig("geometry: altitude_m must be > 0");
    if (sats_per_orbit < 1) throw InvalidConfig("geometry: sats_per_orbit must be >= 1");
    if (!(earth_radius_m > 0.0) || !(gravitational_parameter > 0.0))
      throw InvalidConfig("geometry: earth_radius_m and gravitational_parameter must be > 0");
    const std::size_t m = num_areas();
    if (m < 2) throw InvalidConfig("geometry: at least two areas are required");
    if (m > static_cast<std::size_t>(sats_per_orbit))
      throw InvalidConfig("geometry: more areas than satellites per orbit");
    for (std::size_t i = 0; i < m; ++i) {
      const double a = area_angles_rad[i];
      if (!(a >= 0.0 && a < 2.0 * std::numbers::pi))
        throw InvalidConfig("geometry: area angle " + std::to_string(i) + " outside [0, 2pi)");
      if (i > 0 && !(a > area_angles_rad[i - 1]))
        throw InvalidConfig("geometry: area angles must be strictly increasing");
    }
  }

  bool operator==(const ConstellationGeometry&) const = default;
};

/// Kepler period of a circular orbit with semi-major axis `radius_m`.
inline double orbital_period_for_radius(double radius_m, double mu = kEarthMu) {
  if (!(radius_m > 0.0) || !(mu > 0.0)) throw InvalidArgument("orbital period: radius and mu must be > 0");
  return 2.0 * std::numbers::pi * std::sqrt(radius_m * radius_m * radius_m / mu);
}

inline double orbital_period(const ConstellationGeometry& g) {
  if (!(g.altitude_m > 0.0)) throw InvalidConfig("geometry: altitude_m must be > 0");
  return orbital_period_for_radius(g.earth_radius_m + g.altitude_m, g.gravitational_parameter);
}

/// Nearest-association serving window: satellites are uniformly spaced, so
/// each one covers an area for period / sats_per_orbit.
inline double serve_duration(const ConstellationGeometry& g) {
  if (g.sats_per_orbit < 1) throw InvalidConfig("geometry: sats_per_orbit must be >= 1");
  return orbital_period(g) / g.sats_per_orbit;
}

/// Time for a satellite to travel from area i to area i+1 (0-based; area
/// M-1 wraps to area 0).
inline double fly_time(const ConstellationGeometry& g, std::size_t i) {
  const std::size_t m = g.num_areas();
  if (i >= m) throw InvalidArgument("fly_time: area index out of range");
  const double two_pi = 2.0 * std::numbers::pi;
  double gap = (i + 1 < m) ? g.area_angles_rad[i + 1] - g.area_angles_rad[i]
                           : g.area_angles_rad[0] + two_pi - g.area_angles_rad[i];
  if (m == 1) gap = two_pi;
  const double omega = two_pi / orbital_period(g);
  return gap / omega;
}

inline std::vector<double> fly_times(const ConstellationGeometry& g) {
  std::vector<double> out(g.num_areas());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fly_time(g, i);
  return out;
}

struct RoundsPerServe {
  int K = 1;
  bool clamped = false;  // window shorter than one round
};

inline RoundsPerServe rounds_per_serve(double serve_duration_s, double round_latency_s) {
  if (!(round_latency_s > 0.0)) throw InvalidConfig("rounds_per_serve: round latency must be > 0");
  const double ratio = serve_duration_s / round_latency_s;
  // Guard against ratios like 0.99999999999 caused by rounding in the inputs.
  const double k = std::floor(ratio * (1.0 + 1e-12));
  if (k < 1.0) {
    std::clog << "warning: serving window " << serve_duration_s << " s is shorter than one round ("
              << round_latency_s << " s); K clamped to 1\n";
    return {1, true};
  }
  return {static_cast<int>(k), false};
}

struct ServePlan {
  double serve_duration_s = 0.0;
  /// Entry i is the flight time from area i to area i+1 (ring order).
  std::vector<double> fly_time_s;
  int K = 1;
};

inline ServePlan make_serve_plan(const ConstellationGeometry& g, double round_latency_s) {
  g.validate();
  ServePlan plan;
  plan.serve_duration_s = serve_duration(g);
  plan.fly_time_s = fly_times(g);
  plan.K = rounds_per_serve(plan.serve_duration_s, round_latency_s).K;
  return plan;
}

}  // namespace fedmeld
