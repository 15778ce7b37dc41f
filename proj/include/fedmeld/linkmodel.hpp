// Ground-to-satellite link budget and per-round latency.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "fedmeld/errors.hpp"

namespace fedmeld {

inline constexpr double kSpeedOfLight = 299792458.0;

enum class LinkDirection { Uplink, Downlink };

struct LinkBudget {
  double p_ue_w = 1.0;
  double p_sat_w = 5.0;
  double uplink_wavelength_m = kSpeedOfLight / 14e9;
  double downlink_wavelength_m = kSpeedOfLight / 12e9;
  double w_up_hz = 5e6;    // per active client
  double w_down_hz = 5e6;
  double additional_loss_db = 5.0;
  double noise_psd_w_per_hz = 1.38e-21;
  double sat_antenna_radius_m = 0.48;
  double ue_antenna_radius_m = 0.5;
  double aperture_efficiency = 0.65;

  void validate() const {
    if (!(p_ue_w > 0 && p_sat_w > 0)) throw InvalidConfig("link: transmit powers must be > 0");
    if (!(uplink_wavelength_m > 0 && downlink_wavelength_m > 0))
      throw InvalidConfig("link: wavelengths must be > 0");
    if (!(w_up_hz > 0 && w_down_hz > 0)) throw InvalidConfig("link: bandwidths must be > 0");
    if (!(noise_psd_w_per_hz > 0)) throw InvalidConfig("link: noise_psd must be > 0");
    if (!(sat_antenna_radius_m > 0 && ue_antenna_radius_m > 0))
      throw InvalidConfig("link: antenna radii must be > 0");
    if (!(aperture_efficiency > 0 && aperture_efficiency <= 1))
      throw InvalidConfig("link: aperture_efficiency must be in (0, 1]");
    if (!std::isfinite(additional_loss_db)) throw InvalidConfig("link: additional_loss_db must be finite");
  }

  bool operator==(const LinkBudget&) const = default;
};

/// Free-space path loss as a power ratio, (lambda / (4 pi d))^2.
inline double path_loss(double wavelength_m, double distance_m) {
  if (!(wavelength_m > 0.0) || !(distance_m > 0.0))
    throw InvalidArgument("path_loss: wavelength and distance must be > 0");
  const double r = wavelength_m / (4.0 * std::numbers::pi * distance_m);
  return r * r;
}

/// Parabolic aperture gain eta * (pi D / lambda)^2 with D = 2 * radius.
inline double antenna_gain(double radius_m, double wavelength_m, double efficiency) {
  if (!(radius_m > 0.0) || !(wavelength_m > 0.0) || !(efficiency > 0.0))
    throw InvalidArgument("antenna_gain: radius, wavelength and efficiency must be > 0");
  const double r = std::numbers::pi * 2.0 * radius_m / wavelength_m;
  return efficiency * r * r;
}

inline double db_to_ratio(double db) { return std::pow(10.0, db / 10.0); }
inline double ratio_to_db(double ratio) { return 10.0 * std::log10(ratio); }

struct LinkTerms {
  double power_w, wavelength_m, bandwidth_hz;
};

inline LinkTerms link_terms(const LinkBudget& b, LinkDirection dir) {
  return dir == LinkDirection::Uplink ? LinkTerms{b.p_ue_w, b.uplink_wavelength_m, b.w_up_hz}
                                      : LinkTerms{b.p_sat_w, b.downlink_wavelength_m, b.w_down_hz};
}

/// Received SNR (linear). Both antenna gains are evaluated at the link's wavelength.
inline double link_snr(const LinkBudget& b, LinkDirection dir, double distance_m) {
  if (!(distance_m > 0.0)) throw InvalidArgument("link_snr: distance must be > 0");
  const LinkTerms t = link_terms(b, dir);
  const double g_ue = antenna_gain(b.ue_antenna_radius_m, t.wavelength_m, b.aperture_efficiency);
  const double g_sat = antenna_gain(b.sat_antenna_radius_m, t.wavelength_m, b.aperture_efficiency);
  const double extra = db_to_ratio(-b.additional_loss_db);
  return t.power_w * g_ue * g_sat * path_loss(t.wavelength_m, distance_m) * extra /
         (b.noise_psd_w_per_hz * t.bandwidth_hz);
}

/// Same SNR assembled in dB terms; kept as an independent route for unit audits.
inline double link_snr_db(const LinkBudget& b, LinkDirection dir, double distance_m) {
  const LinkTerms t = link_terms(b, dir);
  return ratio_to_db(t.power_w) +
         ratio_to_db(antenna_gain(b.ue_antenna_radius_m, t.wavelength_m, b.aperture_efficiency)) +
         ratio_to_db(antenna_gain(b.sat_antenna_radius_m, t.wavelength_m, b.aperture_efficiency)) +
         ratio_to_db(path_loss(t.wavelength_m, distance_m)) - b.additional_loss_db -
         ratio_to_db(b.noise_psd_w_per_hz) - ratio_to_db(t.bandwidth_hz);
}

/// Shannon rate in bit/s.
inline double link_rate(const LinkBudget& b, LinkDirection dir, double distance_m) {
  b.validate();
  const LinkTerms t = link_terms(b, dir);
  return t.bandwidth_hz * std::log2(1.0 + link_snr(b, dir, distance_m));
}

struct ComputeProfile {
  int local_iterations = 5;  // E
  int batch_size = 64;
  double flops_per_sample = 1e9;
  /// Per-client capability L_j [FLOP/s]; indexed by global client id.
  std::vector<double> client_flops;
  double t_agg_s = 0.0;

  void validate() const {
    if (local_iterations < 0) throw InvalidConfig("compute: E must be >= 0");
    if (batch_size < 1) throw InvalidConfig("compute: batch_size must be >= 1");
    if (!(flops_per_sample > 0)) throw InvalidConfig("compute: flops_per_sample must be > 0");
    if (!(t_agg_s >= 0)) throw InvalidConfig("compute: t_agg_s must be >= 0");
  }

  bool operator==(const ComputeProfile&) const = default;
};

inline double local_compute_latency(const ComputeProfile& p, double client_flops) {
  if (!(client_flops > 0.0)) throw InvalidConfig("local_compute_latency: client capability must be > 0");
  return static_cast<double>(p.local_iterations) * p.batch_size * p.flops_per_sample / client_flops;
}

inline double local_compute_latency(const ComputeProfile& p, std::size_t client) {
  if (client >= p.client_flops.size()) throw InvalidArgument("local_compute_latency: unknown client");
  return local_compute_latency(p, p.client_flops[client]);
}

/// Latency of one global round: slowest participant's compute + upload +
/// download, plus the server's aggregation time. The compute term already
/// includes the E local iterations, so it is counted once.
inline double round_latency(const ComputeProfile& p, const LinkBudget& b,
                            std::span<const std::size_t> participants,
                            std::span<const double> distances_m, double model_bits) {
  if (participants.empty()) throw InvalidArgument("round_latency: participant set is empty");
  if (distances_m.size() != participants.size())
    throw InvalidArgument("round_latency: one distance per participant is required");
  if (!(model_bits >= 0.0)) throw InvalidArgument("round_latency: model_bits must be >= 0");
  double worst = 0.0;
  for (std::size_t n = 0; n < participants.size(); ++n) {
    const double up = model_bits / link_rate(b, LinkDirection::Uplink, distances_m[n]);
    const double down = model_bits / link_rate(b, LinkDirection::Downlink, distances_m[n]);
    worst = std::max(worst, local_compute_latency(p, participants[n]) + up + down);
  }
  return worst + p.t_agg_s;
}

}  // namespace fedmeld
