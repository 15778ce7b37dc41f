// Convergence-bound calculator and the staleness-control / mixing-ratio
// (SC-MR) solver.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedmeld/bisection.hpp"
#include "fedmeld/errors.hpp"

namespace fedmeld {

/// m(alpha); +inf at alpha = 0.
inline double m_alpha(double alpha) {
  if (alpha == 0.0) return std::numeric_limits<double>::infinity();
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("m_alpha: alpha must be in (0, 1]");
  const double a2 = alpha * alpha;
  return 4.0 * (1.0 - alpha) * (2.0 * a2 - alpha + 1.0) / (alpha * (2.0 * a2 - 3.0 * alpha + 3.0));
}

/// Powers of rho that recur in the recast kappas: rho^((K+delta)/(K+1)),
/// rho^(1/(K+1)), b = rho^(1/(K+1)) - 1, and D1, D2.
struct RhoTerms {
  double pe = 0.0;
  double r1 = 0.0;
  double b = 0.0;
  double D1 = 0.0;
  double D2 = 0.0;
};

inline RhoTerms rho_terms(int delta, int K, int E, double G, double rho) {
  if (K < 1 || E < 1 || delta < 0) throw InvalidArgument("rho_terms: need K >= 1, E >= 1, delta >= 0");
  if (!(rho > 1.0)) throw InvalidArgument("rho_terms: rho must be > 1");
  RhoTerms r;
  r.pe = std::pow(rho, static_cast<double>(K + delta) / (K + 1));
  r.r1 = std::pow(rho, 1.0 / (K + 1));
  r.b = std::expm1(std::log(rho) / (K + 1));
  const double c = 4.0 * (E - 1.0) * (E - 1.0) * G * G * r.r1;
  r.D1 = c / (r.b * r.b);
  r.D2 = c / r.b;
  return r;
}

struct Kappas {
  double k1 = 0.0;
  double k2 = 0.0;
};

/// Recast kappa_1, kappa_2. kappa_1 < 1 is not implied by delta < K+2: it
/// holds only for alpha inside kappa1_valid_interval.
inline Kappas kappas(double alpha, int delta, int K, int E, double G, double rho = 1.5) {
  if (delta >= K + 2) throw ValidityError("kappas: delta must be < K + 2");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("kappas: alpha must be in [0, 1)");
  const RhoTerms r = rho_terms(delta, K, E, G, rho);
  const double om = 1.0 - alpha;
  Kappas k;
  k.k1 = r.pe * om * om + rho * alpha * alpha;
  k.k2 = r.D1 * k.k1 + r.D2 * om * om;
  return k;
}

/// Open interval of alpha on which kappa_1 < 1 (the roots of g2), if any.
inline std::optional<std::pair<double, double>> kappa1_valid_interval(int delta, int K, double rho = 1.5) {
  const double pe = std::pow(rho, static_cast<double>(K + delta) / (K + 1));
  const double disc = rho + pe * (1.0 - rho);
  if (!(disc > 0.0)) return std::nullopt;
  const double s = std::sqrt(disc);
  const double hi = (pe + s) / (pe + rho);
  const double lo = (pe - 1.0) / (pe + s);
  return std::make_pair(lo, hi);
}

struct BoundParams {
  double L = 1.0;
  double mu = 1.0;
  double G = 1.0;
  std::vector<std::vector<double>> sigma;  // sigma[i][j] for client j of area i; empty means 0
  double Gamma = 0.0;
  int E = 5;
  int K = 1;
  long R = 1000;
  double rho = 1.5;
  std::vector<int> N;  // clients per area
  std::vector<int> U;  // participants per area
  double init_gap = 1.0;

  std::size_t M() const { return N.size(); }
  double gamma() const { return std::max(8.0 * L / mu, static_cast<double>(E)) - 1.0; }
  double eta(double t) const { return 5.0 / (mu * (gamma() + t)); }

  double B() const {
    double s = 0.0;
    const double m = static_cast<double>(M());
    for (std::size_t i = 0; i < sigma.size(); ++i)
      for (double sj : sigma[i]) s += sj * sj / ((m * N[i]) * (m * N[i]));
    return s + 6.0 * L * Gamma;
  }

  /// max_i (N_i - U_i) / (M U_i (N_i - 1)); zero under full participation.
  double sampling_term() const {
    double best = 0.0;
    const double m = static_cast<double>(M());
    for (std::size_t i = 0; i < N.size(); ++i) {
      if (U[i] == N[i]) continue;
      best = std::max(best, (N[i] - U[i]) / (m * U[i] * (N[i] - 1.0)));
    }
    return best;
  }

  void validate() const {
    if (!(L > 0.0) || !(mu > 0.0) || mu > L) throw InvalidConfig("bound params: need 0 < mu <= L");
    if (!(G >= 0.0) || !(Gamma >= 0.0) || !(init_gap >= 0.0))
      throw InvalidConfig("bound params: G, Gamma and init_gap must be >= 0");
    if (E < 1 || K < 1 || R < 1) throw InvalidConfig("bound params: E, K, R must be >= 1");
    if (!(rho > 1.0)) throw InvalidConfig("bound params: rho must be > 1");
    if (N.empty() || N.size() != U.size()) throw InvalidConfig("bound params: N and U need one entry per area");
    for (std::size_t i = 0; i < N.size(); ++i)
      if (U[i] < 1 || U[i] > N[i]) throw InvalidConfig("bound params: need 1 <= U_i <= N_i");
    if (!sigma.empty()) {
      if (sigma.size() != N.size()) throw InvalidConfig("bound params: sigma needs one list per area");
      for (std::size_t i = 0; i < N.size(); ++i)
        if (sigma[i].size() != static_cast<std::size_t>(N[i]))
          throw InvalidConfig("bound params: sigma list size must equal N_i");
    }
  }

  bool operator==(const BoundParams&) const = default;
};

struct Zetas {
  double z1 = 0.0;
  double z2 = 0.0;
  double z3 = 0.0;
};

inline Zetas zetas(const BoundParams& p, double eta_R) {
  p.validate();
  const double g = p.gamma();
  const double b = std::expm1(std::log(p.rho) / (p.K + 1));
  const double s = p.sampling_term();
  Zetas z;
  z.z1 = p.L / (p.mu * (p.R + g)) * (25.0 * p.B() / (8.0 * p.mu) + p.mu * (g + 1.0) / 2.0 * p.init_gap);
  z.z2 = p.L * ((1.0 + b) / 2.0 * s + 1.0);
  z.z3 = 2.0 * p.L * (1.0 + 1.0 / b) * (p.E - 1.0) * (p.E - 1.0) * p.G * p.G * eta_R * eta_R * s;
  return z;
}

inline Zetas zetas(const BoundParams& p) { return zetas(p, p.eta(static_cast<double>(p.R))); }

/// 1/(1-alpha) - alpha + 1/2
inline double mixing_penalty(double alpha) { return 1.0 / (1.0 - alpha) - alpha + 0.5; }

namespace detail {
inline Kappas checked_kappas(int delta, double alpha, const BoundParams& p) {
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw InvalidArgument("bound: alpha must be in [0, 1/2]");
  const Kappas k = kappas(alpha, delta, p.K, p.E, p.G, p.rho);
  if (!(k.k1 < 1.0)) throw ValidityError("bound: kappa_1 = " + std::to_string(k.k1) + " >= 1");
  return k;
}
}  // namespace detail

/// Partial-participation bound, the SC-MR objective f(delta, alpha).
inline double bound(int delta, double alpha, const BoundParams& p) {
  const Kappas k = detail::checked_kappas(delta, alpha, p);
  const Zetas z = zetas(p);
  return z.z1 * mixing_penalty(alpha) + z.z2 * k.k2 / (1.0 - k.k1) + z.z3;
}

/// Full-participation bound, with the consensus term L eta_E^2 kappa_2/(1-kappa_1).
inline double full_participation_bound(int delta, double alpha, const BoundParams& p) {
  const Kappas k = detail::checked_kappas(delta, alpha, p);
  const Zetas z = zetas(p);
  const double eta_e = p.eta(static_cast<double>(p.E));
  return z.z1 * mixing_penalty(alpha) + p.L * eta_e * eta_e * k.k2 / (1.0 - k.k1);
}

/// Smallest integer delta >= 1 with (R-1) max_fly <= T_max (K+delta) E.
inline int optimal_delta(long R, int E, double T_max, double max_fly, int K) {
  if (R < 1 || E < 1 || K < 1 || !(T_max > 0.0) || !(max_fly >= 0.0))
    throw InvalidArgument("optimal_delta: inputs must be positive");
  const double need = static_cast<double>(R - 1) * max_fly;
  auto fits = [&](long d) { return need <= T_max * static_cast<double>(K + d) * E; };
  const double real = need / (E * T_max) - K;
  long d = std::max(1L, static_cast<long>(std::ceil(std::min(real, 1e9))));
  while (d > 1 && fits(d - 1)) --d;
  while (!fits(d)) ++d;
  return static_cast<int>(d);
}

/// Right-hand side of the staleness constraint at step t.
inline double staleness_rhs(double alpha, double t, double gamma) {
  const double m = m_alpha(alpha);
  const double x = t + gamma;
  return m * (x + 1.0) * (x + 1.0) / (x * x + m * (x + 1.0));
}

/// Threshold on m(alpha) that makes the staleness constraint hold at its
/// binding step t = (K+delta)E - 1.
inline double alpha_tilde_rhs(int delta, int E, int K, double gamma) {
  const double x = static_cast<double>(K + delta) * E + gamma;
  return delta * static_cast<double>(E) * (x - 1.0) * (x - 1.0) / (x * (K * static_cast<double>(E) + gamma));
}

/// Solves m(alpha) = rhs on (0, 1).
inline double alpha_for_m(double rhs) {
  if (!(rhs > 0.0)) throw InfeasibleSchedule("alpha_tilde: threshold must be > 0");
  if (std::isinf(rhs)) return 0.0;
  const auto r = bisect([&](double a) { return rhs - m_alpha(a); }, 0.0, 1.0, 1e-12, 0.0);
  return r.root;
}

inline double alpha_tilde(int delta, int E, int K, double gamma) {
  return alpha_for_m(alpha_tilde_rhs(delta, E, K, gamma));
}

/// delta E <= staleness_rhs(alpha, t, gamma) for every t in [(K+delta)E - 1, R].
/// For alpha <= 1/2 the right side is non-decreasing in t, so only the first
/// step is checked.
inline bool staleness_feasible(int delta, double alpha, int E, double gamma, long R, int K) {
  if (delta <= 0) return true;
  const long t0 = static_cast<long>(K + delta) * E - 1;
  const double lhs = static_cast<double>(delta) * E;
  if (alpha <= 0.5) return t0 > R || lhs <= staleness_rhs(alpha, static_cast<double>(t0), gamma);
  for (long t = t0; t <= R; ++t)
    if (lhs > staleness_rhs(alpha, static_cast<double>(t), gamma)) return false;
  return true;
}

inline double g1(double alpha, int delta, const BoundParams& p) {
  const RhoTerms r = rho_terms(delta, p.K, p.E, p.G, p.rho);
  const double rho = p.rho;
  return -rho * r.D2 * alpha * alpha + ((r.pe + rho) * r.D1 + (rho + 1.0) * r.D2) * alpha - (r.pe * r.D1 + r.D2);
}

/// kappa_1 - 1 as a quadratic in alpha.
inline double g2(double alpha, int delta, const BoundParams& p) {
  const double pe = std::pow(p.rho, static_cast<double>(p.K + delta) / (p.K + 1));
  return (pe + p.rho) * alpha * alpha - 2.0 * pe * alpha + pe - 1.0;
}

/// d f(delta, alpha) / d alpha.
inline double f_prime(double alpha, int delta, const BoundParams& p) {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw InvalidArgument("f_prime: alpha must be in (0, 1/2]");
  const Zetas z = zetas(p);
  const double om = 1.0 - alpha;
  const double q = g2(alpha, delta, p);
  return z.z1 * (1.0 / (om * om) - 1.0) + 2.0 * z.z2 * g1(alpha, delta, p) / (q * q);
}

struct AlphaSolution {
  bool feasible = false;
  double alpha_tilde = 0.0;
  double alpha_dot = 0.0;
  double alpha_star = 0.0;
  double f_prime_half = 0.0;
  std::optional<std::pair<double, double>> valid_interval;
  std::string diagnostic;
};

/// alpha* = min(alpha_dot, alpha_tilde), searched inside the region where
/// kappa_1 < 1. An empty feasible set falls back to alpha* = 0.
inline AlphaSolution optimal_alpha(int delta, const BoundParams& p) {
  p.validate();
  AlphaSolution s;
  s.alpha_tilde = alpha_tilde(delta, p.E, p.K, p.gamma());
  if (delta >= p.K + 2) {
    s.diagnostic = "delta* = " + std::to_string(delta) + " >= K + 2; the bound is undefined";
    return s;
  }
  s.valid_interval = kappa1_valid_interval(delta, p.K, p.rho);
  if (!s.valid_interval) {
    s.diagnostic = "kappa_1 >= 1 for every alpha";
    return s;
  }
  const double lo = s.valid_interval->first;
  const double cap = std::min(s.alpha_tilde, 0.5);
  if (cap <= lo) {
    s.diagnostic = "staleness threshold alpha~ = " + std::to_string(s.alpha_tilde) +
                   " leaves no alpha with kappa_1 < 1 (need alpha > " + std::to_string(lo) + ")";
    return s;
  }
  s.f_prime_half = f_prime(0.5, delta, p);
  if (s.f_prime_half > 0.0) {
    const double left = std::nextafter(lo, 1.0);
    s.alpha_dot = bisect([&](double a) { return f_prime(a, delta, p); }, left, 0.5, 0.0, 1e-10).root;
  } else {
    s.alpha_dot = 0.5;
  }
  s.alpha_star = std::min(s.alpha_dot, s.alpha_tilde);
  s.feasible = true;
  return s;
}

struct ScmrReport {
  int delta_star = 1;
  double delta_real = 0.0;
  AlphaSolution alpha;
  double kappa1 = std::numeric_limits<double>::quiet_NaN();
  double kappa2 = std::numeric_limits<double>::quiet_NaN();
  Zetas zeta;
  double bound_value = std::numeric_limits<double>::quiet_NaN();
  bool feasible = false;
  std::string diagnostic;
};

/// delta* from the time budget, then alpha* given delta*.
inline ScmrReport solve_scmr(const BoundParams& p, double T_max, double max_fly) {
  p.validate();
  ScmrReport r;
  r.delta_real = static_cast<double>(p.R - 1) * max_fly / (p.E * T_max) - p.K;
  r.delta_star = optimal_delta(p.R, p.E, T_max, max_fly, p.K);
  r.zeta = zetas(p);
  r.alpha = optimal_alpha(r.delta_star, p);
  r.feasible = r.alpha.feasible;
  r.diagnostic = r.alpha.diagnostic;
  if (r.feasible) {
    const Kappas k = kappas(r.alpha.alpha_star, r.delta_star, p.K, p.E, p.G, p.rho);
    r.kappa1 = k.k1;
    r.kappa2 = k.k2;
    r.bound_value = bound(r.delta_star, r.alpha.alpha_star, p);
  }
  return r;
}

namespace detail {
inline nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }
}  // namespace detail

inline nlohmann::json to_json(const ScmrReport& r) {
  using detail::finite_or_null;
  nlohmann::json j;
  j["feasible"] = r.feasible;
  j["delta_star"] = r.delta_star;
  j["delta_real"] = finite_or_null(r.delta_real);
  j["alpha_tilde"] = finite_or_null(r.alpha.alpha_tilde);
  j["alpha_dot"] = r.alpha.feasible ? finite_or_null(r.alpha.alpha_dot) : nlohmann::json();
  j["alpha_star"] = r.alpha.alpha_star;
  j["f_prime_half"] = r.alpha.feasible ? finite_or_null(r.alpha.f_prime_half) : nlohmann::json();
  if (r.alpha.valid_interval)
    j["kappa1_valid_interval"] = {r.alpha.valid_interval->first, r.alpha.valid_interval->second};
  else
    j["kappa1_valid_interval"] = nullptr;
  j["kappa1"] = finite_or_null(r.kappa1);
  j["kappa2"] = finite_or_null(r.kappa2);
  j["zeta"] = {{"z1", r.zeta.z1}, {"z2", r.zeta.z2}, {"z3", r.zeta.z3}};
  j["bound"] = finite_or_null(r.bound_value);
  j["diagnostic"] = r.diagnostic;
  return j;
}

}  // namespace fedmeld
