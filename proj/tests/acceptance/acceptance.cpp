// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fedmeld/fedmeld.hpp"
#include "fedmeld/harness/config.hpp"
#include "fedmeld/harness/experiment.hpp"

using namespace fedmeld;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_real(double lo, double hi) { return std::exp(real(std::log(lo), std::log(hi))); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  Rng& rng() { return rng_; }

 private:
  Rng rng_;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------- SC-MR ----

struct ScmrCase {
  BoundParams p;
  double T_max = 0.0;
  double max_fly = 0.0;
};

ScmrCase random_scmr_case(Gen& g, bool near_feasible = false) {
  ScmrCase c;
  auto& p = c.p;
  p.L = g.real(0.5, 10.0);
  p.mu = p.L * g.real(0.02, 1.0);
  p.G = g.log_real(1e-3, 5.0);
  p.Gamma = g.real(0.0, 2.0);
  p.E = g.integer(2, 10);
  p.K = g.integer(1, 10);
  p.R = g.integer(100, 5000);
  p.N = {5, 5, 5, 5};
  p.U = {g.integer(1, 5), g.integer(1, 5), g.integer(1, 5), g.integer(1, 5)};
  const double s = g.real(0.0, 1.0);
  p.sigma.assign(4, std::vector<double>(5, s));
  p.init_gap = g.log_real(0.1, 100.0);
  c.max_fly = g.log_real(10.0, 2000.0);
  // Envelope chosen so that the latency-feasible delta is ceil(target).
  double target = g.real(0.5, 20.0);
  if (near_feasible) {
    p.E = g.integer(2, 5);
    target = g.integer(1, 2) - 0.5;
  }
  c.T_max = (p.R - 1) * c.max_fly / (p.E * (p.K + target));
  return c;
}

// Joint grid search over delta in 1..20 and alpha in {0, 1e-4, ..., 0.5}.
// Returns +inf when no grid point satisfies every constraint.
double brute_force_bound(const ScmrCase& c) {
  const auto& p = c.p;
  double best = std::numeric_limits<double>::infinity();
  for (int d = 1; d <= 20; ++d) {
    if (static_cast<double>(p.R - 1) * c.max_fly > c.T_max * (p.K + d) * p.E) continue;
    if (d >= p.K + 2) continue;
    const auto iv = kappa1_valid_interval(d, p.K, p.rho);
    if (!iv) continue;
    for (int i = 0; i <= 5000; ++i) {
      const double a = i * 1e-4;
      if (a <= iv->first || a >= iv->second) continue;
      if (!staleness_feasible(d, a, p.E, p.gamma(), p.R, p.K)) continue;
      best = std::min(best, bound(d, a, p));
    }
  }
  return best;
}

Verdict criterion1() {
  Gen g(101);
  int feasible = 0, agree = 0;
  std::ostringstream bad;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto c = random_scmr_case(g, i % 2 == 0);
    const auto r = solve_scmr(c.p, c.T_max, c.max_fly);
    const double brute = brute_force_bound(c);
    const bool brute_feasible = std::isfinite(brute);
    if (r.feasible != brute_feasible) {
      bad << " tuple " << i << ": solver feasible=" << r.feasible << " grid feasible=" << brute_feasible << ";";
      continue;
    }
    if (!r.feasible) {
      ++agree;
      continue;
    }
    ++feasible;
    // The grid must not beat the decomposed optimum by more than 1e-6 relative.
    const double gap = (r.bound_value - brute) / std::abs(brute);
    worst = std::max(worst, gap);
    if (gap > 1e-6)
      bad << " tuple " << i << ": decomposed " << r.bound_value << " vs grid " << brute << ";";
    else
      ++agree;
  }
  Verdict v;
  v.pass = agree == 50;
  v.detail = std::to_string(agree) + "/50 tuples agree (" + std::to_string(feasible) +
             " feasible, worst excess " + fmt("%.3g", worst) + ")" + bad.str();
  return v;
}

// Fourth-order central difference of the bound in alpha.
double fd_derivative(int d, double a, double h, const BoundParams& p) {
  auto D = [&](double s) { return (bound(d, a + s, p) - bound(d, a - s, p)) / (2 * s); };
  return (4 * D(h / 2) - D(h)) / 3;
}

Verdict criterion2() {
  Gen g(202);
  int fired = 0, root_ok = 0, fd_points = 0, fd_ok = 0;
  double worst_root = 0.0, worst_fd = 0.0;
  for (int i = 0; i < 400; ++i) {
    auto c = random_scmr_case(g);
    // Small G and large init gap make f'(1/2) > 0, so the bisection branch fires.
    if (i % 2 == 0) {
      c.p.G = g.log_real(1e-4, 1e-2);
      c.p.init_gap = g.log_real(10.0, 1000.0);
      c.p.E = g.integer(2, 4);
    }
    const int d = optimal_delta(c.p.R, c.p.E, c.T_max, c.max_fly, c.p.K);
    const auto s = optimal_alpha(d, c.p);
    if (s.feasible && s.f_prime_half > 0.0) {
      ++fired;
      const double fp = std::abs(f_prime(s.alpha_dot, d, c.p));
      worst_root = std::max(worst_root, fp);
      if (fp <= 1e-10) ++root_ok;
    }
    if (d >= c.p.K + 2) continue;
    const auto iv = kappa1_valid_interval(d, c.p.K, c.p.rho);
    if (!iv || iv->first >= 0.5) continue;
    for (double a = std::ceil(iv->first * 1e3) / 1e3; a < 0.5; a += 1e-3) {
      // The bound has a pole at the interval edge; keep the stencil well clear of it.
      const double h = std::min(1e-4, (a - iv->first) / 100);
      if (!(h > 1e-9) || a + h > 0.5) continue;
      const double fd = fd_derivative(d, a, h, c.p);
      const double fp = f_prime(a, d, c.p);
      const double rel = std::abs(fp - fd) / std::max(std::abs(fd), std::abs(fp));
      ++fd_points;
      worst_fd = std::max(worst_fd, rel);
      if (rel <= 1e-6) ++fd_ok;
    }
  }
  Verdict v;
  v.pass = fired > 0 && root_ok == fired && fd_points > 0 && fd_ok == fd_points;
  v.detail = "bisection fired " + std::to_string(fired) + "x, |f'(alpha_dot)| <= 1e-10 in " +
             std::to_string(root_ok) + " (worst " + fmt("%.3g", worst_root) + "); f' vs finite differences " +
             std::to_string(fd_ok) + "/" + std::to_string(fd_points) + " grid points within 1e-6 (worst " +
             fmt("%.3g", worst_fd) + ")";
  return v;
}

Verdict criterion3() {
  Gen g(303);
  long samples = 0, kappa_fail = 0;
  std::string example;
  for (int i = 0; i < 20000; ++i) {
    const int K = g.integer(1, 20);
    const int d = g.integer(1, K + 1);
    const double a = g.real(1e-9, 1.0 - 1e-9);
    ++samples;
    const double k1 = kappas(a, d, K, 5, 1.0, 1.5).k1;
    if (!(k1 < 1.0)) {
      if (kappa_fail++ == 0)
        example = "K=" + std::to_string(K) + " delta=" + std::to_string(d) + " alpha=" + fmt("%.4f", a) +
                  " kappa1=" + fmt("%.4f", k1);
    }
  }
  int mono_checked = 0, mono_ok = 0;
  for (int i = 0; i < 2000; ++i) {
    auto c = random_scmr_case(g);
    const int d = g.integer(1, c.p.K);
    const double a = g.real(0.0, 0.5);
    const auto iv = kappa1_valid_interval(d + 1, c.p.K, c.p.rho);
    if (!iv || a <= iv->first || a >= iv->second) continue;
    ++mono_checked;
    if (bound(d, a, c.p) < bound(d + 1, a, c.p)) ++mono_ok;
  }
  int zeta_ok = 0;
  for (int i = 0; i < 200; ++i) {
    auto c = random_scmr_case(g);
    c.p.U = c.p.N;
    if (zetas(c.p).z3 == 0.0) ++zeta_ok;
  }
  Verdict v;
  v.pass = kappa_fail == 0 && mono_ok == mono_checked && mono_checked > 0 && zeta_ok == 200;
  v.detail = "kappa1 >= 1 in " + std::to_string(kappa_fail) + "/" + std::to_string(samples) + " samples" +
             (example.empty() ? "" : " (e.g. " + example + ")") + "; bound increasing in delta " +
             std::to_string(mono_ok) + "/" + std::to_string(mono_checked) + "; zeta3 == 0 under full participation " +
             std::to_string(zeta_ok) + "/200";
  return v;
}

Verdict criterion4() {
  const bool half = m_alpha(0.5) == 2.0;
  int violations = 0;
  double prev = m_alpha(1e-3);
  for (int i = 2; i <= 1000; ++i) {
    const double now = m_alpha(i * 1e-3);
    if (!(now < prev)) ++violations;
    prev = now;
  }
  Verdict v;
  v.pass = half && violations == 0;
  v.detail = std::string("m(1/2) ") + (half ? "== 2 exactly" : "!= 2") + "; " + std::to_string(violations) +
             " monotonicity violations on the 1e-3 grid";
  return v;
}

// ------------------------------------------------------------- protocol ----

FlProblem scalar_quadratic_problem(const std::vector<std::vector<double>>& centres,
                                   const std::vector<std::vector<double>>& curv) {
  FlProblem p;
  p.model = std::make_shared<QuadraticModel>(1);
  for (std::size_t a = 0; a < centres.size(); ++a) {
    std::vector<std::size_t> ids;
    for (std::size_t j = 0; j < centres[a].size(); ++j) {
      Dataset d;
      d.num_labels = 1;
      d.samples.push_back(quadratic_sample({centres[a][j]}, {curv[a][j]}));
      ids.push_back(p.partition.clients.size());
      p.partition.clients.push_back(d);
    }
    p.partition.area_clients.push_back(ids);
  }
  return p;
}

FlProblem small_logistic_problem(int areas, int clients, std::uint64_t seed) {
  GaussianClusterSpec s;
  s.num_samples = static_cast<std::size_t>(areas * clients * 30);
  s.num_features = 4;
  s.num_labels = 6;
  s.seed = seed;
  const Dataset train = make_gaussian_clusters(s);
  PartitionSpec ps;
  ps.scheme = PartitionScheme::NonIidClusters;
  ps.clients_per_area.assign(static_cast<std::size_t>(areas), clients);
  ps.seed = seed;
  FlProblem p;
  p.model = std::make_shared<LogisticModel>(4, 6, 0.01);
  p.partition = partition(train, ps);
  return p;
}

Verdict criterion5() {
  Verdict v;
  std::ostringstream note;

  // alpha = 0 is per-area FedAvg, bit for bit, under partial participation.
  const FlProblem lp = small_logistic_problem(4, 5, 9);
  TrainingParams tp;
  tp.E = 3;
  tp.R = 150;
  tp.batch_size = 8;
  tp.lr = LrSchedule{0.01, 20.0, 3};
  tp.participants_per_area = {3, 3, 3, 3};
  tp.seed = 5;
  RunOptions opt;
  opt.keep_trajectory = true;
  const ConstantRoundTimer timer(1.0);
  const auto a = run_fedmeld(lp, tp, FedMeldParams{3, 2, 0.0, {}}, timer, opt);
  const auto b = run_area_fedavg(lp, tp, timer, opt);
  const bool bitwise = a.trajectory == b.trajectory;
  note << "alpha=0 trajectory " << (bitwise ? "bitwise equal" : "DIFFERS") << " to per-area FedAvg";
  v.pass = bitwise;

  // Zero curvature: no gradient, so every scheme must leave the start untouched.
  const FlProblem zp = scalar_quadratic_problem({{1, 2}, {3, 4}, {5, 6}, {7, 8}}, {{0, 0}, {0, 0}, {0, 0}, {0, 0}});
  TrainingParams zt;
  zt.E = 2;
  zt.R = 80;
  zt.batch_size = 1;
  zt.lr = LrSchedule{1.0, 1.0, 2};
  zt.init = ModelVector{0.625};
  BaselineParams bp;
  bp.period_rounds = 4;
  int conserved = 0, runs = 0;
  auto check = [&](const RunResult& r) {
    ++runs;
    bool ok = true;
    for (const auto& step : r.trajectory)
      for (const auto& w : step) ok = ok && w == *zt.init;
    conserved += ok;
  };
  for (double alpha : {0.1, 0.3, 0.5}) check(run_fedmeld(zp, zt, FedMeldParams{3, 1, alpha, {}}, timer, opt));
  check(run_hfl(zp, zt, bp, timer, opt));
  check(run_pfl(zp, zt, bp, timer, opt));
  check(run_ring_allreduce(zp, zt, bp, timer, opt));
  note << "; zero-gradient runs conserved " << conserved << "/" << runs;
  v.pass = v.pass && conserved == runs;

  // Influence rows are stochastic and fill in after M-1 mix cycles.
  int rows_ok = 0, rows = 0, positive = 0, cases = 0;
  double worst_row = 0.0;
  for (int M : {2, 4, 8})
    for (double alpha : {0.1, 0.3, 0.5}) {
      const int K = 3, delta = 2, E = 1;
      const long steps = static_cast<long>(M - 1) * (K + delta) * E;
      const auto s = build_schedule(E, K, delta, steps, M);
      const auto w = influence_matrix(s, alpha, steps);
      bool all_pos = true;
      for (const auto& row : w) {
        const double sum = std::accumulate(row.begin(), row.end(), 0.0);
        worst_row = std::max(worst_row, std::abs(sum - 1.0));
        ++rows;
        rows_ok += std::abs(sum - 1.0) <= 1e-12;
        for (double x : row) all_pos = all_pos && x > 0.0;
      }
      ++cases;
      positive += all_pos;
    }
  note << "; influence rows sum to 1 in " << rows_ok << "/" << rows << " (worst " << fmt("%.2g", worst_row)
       << "), strictly positive after M-1 cycles in " << positive << "/" << cases << " cases";
  v.pass = v.pass && rows_ok == rows && positive == cases;
  v.detail = note.str();
  return v;
}

Verdict criterion6() {
  Gen g(606);
  int schedules = 0, good = 0;
  long mixes = 0;
  for (int i = 0; i < 200; ++i) {
    const int M = g.integer(2, 8), E = g.integer(1, 6), K = g.integer(1, 8), delta = g.integer(1, 8);
    const long R = static_cast<long>(K + delta) * E * g.integer(1, 6) + g.integer(0, 2 * E);
    std::vector<std::vector<double>> centres(static_cast<std::size_t>(M)), curv(static_cast<std::size_t>(M));
    for (int a = 0; a < M; ++a) {
      centres[static_cast<std::size_t>(a)] = {g.real(-3, 3)};
      curv[static_cast<std::size_t>(a)] = {g.real(0.5, 1.0)};
    }
    const auto p = scalar_quadratic_problem(centres, curv);
    TrainingParams tp;
    tp.E = E;
    tp.R = R;
    tp.batch_size = 1;
    tp.lr = LrSchedule{0.5, 1.0, E};
    tp.seed = static_cast<std::uint64_t>(i);
    RunOptions opt;
    opt.evaluate = false;
    const auto r = run_fedmeld(p, tp, FedMeldParams{K, delta, g.real(0.05, 0.5), {}}, ConstantRoundTimer(1.0), opt);
    const auto sched = build_schedule(E, K, delta, R, M);
    bool ok = r.mixes.size() == sched.mix_steps().size() * static_cast<std::size_t>(M);
    for (const auto& m : r.mixes) {
      ok = ok && m.step - m.operand_step == static_cast<long>(delta) * E;
      ok = ok && m.source_area == (m.area + static_cast<std::size_t>(M) - 1) % static_cast<std::size_t>(M);
      ++mixes;
    }
    ++schedules;
    good += ok;
  }
  Verdict v;
  v.pass = good == schedules;
  v.detail = std::to_string(good) + "/" + std::to_string(schedules) + " schedules with every one of " +
             std::to_string(mixes) + " operand stamps exactly delta*E behind the mix step";
  return v;
}

Verdict criterion7() {
  Gen g(707);
  int ring_ok = 0;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = static_cast<std::size_t>(g.integer(1, 16));
    const std::size_t dim = static_cast<std::size_t>(g.integer(1, 64));
    std::vector<ModelVector> models(m, ModelVector(dim));
    for (auto& w : models)
      for (auto& x : w) x = g.normal();
    const auto out = ring_allreduce_exchange(models);
    std::vector<double> mean(dim, 0.0);
    for (const auto& w : models)
      for (std::size_t d = 0; d < dim; ++d) mean[d] += w[d];
    double err = 0.0;
    for (const auto& w : out)
      for (std::size_t d = 0; d < dim; ++d) err = std::max(err, std::abs(w[d] - mean[d] / static_cast<double>(m)));
    worst = std::max(worst, err);
    ring_ok += err <= 1e-12;
  }

  // Sampling U of N clients uniformly gives an unbiased estimate of the mean.
  const std::size_t N = 10, dim = 5;
  const int U = 4, trials = 10000;
  std::vector<ModelVector> clients(N, ModelVector(dim));
  for (auto& w : clients)
    for (auto& x : w) x = 3.0 * g.normal();
  const ModelVector w_bar = fedavg_uniform(clients);
  std::vector<std::size_t> ids(N);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  std::vector<double> sum(dim, 0.0), sum_sq(dim, 0.0);
  for (int t = 0; t < trials; ++t) {
    const auto pick = select_clients(ids, U, g.rng());
    std::vector<ModelVector> chosen;
    for (auto c : pick) chosen.push_back(clients[c]);
    const auto z = fedavg_uniform(chosen);
    for (std::size_t d = 0; d < dim; ++d) {
      sum[d] += z[d];
      sum_sq[d] += z[d] * z[d];
    }
  }
  double dist2 = 0.0, se2 = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    const double mean = sum[d] / trials;
    const double var = (sum_sq[d] / trials - mean * mean) * trials / (trials - 1.0);
    dist2 += (mean - w_bar[d]) * (mean - w_bar[d]);
    se2 += var / trials;
  }
  const double dist = std::sqrt(dist2), se = std::sqrt(se2);
  Verdict v;
  v.pass = ring_ok == 200 && dist <= 3.0 * se;
  v.detail = "ring allreduce matched the mean in " + std::to_string(ring_ok) + "/200 trials (worst " +
             fmt("%.2g", worst) + "); sampled-mean bias " + fmt("%.4g", dist) + " vs 3 SE = " + fmt("%.4g", 3 * se);
  return v;
}

Verdict criterion8() {
  long checked = 0, exact = 0, ordered = 0;
  for (std::uint64_t U : {1ULL, 4ULL, 32ULL, 100ULL, 1000ULL})
    for (std::uint64_t M = 2; M <= 32; ++M)
      for (std::uint64_t q : {1ULL, 1000ULL, 1000000ULL, 352000000ULL}) {
        ++checked;
        const auto ours = comm_cost(Scheme::FedMeld, U, M, q).traffic_bits;
        const auto hfl = comm_cost(Scheme::Hfl, U, M, q).traffic_bits;
        const auto pfl = comm_cost(Scheme::Pfl, U, M, q).traffic_bits;
        const auto ring = comm_cost(Scheme::Ring, U, M, q).traffic_bits;
        exact += ours == 2 * U * q && hfl == 2 * (U + M) * q && pfl == 2 * (U + 2 * M) * q &&
                 ring == 2 * (U + M - 1) * q;
        ordered += ours < ring && ring < hfl && hfl < pfl;
      }
  Verdict v;
  v.pass = exact == checked && ordered == checked;
  v.detail = std::to_string(exact) + "/" + std::to_string(checked) + " (U, M, q) points exact, " +
             std::to_string(ordered) + " ordered Ours < Ring < HFL < PFL";
  return v;
}

// ------------------------------------------------------------ trends ----

Verdict criterion9() {
  // Four areas, three single-sample scalar quadratic clients each. Every
  // client is mu-strongly convex and L-smooth with mu = 1, L = 2.
  const std::vector<std::vector<double>> centres{{-2.0, -1.5, -1.0}, {-0.5, 0.0, 0.5}, {1.0, 1.5, 2.0}, {2.5, 3.0, -3.0}};
  const std::vector<std::vector<double>> curv{{1.0, 1.5, 2.0}, {2.0, 1.0, 1.5}, {1.5, 2.0, 1.0}, {1.0, 1.0, 2.0}};
  const auto p = scalar_quadratic_problem(centres, curv);
  Dataset all;
  all.num_labels = 1;
  for (const auto& c : p.partition.clients) all.samples.push_back(c.samples[0]);
  const auto opt = quadratic_minimum(all, 1);

  const double mu = 1.0, L = 2.0;
  const int E = 2, K = 3, delta = 1;
  const double alpha = 0.3;
  const double w0 = 0.0;
  // Iterates stay inside the hull of {w0} and the centres, so gradients are
  // bounded by L times its width. Full batches: sigma = 0. Client minima are 0,
  // so Gamma = F*.
  const double G = L * (3.0 - (-3.0));
  std::vector<double> Rs{200, 400, 800, 1600, 3200}, gaps;
  std::ostringstream detail;
  bool under_bound = true;
  for (double Rd : Rs) {
    const long R = static_cast<long>(Rd);
    TrainingParams tp;
    tp.E = E;
    tp.R = R;
    tp.batch_size = 1;
    tp.lr = LrSchedule{mu, L, E};
    tp.init = ModelVector{w0};
    RunOptions ro;
    ro.evaluate = false;
    const auto r = run_fedmeld(p, tp, FedMeldParams{K, delta, alpha, {}}, ConstantRoundTimer(1.0), ro);
    const double gap = global_loss(*p.model, r.global_model, p.partition) - opt.value;
    gaps.push_back(gap);
    BoundParams bp;
    bp.L = L;
    bp.mu = mu;
    bp.G = G;
    bp.Gamma = opt.value;
    bp.E = E;
    bp.K = K;
    bp.R = R;
    bp.N = {3, 3, 3, 3};
    bp.U = bp.N;
    bp.init_gap = (w0 - opt.w[0]) * (w0 - opt.w[0]);
    const double b = full_participation_bound(delta, alpha, bp);
    under_bound = under_bound && gap <= b;
    detail << " R=" << R << " gap " << fmt("%.3e", gap) << " (bound " << fmt("%.3e", b) << ");";
  }
  // Least-squares slope of log gap against log R.
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < Rs.size(); ++i) {
    mx += std::log(Rs[i]);
    my += std::log(std::max(gaps[i], 1e-300));
  }
  mx /= Rs.size();
  my /= Rs.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < Rs.size(); ++i) {
    const double dx = std::log(Rs[i]) - mx;
    sxy += dx * (std::log(std::max(gaps[i], 1e-300)) - my);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  Verdict v;
  v.pass = slope <= -0.8 && under_bound;
  v.detail = "log-log slope " + fmt("%.3f", slope) + (under_bound ? ", gap below bound at every R;" : ", BOUND VIOLATED;") +
             detail.str();
  return v;
}

Verdict criterion10() {
  namespace h = fedmeld::harness;
  h::RunConfig base;
  base.name = "accept10";
  base.geometry.num_areas = 8;
  base.partition.scheme = "noniid_clusters";
  base.partition.clients_per_area = {5};
  base.partition.labels_per_cluster = 3;
  base.partition.labels_per_client = 2;
  base.dataset.kind = "gaussian";
  base.dataset.num_labels = 10;
  base.training.participation = 0.8;
  base.training.R = 5000;
  base.training.eval_every = 10;
  base.timing.model_bits = 352000000ULL;
  const double budget = 7200.0;
  base.training.time_budget_s = budget;
  const auto dir = (std::filesystem::temp_directory_path() / "fedmeld_acceptance").string();

  double acc_fm = 0.0, acc_pfl = 0.0;
  std::ostringstream detail;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    h::RunConfig fm = base;
    fm.scheme = "fedmeld";
    h::RunConfig pfl = base;
    pfl.scheme = "pfl";
    const auto a = h::run_one(fm, seed, dir);
    const auto b = h::run_one(pfl, seed, dir);
    const double fa = a.result.records.back().acc_test, pa = b.result.records.back().acc_test;
    acc_fm += fa / 3.0;
    acc_pfl += pa / 3.0;
    detail << " seed " << seed << ": fedmeld " << fmt("%.4f", fa) << " (delta*=" << a.resolved.delta
           << ", alpha*=" << fmt("%.3f", a.resolved.alpha) << ", " << a.result.rounds_completed << " rounds) vs pfl "
           << fmt("%.4f", pa) << " (" << b.result.rounds_completed << " rounds);";
  }
  Verdict v;
  v.pass = acc_fm >= acc_pfl - 0.02;
  v.detail = "mean accuracy at " + fmt("%.0f", budget) + " s: fedmeld " + fmt("%.4f", acc_fm) + ", pfl " +
             fmt("%.4f", acc_pfl) + ";" + detail.str();
  return v;
}

Verdict criterion11() {
  Gen g(1111);
  int sweeps = 0, ok = 0;
  for (int i = 0; i < 200; ++i) {
    const long R = g.integer(10, 5000);
    const int E = g.integer(1, 10), K = g.integer(1, 10);
    const double fly = g.log_real(1.0, 5000.0), T = g.log_real(10.0, 1e5);
    bool good = true;
    int prev = std::numeric_limits<int>::max();
    for (double scale = 0.05; scale <= 20.0; scale *= 1.3) {
      const int d = optimal_delta(R, E, T * scale, fly, K);
      good = good && d <= prev;
      prev = d;
    }
    prev = 0;
    for (double scale = 0.05; scale <= 20.0; scale *= 1.3) {
      const int d = optimal_delta(R, E, T, fly * scale, K);
      good = good && d >= prev;
      prev = d;
    }
    ++sweeps;
    ok += good;
  }
  // Denser constellations shorten the serve window, lowering K and raising delta*.
  namespace h = fedmeld::harness;
  int prev_delta = 0;
  bool dense_ok = true;
  std::ostringstream dense;
  for (int sats : {22, 44, 66, 88, 132}) {
    const auto geo = ConstellationGeometry::evenly_spaced(8, 550e3, sats);
    const int k = rounds_per_serve(serve_duration(geo), 8.224635773452877).K;
    const auto flies = fly_times(geo);
    const double fly = *std::max_element(flies.begin(), flies.end());
    const int d = optimal_delta(1000, 5, 3600.0, fly, k);
    dense_ok = dense_ok && d >= prev_delta;
    prev_delta = d;
    dense << " " << sats << ":" << d;
  }
  Verdict v;
  v.pass = ok == sweeps && dense_ok;
  v.detail = std::to_string(ok) + "/" + std::to_string(sweeps) +
             " sweeps monotone in T_max and max_fly; delta* by sats per orbit" + dense.str();
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},  {6, criterion6},
      {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}, {11, criterion11}};
  const std::vector<double> limits{60, 0, 0, 0, 0, 0, 0, 0, 120, 600, 0};
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double limit = limits[static_cast<std::size_t>(id - 1)];
    if (limit > 0 && secs > limit) {
      v.pass = false;
      v.detail += " [runtime " + fmt("%.1f", secs) + " s exceeds " + fmt("%.0f", limit) + " s]";
    }
    failed += !v.pass;
    std::printf("criterion %d: %s (%.2f s) %s\n", id, v.pass ? "PASS" : "FAIL", secs, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
