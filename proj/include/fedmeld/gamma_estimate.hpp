// Estimation of the non-IID degree Gamma = F* - (1/M) sum_i (1/N_i) sum_j F_j*
// for convex model families.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fedmeld/errors.hpp"
#include "fedmeld/model_vector.hpp"
#include "fedmeld/models.hpp"
#include "fedmeld/partition.hpp"

namespace fedmeld {

struct MinimizeOptions {
  double grad_tol = 1e-8;
  std::size_t max_iter = 200000;
};

struct MinimizeResult {
  ModelVector w;
  double value = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
};

/// Minimises sum_k weights[k] * F_k(w) with Nesterov acceleration and
/// gradient-based restarts, starting from step 1/L.
inline MinimizeResult minimize_weighted(const Model& model, std::span<const Dataset* const> parts,
                                        std::span<const double> weights, double smoothness,
                                        const MinimizeOptions& opt = {}) {
  const std::size_t dim = model.dim();
  std::vector<std::vector<std::size_t>> idx;
  for (const Dataset* d : parts) idx.push_back(all_indices(d->size()));

  std::vector<double> g(dim), gk(dim);
  auto eval = [&](const ModelVector& w, std::vector<double>& grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double f = 0.0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      f += weights[k] * model.loss_and_gradient(w, *parts[k], idx[k], gk);
      for (std::size_t d = 0; d < dim; ++d) grad[d] += weights[k] * gk[d];
    }
    return f;
  };
  auto grad_norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };

  const double step = 1.0 / smoothness;
  ModelVector x(dim), x_prev(dim), y(dim);
  double momentum = 1.0;
  MinimizeResult res;
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    const double fy = eval(y, g);
    if (!std::isfinite(fy)) throw EstimationError("minimize: objective became non-finite");
    res.iterations = it + 1;
    res.value = fy;
    res.grad_norm = grad_norm(g);
    if (res.grad_norm <= opt.grad_tol) {
      res.w = y;
      return res;
    }
    ModelVector x_next = y;
    for (std::size_t d = 0; d < dim; ++d) x_next[d] -= step * g[d];

    // Restart when the momentum direction opposes descent.
    double dir = 0.0;
    for (std::size_t d = 0; d < dim; ++d) dir += g[d] * (x_next[d] - x[d]);
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const double beta = dir > 0.0 ? 0.0 : (momentum - 1.0) / next_momentum;
    momentum = dir > 0.0 ? 1.0 : next_momentum;
    x_prev = x;
    x = x_next;
    for (std::size_t d = 0; d < dim; ++d) y[d] = x[d] + beta * (x[d] - x_prev[d]);
  }
  throw EstimationError("minimize: no convergence after " + std::to_string(opt.max_iter) +
                        " iterations (gradient norm " + std::to_string(res.grad_norm) + ")");
}

struct GammaEstimate {
  double gamma = 0.0;
  double global_min = 0.0;        // F*
  double mean_client_min = 0.0;   // (1/M) sum_i (1/N_i) sum_j F_j*
  std::size_t iterations = 0;
};

inline GammaEstimate estimate_gamma_noniid(const Partition& p, const Model& model,
                                           const MinimizeOptions& opt = {}) {
  if (!model.convex()) throw InvalidArgument("estimate_gamma_noniid: model family must be convex");
  GammaEstimate est;
  const double m = static_cast<double>(p.num_areas());

  std::vector<const Dataset*> parts;
  std::vector<double> weights;
  double mean_client = 0.0;
  for (const auto& ids : p.area_clients) {
    const double n_i = static_cast<double>(ids.size());
    for (std::size_t c : ids) {
      const Dataset* d = &p.clients[c];
      const double w = 1.0 / (m * n_i);
      parts.push_back(d);
      weights.push_back(w);
      const std::array<const Dataset*, 1> one{d};
      const std::array<double, 1> unit{1.0};
      const auto r = minimize_weighted(model, one, unit, model.smoothness_bound(*d), opt);
      mean_client += w * r.value;
      est.iterations += r.iterations;
    }
  }
  double smooth = 0.0;
  for (const Dataset* d : parts) smooth = std::max(smooth, model.smoothness_bound(*d));
  const auto global = minimize_weighted(model, parts, weights, smooth, opt);
  est.iterations += global.iterations;
  est.global_min = global.value;
  est.mean_client_min = mean_client;
  est.gamma = global.value - mean_client;
  return est;
}

}  // namespace fedmeld
