// Client-side SGD, FedAvg, client sampling and the global objective.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "fedmeld/dataset.hpp"
#include "fedmeld/errors.hpp"
#include "fedmeld/model_vector.hpp"
#include "fedmeld/models.hpp"
#include "fedmeld/partition.hpp"
#include "fedmeld/rng.hpp"

namespace fedmeld {

/// eta_t = beta / (gamma + t) with beta = 5 / mu and
/// gamma = max(8 L / mu, E) - 1.
struct LrSchedule {
  double mu = 1.0;
  double smoothness = 1.0;  // L
  int E = 1;

  void validate() const {
    if (!(mu > 0.0) || !(smoothness > 0.0)) throw InvalidConfig("learning rate: mu and L must be > 0");
    if (E < 1) throw InvalidConfig("learning rate: E must be >= 1");
  }

  double beta() const { return 5.0 / mu; }
  double gamma() const { return std::max(8.0 * smoothness / mu, static_cast<double>(E)) - 1.0; }
  double eta(long t) const { return beta() / (gamma() + static_cast<double>(t)); }
};

/// Deterministic mini-batch cursor over one client's data: a seeded shuffle
/// that is consumed in order and reshuffled at each epoch boundary. If the
/// batch covers the whole dataset the full index set is returned unshuffled.
class BatchStream {
 public:
  BatchStream(std::size_t num_samples, std::uint64_t seed) : order_(num_samples), rng_(seed) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::shuffle(order_.begin(), order_.end(), rng_);
  }

  std::vector<std::size_t> next(std::size_t batch_size) {
    const std::size_t n = order_.size();
    if (batch_size >= n) return all_indices(n);
    std::vector<std::size_t> batch;
    batch.reserve(batch_size);
    while (batch.size() < batch_size) {
      if (pos_ == n) {
        std::shuffle(order_.begin(), order_.end(), rng_);
        pos_ = 0;
      }
      batch.push_back(order_[pos_++]);
    }
    return batch;
  }

 private:
  std::vector<std::size_t> order_;
  Rng rng_;
  std::size_t pos_ = 0;
};

/// One SGD update v = w - eta * grad, with the gradient averaged over the batch.
inline ModelVector sgd_step(const Model& model, const ModelVector& w, const Dataset& data,
                            std::span<const std::size_t> batch, double eta) {
  if (!(eta > 0.0)) throw InvalidArgument("sgd_step: learning rate must be > 0");
  if (batch.empty()) throw InvalidArgument("sgd_step: empty batch");
  if (w.dim() != model.dim()) throw InvalidArgument("sgd_step: model dimension mismatch");
  std::vector<double> grad(w.dim());
  model.loss_and_gradient(w, data, batch, grad);
  ModelVector v = w;
  for (std::size_t k = 0; k < grad.size(); ++k) {
    if (!std::isfinite(grad[k])) throw NumericError("sgd_step: non-finite gradient");
    v[k] -= eta * grad[k];
  }
  return v;
}

/// E sequential SGD steps using eta_{t0}, ..., eta_{t0+E-1}.
inline ModelVector local_train(const Model& model, ModelVector w, const Dataset& data, BatchStream& stream,
                               int E, const LrSchedule& schedule, long t0, std::size_t batch_size) {
  if (E < 1) throw InvalidArgument("local_train: E must be >= 1");
  for (int e = 0; e < E; ++e) {
    const auto batch = stream.next(batch_size);
    w = sgd_step(model, w, data, batch, schedule.eta(t0 + e));
  }
  return w;
}

/// Convex combination sum_k weights[k] * models[k]. Computed as a running
/// weighted mean, so averaging identical inputs reproduces them exactly.
inline ModelVector fedavg(std::span<const ModelVector> models, std::span<const double> weights) {
  if (models.empty()) throw InvalidArgument("fedavg: no models");
  if (weights.size() != models.size()) throw InvalidArgument("fedavg: one weight per model is required");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("fedavg: weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("fedavg: weights must sum to 1");
  const std::size_t dim = models.front().dim();
  for (const auto& m : models)
    if (m.dim() != dim) throw InvalidArgument("fedavg: model dimension mismatch");

  ModelVector acc(dim);
  double seen = 0.0;
  for (std::size_t k = 0; k < models.size(); ++k) {
    if (weights[k] == 0.0) continue;
    seen += weights[k];
    const double share = weights[k] / seen;
    if (share == 1.0) {
      acc = models[k];
      continue;
    }
    for (std::size_t d = 0; d < dim; ++d) acc[d] += share * (models[k][d] - acc[d]);
  }
  return acc;
}

inline ModelVector fedavg_uniform(std::span<const ModelVector> models) {
  std::vector<double> w(models.size(), 1.0 / static_cast<double>(models.size()));
  return fedavg(models, w);
}

/// Uniform sample of U distinct clients (partial Fisher-Yates), returned in
/// ascending id order.
inline std::vector<std::size_t> select_clients(std::span<const std::size_t> area_clients, int U, Rng& rng) {
  const auto n = area_clients.size();
  if (U < 1 || static_cast<std::size_t>(U) > n)
    throw InvalidArgument("select_clients: U must be in [1, N_i]");
  std::vector<std::size_t> pool(area_clients.begin(), area_clients.end());
  for (std::size_t k = 0; k < static_cast<std::size_t>(U); ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(pool[k], pool[pick(rng)]);
  }
  pool.resize(static_cast<std::size_t>(U));
  std::sort(pool.begin(), pool.end());
  return pool;
}

/// Global objective (1/M) sum_i (1/N_i) sum_j F_j(w) for one shared model.
inline double global_loss(const Model& model, const ModelVector& w, const Partition& p) {
  double total = 0.0;
  for (const auto& ids : p.area_clients) {
    double area = 0.0;
    for (std::size_t c : ids) area += dataset_loss(model, w, p.clients[c]);
    total += area / static_cast<double>(ids.size());
  }
  return total / static_cast<double>(p.num_areas());
}

/// Same double average, but client j is evaluated at its own model.
inline double global_loss(const Model& model, std::span<const ModelVector> client_models, const Partition& p) {
  if (client_models.size() != p.num_clients()) throw InvalidArgument("global_loss: one model per client");
  double total = 0.0;
  for (const auto& ids : p.area_clients) {
    double area = 0.0;
    for (std::size_t c : ids) area += dataset_loss(model, client_models[c], p.clients[c]);
    total += area / static_cast<double>(ids.size());
  }
  return total / static_cast<double>(p.num_areas());
}

}  // namespace fedmeld
