// Desk-scale model families trained by the simulator.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fedmeld/dataset.hpp"
#include "fedmeld/errors.hpp"
#include "fedmeld/model_vector.hpp"
#include "fedmeld/rng.hpp"

namespace fedmeld {

class Model {
 public:
  virtual ~Model() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string family() const = 0;
  virtual bool convex() const = 0;

  /// Mean loss over the indexed samples plus regularisation. When `grad` is
  /// non-empty it receives the gradient of that same quantity.
  virtual double loss_and_gradient(const ModelVector& w, const Dataset& data,
                                   std::span<const std::size_t> idx,
                                   std::span<double> grad) const = 0;

  virtual int predict(const ModelVector& w, std::span<const double> x) const = 0;

  virtual ModelVector initial_model(Rng& /*rng*/) const { return ModelVector(dim()); }

  /// Upper bound on the smoothness constant of the mean loss over `data`.
  virtual double smoothness_bound(const Dataset& data) const = 0;
};

inline std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

inline double dataset_loss(const Model& model, const ModelVector& w, const Dataset& data) {
  const auto idx = all_indices(data.size());
  return model.loss_and_gradient(w, data, idx, {});
}

inline double accuracy(const Model& model, const ModelVector& w, const Dataset& data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& s : data.samples) hits += model.predict(w, s.x) == s.label ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

/// Separable quadratic: each sample carries a centre c and curvatures a
/// (features = [c_1..c_d, a_1..a_d]) and contributes 0.5 * sum a_k (w_k - c_k)^2.
class QuadraticModel final : public Model {
 public:
  explicit QuadraticModel(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const override { return dim_; }
  std::string family() const override { return "quadratic"; }
  bool convex() const override { return true; }

  double loss_and_gradient(const ModelVector& w, const Dataset& data, std::span<const std::size_t> idx,
                           std::span<double> grad) const override {
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t n : idx) {
      const auto& x = data.samples[n].x;
      for (std::size_t k = 0; k < dim_; ++k) {
        const double a = x[dim_ + k];
        const double r = w[k] - x[k];
        loss += 0.5 * a * r * r;
        if (!grad.empty()) grad[k] += a * r;
      }
    }
    const double inv = 1.0 / static_cast<double>(idx.size());
    if (!grad.empty())
      for (double& g : grad) g *= inv;
    return loss * inv;
  }

  int predict(const ModelVector&, std::span<const double>) const override { return 0; }

  double smoothness_bound(const Dataset& data) const override {
    double a_max = 0.0;
    for (const auto& s : data.samples)
      for (std::size_t k = 0; k < dim_; ++k) a_max = std::max(a_max, s.x[dim_ + k]);
    return a_max;
  }

 private:
  std::size_t dim_;
};

inline Sample quadratic_sample(const std::vector<double>& centre, const std::vector<double>& curvature) {
  Sample s;
  s.x = centre;
  s.x.insert(s.x.end(), curvature.begin(), curvature.end());
  return s;
}

struct QuadraticMinimum {
  ModelVector w;
  double value = 0.0;
};

/// Closed-form minimiser of the mean quadratic loss of `data`.
inline QuadraticMinimum quadratic_minimum(const Dataset& data, std::size_t dim) {
  QuadraticMinimum out{ModelVector(dim), 0.0};
  const double n = static_cast<double>(data.size());
  for (std::size_t k = 0; k < dim; ++k) {
    double sa = 0.0, sac = 0.0, sacc = 0.0;
    for (const auto& s : data.samples) {
      const double a = s.x[dim + k], c = s.x[k];
      sa += a;
      sac += a * c;
      sacc += a * c * c;
    }
    out.w[k] = sac / sa;
    out.value += 0.5 * (sacc - sac * sac / sa) / n;
  }
  return out;
}

/// Multinomial logistic regression with an L2 penalty on all parameters
/// (weights and biases), which makes it l2-strongly convex.
class LogisticModel final : public Model {
 public:
  LogisticModel(std::size_t num_features, int num_labels, double l2)
      : features_(num_features), labels_(static_cast<std::size_t>(num_labels)), l2_(l2) {
    if (num_labels < 2) throw InvalidConfig("logistic model needs at least two labels");
    if (l2 < 0.0) throw InvalidConfig("logistic model: l2 must be >= 0");
  }

  std::size_t dim() const override { return labels_ * (features_ + 1); }
  std::string family() const override { return "logistic"; }
  bool convex() const override { return true; }
  double l2() const { return l2_; }

  double loss_and_gradient(const ModelVector& w, const Dataset& data, std::span<const std::size_t> idx,
                           std::span<double> grad) const override {
    const bool want_grad = !grad.empty();
    if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
    std::vector<double> logits(labels_);
    double loss = 0.0;
    const std::size_t bias = labels_ * features_;
    for (std::size_t n : idx) {
      const Sample& s = data.samples[n];
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < labels_; ++c) {
        double z = w[bias + c];
        const double* row = &w.values()[c * features_];
        for (std::size_t f = 0; f < features_; ++f) z += row[f] * s.x[f];
        logits[c] = z;
        top = std::max(top, z);
      }
      double denom = 0.0;
      for (double z : logits) denom += std::exp(z - top);
      const double log_denom = top + std::log(denom);
      loss += log_denom - logits[static_cast<std::size_t>(s.label)];
      if (want_grad) {
        for (std::size_t c = 0; c < labels_; ++c) {
          const double p = std::exp(logits[c] - log_denom);
          const double e = p - (static_cast<int>(c) == s.label ? 1.0 : 0.0);
          double* g = &grad[c * features_];
          for (std::size_t f = 0; f < features_; ++f) g[f] += e * s.x[f];
          grad[bias + c] += e;
        }
      }
    }
    const double inv = 1.0 / static_cast<double>(idx.size());
    double reg = 0.0;
    for (double v : w) reg += v * v;
    if (want_grad)
      for (std::size_t k = 0; k < grad.size(); ++k) grad[k] = grad[k] * inv + l2_ * w[k];
    return loss * inv + 0.5 * l2_ * reg;
  }

  int predict(const ModelVector& w, std::span<const double> x) const override {
    const std::size_t bias = labels_ * features_;
    int best = 0;
    double best_z = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < labels_; ++c) {
      double z = w[bias + c];
      for (std::size_t f = 0; f < features_; ++f) z += w[c * features_ + f] * x[f];
      if (z > best_z) {
        best_z = z;
        best = static_cast<int>(c);
      }
    }
    return best;
  }

  // Softmax cross-entropy Hessian is bounded by 0.5 * ||[x; 1]||^2.
  double smoothness_bound(const Dataset& data) const override {
    double r2 = 0.0;
    for (const auto& s : data.samples) {
      double n2 = 1.0;
      for (double v : s.x) n2 += v * v;
      r2 = std::max(r2, n2);
    }
    return 0.5 * r2 + l2_;
  }

 private:
  std::size_t features_;
  std::size_t labels_;
  double l2_;
};

/// One hidden tanh layer followed by a softmax output.
class MlpModel final : public Model {
 public:
  MlpModel(std::size_t num_features, std::size_t hidden, int num_labels, double l2)
      : features_(num_features), hidden_(hidden), labels_(static_cast<std::size_t>(num_labels)), l2_(l2) {
    if (hidden < 1) throw InvalidConfig("mlp: hidden width must be >= 1");
    if (num_labels < 2) throw InvalidConfig("mlp: needs at least two labels");
  }

  std::size_t dim() const override { return hidden_ * features_ + hidden_ + labels_ * hidden_ + labels_; }
  std::string family() const override { return "mlp"; }
  bool convex() const override { return false; }

  ModelVector initial_model(Rng& rng) const override {
    ModelVector w(dim());
    std::normal_distribution<double> unit(0.0, 1.0);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(features_));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_));
    for (std::size_t k = 0; k < hidden_ * features_; ++k) w[k] = s1 * unit(rng);
    const std::size_t w2 = hidden_ * features_ + hidden_;
    for (std::size_t k = 0; k < labels_ * hidden_; ++k) w[w2 + k] = s2 * unit(rng);
    return w;
  }

  double loss_and_gradient(const ModelVector& w, const Dataset& data, std::span<const std::size_t> idx,
                           std::span<double> grad) const override {
    const bool want_grad = !grad.empty();
    if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
    const std::size_t b1 = hidden_ * features_, w2 = b1 + hidden_, b2 = w2 + labels_ * hidden_;
    std::vector<double> h(hidden_), logits(labels_), dh(hidden_);
    double loss = 0.0;
    for (std::size_t n : idx) {
      const Sample& s = data.samples[n];
      forward(w, s.x, h, logits);
      const double top = *std::max_element(logits.begin(), logits.end());
      double denom = 0.0;
      for (double z : logits) denom += std::exp(z - top);
      const double log_denom = top + std::log(denom);
      loss += log_denom - logits[static_cast<std::size_t>(s.label)];
      if (!want_grad) continue;
      std::fill(dh.begin(), dh.end(), 0.0);
      for (std::size_t c = 0; c < labels_; ++c) {
        const double e = std::exp(logits[c] - log_denom) - (static_cast<int>(c) == s.label ? 1.0 : 0.0);
        for (std::size_t j = 0; j < hidden_; ++j) {
          grad[w2 + c * hidden_ + j] += e * h[j];
          dh[j] += e * w[w2 + c * hidden_ + j];
        }
        grad[b2 + c] += e;
      }
      for (std::size_t j = 0; j < hidden_; ++j) {
        const double dz = dh[j] * (1.0 - h[j] * h[j]);
        for (std::size_t f = 0; f < features_; ++f) grad[j * features_ + f] += dz * s.x[f];
        grad[b1 + j] += dz;
      }
    }
    const double inv = 1.0 / static_cast<double>(idx.size());
    double reg = 0.0;
    for (double v : w) reg += v * v;
    if (want_grad)
      for (std::size_t k = 0; k < grad.size(); ++k) grad[k] = grad[k] * inv + l2_ * w[k];
    return loss * inv + 0.5 * l2_ * reg;
  }

  int predict(const ModelVector& w, std::span<const double> x) const override {
    std::vector<double> h(hidden_), logits(labels_);
    forward(w, x, h, logits);
    return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
  }

  // Not a certified bound; used only to size steps for diagnostics.
  double smoothness_bound(const Dataset& data) const override {
    double r2 = 0.0;
    for (const auto& s : data.samples) {
      double n2 = 1.0;
      for (double v : s.x) n2 += v * v;
      r2 = std::max(r2, n2);
    }
    return 0.5 * r2 * static_cast<double>(hidden_) + l2_;
  }

 private:
  void forward(const ModelVector& w, std::span<const double> x, std::vector<double>& h,
               std::vector<double>& logits) const {
    const std::size_t b1 = hidden_ * features_, w2 = b1 + hidden_, b2 = w2 + labels_ * hidden_;
    for (std::size_t j = 0; j < hidden_; ++j) {
      double z = w[b1 + j];
      for (std::size_t f = 0; f < features_; ++f) z += w[j * features_ + f] * x[f];
      h[j] = std::tanh(z);
    }
    for (std::size_t c = 0; c < labels_; ++c) {
      double z = w[b2 + c];
      for (std::size_t j = 0; j < hidden_; ++j) z += w[w2 + c * hidden_ + j] * h[j];
      logits[c] = z;
    }
  }

  std::size_t features_;
  std::size_t hidden_;
  std::size_t labels_;
  double l2_;
};

}  // namespace fedmeld
