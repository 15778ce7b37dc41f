#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fedmeld/errors.hpp"
#include "fedmeld/rng.hpp"

namespace fedmeld {

struct Sample {
  std::vector<double> x;
  int label = 0;

  bool operator==(const Sample&) const = default;
};

struct Dataset {
  std::vector<Sample> samples;
  int num_labels = 0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  std::size_t num_features() const { return samples.empty() ? 0 : samples.front().x.size(); }

  std::vector<std::size_t> label_histogram() const {
    std::vector<std::size_t> h(static_cast<std::size_t>(num_labels), 0);
    for (const auto& s : samples) ++h[static_cast<std::size_t>(s.label)];
    return h;
  }

  /// Number of distinct labels present.
  std::size_t label_support() const {
    std::size_t n = 0;
    for (auto c : label_histogram()) n += c > 0 ? 1 : 0;
    return n;
  }

  void validate() const {
    if (samples.empty()) throw InvalidConfig("dataset is empty");
    const std::size_t f = num_features();
    for (const auto& s : samples) {
      if (s.label < 0 || s.label >= num_labels) throw InvalidConfig("dataset label out of range");
      if (s.x.size() != f) throw InvalidConfig("dataset rows have inconsistent feature counts");
    }
  }

  bool operator==(const Dataset&) const = default;
};

/// Reads `label,f1,f2,...` rows. A first line that does not parse as numbers
/// is treated as a header. num_labels = max label + 1 unless given.
inline Dataset load_csv_dataset(const std::string& path, int num_labels = 0) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open dataset file: " + path);
  Dataset d;
  std::string line;
  std::size_t line_no = 0;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (line_no == 1) continue;
      throw InvalidConfig(path + ":" + std::to_string(line_no) + ": non-numeric cell");
    }
    if (row.size() < 2) throw InvalidConfig(path + ":" + std::to_string(line_no) + ": need a label and a feature");
    Sample s;
    s.label = static_cast<int>(row[0]);
    if (static_cast<double>(s.label) != row[0] || s.label < 0)
      throw InvalidConfig(path + ":" + std::to_string(line_no) + ": label must be a non-negative integer");
    s.x.assign(row.begin() + 1, row.end());
    max_label = std::max(max_label, s.label);
    d.samples.push_back(std::move(s));
  }
  d.num_labels = num_labels > 0 ? num_labels : max_label + 1;
  d.validate();
  return d;
}

inline void save_csv_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidConfig("cannot write dataset file: " + path);
  out.precision(17);
  for (const auto& s : d.samples) {
    out << s.label;
    for (double v : s.x) out << ',' << v;
    out << '\n';
  }
}

struct GaussianClusterSpec {
  std::size_t num_samples = 4000;
  std::size_t num_features = 10;
  int num_labels = 10;
  double cluster_std = 1.0;
  double center_scale = 2.0;  // std of the class centres
  std::uint64_t seed = 1;
};

/// One isotropic Gaussian blob per label. Labels are balanced (counts differ by
/// at most one). Class centres depend only on the seed, so train and test sets
/// drawn with different `sample_stream` ids share the same classes.
inline Dataset make_gaussian_clusters(const GaussianClusterSpec& spec, std::uint64_t sample_stream = 0) {
  if (spec.num_labels < 1 || spec.num_features < 1 || spec.num_samples < 1)
    throw InvalidConfig("gaussian clusters: sizes must be positive");
  Rng centre_rng = make_rng(spec.seed, "cluster-centres");
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> centres(static_cast<std::size_t>(spec.num_labels),
                                           std::vector<double>(spec.num_features));
  for (auto& c : centres)
    for (auto& v : c) v = spec.center_scale * unit(centre_rng);

  Rng rng = make_rng(spec.seed, "cluster-samples", {sample_stream});
  Dataset d;
  d.num_labels = spec.num_labels;
  d.samples.reserve(spec.num_samples);
  for (std::size_t n = 0; n < spec.num_samples; ++n) {
    Sample s;
    s.label = static_cast<int>(n % static_cast<std::size_t>(spec.num_labels));
    s.x.resize(spec.num_features);
    const auto& c = centres[static_cast<std::size_t>(s.label)];
    for (std::size_t f = 0; f < spec.num_features; ++f) s.x[f] = c[f] + spec.cluster_std * unit(rng);
    d.samples.push_back(std::move(s));
  }
  return d;
}

}  // namespace fedmeld
