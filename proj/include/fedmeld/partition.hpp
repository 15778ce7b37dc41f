// Splitting a dataset over areas (clusters) and clients.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "fedmeld/dataset.hpp"
#include "fedmeld/errors.hpp"
#include "fedmeld/rng.hpp"

namespace fedmeld {

enum class PartitionScheme { IidClients, IidClusters, NonIidClusters };

inline PartitionScheme parse_partition_scheme(const std::string& s) {
  if (s == "iid_clients") return PartitionScheme::IidClients;
  if (s == "iid_clusters") return PartitionScheme::IidClusters;
  if (s == "noniid_clusters") return PartitionScheme::NonIidClusters;
  throw InvalidConfig("unknown partition scheme: " + s);
}

inline std::string to_string(PartitionScheme s) {
  switch (s) {
    case PartitionScheme::IidClients: return "iid_clients";
    case PartitionScheme::IidClusters: return "iid_clusters";
    case PartitionScheme::NonIidClusters: return "noniid_clusters";
  }
  return "?";
}

struct PartitionSpec {
  PartitionScheme scheme = PartitionScheme::IidClients;
  std::vector<int> clients_per_area;  // N_i
  int labels_per_cluster = 3;
  int labels_per_client = 2;
  std::uint64_t seed = 1;

  int num_clients() const { return std::accumulate(clients_per_area.begin(), clients_per_area.end(), 0); }
};

struct Partition {
  std::vector<Dataset> clients;                       // indexed by global client id
  std::vector<std::vector<std::size_t>> area_clients;  // client ids per area

  std::size_t num_areas() const { return area_clients.size(); }
  std::size_t num_clients() const { return clients.size(); }
};

namespace detail {

inline Partition empty_partition(const Dataset& data, const PartitionSpec& spec) {
  Partition p;
  std::size_t next = 0;
  for (int n : spec.clients_per_area) {
    std::vector<std::size_t> ids;
    for (int j = 0; j < n; ++j) ids.push_back(next++);
    p.area_clients.push_back(std::move(ids));
  }
  p.clients.assign(next, Dataset{{}, data.num_labels});
  return p;
}

// Equal split of `total` into `parts` counts differing by at most one.
inline std::vector<std::size_t> even_counts(std::size_t total, std::size_t parts) {
  std::vector<std::size_t> c(parts, total / parts);
  for (std::size_t k = 0; k < total % parts; ++k) ++c[k];
  return c;
}

}  // namespace detail

inline Partition partition(const Dataset& data, const PartitionSpec& spec) {
  data.validate();
  if (spec.clients_per_area.empty()) throw InvalidConfig("partition: no areas");
  for (int n : spec.clients_per_area)
    if (n < 1) throw InvalidConfig("partition: every area needs at least one client");
  const std::size_t total_clients = static_cast<std::size_t>(spec.num_clients());
  if (total_clients > data.size()) throw InvalidConfig("partition: more clients than samples");

  Partition p = detail::empty_partition(data, spec);
  Rng rng = make_rng(spec.seed, "partition");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  if (total_clients == 1) {
    p.clients[0] = data;
    return p;
  }

  const auto counts = detail::even_counts(data.size(), total_clients);

  switch (spec.scheme) {
    case PartitionScheme::IidClients: {
      std::size_t pos = 0;
      for (std::size_t c = 0; c < total_clients; ++c)
        for (std::size_t k = 0; k < counts[c]; ++k) p.clients[c].samples.push_back(data.samples[order[pos++]]);
      break;
    }
    case PartitionScheme::IidClusters: {
      // Each cluster draws uniformly from all labels; inside a cluster the pool
      // is sorted by label and dealt in contiguous runs, so clients see only a
      // few labels each.
      std::size_t pos = 0;
      for (const auto& ids : p.area_clients) {
        std::size_t pool_size = 0;
        for (std::size_t c : ids) pool_size += counts[c];
        std::vector<std::size_t> pool(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                      order.begin() + static_cast<std::ptrdiff_t>(pos + pool_size));
        pos += pool_size;
        std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
          return data.samples[a].label < data.samples[b].label;
        });
        std::size_t k = 0;
        for (std::size_t c : ids)
          for (std::size_t n = 0; n < counts[c]; ++n) p.clients[c].samples.push_back(data.samples[pool[k++]]);
      }
      break;
    }
    case PartitionScheme::NonIidClusters: {
      const int num_labels = data.num_labels;
      const int per_cluster = spec.labels_per_cluster;
      const int per_client = spec.labels_per_client;
      if (per_cluster < 1 || per_cluster > num_labels)
        throw InvalidConfig("partition: labels_per_cluster must be in [1, num_labels]");
      if (per_client < 1 || per_client > per_cluster)
        throw InvalidConfig("partition: labels_per_client must be in [1, labels_per_cluster]");

      std::vector<int> label_order(static_cast<std::size_t>(num_labels));
      std::iota(label_order.begin(), label_order.end(), 0);
      std::shuffle(label_order.begin(), label_order.end(), rng);

      // (client, label) pairs; every pair receives the same quota.
      std::vector<std::vector<int>> client_labels(total_clients);
      for (std::size_t a = 0; a < p.area_clients.size(); ++a) {
        const auto& ids = p.area_clients[a];
        if (static_cast<int>(ids.size()) + per_client - 1 < per_cluster)
          throw InvalidConfig("partition: area " + std::to_string(a) +
                              " has too few clients to cover its cluster labels");
        std::vector<int> cluster;
        for (int r = 0; r < per_cluster; ++r)
          cluster.push_back(label_order[static_cast<std::size_t>((static_cast<int>(a) * per_cluster + r) % num_labels)]);
        for (std::size_t j = 0; j < ids.size(); ++j)
          for (int r = 0; r < per_client; ++r)
            client_labels[ids[j]].push_back(cluster[(j + static_cast<std::size_t>(r)) % cluster.size()]);
      }

      std::vector<std::vector<std::size_t>> pools(static_cast<std::size_t>(num_labels));
      for (std::size_t idx : order) pools[static_cast<std::size_t>(data.samples[idx].label)].push_back(idx);
      std::vector<std::size_t> demand(static_cast<std::size_t>(num_labels), 0);
      for (const auto& labels : client_labels)
        for (int l : labels) ++demand[static_cast<std::size_t>(l)];
      std::size_t quota = data.size();
      for (std::size_t l = 0; l < demand.size(); ++l)
        if (demand[l] > 0) quota = std::min(quota, pools[l].size() / demand[l]);
      if (quota == 0) throw InvalidConfig("partition: not enough samples per label for the requested clients");

      std::vector<std::size_t> cursor(static_cast<std::size_t>(num_labels), 0);
      for (std::size_t c = 0; c < total_clients; ++c)
        for (int l : client_labels[c]) {
          auto& pool = pools[static_cast<std::size_t>(l)];
          auto& at = cursor[static_cast<std::size_t>(l)];
          for (std::size_t n = 0; n < quota; ++n) p.clients[c].samples.push_back(data.samples[pool[at++]]);
        }
      break;
    }
  }
  return p;
}

}  // namespace fedmeld
