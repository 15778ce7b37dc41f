// Run configuration: a strict JSON schema with SI-suffixed keys. Loading
// collects every violation with its field path instead of stopping at the
// first one.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedmeld/errors.hpp"
#include "fedmeld/linkmodel.hpp"

namespace fedmeld::harness {

using json = nlohmann::json;

struct Violation {
  std::string path;
  std::string message;
  bool operator==(const Violation&) const = default;
};

class ConfigError : public InvalidConfig {
 public:
  explicit ConfigError(std::vector<Violation> v) : InvalidConfig(format(v)), violations_(std::move(v)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  static std::string format(const std::vector<Violation>& v) {
    std::string s = "config has " + std::to_string(v.size()) + " violation(s)";
    for (const auto& x : v) s += "\n  " + x.path + ": " + x.message;
    return s;
  }
  std::vector<Violation> violations_;
};

struct GeometryConfig {
  double altitude_m = 550e3;
  int sats_per_orbit = 66;
  int num_areas = 8;
  std::vector<double> area_angles_rad;  // empty: evenly spaced
  bool operator==(const GeometryConfig&) const = default;
};

struct LinkConfig {
  double p_ue_w = 1.0;
  double p_sat_w = 5.0;
  double uplink_frequency_hz = 14e9;
  double downlink_frequency_hz = 12e9;
  double w_up_hz = 5e6;
  double w_down_hz = 5e6;
  double additional_loss_db = 5.0;
  double noise_psd_w_per_hz = 1.38e-21;
  double sat_antenna_radius_m = 0.48;
  double ue_antenna_radius_m = 0.5;
  double aperture_efficiency = 0.65;

  LinkBudget budget() const {
    LinkBudget b;
    b.p_ue_w = p_ue_w;
    b.p_sat_w = p_sat_w;
    b.uplink_wavelength_m = kSpeedOfLight / uplink_frequency_hz;
    b.downlink_wavelength_m = kSpeedOfLight / downlink_frequency_hz;
    b.w_up_hz = w_up_hz;
    b.w_down_hz = w_down_hz;
    b.additional_loss_db = additional_loss_db;
    b.noise_psd_w_per_hz = noise_psd_w_per_hz;
    b.sat_antenna_radius_m = sat_antenna_radius_m;
    b.ue_antenna_radius_m = ue_antenna_radius_m;
    b.aperture_efficiency = aperture_efficiency;
    return b;
  }
  bool operator==(const LinkConfig&) const = default;
};

struct ComputeConfig {
  double flops_per_sample = 1e9;
  double client_flops_per_s = 15.11e12;
  double t_agg_s = 0.0;
  bool operator==(const ComputeConfig&) const = default;
};

struct TimingConfig {
  std::string mode = "link";  // "link" or "constant"
  double round_latency_s = 10.0;           // constant mode
  std::optional<double> slant_range_m;     // link mode; default: altitude
  std::optional<std::uint64_t> model_bits;  // default: 32 bits per parameter
  bool use_fly_time = true;                // idle until the SCF lands
  bool operator==(const TimingConfig&) const = default;
};

struct DatasetConfig {
  std::string kind = "gaussian";  // gaussian, quadratic, csv
  std::size_t train_samples = 4000;
  std::size_t test_samples = 1000;
  std::size_t num_features = 10;
  int num_labels = 10;
  double cluster_std = 1.0;
  double center_scale = 2.0;
  double curvature_min = 0.5;  // quadratic
  double curvature_max = 2.0;
  std::string train_path;  // csv
  std::string test_path;
  bool operator==(const DatasetConfig&) const = default;
};

struct ModelConfig {
  std::string family = "logistic";  // logistic, mlp, quadratic
  double l2 = 1e-2;
  std::size_t hidden = 16;
  bool operator==(const ModelConfig&) const = default;
};

struct PartitionConfig {
  std::string scheme = "noniid_clusters";
  std::vector<int> clients_per_area{5};  // one entry is broadcast to every area
  int labels_per_cluster = 3;
  int labels_per_client = 2;
  bool operator==(const PartitionConfig&) const = default;
};

struct TrainingConfig {
  int E = 5;
  std::size_t batch_size = 64;
  long R = 1000;
  double participation = 0.8;
  double mu = 1e-2;
  std::optional<double> smoothness;  // default: model bound on the training set
  int eval_every = 1;
  std::optional<double> time_budget_s;
  bool operator==(const TrainingConfig&) const = default;
};

struct FedMeldConfig {
  std::optional<int> K;  // default: rounds per serve window
  std::optional<int> delta;  // default: solved
  std::optional<double> alpha;  // default: solved
  bool operator==(const FedMeldConfig&) const = default;
};

struct ScmrConfig {
  double T_max_s = 72000.0;
  double G = 1.0;
  double sigma = 0.0;  // per-client gradient noise, applied to every client
  std::optional<double> Gamma;  // default: estimated for convex models
  double init_gap = 1.0;
  double rho = 1.5;
  bool operator==(const ScmrConfig&) const = default;
};

struct BaselineConfig {
  std::optional<int> period_rounds;  // default: K + delta
  std::vector<double> ground_stations_rad{0.25, 0.25 + std::numbers::pi};
  double ground_delay_s = 0.0;
  double isl_rate_bps = 1e9;
  bool operator==(const BaselineConfig&) const = default;
};

struct SweepConfig {
  std::string parameter;  // dotted path of a numeric field
  std::vector<double> values;
  bool operator==(const SweepConfig&) const = default;
};

struct RunConfig {
  std::string name = "run";
  std::string scheme = "fedmeld";  // fedmeld, hfl, pfl, ring, area_fedavg
  std::vector<std::uint64_t> seeds{1};
  GeometryConfig geometry;
  LinkConfig link;
  ComputeConfig compute;
  TimingConfig timing;
  DatasetConfig dataset;
  ModelConfig model;
  PartitionConfig partition;
  TrainingConfig training;
  FedMeldConfig fedmeld;
  ScmrConfig scmr;
  BaselineConfig baseline;
  std::optional<SweepConfig> sweep;
  std::string output_dir = "out";
  bool operator==(const RunConfig&) const = default;
};

namespace detail {

// Walks one JSON object, recording violations and the keys it consumed so
// that leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path, std::vector<Violation>& out)
      : j_(j), path_(std::move(path)), out_(out) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  void finish() {
    if (!j_.is_object()) return;
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail(sub(k), "unknown key");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.is_object() && j_.contains(key);
  }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const json& at(const std::string& key) const { return j_.at(key); }
  void fail(const std::string& path, const std::string& msg) { out_.push_back({path, msg}); }

  template <typename Check = std::nullptr_t>
  void number(const std::string& key, double& dst, Check check = nullptr, const char* rule = "") {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number()) return fail(sub(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) return fail(sub(key), "must be finite");
    if constexpr (!std::is_same_v<Check, std::nullptr_t>) {
      if (!check(x)) return fail(sub(key), rule);
    }
    dst = x;
  }

  template <typename Int, typename Check = std::nullptr_t>
  void integer(const std::string& key, Int& dst, Check check = nullptr, const char* rule = "") {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number_integer()) return fail(sub(key), "expected an integer");
    if (std::is_unsigned_v<Int> && v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)
      return fail(sub(key), "must be >= 0");
    const auto x = v.get<Int>();
    if constexpr (!std::is_same_v<Check, std::nullptr_t>) {
      if (!check(static_cast<double>(x))) return fail(sub(key), rule);
    }
    dst = x;
  }

  void string(const std::string& key, std::string& dst, std::initializer_list<const char*> allowed = {}) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_string()) return fail(sub(key), "expected a string");
    const auto s = v.get<std::string>();
    if (allowed.size() > 0) {
      bool ok = false;
      std::string list;
      for (const char* a : allowed) {
        ok = ok || s == a;
        list += (list.empty() ? "" : ", ") + std::string(a);
      }
      if (!ok) return fail(sub(key), "must be one of: " + list);
    }
    dst = s;
  }

  void boolean(const std::string& key, bool& dst) {
    if (!has(key)) return;
    if (!at(key).is_boolean()) return fail(sub(key), "expected true or false");
    dst = at(key).get<bool>();
  }

  /// "auto" or null leaves the optional empty.
  template <typename T, typename Check = std::nullptr_t>
  void optional(const std::string& key, std::optional<T>& dst, Check check = nullptr, const char* rule = "") {
    if (!has(key)) return;
    const json& v = at(key);
    if (v.is_null() || (v.is_string() && v.get<std::string>() == "auto")) {
      dst.reset();
      return;
    }
    const bool ok_type = std::is_integral_v<T> ? v.is_number_integer() : v.is_number();
    if (!ok_type) return fail(sub(key), std::is_integral_v<T> ? "expected an integer or \"auto\"" : "expected a number or \"auto\"");
    if (std::is_unsigned_v<T> && !v.is_number_unsigned()) return fail(sub(key), "must be >= 0");
    const T x = v.get<T>();
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(x)) return fail(sub(key), "must be finite");
    }
    if constexpr (!std::is_same_v<Check, std::nullptr_t>) {
      if (!check(static_cast<double>(x))) return fail(sub(key), rule);
    }
    dst = x;
  }

  template <typename T>
  void number_list(const std::string& key, std::vector<T>& dst, bool allow_scalar = false) {
    if (!has(key)) return;
    const json& v = at(key);
    std::vector<T> out;
    auto take = [&](const json& e, const std::string& p) {
      const bool ok = std::is_integral_v<T> ? e.is_number_integer() : e.is_number();
      if (!ok) {
        fail(p, std::is_integral_v<T> ? "expected an integer" : "expected a number");
        return false;
      }
      if (std::is_unsigned_v<T> && !e.is_number_unsigned()) {
        fail(p, "must be >= 0");
        return false;
      }
      out.push_back(e.get<T>());
      return true;
    };
    if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i)
        if (!take(v[i], sub(key) + "[" + std::to_string(i) + "]")) return;
    } else if (allow_scalar) {
      if (!take(v, sub(key))) return;
    } else {
      return fail(sub(key), "expected an array");
    }
    dst = std::move(out);
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<Violation>& out_;
  std::set<std::string> seen_;
};

inline auto positive = [](double x) { return x > 0.0; };
inline auto non_negative = [](double x) { return x >= 0.0; };
inline auto at_least_one = [](double x) { return x >= 1.0; };

template <typename Fn>
void section(ObjectReader& parent, const std::string& key, Fn&& fn, std::vector<Violation>& out) {
  if (!parent.has(key)) return;
  ObjectReader r(parent.at(key), parent.sub(key), out);
  if (parent.at(key).is_object()) fn(r);
  r.finish();
}

/// Parses text, rejecting duplicate object keys anywhere in the tree.
inline json parse_strict(const std::string& text) {
  std::vector<std::set<std::string>> keys;
  std::vector<std::string> dupes;
  json::parser_callback_t cb = [&](int, json::parse_event_t ev, json& parsed) {
    switch (ev) {
      case json::parse_event_t::object_start: keys.emplace_back(); break;
      case json::parse_event_t::object_end: keys.pop_back(); break;
      case json::parse_event_t::key: {
        const auto k = parsed.get<std::string>();
        if (!keys.empty() && !keys.back().insert(k).second) dupes.push_back(k);
        break;
      }
      default: break;
    }
    return true;
  };
  json j;
  try {
    j = json::parse(text, cb);
  } catch (const json::parse_error& e) {
    throw ConfigError({{"", std::string("parse error: ") + e.what()}});
  }
  if (!dupes.empty()) {
    std::vector<Violation> v;
    for (const auto& d : dupes) v.push_back({d, "duplicate key"});
    throw ConfigError(std::move(v));
  }
  return j;
}

}  // namespace detail

/// Builds a RunConfig from parsed JSON; throws ConfigError listing every violation.
inline RunConfig config_from_json(const json& j) {
  using namespace detail;
  std::vector<Violation> v;
  RunConfig c;
  ObjectReader root(j, "", v);
  if (!j.is_object()) throw ConfigError(std::move(v));

  root.string("name", c.name);
  if (c.name.empty() || c.name.find('/') != std::string::npos)
    root.fail("name", "must be non-empty and contain no '/'");
  root.string("scheme", c.scheme, {"fedmeld", "hfl", "pfl", "ring", "area_fedavg"});
  root.number_list("seeds", c.seeds, true);
  if (c.seeds.empty()) root.fail("seeds", "at least one seed is required");
  root.string("output_dir", c.output_dir);

  section(root, "geometry", [&](ObjectReader& r) {
    auto& g = c.geometry;
    r.number("altitude_m", g.altitude_m, positive, "must be > 0");
    r.integer("sats_per_orbit", g.sats_per_orbit, at_least_one, "must be >= 1");
    r.integer("num_areas", g.num_areas, at_least_one, "must be >= 1");
    r.number_list("area_angles_rad", g.area_angles_rad);
    if (!g.area_angles_rad.empty()) {
      if (static_cast<int>(g.area_angles_rad.size()) != g.num_areas)
        r.fail(r.sub("area_angles_rad"), "needs one angle per area");
      for (std::size_t i = 0; i < g.area_angles_rad.size(); ++i) {
        const double a = g.area_angles_rad[i];
        if (!(a >= 0.0 && a < 2.0 * std::numbers::pi) || (i > 0 && !(a > g.area_angles_rad[i - 1])))
          r.fail(r.sub("area_angles_rad"), "angles must be strictly increasing in [0, 2 pi)");
      }
    }
    if (g.num_areas > g.sats_per_orbit) r.fail(r.sub("num_areas"), "cannot exceed sats_per_orbit");
  }, v);

  section(root, "link", [&](ObjectReader& r) {
    auto& l = c.link;
    r.number("p_ue_w", l.p_ue_w, positive, "must be > 0");
    r.number("p_sat_w", l.p_sat_w, positive, "must be > 0");
    r.number("uplink_frequency_hz", l.uplink_frequency_hz, positive, "must be > 0");
    r.number("downlink_frequency_hz", l.downlink_frequency_hz, positive, "must be > 0");
    r.number("w_up_hz", l.w_up_hz, positive, "must be > 0");
    r.number("w_down_hz", l.w_down_hz, positive, "must be > 0");
    r.number("additional_loss_db", l.additional_loss_db);
    r.number("noise_psd_w_per_hz", l.noise_psd_w_per_hz, positive, "must be > 0");
    r.number("sat_antenna_radius_m", l.sat_antenna_radius_m, positive, "must be > 0");
    r.number("ue_antenna_radius_m", l.ue_antenna_radius_m, positive, "must be > 0");
    r.number("aperture_efficiency", l.aperture_efficiency, [](double x) { return x > 0.0 && x <= 1.0; },
             "must be in (0, 1]");
  }, v);

  section(root, "compute", [&](ObjectReader& r) {
    r.number("flops_per_sample", c.compute.flops_per_sample, positive, "must be > 0");
    r.number("client_flops_per_s", c.compute.client_flops_per_s, positive, "must be > 0");
    r.number("t_agg_s", c.compute.t_agg_s, non_negative, "must be >= 0");
  }, v);

  section(root, "timing", [&](ObjectReader& r) {
    auto& t = c.timing;
    r.string("mode", t.mode, {"link", "constant"});
    r.number("round_latency_s", t.round_latency_s, positive, "must be > 0");
    r.optional("slant_range_m", t.slant_range_m, positive, "must be > 0");
    r.optional("model_bits", t.model_bits, positive, "must be > 0");
    r.boolean("use_fly_time", t.use_fly_time);
  }, v);

  section(root, "dataset", [&](ObjectReader& r) {
    auto& d = c.dataset;
    r.string("kind", d.kind, {"gaussian", "quadratic", "csv"});
    r.integer("train_samples", d.train_samples, at_least_one, "must be >= 1");
    r.integer("test_samples", d.test_samples);
    r.integer("num_features", d.num_features, at_least_one, "must be >= 1");
    r.integer("num_labels", d.num_labels, [](double x) { return x >= 2.0; }, "must be >= 2");
    r.number("cluster_std", d.cluster_std, non_negative, "must be >= 0");
    r.number("center_scale", d.center_scale, non_negative, "must be >= 0");
    r.number("curvature_min", d.curvature_min, positive, "must be > 0");
    r.number("curvature_max", d.curvature_max, positive, "must be > 0");
    r.string("train_path", d.train_path);
    r.string("test_path", d.test_path);
    if (d.curvature_max < d.curvature_min) r.fail(r.sub("curvature_max"), "must be >= curvature_min");
    if (d.kind == "csv" && d.train_path.empty()) r.fail(r.sub("train_path"), "required for kind csv");
  }, v);

  section(root, "model", [&](ObjectReader& r) {
    r.string("family", c.model.family, {"logistic", "mlp", "quadratic"});
    r.number("l2", c.model.l2, non_negative, "must be >= 0");
    r.integer("hidden", c.model.hidden, at_least_one, "must be >= 1");
  }, v);

  section(root, "partition", [&](ObjectReader& r) {
    auto& p = c.partition;
    r.string("scheme", p.scheme, {"iid_clients", "iid_clusters", "noniid_clusters"});
    r.number_list("clients_per_area", p.clients_per_area, true);
    if (p.clients_per_area.empty()) r.fail(r.sub("clients_per_area"), "must not be empty");
    for (int n : p.clients_per_area)
      if (n < 1) r.fail(r.sub("clients_per_area"), "every entry must be >= 1");
    r.integer("labels_per_cluster", p.labels_per_cluster, at_least_one, "must be >= 1");
    r.integer("labels_per_client", p.labels_per_client, at_least_one, "must be >= 1");
  }, v);

  section(root, "training", [&](ObjectReader& r) {
    auto& t = c.training;
    r.integer("E", t.E, at_least_one, "must be >= 1");
    r.integer("batch_size", t.batch_size, at_least_one, "must be >= 1");
    r.integer("R", t.R, at_least_one, "must be >= 1");
    r.number("participation", t.participation, [](double x) { return x > 0.0 && x <= 1.0; }, "must be in (0, 1]");
    r.number("mu", t.mu, positive, "must be > 0");
    r.optional("smoothness", t.smoothness, positive, "must be > 0");
    r.integer("eval_every", t.eval_every, at_least_one, "must be >= 1");
    r.optional("time_budget_s", t.time_budget_s, positive, "must be > 0");
    if (t.R < t.E) r.fail(r.sub("R"), "must be >= E");
  }, v);

  section(root, "fedmeld", [&](ObjectReader& r) {
    r.optional("K", c.fedmeld.K, at_least_one, "must be >= 1");
    r.optional("delta", c.fedmeld.delta, at_least_one, "must be >= 1");
    r.optional("alpha", c.fedmeld.alpha, [](double x) { return x >= 0.0 && x < 1.0; }, "must be in [0, 1)");
  }, v);

  section(root, "scmr", [&](ObjectReader& r) {
    auto& s = c.scmr;
    r.number("T_max_s", s.T_max_s, positive, "must be > 0");
    r.number("G", s.G, non_negative, "must be >= 0");
    r.number("sigma", s.sigma, non_negative, "must be >= 0");
    r.optional("Gamma", s.Gamma, non_negative, "must be >= 0");
    r.number("init_gap", s.init_gap, non_negative, "must be >= 0");
    r.number("rho", s.rho, [](double x) { return x > 1.0; }, "must be > 1");
  }, v);

  section(root, "baseline", [&](ObjectReader& r) {
    auto& b = c.baseline;
    r.optional("period_rounds", b.period_rounds, at_least_one, "must be >= 1");
    r.number_list("ground_stations_rad", b.ground_stations_rad);
    if (b.ground_stations_rad.empty()) r.fail(r.sub("ground_stations_rad"), "at least one station is required");
    r.number("ground_delay_s", b.ground_delay_s, non_negative, "must be >= 0");
    r.number("isl_rate_bps", b.isl_rate_bps, positive, "must be > 0");
  }, v);

  if (root.has("sweep") && !root.at("sweep").is_null()) {
    SweepConfig s;
    section(root, "sweep", [&](ObjectReader& r) {
      r.string("parameter", s.parameter);
      r.number_list("values", s.values);
      if (s.parameter.empty()) r.fail(r.sub("parameter"), "required");
      if (s.values.empty()) r.fail(r.sub("values"), "at least one value is required");
    }, v);
    c.sweep = s;
  }

  root.finish();
  if (!v.empty()) throw ConfigError(std::move(v));
  return c;
}

inline RunConfig parse_config(const std::string& text) { return config_from_json(detail::parse_strict(text)); }

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{"", "cannot open " + path}});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace detail {
template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json("auto");
}
}  // namespace detail

inline json to_json(const RunConfig& c) {
  using detail::opt;
  json j;
  j["name"] = c.name;
  j["scheme"] = c.scheme;
  j["seeds"] = c.seeds;
  j["output_dir"] = c.output_dir;
  const auto& g = c.geometry;
  j["geometry"] = {{"altitude_m", g.altitude_m},
                   {"sats_per_orbit", g.sats_per_orbit},
                   {"num_areas", g.num_areas},
                   {"area_angles_rad", g.area_angles_rad}};
  const auto& l = c.link;
  j["link"] = {{"p_ue_w", l.p_ue_w},
               {"p_sat_w", l.p_sat_w},
               {"uplink_frequency_hz", l.uplink_frequency_hz},
               {"downlink_frequency_hz", l.downlink_frequency_hz},
               {"w_up_hz", l.w_up_hz},
               {"w_down_hz", l.w_down_hz},
               {"additional_loss_db", l.additional_loss_db},
               {"noise_psd_w_per_hz", l.noise_psd_w_per_hz},
               {"sat_antenna_radius_m", l.sat_antenna_radius_m},
               {"ue_antenna_radius_m", l.ue_antenna_radius_m},
               {"aperture_efficiency", l.aperture_efficiency}};
  j["compute"] = {{"flops_per_sample", c.compute.flops_per_sample},
                  {"client_flops_per_s", c.compute.client_flops_per_s},
                  {"t_agg_s", c.compute.t_agg_s}};
  const auto& t = c.timing;
  j["timing"] = {{"mode", t.mode},
                 {"round_latency_s", t.round_latency_s},
                 {"slant_range_m", opt(t.slant_range_m)},
                 {"model_bits", opt(t.model_bits)},
                 {"use_fly_time", t.use_fly_time}};
  const auto& d = c.dataset;
  j["dataset"] = {{"kind", d.kind},
                  {"train_samples", d.train_samples},
                  {"test_samples", d.test_samples},
                  {"num_features", d.num_features},
                  {"num_labels", d.num_labels},
                  {"cluster_std", d.cluster_std},
                  {"center_scale", d.center_scale},
                  {"curvature_min", d.curvature_min},
                  {"curvature_max", d.curvature_max},
                  {"train_path", d.train_path},
                  {"test_path", d.test_path}};
  j["model"] = {{"family", c.model.family}, {"l2", c.model.l2}, {"hidden", c.model.hidden}};
  const auto& p = c.partition;
  j["partition"] = {{"scheme", p.scheme},
                    {"clients_per_area", p.clients_per_area},
                    {"labels_per_cluster", p.labels_per_cluster},
                    {"labels_per_client", p.labels_per_client}};
  const auto& tr = c.training;
  j["training"] = {{"E", tr.E},
                   {"batch_size", tr.batch_size},
                   {"R", tr.R},
                   {"participation", tr.participation},
                   {"mu", tr.mu},
                   {"smoothness", opt(tr.smoothness)},
                   {"eval_every", tr.eval_every},
                   {"time_budget_s", opt(tr.time_budget_s)}};
  j["fedmeld"] = {{"K", opt(c.fedmeld.K)}, {"delta", opt(c.fedmeld.delta)}, {"alpha", opt(c.fedmeld.alpha)}};
  const auto& s = c.scmr;
  j["scmr"] = {{"T_max_s", s.T_max_s}, {"G", s.G},           {"sigma", s.sigma},
               {"Gamma", opt(s.Gamma)}, {"init_gap", s.init_gap}, {"rho", s.rho}};
  const auto& b = c.baseline;
  j["baseline"] = {{"period_rounds", opt(b.period_rounds)},
                   {"ground_stations_rad", b.ground_stations_rad},
                   {"ground_delay_s", b.ground_delay_s},
                   {"isl_rate_bps", b.isl_rate_bps}};
  if (c.sweep) j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
  return j;
}

/// Applies a numeric override to a dotted field path (sweeps and CLI).
inline void set_numeric(RunConfig& c, const std::string& path, double value) {
  json j = to_json(c);
  json::json_pointer ptr("/" + [&] {
    std::string p = path;
    for (auto& ch : p)
      if (ch == '.') ch = '/';
    return p;
  }());
  if (!j.contains(ptr)) throw ConfigError({{path, "unknown sweep parameter"}});
  json& slot = j[ptr];
  if (slot == "auto") {
    slot = value == std::floor(value) ? json(static_cast<long long>(value)) : json(value);
  } else if (slot.is_number_integer()) {
    if (value != std::floor(value)) throw ConfigError({{path, "needs an integer value"}});
    slot = static_cast<long long>(value);
  } else if (slot.is_number()) {
    slot = value;
  } else {
    throw ConfigError({{path, "is not a numeric field"}});
  }
  c = config_from_json(j);
}

}  // namespace fedmeld::harness
