#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fedmeld/harness/compare.hpp"
#include "fedmeld/harness/config.hpp"
#include "fedmeld/harness/experiment.hpp"
#include "fedmeld/harness/metrics_io.hpp"

using namespace fedmeld;
using namespace fedmeld::harness;

namespace {

const std::string kData = FEDMELD_TEST_DATA_DIR;
const std::string kConfigs = FEDMELD_CONFIG_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("fedmeld_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

std::vector<Violation> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

}  // namespace

TEST(Config, DefaultsFileLoadsCleanly) {
  const auto c = load_config(kConfigs + "/reference_defaults.json");
  EXPECT_EQ(c.link.w_up_hz, 5e6);
  EXPECT_EQ(c.link.p_ue_w, 1.0);
  EXPECT_EQ(c.link.p_sat_w, 5.0);
  EXPECT_EQ(c.link.additional_loss_db, 5.0);
  EXPECT_EQ(c.geometry.altitude_m, 550e3);
  EXPECT_EQ(c.scheme, "fedmeld");
}

TEST(Config, EverySampleConfigLoads) {
  for (const auto& e : std::filesystem::directory_iterator(kConfigs))
    if (e.path().extension() == ".json") {
      EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
    }
}

TEST(Config, NegativeBandwidthIsOneViolation) {
  try {
    load_config(kData + "/bad_config.json");
    FAIL() << "expected a ConfigError";
  } catch (const ConfigError& e) {
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_EQ(e.violations()[0].path, "link.w_up_hz");
  }
}

TEST(Config, AllViolationsReported) {
  auto j = to_json(RunConfig{});
  j["link"]["w_down_hz"] = -1.0;
  j["training"]["E"] = 0;
  j["scheme"] = "gossip";
  j["bogus"] = 1;
  const auto v = violations_of(j.dump());
  EXPECT_EQ(v.size(), 4u);
}

TEST(Config, DuplicateKeyRejected) {
  const auto v = violations_of(R"({"name": "a", "name": "b"})");
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].path, "name");
  EXPECT_NE(v[0].message.find("duplicate"), std::string::npos);
}

TEST(Config, SyntaxErrorIsConfigError) { EXPECT_THROW(parse_config("{ \"name\": "), InvalidConfig); }

TEST(Config, RoundTrip) {
  for (const auto& e : std::filesystem::directory_iterator(kConfigs)) {
    if (e.path().extension() != ".json") continue;
    const auto c = load_config(e.path().string());
    EXPECT_EQ(parse_config(to_json(c).dump()), c) << e.path();
  }
  RunConfig c;
  c.fedmeld.K = 4;
  c.fedmeld.alpha = 0.25;
  c.training.time_budget_s = 100.0;
  c.sweep = SweepConfig{"scmr.T_max_s", {1.0, 2.0}};
  EXPECT_EQ(parse_config(to_json(c).dump()), c);
}

TEST(Config, SetNumericFillsAutoSlots) {
  RunConfig c;
  set_numeric(c, "fedmeld.delta", 3);
  EXPECT_EQ(c.fedmeld.delta, 3);
  set_numeric(c, "scmr.T_max_s", 3600);
  EXPECT_EQ(c.scmr.T_max_s, 3600.0);
  EXPECT_THROW(set_numeric(c, "training.E", 2.5), ConfigError);
  EXPECT_THROW(set_numeric(c, "nope.field", 1), ConfigError);
  EXPECT_THROW(set_numeric(c, "scheme", 1), ConfigError);
}

TEST(MetricsCsv, RoundTripAndSchema) {
  std::vector<MetricsRecord> recs(2);
  recs[0].k = 1;
  recs[0].t_sim_s = 0.1;
  recs[0].loss_global = 1.0 / 3.0;
  recs[0].acc_test = std::nan("");
  recs[0].traffic_bits = 10;
  recs[1].k = 2;
  recs[1].t_sim_s = 0.3;
  recs[1].event = "mix|handover";
  recs[1].traffic_bits = 20;
  std::stringstream ss;
  write_metrics_csv(ss, recs);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), kMetricsHeader);
  const auto back = read_metrics_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].loss_global, recs[0].loss_global);
  EXPECT_TRUE(std::isnan(back[0].acc_test));
  EXPECT_EQ(back[1].event, "mix|handover");
  std::stringstream bad("k,t,loss\n1,2,3\n");
  EXPECT_THROW(read_metrics_csv(bad), InvalidArgument);
}

TEST(Experiment, GoldenCsv) {
  const auto c = load_config(kData + "/golden_config.json");
  const auto dir = temp_dir("golden");
  const auto o = run_one(c, 7, dir);
  EXPECT_EQ(slurp(o.csv_path), slurp(kData + "/golden_metrics.csv"));
}

TEST(Experiment, SeedsAreReproducible) {
  const auto c = load_config(kConfigs + "/quadratic_fedmeld.json");
  const auto d1 = temp_dir("seed_a");
  const auto d2 = temp_dir("seed_b");
  const auto a = run_experiment(c, d1);
  const auto b = run_experiment(c, d2);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(slurp(a[i].outcome.csv_path), slurp(b[i].outcome.csv_path));
    EXPECT_TRUE(std::filesystem::exists(a[i].outcome.report_path));
  }
  EXPECT_NE(slurp(a[0].outcome.csv_path), slurp(a[1].outcome.csv_path));
}

TEST(Experiment, ReportCarriesSolverOutput) {
  auto c = load_config(kConfigs + "/quadratic_fedmeld.json");
  c.seeds = {1};
  c.fedmeld.delta.reset();
  c.fedmeld.alpha.reset();
  const auto o = run_one(c, 1, temp_dir("report"));
  const auto j = nlohmann::json::parse(slurp(o.report_path));
  EXPECT_TRUE(j["scmr"].contains("delta_star"));
  EXPECT_TRUE(j["scmr"].contains("alpha_star"));
  EXPECT_EQ(j["resolved"]["delta"].get<int>(), j["scmr"]["delta_star"].get<int>());
}

TEST(Experiment, SatsPerOrbitSweepServeDurationMonotone) {
  const auto c = load_config(kConfigs + "/sweep_sats_per_orbit.json");
  const auto rows = run_experiment(c, temp_dir("sats"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(rows[0].outcome.resolved.serve_duration_s, rows[1].outcome.resolved.serve_duration_s);
  EXPECT_GT(rows[1].outcome.resolved.serve_duration_s, rows[2].outcome.resolved.serve_duration_s);
  EXPECT_NEAR(rows[1].outcome.resolved.serve_duration_s, 86.82015552895352, 1e-9);
  EXPECT_GE(rows[0].outcome.resolved.K, rows[2].outcome.resolved.K);
}

TEST(Experiment, TmaxSweepDeltaNonIncreasing) {
  const auto c = load_config(kConfigs + "/sweep_tmax.json");
  const auto dir = temp_dir("tmax");
  const auto rows = run_experiment(c, dir);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_LE(rows[i].outcome.resolved.delta, rows[i - 1].outcome.resolved.delta);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(dir) / "tmax_sweep_sweep.csv"));
}

TEST(Experiment, TrafficMatchesCommCostPerRound) {
  auto c = load_config(kConfigs + "/quadratic_fedmeld.json");
  c.seeds = {1};
  const auto dir = temp_dir("traffic");
  std::vector<std::string> csvs;
  for (const std::string scheme : {"fedmeld", "hfl", "pfl", "ring"}) {
    c.scheme = scheme;
    c.name = "traffic_" + scheme;
    const auto o = run_one(c, 1, dir);
    csvs.push_back(o.csv_path);
    std::uint64_t u = 0;
    for (int x : o.resolved.U) u += static_cast<std::uint64_t>(x);
    const std::uint64_t q = o.resolved.model_bits;
    const std::uint64_t plain = comm_cost(Scheme::FedMeld, u, o.resolved.M, q).traffic_bits;
    const std::uint64_t ex = comm_cost(parse_scheme(scheme), u, o.resolved.M, q).traffic_bits;
    const auto rounds = static_cast<std::uint64_t>(o.result.rounds_completed);
    const auto exch = scheme == "fedmeld" ? 0u : static_cast<std::uint64_t>(o.result.exchange_rounds);
    EXPECT_EQ(o.result.traffic_bits, (rounds - exch) * plain + exch * ex) << scheme;
    EXPECT_EQ(o.cost.cumulative_bits, o.result.traffic_bits);
  }
  const auto rows = compare_report(csvs);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].run, "traffic_fedmeld_s1");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GT(rows[i].traffic_bits, rows[0].traffic_bits);
}

TEST(Compare, SingleRunAndThresholdColumn) {
  const auto rows = compare_report({kData + "/golden_metrics.csv"});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].run, "golden_metrics");
  EXPECT_EQ(rows[0].final_k, 12);
  std::stringstream plain, thr;
  write_compare_table(plain, rows, false);
  const std::string table = plain.str();
  EXPECT_EQ(table.find("time_to_threshold_s"), std::string::npos);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 2);
  write_compare_table(thr, compare_report({kData + "/golden_metrics.csv"}, 0.5), true);
  EXPECT_NE(thr.str().find("time_to_threshold_s"), std::string::npos);
}

TEST(Compare, MismatchedSchemaRejected) {
  const auto dir = temp_dir("schema");
  const auto path = (std::filesystem::path(dir) / "bad.csv").string();
  std::ofstream(path) << "k,t_sim_s,loss\n1,2,3\n";
  EXPECT_THROW(compare_report({path}), InvalidArgument);
}

TEST(Experiment, InfeasibleFlightSurfaces) {
  const auto c = load_config(kData + "/infeasible_config.json");
  EXPECT_THROW(run_one(c, 1, temp_dir("infeasible")), InfeasibleSchedule);
}
