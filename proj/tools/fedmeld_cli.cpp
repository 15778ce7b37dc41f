// fedmeld: run experiments, solve SC-MR for a scenario, compare metrics.
//
// Exit codes: 0 ok, 1 other error, 2 config error, 3 infeasible schedule,
// 4 numeric failure.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedmeld/harness/compare.hpp"
#include "fedmeld/harness/config.hpp"
#include "fedmeld/harness/experiment.hpp"

namespace {

using namespace fedmeld;
using namespace fedmeld::harness;

int report(const char* kind, const std::exception& e, int code) {
  nlohmann::json j{{"error", kind}, {"message", e.what()}, {"exit_code", code}};
  std::cerr << j.dump() << '\n';
  return code;
}

RunConfig load_with_overrides(const std::string& path, const std::optional<std::uint64_t>& seed,
                              const std::optional<std::string>& out_dir) {
  RunConfig c = load_config(path);
  if (seed) c.seeds = {*seed};
  if (out_dir) c.output_dir = *out_dir;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FedMeld federated learning simulator"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  app.add_option("--seed", seed, "Run only this master seed");
  app.add_option("--out-dir", out_dir, "Output directory (overrides output_dir)");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the configured scheme for every seed (and sweep value)");
  run->add_option("config", config_path, "JSON run config")->required();

  std::string solve_path;
  auto* solve = app.add_subcommand("solve-scmr", "Print delta*, alpha* and the bound for a config");
  solve->add_option("config", solve_path, "JSON run config")->required();

  std::vector<std::string> metrics;
  std::optional<double> threshold;
  auto* compare = app.add_subcommand("compare", "Summarize metrics CSV files");
  compare->add_option("metrics", metrics, "Metrics CSV files")->required();
  compare->add_option("--threshold", threshold, "Accuracy threshold for time-to-threshold");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const RunConfig c = load_with_overrides(config_path, seed, out_dir);
      const auto rows = run_experiment(c, c.output_dir);
      for (const auto& r : rows) {
        const auto& o = r.outcome;
        const auto& last = o.result.records.back();
        std::cout << o.csv_path << ": k=" << last.k << " t=" << format_double(o.result.time_s)
                  << "s loss=" << format_double(last.loss_global) << " acc=" << format_double(last.acc_test)
                  << " traffic=" << o.result.traffic_bits << "\n";
      }
    } else if (*solve) {
      const RunConfig c = load_with_overrides(solve_path, seed, out_dir);
      const auto [resolved, rep] = solve_config(c, c.seeds.front());
      std::cout << "delta* = " << rep.delta_star << "\n"
                << "alpha* = " << format_double(rep.alpha.alpha_star) << "\n"
                << "bound = " << format_double(rep.bound_value) << "\n";
      if (!rep.feasible) std::cout << "infeasible: " << rep.diagnostic << "\n";
      nlohmann::json j = to_json(rep);
      j["resolved"] = to_json(resolved);
      std::cout << j.dump(2) << "\n";
    } else if (*compare) {
      const auto rows = compare_report(metrics, threshold);
      write_compare_table(std::cout, rows, threshold.has_value());
    }
  } catch (const InfeasibleSchedule& e) {
    return report("infeasible", e, 3);
  } catch (const InvalidConfig& e) {
    return report("config", e, 2);
  } catch (const NumericError& e) {
    return report("numeric", e, 4);
  } catch (const EstimationError& e) {
    return report("numeric", e, 4);
  } catch (const std::exception& e) {
    return report("error", e, 1);
  }
  return 0;
}
