// Summary table over finished runs: final accuracy, time to an accuracy
// threshold and total traffic.
#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fedmeld/harness/metrics_io.hpp"

namespace fedmeld::harness {

struct CompareRow {
  std::string run;
  long final_k = 0;
  double t_sim_s = 0.0;
  double loss_global = 0.0;
  double acc_test = 0.0;
  std::uint64_t traffic_bits = 0;
  std::optional<double> time_to_threshold_s;  // unset when never reached
};

inline CompareRow summarize(const std::string& run, const std::vector<MetricsRecord>& records,
                            std::optional<double> threshold) {
  if (records.empty()) throw InvalidArgument(run + ": no metrics rows");
  CompareRow row;
  row.run = run;
  const auto& last = records.back();
  row.final_k = last.k;
  row.t_sim_s = last.t_sim_s;
  row.loss_global = last.loss_global;
  row.acc_test = last.acc_test;
  row.traffic_bits = last.traffic_bits;
  if (threshold)
    for (const auto& r : records)
      if (r.acc_test >= *threshold) {
        row.time_to_threshold_s = r.t_sim_s;
        break;
      }
  return row;
}

/// Reads each metrics file (run name = file stem) and summarizes it.
inline std::vector<CompareRow> compare_report(const std::vector<std::string>& paths,
                                              std::optional<double> threshold = std::nullopt) {
  if (paths.empty()) throw InvalidArgument("compare: at least one metrics file is required");
  std::vector<CompareRow> rows;
  for (const auto& p : paths)
    rows.push_back(summarize(std::filesystem::path(p).stem().string(), read_metrics_csv(p), threshold));
  return rows;
}

/// CSV table; the time_to_threshold_s column appears only with a threshold.
inline void write_compare_table(std::ostream& out, const std::vector<CompareRow>& rows, bool with_threshold) {
  out << "run,final_k,t_sim_s,loss_global,acc_test,traffic_bits";
  if (with_threshold) out << ",time_to_threshold_s";
  out << '\n';
  for (const auto& r : rows) {
    out << r.run << ',' << r.final_k << ',' << format_double(r.t_sim_s) << ',' << format_double(r.loss_global)
        << ',' << format_double(r.acc_test) << ',' << r.traffic_bits;
    if (with_threshold) out << ',' << (r.time_to_threshold_s ? format_double(*r.time_to_threshold_s) : "");
    out << '\n';
  }
}

}  // namespace fedmeld::harness
