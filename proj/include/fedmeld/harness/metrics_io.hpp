// Metrics CSV persistence. Columns are fixed; numbers use %.17g so a rerun
// with the same seed reproduces the file byte for byte.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fedmeld/errors.hpp"
#include "fedmeld/simulation.hpp"

namespace fedmeld::harness {

inline constexpr const char* kMetricsHeader = "k,t_sim_s,loss_global,acc_test,traffic_bits,event";

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records) {
  out << kMetricsHeader << '\n';
  for (const auto& r : records)
    out << r.k << ',' << format_double(r.t_sim_s) << ',' << format_double(r.loss_global) << ','
        << format_double(r.acc_test) << ',' << r.traffic_bits << ',' << r.event << '\n';
}

inline void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_metrics_csv(out, records);
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  std::size_t used = 0;
  const double x = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return x;
}

inline std::vector<MetricsRecord> read_metrics_csv(std::istream& in, const std::string& name = "metrics") {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw InvalidArgument(name + ": mismatched schema, expected header '" + std::string(kMetricsHeader) + "'");
  std::vector<MetricsRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 6) throw InvalidArgument(name + ":" + std::to_string(lineno) + ": expected 6 columns");
    try {
      MetricsRecord r;
      r.k = std::stol(f[0]);
      r.step = 0;
      r.t_sim_s = parse_double(f[1]);
      r.loss_global = parse_double(f[2]);
      r.acc_test = parse_double(f[3]);
      r.traffic_bits = std::stoull(f[4]);
      r.event = f[5];
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw InvalidArgument(name + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return out;
}

inline std::vector<MetricsRecord> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return read_metrics_csv(in, path);
}

}  // namespace fedmeld::harness
