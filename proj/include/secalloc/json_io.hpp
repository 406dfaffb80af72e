#pragma once

// Serialization for every artifact the tool writes: result documents as
// JSON, tables and traces as CSV.  All real numbers are printed with nine
// significant digits and every document ends with a newline, so identical
// inputs produce byte-identical files.  Vertices are 1-based on disk.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "secalloc/experiments.hpp"
#include "secalloc/game.hpp"
#include "secalloc/graph.hpp"
#include "secalloc/impact.hpp"

namespace secalloc {

namespace detail {

inline std::string fmt_g9(double v) {
  if (!std::isfinite(v)) return "null";  // JSON has no infinities
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline std::string json_vertices(const std::vector<int>& vs) {
  std::string s = "[";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(vs[i] + 1);  // 1-based on disk
  }
  return s + "]";
}

inline std::string json_reals(const std::vector<double>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    s += fmt_g9(xs[i]);
  }
  return s + "]";
}

}  // namespace detail

inline std::string to_json(const ImpactResult& r) {
  std::ostringstream os;
  os << "{\"status\":\"" << (r.is_bounded() ? "bounded" : "unbounded")
     << "\",\"monitors\":" << detail::json_vertices(r.monitors);
  if (r.is_bounded()) {
    os << ",\"value\":" << detail::fmt_g9(r.value)
       << ",\"gamma\":" << detail::json_reals(r.gamma)
       << ",\"worst_frequency\":" << detail::fmt_g9(r.worst_frequency)
       << ",\"certificate_min\":" << detail::fmt_g9(r.certificate_min);
  }
  os << "}\n";
  return os.str();
}

inline std::string to_json(const GameSolution& sol) {
  std::ostringstream os;
  os << "{\"m_star\":" << detail::json_vertices(sol.best_monitor_set.vertices)
     << ",\"a_star\":" << sol.best_attack + 1
     << ",\"r_star\":" << detail::fmt_g9(sol.r_star)
     << ",\"q_star\":" << detail::fmt_g9(sol.q_star) << ",\"table\":[";
  for (std::size_t i = 0; i < sol.table.size(); ++i) {
    const GameRow& row = sol.table[i];
    if (i) os << ",";
    os << "{\"m\":" << detail::json_vertices(row.m.vertices)
       << ",\"a_best\":" << row.a_best + 1 << ",\"r\":"
       << (row.r.is_bounded() ? detail::fmt_g9(row.r.value) : "null")
       << ",\"q\":"
       << (row.q.is_bounded() ? detail::fmt_g9(row.q.value) : "null") << "}";
  }
  os << "]}\n";
  return os.str();
}

inline std::string to_json(const DominatingCollection& collection,
                           std::uint64_t subset_total) {
  std::ostringstream os;
  os << "{\"budget\":" << collection.budget
     << ",\"count\":" << collection.sets.size()
     << ",\"subset_count\":" << subset_total << ",\"sets\":[";
  for (std::size_t i = 0; i < collection.sets.size(); ++i) {
    if (i) os << ",";
    os << detail::json_vertices(collection.sets[i].vertices);
  }
  os << "]}\n";
  return os.str();
}

inline std::string to_json(const DemoSummary& demo) {
  std::ostringstream os;
  os << "{\"n\":" << demo.n << ",\"q\":" << detail::fmt_g9(demo.q)
     << ",\"n_s\":" << demo.n_s << ",\"kappa\":" << detail::fmt_g9(demo.kappa)
     << ",\"graph_seed\":" << demo.graph_seed
     << ",\"resamples\":" << demo.resamples
     << ",\"dominating_count\":" << demo.dominating_count
     << ",\"subset_count\":" << demo.subset_total
     << ",\"max_r\":" << detail::fmt_g9(demo.max_r)
     << ",\"max_q\":" << detail::fmt_g9(demo.max_q) << ",\"solution\":";
  std::string sol = to_json(demo.solution);
  sol.pop_back();  // inner document drops its trailing newline
  os << sol << "}\n";
  return os.str();
}

// Fixed column order so downstream plotting scripts can rely on position.
inline std::string to_csv(const std::vector<TrendRow>& rows) {
  std::ostringstream os;
  os << "n,samples,mean_dom_count,subset_count\n";
  for (const TrendRow& row : rows)
    os << row.n << "," << row.samples << ","
       << detail::fmt_g9(row.mean_dom_count) << "," << row.subset_total
       << "\n";
  return os.str();
}

inline std::string to_csv(const SimulationTrace& tr) {
  const std::size_t n = tr.x.empty() ? 0 : tr.x.front().size();
  std::ostringstream os;
  os << "t";
  for (std::size_t i = 0; i < n; ++i) os << ",x_" << i + 1;
  os << ",y_rho";
  for (int m : tr.monitors) os << ",y_m" << m + 1;
  os << "\n";
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    os << detail::fmt_g9(tr.t[k]);
    for (std::size_t i = 0; i < n; ++i)
      os << "," << detail::fmt_g9(tr.x[k][i]);
    os << "," << detail::fmt_g9(tr.y_target[k]);
    for (std::size_t m = 0; m < tr.monitors.size(); ++m)
      os << "," << detail::fmt_g9(tr.y_monitor[m][k]);
    os << "\n";
  }
  return os.str();
}

// Eight-line companion document describing a trace file.
inline std::string trace_sidecar(const SimulationTrace& tr) {
  std::ostringstream os;
  os << "{\n"
     << "  \"attack\": " << tr.attack + 1 << ",\n"
     << "  \"target\": " << tr.target + 1 << ",\n"
     << "  \"monitors\": " << detail::json_vertices(tr.monitors) << ",\n"
     << "  \"alpha\": " << detail::fmt_g9(tr.alpha) << ",\n"
     << "  \"omega\": " << detail::fmt_g9(tr.omega) << ",\n"
     << "  \"step\": " << detail::fmt_g9(tr.step) << "\n"
     << "}\n";
  return os.str();
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace secalloc
