#ifndef MODESCENT_IO_HPP
#define MODESCENT_IO_HPP

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "modescent/globalize.hpp"
#include "modescent/solver.hpp"

namespace modescent {

/// Shortest text that reads back to the same double ('.' decimal, 17 digits).
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline nlohmann::json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline std::string join_indices(const std::vector<int>& idx) {
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? ";" : "") + std::to_string(idx[i]);
  return s;
}

inline void append_columns(std::string& line, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) line += "," + format_double(v[i]);
}

}  // namespace detail

/**
 * Trace as CSV: iter, x0..x{n-1}, F0..F{m-1}, alpha, branch, t, k, active_set.
 * The active set is a ';'-separated list of 0-based inequality indices.
 */
inline void write_trace_csv(std::ostream& os, const IterateTrace& trace) {
  if (trace.records.empty()) return;
  const auto n = trace.records.front().x.size();
  const auto m = trace.records.front().f.size();
  std::string header = "iter";
  for (Eigen::Index i = 0; i < n; ++i) header += ",x" + std::to_string(i);
  for (Eigen::Index i = 0; i < m; ++i) header += ",F" + std::to_string(i);
  header += ",alpha,branch,t,k,active_set";
  os << header << '\n';
  for (const auto& r : trace.records) {
    std::string line = std::to_string(r.iter);
    detail::append_columns(line, r.x);
    detail::append_columns(line, r.f);
    line += "," + format_double(r.alpha) + "," + to_string(r.branch) + "," + format_double(r.t) + "," +
            std::to_string(r.k) + "," + detail::join_indices(r.active);
    os << line << '\n';
  }
}

inline nlohmann::json trace_to_json(const IterateTrace& trace) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : trace.records)
    records.push_back({{"iter", r.iter},
                       {"x", detail::to_json(r.x)},
                       {"F", detail::to_json(r.f)},
                       {"alpha", r.alpha},
                       {"active_set", r.active},
                       {"branch", to_string(r.branch)},
                       {"t", r.t},
                       {"k", r.k},
                       {"feasibility_repaired", r.repaired}});
  return {{"termination", to_string(trace.reason)},
          {"iterations", trace.iterations},
          {"sp1_steps", trace.count(Branch::SP1)},
          {"sp2_steps", trace.count(Branch::SP2)},
          {"records", records}};
}

/// Archive as CSV: x..., F..., alpha, converged, failed, dominated, iterations.
inline void write_archive_csv(std::ostream& os, const ParetoArchive& archive, int n, int m) {
  std::string header;
  for (int i = 0; i < n; ++i) header += (i ? ",x" : "x") + std::to_string(i);
  for (int i = 0; i < m; ++i) header += ",F" + std::to_string(i);
  header += ",alpha,converged,failed,dominated,iterations";
  os << header << '\n';
  for (const auto& e : archive.entries) {
    std::string line;
    const Vector x = e.failed ? e.start : e.x;
    for (Eigen::Index i = 0; i < x.size(); ++i) line += (i ? "," : "") + format_double(x[i]);
    for (int i = 0; i < m; ++i) line += "," + (e.failed ? std::string("nan") : format_double(e.f[i]));
    line += "," + format_double(e.alpha) + "," + (e.converged ? "1" : "0") + "," + (e.failed ? "1" : "0") + "," +
            (e.dominated ? "1" : "0") + "," + std::to_string(e.iterations);
    os << line << '\n';
  }
}

inline nlohmann::json archive_to_json(const ParetoArchive& archive) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : archive.entries) {
    nlohmann::json j = {{"start", detail::to_json(e.start)},
                        {"converged", e.converged},
                        {"failed", e.failed},
                        {"dominated", e.dominated},
                        {"iterations", e.iterations}};
    if (e.failed) {
      j["message"] = e.message;
    } else {
      j["x"] = detail::to_json(e.x);
      j["F"] = detail::to_json(e.f);
      j["alpha"] = e.alpha;
    }
    entries.push_back(std::move(j));
  }
  return {{"entries", entries}};
}

}  // namespace modescent

#endif  // MODESCENT_IO_HPP
