#ifndef MODESCENT_GLOBALIZE_HPP
#define MODESCENT_GLOBALIZE_HPP

#include <algorithm>
#include <atomic>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "modescent/errors.hpp"
#include "modescent/problem.hpp"
#include "modescent/solver.hpp"

namespace modescent {

/// Points per axis of a multistart grid over the sampling box. An axis with a
/// single point uses the anchor coordinate when given, else the box centre.
struct GridSpec {
  std::vector<int> counts;
  std::optional<Vector> anchor;

  /// Parses "20x20" style specs.
  static GridSpec parse(const std::string& text) {
    GridSpec g;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, 'x')) {
      std::size_t used = 0;
      int c = 0;
      try {
        c = std::stoi(part, &used);
      } catch (const std::exception&) {
        throw PreconditionError("grid spec '" + text + "' is not of the form AxBx...");
      }
      if (used != part.size() || c < 1) throw PreconditionError("grid spec '" + text + "' is not of the form AxBx...");
      g.counts.push_back(c);
    }
    if (g.counts.empty()) throw PreconditionError("empty grid spec");
    return g;
  }
};

/// Grid points in row-major order (last axis fastest).
inline std::vector<Vector> grid_points(const SamplingBox& box, const GridSpec& grid) {
  const auto n = static_cast<int>(box.lower.size());
  if (static_cast<int>(grid.counts.size()) != n)
    throw DimensionError("grid spec has " + std::to_string(grid.counts.size()) + " axes, problem has " +
                         std::to_string(n));
  if (grid.anchor && grid.anchor->size() != n) throw DimensionError("grid anchor has wrong dimension");

  std::vector<Vector> axes(n);
  for (int d = 0; d < n; ++d) {
    const int c = grid.counts[d];
    axes[d].resize(c);
    if (c == 1) {
      axes[d][0] = grid.anchor ? (*grid.anchor)[d] : 0.5 * (box.lower[d] + box.upper[d]);
    } else {
      for (int i = 0; i < c; ++i)
        axes[d][i] = box.lower[d] + (box.upper[d] - box.lower[d]) * static_cast<double>(i) / (c - 1);
    }
  }

  std::vector<Vector> pts;
  std::vector<int> idx(n, 0);
  for (;;) {
    Vector p(n);
    for (int d = 0; d < n; ++d) p[d] = axes[d][idx[d]];
    pts.push_back(p);
    int d = n - 1;
    while (d >= 0 && ++idx[d] == grid.counts[d]) idx[d--] = 0;
    if (d < 0) break;
  }
  return pts;
}

struct ArchiveEntry {
  Vector start;
  Vector x;  ///< terminal point (empty when failed)
  Vector f;
  double alpha = 0.0;
  int iterations = 0;
  bool converged = false;  ///< terminated on the criticality test
  bool failed = false;     ///< the run threw; see message
  bool dominated = false;
  std::string message;
};

struct ParetoArchive {
  std::vector<ArchiveEntry> entries;

  std::size_t size() const { return entries.size(); }
};

/// a dominates b: a <= b componentwise and a_i < b_i for some i.
inline bool dominates(const Vector& a, const Vector& b) {
  return (a.array() <= b.array()).all() && (a.array() < b.array()).any();
}

/**
 * Runs solve_constrained from every grid point. Runs are independent and may
 * execute on `threads` workers (0 = hardware concurrency); entries keep grid
 * order. Failed runs are recorded, never rethrown.
 */
inline ParetoArchive multistart(const ProblemSpec& problem, const GridSpec& grid, const SolverConfig& config,
                                unsigned threads = 0) {
  const std::vector<Vector> starts = grid_points(problem.box, grid);
  ParetoArchive archive;
  archive.entries.resize(starts.size());

  auto run = [&](std::size_t i) {
    ArchiveEntry& e = archive.entries[i];
    e.start = starts[i];
    try {
      const SolveResult r = solve_constrained(problem, starts[i], config);
      e.x = r.x;
      e.f = r.f;
      e.alpha = r.alpha;
      e.iterations = r.trace.iterations;
      e.converged = r.critical();
    } catch (const Error& err) {
      e.failed = true;
      e.message = err.what();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, starts.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < starts.size(); ++i) run(i);
    return archive;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < starts.size(); i = next++) run(i);
    });
  for (auto& t : pool) t.join();
  return archive;
}

/// Sets the dominated flag of every non-failed entry; failed entries are
/// flagged dominated since they carry no objective value.
inline ParetoArchive mark_dominated(ParetoArchive archive) {
  auto& es = archive.entries;
  for (auto& e : es) e.dominated = e.failed;
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (es[i].failed) continue;
    for (std::size_t j = 0; j < es.size() && !es[i].dominated; ++j)
      if (j != i && !es[j].failed && dominates(es[j].f, es[i].f)) es[i].dominated = true;
  }
  return archive;
}

/// Entries whose objective vector no other entry dominates. Identical
/// objective vectors do not dominate each other, so duplicates survive.
inline ParetoArchive nondominated_filter(const ParetoArchive& archive) {
  ParetoArchive marked = mark_dominated(archive);
  ParetoArchive out;
  for (auto& e : marked.entries)
    if (!e.dominated) out.entries.push_back(std::move(e));
  return out;
}

/// Drops entries whose terminal point lies within `radius` of an earlier kept one.
inline ParetoArchive deduplicate(const ParetoArchive& archive, double radius = 1e-6) {
  ParetoArchive out;
  for (const auto& e : archive.entries) {
    const bool dup = !e.failed && std::any_of(out.entries.begin(), out.entries.end(), [&](const ArchiveEntry& k) {
      return !k.failed && (k.x - e.x).norm() < radius;
    });
    if (!dup) out.entries.push_back(e);
  }
  return out;
}

}  // namespace modescent

#endif  // MODESCENT_GLOBALIZE_HPP
