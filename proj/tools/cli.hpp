#ifndef MODESCENT_TOOLS_CLI_HPP
#define MODESCENT_TOOLS_CLI_HPP

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "modescent/modescent.hpp"
#include "simplex_grid_oracle.hpp"

namespace modescent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitIterationCap = 2;
inline constexpr int kExitUsage = 64;

/// Thrown for invalid user input; maps to exit code 64.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string problem;
  std::string problem_file;
  std::string x0;
  std::string grid;
  std::string out = ".";
  std::string eta = "inf";
  std::string retraction = "project";
  double beta = 0.5;
  double beta0 = 1.0;
  double sigma = 1e-4;
  double eps = 1e-4;
  double gamma = 1.0;
  int max_iters = 10000;
  unsigned threads = 0;
};

inline std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline double parse_eta(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || std::isnan(v)) throw UsageError("");
    return v;
  } catch (const std::exception&) {
    throw UsageError("--eta expects a number or 'inf', got '" + text + "'");
  }
}

inline Vector parse_point(const std::string& text, int n) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(part, &used));
      if (used != part.size()) throw UsageError("");
    } catch (const std::exception&) {
      throw UsageError("--x0 expects comma-separated numbers, got '" + text + "'");
    }
  }
  if (static_cast<int>(vals.size()) != n)
    throw UsageError("--x0 has " + std::to_string(vals.size()) + " entries, problem dimension is " + std::to_string(n));
  return Eigen::Map<Vector>(vals.data(), n);
}

inline SolverConfig make_config(const Options& o) {
  SolverConfig c;
  c.beta = o.beta;
  c.beta0 = o.beta0;
  c.sigma = o.sigma;
  c.epsilon = o.eps;
  c.eta = parse_eta(o.eta);
  c.gamma = o.gamma;
  c.max_iters = o.max_iters;
  if (o.retraction == "project")
    c.retraction = RetractionKind::Projection;
  else if (o.retraction == "psi")
    c.retraction = RetractionKind::Psi;
  else
    throw UsageError("--retraction must be 'project' or 'psi'");
  try {
    c.validate();
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  return c;
}

inline nlohmann::json config_json(const SolverConfig& c) {
  return {{"beta0", c.beta0},     {"beta", c.beta},         {"sigma", c.sigma},
          {"epsilon", c.epsilon}, {"eta", std::isinf(c.eta) ? nlohmann::json("inf") : nlohmann::json(c.eta)},
          {"gamma", c.gamma},     {"tol_alpha", c.tol_alpha}, {"max_iters", c.max_iters},
          {"eps_act", c.eps_act}, {"retraction", to_string(c.retraction)}};
}

inline ProblemSpec resolve_problem(const Options& o) {
  if (!o.problem.empty() && !o.problem_file.empty()) throw UsageError("give either --problem or --problem-file");
  try {
    if (!o.problem_file.empty()) return load_polynomial_problem(o.problem_file);
    if (o.problem.empty()) throw UsageError("--problem or --problem-file is required");
    return registry_get(o.problem);
  } catch (const LookupError& e) {
    throw UsageError(e.what());
  } catch (const DimensionError& e) {
    throw UsageError(e.what());
  }
}

inline std::filesystem::path prepare_out(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

template <typename Writer>
inline void write_file(const std::filesystem::path& path, Writer&& w) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  w(f);
}

/// Run manifest: what ran, with which settings, and what it produced.
inline void write_manifest(const std::filesystem::path& dir, const std::string& command, const Options& o,
                           const SolverConfig& c, const std::vector<std::string>& outputs,
                           const std::string& started, const nlohmann::json& summary) {
  nlohmann::json m = {{"command", command},
                      {"problem", o.problem_file.empty() ? o.problem : o.problem_file},
                      {"config", config_json(c)},
                      {"outputs", outputs},
                      {"started", started},
                      {"finished", timestamp()},
                      {"summary", summary}};
  write_file(dir / "manifest.json", [&](std::ostream& os) { os << m.dump(2) << '\n'; });
}

inline int cmd_solve(const Options& o, std::ostream& out) {
  const std::string started = timestamp();
  const ProblemSpec problem = resolve_problem(o);
  const SolverConfig config = make_config(o);
  const Vector x0 = o.x0.empty() ? Vector(0.5 * (problem.box.lower + problem.box.upper)) : parse_point(o.x0, problem.n);
  const auto dir = prepare_out(o.out);

  IterateTrace trace;
  int code = kExitOk;
  nlohmann::json summary;
  try {
    const SolveResult r = problem.m_g == 0 && problem.m_h > 0 ? solve_equality(problem, x0, config)
                                                              : solve_constrained(problem, x0, config);
    trace = r.trace;
    code = r.critical() ? kExitOk : kExitIterationCap;
    summary = {{"termination", to_string(r.trace.reason)},
               {"iterations", r.trace.iterations},
               {"x", std::vector<double>(r.x.data(), r.x.data() + r.x.size())},
               {"F", std::vector<double>(r.f.data(), r.f.data() + r.f.size())},
               {"alpha", r.alpha}};
    out << to_string(r.trace.reason) << " after " << r.trace.iterations << " iterations, alpha = "
        << format_double(r.alpha) << '\n';
  } catch (const SolverError& e) {
    trace = e.trace();
    code = kExitError;
    summary = {{"termination", "ERROR"}, {"error", e.what()}, {"iterations", trace.iterations}};
    out << "error: " << e.what() << '\n';
  }

  write_file(dir / "trace.csv", [&](std::ostream& os) { write_trace_csv(os, trace); });
  write_file(dir / "trace.json", [&](std::ostream& os) { os << trace_to_json(trace).dump(2) << '\n'; });
  write_manifest(dir, "solve", o, config, {"trace.csv", "trace.json", "manifest.json"}, started, summary);
  return code;
}

inline int cmd_front(const Options& o, std::ostream& out) {
  const std::string started = timestamp();
  const ProblemSpec problem = resolve_problem(o);
  const SolverConfig config = make_config(o);
  if (o.grid.empty()) throw UsageError("--grid is required");
  GridSpec grid;
  try {
    grid = GridSpec::parse(o.grid);
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  if (static_cast<int>(grid.counts.size()) != problem.n)
    throw UsageError("--grid needs " + std::to_string(problem.n) + " axes");
  if (!o.x0.empty()) grid.anchor = parse_point(o.x0, problem.n);
  const auto dir = prepare_out(o.out);

  const ParetoArchive all = mark_dominated(multistart(problem, grid, config, o.threads));
  const ParetoArchive front = deduplicate(nondominated_filter(all));

  std::size_t failed = 0, converged = 0;
  for (const auto& e : all.entries) {
    failed += e.failed ? 1 : 0;
    converged += e.converged ? 1 : 0;
  }
  write_file(dir / "archive.csv", [&](std::ostream& os) { write_archive_csv(os, all, problem.n, problem.m); });
  write_file(dir / "archive.json", [&](std::ostream& os) { os << archive_to_json(all).dump(2) << '\n'; });
  write_file(dir / "front.csv", [&](std::ostream& os) { write_archive_csv(os, front, problem.n, problem.m); });
  write_file(dir / "front.json", [&](std::ostream& os) { os << archive_to_json(front).dump(2) << '\n'; });
  const nlohmann::json summary = {{"runs", all.size()},
                                  {"converged", converged},
                                  {"failed", failed},
                                  {"nondominated", front.size()}};
  write_manifest(dir, "front", o, config,
                 {"archive.csv", "archive.json", "front.csv", "front.json", "manifest.json"}, started, summary);
  out << all.size() << " runs, " << converged << " converged, " << failed << " failed, " << front.size()
      << " nondominated\n";
  return kExitOk;
}

struct AuditCheck {
  std::string name;
  bool pass;
  std::string detail;
};

/// Derivative audit, retraction slope checks and dual-oracle spot checks.
inline std::vector<AuditCheck> audit_problem(const ProblemSpec& problem, std::uint64_t seed = 20170801) {
  std::vector<AuditCheck> checks;
  std::mt19937_64 rng(seed);
  auto sample_box = [&] {
    Vector x(problem.n);
    for (int i = 0; i < problem.n; ++i)
      x[i] = std::uniform_real_distribution<double>(problem.box.lower[i], problem.box.upper[i])(rng);
    return x;
  };

  {
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) worst = std::max(worst, fd_audit(problem, sample_box(), 1e-6));
    checks.push_back({"fd_audit", worst <= 1e-6, "max error " + format_double(worst)});
  }

  std::vector<ManifoldChart> charts;
  if (problem.m_h > 0) charts.emplace_back(problem);
  for (int i = 0; i < problem.m_g; ++i)
    if (problem.m_h + 1 <= problem.n - 1) charts.emplace_back(problem, std::vector<int>{i});
  for (const auto& chart : charts) {
    for (RetractionKind kind : {RetractionKind::Projection, RetractionKind::Psi}) {
      if (kind == RetractionKind::Psi && chart.rows() != 1) continue;
      int tried = 0;
      double worst = 0.0;
      bool monotone = true;
      for (int attempt = 0; attempt < 200 && tried < 20; ++attempt) {
        Vector x;
        Matrix basis;
        try {
          x = project(chart, sample_box());
          basis = tangent_basis(chart.jacobian(x));
        } catch (const Error&) {
          continue;
        }
        Vector coeff(basis.cols());
        for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff[i] = std::normal_distribution<double>()(rng);
        if (coeff.norm() == 0.0) continue;
        const Vector v = basis * coeff / coeff.norm();
        try {
          const double e2 = ((retract(chart, x, 1e-2 * v, kind) - x) / 1e-2 - v).norm();
          const double e3 = ((retract(chart, x, 1e-3 * v, kind) - x) / 1e-3 - v).norm();
          worst = std::max(worst, e3);
          monotone = monotone && e3 <= e2 + 1e-9;
        } catch (const Error&) {
          worst = INFINITY;
        }
        ++tried;
      }
      std::string name = std::string("retraction_slope[") + to_string(kind) + ",eq=" +
                         std::to_string(problem.m_h) + ",ineq=" +
                         (chart.ineq_indices().empty() ? std::string("-") : std::to_string(chart.ineq_indices()[0])) +
                         "]";
      checks.push_back({name, tried > 0 && worst <= 1e-2 && monotone,
                        std::to_string(tried) + " pairs, worst slope error " + format_double(worst)});
    }
  }

  {
    int tried = 0;
    double worst_kkt = 0.0, worst_gap = 0.0;
    for (int attempt = 0; attempt < 100 && tried < 20; ++attempt) {
      EvalBundle b;
      try {
        b = evaluate(problem, feasible_start(problem, sample_box()));
      } catch (const Error&) {
        continue;
      }
      const DirectionResult d = solve_direction(b, SubproblemKind::ObjectiveIcs, 1e-4);
      const Matrix& gens = d.projected;
      const Vector point = -d.v;
      const double scale = std::max(1.0, gens.colwise().squaredNorm().maxCoeff());
      worst_kkt = std::max(worst_kkt, kkt_residual(gens, d.lambda, point) / scale);
      const auto ref = oracle::refined_min_norm(gens);
      worst_gap = std::max(worst_gap, (ref.point - point).norm() / std::sqrt(scale));
      ++tried;
    }
    checks.push_back({"dual_oracle", tried > 0 && worst_kkt <= 1e-10 && worst_gap <= 1e-5,
                      std::to_string(tried) + " points, KKT residual " + format_double(worst_kkt) +
                          ", oracle gap " + format_double(worst_gap)});
  }
  return checks;
}

inline int cmd_audit(const Options& o, std::ostream& out) {
  std::vector<ProblemSpec> problems;
  if (o.problem.empty() && o.problem_file.empty()) {
    for (const auto& name : registry_names()) problems.push_back(registry_get(name));
  } else {
    problems.push_back(resolve_problem(o));
  }
  bool all_pass = true;
  for (const auto& p : problems) {
    for (const auto& c : audit_problem(p)) {
      out << (c.pass ? "PASS " : "FAIL ") << p.name << ' ' << c.name << ": " << c.detail << '\n';
      all_pass = all_pass && c.pass;
    }
  }
  return all_pass ? kExitOk : kExitError;
}

inline void add_solver_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--problem", o.problem, "Registered problem name");
  cmd->add_option("--problem-file", o.problem_file, "JSON polynomial problem description");
  cmd->add_option("--x0", o.x0, "Start point, comma separated");
  cmd->add_option("--beta", o.beta, "Backtracking factor in (0,1)");
  cmd->add_option("--beta0", o.beta0, "Initial step length");
  cmd->add_option("--sigma", o.sigma, "Armijo constant in (0,1)");
  cmd->add_option("--eps", o.eps, "Active-set tolerance");
  cmd->add_option("--eta", o.eta, "Boundary-following threshold, or 'inf'");
  cmd->add_option("--gamma", o.gamma, "Subproblem tolerance in (0,1]");
  cmd->add_option("--max-iters", o.max_iters, "Iteration cap");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--retraction", o.retraction, "project | psi");
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Descent solver for constrained multiobjective problems"};
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve", "Run the descent method from one start point");
  add_solver_flags(solve, o);
  auto* front = app.add_subcommand("front", "Multistart over a grid and filter nondominated points");
  add_solver_flags(front, o);
  front->add_option("--grid", o.grid, "Points per axis, e.g. 20x20");
  front->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  auto* audit = app.add_subcommand("audit", "Check derivatives, retractions and subproblem solutions");
  audit->add_option("--problem", o.problem, "Registered problem name (default: all)");
  audit->add_option("--problem-file", o.problem_file, "JSON polynomial problem description");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*solve) return cmd_solve(o, out);
    if (*front) return cmd_front(o, out);
    return cmd_audit(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace modescent::cli

#endif  // MODESCENT_TOOLS_CLI_HPP
