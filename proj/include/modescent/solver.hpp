#ifndef MODESCENT_SOLVER_HPP
#define MODESCENT_SOLVER_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "modescent/direction.hpp"
#include "modescent/errors.hpp"
#include "modescent/geometry.hpp"
#include "modescent/linesearch.hpp"
#include "modescent/problem.hpp"

namespace modescent {

struct SolverConfig {
  double beta0 = 1.0;
  double beta = 0.5;
  double sigma = 1e-4;
  double epsilon = 1e-4;  ///< active-set tolerance of the objective-ICs subproblem
  double eta = std::numeric_limits<double>::infinity();  ///< boundary-following threshold; inf disables it
  double gamma = 1.0;
  double tol_alpha = 1e-8;
  int max_iters = 10000;
  double eps_act = 1e-9;  ///< inequalities with G_i >= -eps_act are treated as equalities
  double feas_tol = 1e-9;
  int k_max = 60;
  RetractionKind retraction = RetractionKind::Projection;

  void validate() const {
    step_params().validate();
    if (!(epsilon >= 0.0)) throw PreconditionError("config: epsilon must be non-negative");
    if (std::isnan(eta)) throw PreconditionError("config: eta must not be NaN");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw PreconditionError("config: gamma must lie in (0, 1]");
    if (!(tol_alpha >= 0.0)) throw PreconditionError("config: tol_alpha must be non-negative");
    if (max_iters < 0) throw PreconditionError("config: max_iters must be non-negative");
    if (!(eps_act >= 0.0) || !(feas_tol >= 0.0)) throw PreconditionError("config: tolerances must be non-negative");
  }

  StepParams step_params() const { return {beta0, beta, sigma, k_max, feas_tol, eps_act}; }
};

enum class Branch { SP1, SP2, Terminal };

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::SP1: return "SP1-step";
    case Branch::SP2: return "SP2-step";
    case Branch::Terminal: return "terminal";
  }
  return "?";
}

enum class Termination { Critical, MaxIters };

inline const char* to_string(Termination t) {
  return t == Termination::Critical ? "TERMINATED_CRITICAL" : "MAX_ITERS";
}

/// State at the start of one iteration and the step taken from it. The last
/// record of a finished trace has branch Terminal, t = 0 and k = -1.
struct IterateRecord {
  int iter = 0;
  Vector x;
  Vector f;
  double alpha = 0.0;
  std::vector<int> active;
  Branch branch = Branch::Terminal;
  double t = 0.0;
  int k = -1;
  bool repaired = false;
};

struct IterateTrace {
  std::vector<IterateRecord> records;
  Termination reason = Termination::MaxIters;
  int iterations = 0;  ///< steps taken

  int count(Branch b) const {
    int c = 0;
    for (const auto& r : records) c += r.branch == b ? 1 : 0;
    return c;
  }
};

struct SolveResult {
  Vector x;
  Vector f;
  double alpha = 0.0;  ///< final criticality value (objective-ICs subproblem, or equality one)
  IterateTrace trace;

  bool critical() const { return trace.reason == Termination::Critical; }
};

/// A solve failed part-way; carries the trace up to the failure.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, IterateTrace trace) : Error(what), trace_(std::move(trace)) {}
  const IterateTrace& trace() const noexcept { return trace_; }

 private:
  IterateTrace trace_;
};

namespace detail {

inline IterateRecord record(int iter, const EvalBundle& b, double alpha, const ActiveSet& active, Branch branch,
                            const StepResult* step) {
  IterateRecord r;
  r.iter = iter;
  r.x = b.x;
  r.f = b.f;
  r.alpha = alpha;
  r.active = active.indices;
  r.branch = branch;
  if (step) {
    r.t = step->t;
    r.k = step->k;
    r.repaired = step->feasibility_repaired;
  }
  return r;
}

inline SolveResult finish(IterateTrace trace, const EvalBundle& b, double alpha, const ActiveSet& active,
                          Termination reason) {
  trace.reason = reason;
  trace.records.push_back(record(trace.iterations, b, alpha, active, Branch::Terminal, nullptr));
  return {b.x, b.f, alpha, std::move(trace)};
}

}  // namespace detail

/**
 * Descent method for problems with equality constraints only: project the
 * start onto {H = 0}, then iterate equality-subproblem directions with Armijo
 * steps through the configured retraction until alpha >= -tol_alpha.
 */
inline SolveResult solve_equality(const ProblemSpec& problem, const Vector& x_init, const SolverConfig& config) {
  problem.validate();
  config.validate();
  if (problem.m_g != 0) throw PreconditionError("solve_equality: problem has inequality constraints");
  detail::check_point(problem, x_init);

  const ManifoldChart chart(problem);
  const RetractFn retract_fn = chart_retraction(chart, config.retraction);
  const StepParams params = config.step_params();

  IterateTrace trace;
  Vector x;
  try {
    x = project(chart, x_init);
  } catch (const Error& e) {
    throw SolverError(std::string("initial projection failed: ") + e.what(), trace);
  }

  const ActiveSet none;
  for (;;) {
    const EvalBundle b = evaluate(problem, x);
    const DirectionResult dir = solve_direction(b, SubproblemKind::Equality, 0.0, config.gamma);
    if (dir.critical(config.tol_alpha)) return detail::finish(std::move(trace), b, dir.alpha, none, Termination::Critical);
    if (trace.iterations >= config.max_iters)
      return detail::finish(std::move(trace), b, dir.alpha, none, Termination::MaxIters);

    StepResult step;
    try {
      step = armijo_step(problem, b, dir.v, retract_fn, params);
    } catch (const Error& e) {
      throw SolverError(e.what(), trace);
    }
    trace.records.push_back(detail::record(trace.iterations, b, dir.alpha, none, Branch::SP1, &step));
    ++trace.iterations;
    x = step.new_point;
  }
}

/**
 * Descent method with equality and inequality constraints. Each iteration
 * solves the equality-ICs subproblem on the inequalities active within
 * eps_act; if its value alpha_2 is at most -eta the step follows the boundary
 * (boundary_step), otherwise the objective-ICs subproblem with tolerance
 * epsilon supplies the direction and a feasible Armijo step is taken. The
 * run stops once that subproblem's value alpha_1 >= -tol_alpha. eta = inf
 * never follows the boundary and skips the equality-ICs solve.
 */
inline SolveResult solve_constrained(const ProblemSpec& problem, const Vector& x_init, const SolverConfig& config) {
  problem.validate();
  config.validate();
  detail::check_point(problem, x_init);

  const StepParams params = config.step_params();
  const ManifoldChart base_chart(problem);
  const RetractFn base_retract = chart_retraction(base_chart, config.retraction);

  IterateTrace trace;
  Vector x;
  try {
    x = feasible_start(problem, x_init, config.feas_tol);
  } catch (const Error& e) {
    throw SolverError(std::string("feasible start failed: ") + e.what(), trace);
  }

  const bool boundary_following = std::isfinite(config.eta);
  for (;;) {
    const EvalBundle b = evaluate(problem, x);

    if (boundary_following && trace.iterations < config.max_iters) {
      const ActiveSet on_boundary = active_set(b, config.eps_act);
      DirectionResult sp2;
      try {
        sp2 = solve_direction(b, SubproblemKind::EqualityIcs, config.eps_act, config.gamma);
      } catch (const Error& e) {
        throw SolverError(e.what(), trace);
      }
      if (sp2.alpha <= -config.eta && !sp2.critical(config.tol_alpha)) {
        try {
          const ManifoldChart chart(problem, on_boundary);
          const StepResult step = boundary_step(problem, b, sp2.v, chart, config.retraction, params);
          trace.records.push_back(detail::record(trace.iterations, b, sp2.alpha, on_boundary, Branch::SP2, &step));
          ++trace.iterations;
          x = step.new_point;
          continue;
        } catch (const NoStep&) {
          // Fall through to the objective-ICs step.
        }
      }
    }

    DirectionResult sp1;
    try {
      sp1 = solve_direction(b, SubproblemKind::ObjectiveIcs, config.epsilon, config.gamma);
    } catch (const Error& e) {
      throw SolverError(e.what(), trace);
    }
    if (sp1.critical(config.tol_alpha))
      return detail::finish(std::move(trace), b, sp1.alpha, sp1.active, Termination::Critical);
    if (trace.iterations >= config.max_iters)
      return detail::finish(std::move(trace), b, sp1.alpha, sp1.active, Termination::MaxIters);

    StepResult step;
    try {
      step = feasible_armijo_step(problem, b, sp1.v, sp1.active, base_retract, params);
    } catch (const Error& e) {
      throw SolverError(e.what(), trace);
    }
    trace.records.push_back(detail::record(trace.iterations, b, sp1.alpha, sp1.active, Branch::SP1, &step));
    ++trace.iterations;
    x = step.new_point;
  }
}

}  // namespace modescent

#endif  // MODESCENT_SOLVER_HPP
