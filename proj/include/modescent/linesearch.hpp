#ifndef MODESCENT_LINESEARCH_HPP
#define MODESCENT_LINESEARCH_HPP

#include <cmath>
#include <functional>
#include <string>

#include "modescent/direction.hpp"
#include "modescent/errors.hpp"
#include "modescent/geometry.hpp"
#include "modescent/problem.hpp"

namespace modescent {

struct StepResult {
  double t = 0.0;
  int k = 0;
  Vector armijo_lhs;  ///< F(new_point)
  Vector armijo_rhs;  ///< F(x) + sigma t DF(x) v
  bool feasibility_repaired = false;
  Vector new_point;
};

struct StepParams {
  double beta0 = 1.0;
  double beta = 0.5;
  double sigma = 1e-4;
  int k_max = 60;
  double feas_tol = 1e-9;  ///< accepted constraint violation of new points
  double eps_act = 1e-9;   ///< an inequality counts as active when G_i >= -eps_act

  void validate() const {
    if (!(beta0 > 0.0)) throw PreconditionError("step: beta0 must be positive");
    if (!(beta > 0.0 && beta < 1.0)) throw PreconditionError("step: beta must lie in (0, 1)");
    if (!(sigma > 0.0 && sigma < 1.0)) throw PreconditionError("step: sigma must lie in (0, 1)");
    if (k_max < 0) throw PreconditionError("step: k_max must be non-negative");
  }
};

/// Maps the trial step (x, w) to a point of the relevant manifold.
using RetractFn = std::function<Vector(const Vector& x, const Vector& w)>;

inline RetractFn identity_retraction() {
  return [](const Vector& x, const Vector& w) -> Vector { return x + w; };
}

inline RetractFn chart_retraction(const ManifoldChart& chart, RetractionKind kind) {
  return [chart, kind](const Vector& x, const Vector& w) { return retract(chart, x, w, kind); };
}

namespace detail {

struct Trial {
  bool ok = false;  ///< retraction succeeded
  EvalBundle values;
  Vector rhs;
};

inline Trial try_step(const ProblemSpec& problem, const EvalBundle& b, const Vector& v, const Vector& slope,
                      const RetractFn& retract_fn, double t, double sigma) {
  Trial tr;
  Vector y;
  try {
    y = retract_fn(b.x, t * v);
  } catch (const NoConvergence&) {
    return tr;
  } catch (const NoRoot&) {
    return tr;
  }
  if (!y.allFinite()) return tr;
  tr.values = evaluate_values(problem, y);
  tr.rhs = b.f + sigma * t * slope;
  tr.ok = true;
  return tr;
}

inline bool armijo_holds(const Trial& tr) { return tr.ok && (tr.values.f.array() < tr.rhs.array()).all(); }

inline StepResult make_step(const Trial& tr, double t, int k, bool repaired) {
  return {t, k, tr.values.f, tr.rhs, repaired, tr.values.x};
}

inline Vector descent_slope(const EvalBundle& b, const Vector& v) {
  if (!b.has_jacobians()) throw PreconditionError("step: bundle has no Jacobians");
  if (v.size() != b.x.size()) throw DimensionError("step: direction has wrong dimension");
  const Vector slope = b.df * v;
  if ((slope.array() >= 0.0).any())
    throw PreconditionError("step: direction is not a strict descent direction for every objective");
  return slope;
}

}  // namespace detail

/**
 * Armijo backtracking: the smallest k <= k_max with
 *   F(retract(x, beta0 beta^k v)) < F(x) + sigma beta0 beta^k DF(x) v
 * componentwise. Requires DF(x) v < 0.
 */
inline StepResult armijo_step(const ProblemSpec& problem, const EvalBundle& bundle, const Vector& v,
                              const RetractFn& retract_fn, const StepParams& params) {
  params.validate();
  const Vector slope = detail::descent_slope(bundle, v);
  double t = params.beta0;
  for (int k = 0; k <= params.k_max; ++k, t *= params.beta) {
    const auto tr = detail::try_step(problem, bundle, v, slope, retract_fn, t, params.sigma);
    if (detail::armijo_holds(tr)) return detail::make_step(tr, t, k, false);
  }
  throw NoStep("armijo_step: no step length satisfies the Armijo condition within k_max");
}

/**
 * Armijo backtracking that also requires the new point to be feasible. The
 * direction must strictly decrease every inequality in `active`. Returns the
 * first k at which both conditions hold; feasibility_repaired is set when
 * that k exceeds the plain Armijo exponent.
 */
inline StepResult feasible_armijo_step(const ProblemSpec& problem, const EvalBundle& bundle, const Vector& v,
                                       const ActiveSet& active, const RetractFn& retract_fn,
                                       const StepParams& params) {
  params.validate();
  const Vector slope = detail::descent_slope(bundle, v);
  for (int i : active.indices)
    if (bundle.dg.row(i).dot(v) >= 0.0)
      throw PreconditionError("feasible_armijo_step: direction does not decrease active inequality " +
                              std::to_string(i));

  int armijo_k = -1;
  double t = params.beta0;
  for (int k = 0; k <= params.k_max; ++k, t *= params.beta) {
    const auto tr = detail::try_step(problem, bundle, v, slope, retract_fn, t, params.sigma);
    if (!detail::armijo_holds(tr)) continue;
    if (armijo_k < 0) armijo_k = k;
    if (is_feasible(tr.values, params.feas_tol)) return detail::make_step(tr, t, k, k > armijo_k);
  }
  throw NoStep("feasible_armijo_step: no feasible Armijo step within k_max");
}

/**
 * Armijo backtracking through the chart of the currently active inequalities.
 * When the accepted point leaves the feasible set, t is shrunk by beta until
 * the point is feasible again and then bisected against the last infeasible
 * length until a previously inactive inequality becomes active (within
 * eps_act). The result must still satisfy the Armijo condition.
 */
inline StepResult boundary_step(const ProblemSpec& problem, const EvalBundle& bundle, const Vector& v,
                                const ManifoldChart& chart, RetractionKind kind, const StepParams& params) {
  params.validate();
  const Vector slope = detail::descent_slope(bundle, v);
  const RetractFn retract_fn = chart_retraction(chart, kind);

  auto newly_active = [&](const EvalBundle& values) {
    for (Eigen::Index i = 0; i < values.g.size(); ++i) {
      const bool on_chart = std::binary_search(chart.ineq_indices().begin(), chart.ineq_indices().end(),
                                               static_cast<int>(i));
      if (!on_chart && bundle.g[i] < -params.eps_act && values.g[i] >= -params.eps_act) return true;
    }
    return false;
  };

  int k = 0;
  double t = params.beta0;
  detail::Trial accepted;
  for (; k <= params.k_max; ++k, t *= params.beta) {
    accepted = detail::try_step(problem, bundle, v, slope, retract_fn, t, params.sigma);
    if (detail::armijo_holds(accepted)) break;
  }
  if (k > params.k_max) throw NoStep("boundary_step: no step length satisfies the Armijo condition within k_max");
  if (is_feasible(accepted.values, params.feas_tol)) return detail::make_step(accepted, t, k, false);

  double t_hi = t;
  detail::Trial lo;
  for (++k, t *= params.beta; k <= params.k_max; ++k, t *= params.beta) {
    lo = detail::try_step(problem, bundle, v, slope, retract_fn, t, params.sigma);
    if (lo.ok && is_feasible(lo.values, params.feas_tol)) break;
    t_hi = t;
  }
  if (k > params.k_max) throw NoStep("boundary_step: no feasible step length within k_max");

  double t_lo = t;
  for (int it = 0; it < 200 && !newly_active(lo.values); ++it) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (mid <= t_lo || mid >= t_hi) break;
    auto tr = detail::try_step(problem, bundle, v, slope, retract_fn, mid, params.sigma);
    if (tr.ok && is_feasible(tr.values, params.feas_tol)) {
      t_lo = mid;
      lo = std::move(tr);
    } else {
      t_hi = mid;
    }
  }
  if (!newly_active(lo.values)) throw NoStep("boundary_step: could not land on a new boundary");
  if (!detail::armijo_holds(lo)) throw NoStep("boundary_step: Armijo condition fails at the boundary point");
  return detail::make_step(lo, t_lo, k, true);
}

}  // namespace modescent

#endif  // MODESCENT_LINESEARCH_HPP
