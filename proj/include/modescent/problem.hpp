#ifndef MODESCENT_PROBLEM_HPP
#define MODESCENT_PROBLEM_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "modescent/errors.hpp"

namespace modescent {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using VectorMap = std::function<Vector(const Vector&)>;
using JacobianMap = std::function<Matrix(const Vector&)>;

/// Axis-aligned box used to draw start points and audit samples.
struct SamplingBox {
  Vector lower;
  Vector upper;

  static SamplingBox cube(int n, double lo, double hi) {
    return {Vector::Constant(n, lo), Vector::Constant(n, hi)};
  }
};

/**
 * Constrained multiobjective problem
 *
 *   min F(x)  s.t.  H(x) = 0,  G(x) <= 0,
 *
 * with F: R^n -> R^m, H: R^n -> R^m_h, G: R^n -> R^m_g and their Jacobians
 * (one gradient per row). Maps for empty constraint blocks may be left unset.
 *
 * Instances are immutable once built; the stored callables must be free of
 * shared mutable state so that evaluations may run concurrently.
 */
struct ProblemSpec {
  std::string name;
  int n = 0;
  int m = 0;
  int m_h = 0;
  int m_g = 0;

  VectorMap F;
  JacobianMap DF;
  VectorMap H;
  JacobianMap DH;
  VectorMap G;
  JacobianMap DG;

  SamplingBox box;

  void validate() const {
    if (n < 1 || m < 1 || m_h < 0 || m_g < 0)
      throw DimensionError("problem '" + name + "': need n >= 1, m >= 1, m_h >= 0, m_g >= 0");
    if (!F || !DF) throw DimensionError("problem '" + name + "': F and DF are required");
    if (m_h > 0 && (!H || !DH)) throw DimensionError("problem '" + name + "': H and DH are required");
    if (m_g > 0 && (!G || !DG)) throw DimensionError("problem '" + name + "': G and DG are required");
    if (box.lower.size() != n || box.upper.size() != n)
      throw DimensionError("problem '" + name + "': sampling box has wrong dimension");
  }
};

/// Values and Jacobians of one problem at one point. Jacobians are 0x0 when
/// only values were requested.
struct EvalBundle {
  Vector x;
  Vector f;
  Vector h;
  Vector g;
  Matrix df;
  Matrix dh;
  Matrix dg;

  bool has_jacobians() const { return df.rows() > 0; }
};

namespace detail {

inline void check_finite(const Vector& v, const char* component) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw EvaluationError(component, static_cast<int>(i),
                            std::string("non-finite value in ") + component + "[" + std::to_string(i) + "]");
}

inline void check_finite(const Matrix& a, const char* component) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (!std::isfinite(a(i, j)))
        throw EvaluationError(component, static_cast<int>(i * a.cols() + j),
                              std::string("non-finite value in ") + component + "(" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
}

inline Vector call_values(const VectorMap& map, int rows, const Vector& x, const char* component) {
  if (rows == 0) return Vector(0);
  Vector v = map(x);
  if (v.size() != rows)
    throw EvaluationError(component, -1,
                          std::string(component) + " returned " + std::to_string(v.size()) + " entries, expected " +
                              std::to_string(rows));
  check_finite(v, component);
  return v;
}

inline Matrix call_jacobian(const JacobianMap& map, int rows, int cols, const Vector& x, const char* component) {
  if (rows == 0) return Matrix(0, cols);
  Matrix a = map(x);
  if (a.rows() != rows || a.cols() != cols)
    throw EvaluationError(component, -1,
                          std::string(component) + " returned a " + std::to_string(a.rows()) + "x" +
                              std::to_string(a.cols()) + " matrix, expected " + std::to_string(rows) + "x" +
                              std::to_string(cols));
  check_finite(a, component);
  return a;
}

inline void check_point(const ProblemSpec& problem, const Vector& x) {
  if (x.size() != problem.n)
    throw DimensionError("point has " + std::to_string(x.size()) + " entries, problem '" + problem.name +
                         "' expects " + std::to_string(problem.n));
}

}  // namespace detail

/// All values and Jacobians at x.
inline EvalBundle evaluate(const ProblemSpec& problem, const Vector& x) {
  detail::check_point(problem, x);
  EvalBundle b;
  b.x = x;
  b.f = detail::call_values(problem.F, problem.m, x, "F");
  b.h = detail::call_values(problem.H, problem.m_h, x, "H");
  b.g = detail::call_values(problem.G, problem.m_g, x, "G");
  b.df = detail::call_jacobian(problem.DF, problem.m, problem.n, x, "DF");
  b.dh = detail::call_jacobian(problem.DH, problem.m_h, problem.n, x, "DH");
  b.dg = detail::call_jacobian(problem.DG, problem.m_g, problem.n, x, "DG");
  return b;
}

/// Values only; the Jacobian members stay empty.
inline EvalBundle evaluate_values(const ProblemSpec& problem, const Vector& x) {
  detail::check_point(problem, x);
  EvalBundle b;
  b.x = x;
  b.f = detail::call_values(problem.F, problem.m, x, "F");
  b.h = detail::call_values(problem.H, problem.m_h, x, "H");
  b.g = detail::call_values(problem.G, problem.m_g, x, "G");
  return b;
}

/// max(|H|_inf, max(G, 0)); zero for unconstrained problems.
inline double constraint_violation(const EvalBundle& b) {
  double viol = 0.0;
  if (b.h.size() > 0) viol = std::max(viol, b.h.cwiseAbs().maxCoeff());
  if (b.g.size() > 0) viol = std::max(viol, b.g.maxCoeff());
  return viol;
}

inline bool is_feasible(const EvalBundle& b, double tol) { return constraint_violation(b) <= tol; }

/**
 * Compares the supplied Jacobians against central differences with step h.
 * Returns the worst entrywise error |fd - exact| / max(1, |exact|) over DF, DH
 * and DG.
 */
inline double fd_audit(const ProblemSpec& problem, const Vector& x, double h) {
  if (!(h > 0.0)) throw PreconditionError("fd_audit: step must be positive");
  const EvalBundle b = evaluate(problem, x);

  double worst = 0.0;
  auto compare = [&](const Matrix& exact, const Vector& plus, const Vector& minus, Eigen::Index col, double step) {
    for (Eigen::Index i = 0; i < exact.rows(); ++i) {
      const double fd = (plus[i] - minus[i]) / step;
      const double err = std::abs(fd - exact(i, col)) / std::max(1.0, std::abs(exact(i, col)));
      worst = std::max(worst, err);
    }
  };

  for (int j = 0; j < problem.n; ++j) {
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    // Divide by the representable step, not 2h.
    const double step = xp[j] - xm[j];
    const EvalBundle p = evaluate_values(problem, xp);
    const EvalBundle q = evaluate_values(problem, xm);
    compare(b.df, p.f, q.f, j, step);
    compare(b.dh, p.h, q.h, j, step);
    compare(b.dg, p.g, q.g, j, step);
  }
  return worst;
}

}  // namespace modescent

#endif  // MODESCENT_PROBLEM_HPP
