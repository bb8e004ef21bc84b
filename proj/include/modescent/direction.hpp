#ifndef MODESCENT_DIRECTION_HPP
#define MODESCENT_DIRECTION_HPP

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modescent/errors.hpp"
#include "modescent/min_norm.hpp"
#include "modescent/problem.hpp"

namespace modescent {

/// Which descent subproblem to solve.
enum class SubproblemKind {
  Unconstrained,  ///< objective gradients only
  Equality,       ///< objective gradients in ker DH
  ObjectiveIcs,   ///< active inequality gradients join the objectives, in ker DH
  EqualityIcs,    ///< objective gradients in ker [DH; DG_active]
};

inline const char* to_string(SubproblemKind k) {
  switch (k) {
    case SubproblemKind::Unconstrained: return "UNCONSTRAINED";
    case SubproblemKind::Equality: return "EQUALITY";
    case SubproblemKind::ObjectiveIcs: return "OBJECTIVE_ICS";
    case SubproblemKind::EqualityIcs: return "EQUALITY_ICS";
  }
  return "?";
}

/// Inequality indices (0-based, ascending) with G_i(x) >= -epsilon.
struct ActiveSet {
  std::vector<int> indices;
  double epsilon = 0.0;

  bool empty() const { return indices.empty(); }
  std::size_t size() const { return indices.size(); }
  bool contains(int i) const { return std::binary_search(indices.begin(), indices.end(), i); }
};

inline ActiveSet active_set(const EvalBundle& bundle, double epsilon) {
  if (epsilon < 0.0) throw PreconditionError("active_set: epsilon must be non-negative");
  ActiveSet a;
  a.epsilon = epsilon;
  for (Eigen::Index i = 0; i < bundle.g.size(); ++i)
    if (bundle.g[i] >= -epsilon) a.indices.push_back(static_cast<int>(i));
  return a;
}

/// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankTolerance = 1e-10;

/**
 * Orthonormal basis (n x (n-k) matrix) of the kernel of the k x n matrix
 * eq_rows. Throws RankError unless eq_rows has full row rank.
 */
inline Matrix tangent_basis(const Matrix& eq_rows) {
  const Eigen::Index n = eq_rows.cols();
  const Eigen::Index k = eq_rows.rows();
  if (k == 0) return Matrix::Identity(n, n);
  if (k > n) throw RankError("tangent_basis: " + std::to_string(k) + " constraint rows exceed dimension " + std::to_string(n));

  Eigen::JacobiSVD<Matrix> svd(eq_rows, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double cutoff = kRankTolerance * (s.size() > 0 ? s[0] : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > cutoff && s[i] > 0.0) ++rank;
  if (rank < k)
    throw RankError("constraint gradients are linearly dependent (rank " + std::to_string(rank) + " < " +
                    std::to_string(k) + ")");
  return svd.matrixV().rightCols(n - k);
}

/// One hull generator: either objective gradient i or inequality gradient i.
struct Generator {
  enum class Source { Objective, Inequality };
  Source source;
  int index;
};

struct DirectionResult {
  Vector v;
  double alpha = 0.0;
  Vector lambda;                    ///< weights over `generators`
  std::vector<Generator> generators;
  Matrix projected;                 ///< columns: generator gradients projected onto the kernel
  SubproblemKind kind = SubproblemKind::Unconstrained;
  ActiveSet active;                 ///< inequality set used (empty for the first two kinds)
  std::vector<int> maxset;          ///< objectives attaining max_i DF_i v

  bool critical(double tol_alpha) const { return alpha >= -tol_alpha; }
};

namespace detail {

inline Matrix equality_rows(const EvalBundle& b, SubproblemKind kind, const ActiveSet& active) {
  const Eigen::Index n = b.x.size();
  switch (kind) {
    case SubproblemKind::Unconstrained: return Matrix(0, n);
    case SubproblemKind::Equality:
    case SubproblemKind::ObjectiveIcs: return b.dh;
    case SubproblemKind::EqualityIcs: {
      Matrix rows(b.dh.rows() + static_cast<Eigen::Index>(active.size()), n);
      rows.topRows(b.dh.rows()) = b.dh;
      for (std::size_t i = 0; i < active.size(); ++i)
        rows.row(b.dh.rows() + static_cast<Eigen::Index>(i)) = b.dg.row(active.indices[i]);
      return rows;
    }
  }
  return Matrix(0, n);
}

inline Matrix generator_gradients(const EvalBundle& b, const std::vector<Generator>& gens) {
  Matrix out(b.x.size(), static_cast<Eigen::Index>(gens.size()));
  for (std::size_t j = 0; j < gens.size(); ++j)
    out.col(static_cast<Eigen::Index>(j)) = gens[j].source == Generator::Source::Objective
                                                ? b.df.row(gens[j].index).transpose()
                                                : b.dg.row(gens[j].index).transpose();
  return out;
}

}  // namespace detail

/**
 * Steepest common descent direction for the chosen subproblem
 *
 *   min_v  max_j g_j.v + |v|^2 / 2   s.t.  v in ker(eq_rows),
 *
 * solved through its dual: v = -(min-norm point of the projected generators).
 * The solve is exact, so the result is admissible for every tolerance gamma
 * in (0, 1].
 */
inline DirectionResult solve_direction(const EvalBundle& bundle, SubproblemKind kind, double epsilon = 0.0,
                                       double gamma = 1.0) {
  if (!bundle.has_jacobians()) throw PreconditionError("solve_direction: bundle has no Jacobians");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw PreconditionError("solve_direction: gamma must lie in (0, 1]");

  DirectionResult r;
  r.kind = kind;
  if (kind == SubproblemKind::ObjectiveIcs || kind == SubproblemKind::EqualityIcs)
    r.active = active_set(bundle, epsilon);
  else
    r.active.epsilon = epsilon;

  for (int i = 0; i < bundle.df.rows(); ++i) r.generators.push_back({Generator::Source::Objective, i});
  if (kind == SubproblemKind::ObjectiveIcs)
    for (int i : r.active.indices) r.generators.push_back({Generator::Source::Inequality, i});

  const Matrix basis = tangent_basis(detail::equality_rows(bundle, kind, r.active));
  const Matrix grads = detail::generator_gradients(bundle, r.generators);
  const Matrix reduced = basis.transpose() * grads;

  const MinNormResult mn = min_norm_in_hull(reduced);
  r.lambda = mn.lambda;
  r.projected = basis * reduced;
  r.v = -(basis * mn.point);

  const Vector slopes = grads.transpose() * r.v;
  r.alpha = std::min(0.0, slopes.maxCoeff() + 0.5 * r.v.squaredNorm());

  const Eigen::Index m = bundle.df.rows();
  const double top = slopes.head(m).maxCoeff();
  const double tol = 1e-8 * std::max(1.0, grads.colwise().norm().maxCoeff());
  for (Eigen::Index i = 0; i < m; ++i)
    if (slopes[i] >= top - tol) r.maxset.push_back(static_cast<int>(i));
  return r;
}

/// Value of the subproblem objective max_j g_j.v + |v|^2 / 2 for any v.
inline double subproblem_value(const EvalBundle& bundle, const DirectionResult& exact, const Vector& v) {
  const Matrix grads = detail::generator_gradients(bundle, exact.generators);
  return (grads.transpose() * v).maxCoeff() + 0.5 * v.squaredNorm();
}

/**
 * Whether `candidate` is an approximate solution with tolerance gamma of the
 * subproblem solved in `exact`: it lies in the same kernel and its value is at
 * most gamma * alpha.
 */
inline bool is_approximate_solution(const EvalBundle& bundle, const DirectionResult& exact, const Vector& candidate,
                                    double gamma, double tol = 1e-12) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw PreconditionError("is_approximate_solution: gamma must lie in (0, 1]");
  const Matrix rows = detail::equality_rows(bundle, exact.kind, exact.active);
  if (rows.rows() > 0 && (rows * candidate).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, candidate.norm()))
    return false;
  return subproblem_value(bundle, exact, candidate) <= gamma * exact.alpha + tol;
}

/**
 * Checks that the linearized cone at x has an interior: some v in ker DH with
 * DG_i v < 0 for every i with G_i(x) >= -eps_act. Equivalent to the origin
 * lying outside the hull of the projected active inequality gradients.
 */
inline bool linearized_cone_has_interior(const EvalBundle& bundle, double eps_act = 1e-9) {
  const ActiveSet active = active_set(bundle, eps_act);
  if (active.empty()) return true;
  const Matrix basis = tangent_basis(bundle.dh);
  Matrix grads(bundle.x.size(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t i = 0; i < active.size(); ++i)
    grads.col(static_cast<Eigen::Index>(i)) = bundle.dg.row(active.indices[i]).transpose();
  const Matrix reduced = basis.transpose() * grads;
  if (reduced.rows() == 0) return false;
  const double scale = std::max(1.0, reduced.colwise().norm().maxCoeff());
  return min_norm_in_hull(reduced).point.norm() > 1e-8 * scale;
}

}  // namespace modescent

#endif  // MODESCENT_DIRECTION_HPP
