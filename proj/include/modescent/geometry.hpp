#ifndef MODESCENT_GEOMETRY_HPP
#define MODESCENT_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>
#include <Eigen/Dense>

#include "modescent/direction.hpp"
#include "modescent/errors.hpp"
#include "modescent/problem.hpp"

namespace modescent {

/**
 * The manifold {x : H(x) = 0, G_i(x) = 0 for i in ineq_indices} of a problem.
 * Holds a reference; the problem must outlive the chart.
 */
class ManifoldChart {
 public:
  explicit ManifoldChart(const ProblemSpec& problem, std::vector<int> ineq_indices = {})
      : problem_(&problem), ineq_(std::move(ineq_indices)) {
    std::sort(ineq_.begin(), ineq_.end());
    for (int i : ineq_)
      if (i < 0 || i >= problem.m_g) throw DimensionError("chart: inequality index out of range");
  }

  ManifoldChart(const ProblemSpec& problem, const ActiveSet& active) : ManifoldChart(problem, active.indices) {}

  const ProblemSpec& problem() const { return *problem_; }
  const std::vector<int>& ineq_indices() const { return ineq_; }
  int rows() const { return problem_->m_h + static_cast<int>(ineq_.size()); }
  int dimension() const { return problem_->n; }

  Vector values(const Vector& x) const {
    Vector c(rows());
    const auto h = detail::call_values(problem_->H, problem_->m_h, x, "H");
    c.head(problem_->m_h) = h;
    if (!ineq_.empty()) {
      const auto g = detail::call_values(problem_->G, problem_->m_g, x, "G");
      for (std::size_t i = 0; i < ineq_.size(); ++i) c[problem_->m_h + static_cast<Eigen::Index>(i)] = g[ineq_[i]];
    }
    return c;
  }

  Matrix jacobian(const Vector& x) const {
    Matrix j(rows(), problem_->n);
    j.topRows(problem_->m_h) = detail::call_jacobian(problem_->DH, problem_->m_h, problem_->n, x, "DH");
    if (!ineq_.empty()) {
      const auto dg = detail::call_jacobian(problem_->DG, problem_->m_g, problem_->n, x, "DG");
      for (std::size_t i = 0; i < ineq_.size(); ++i)
        j.row(problem_->m_h + static_cast<Eigen::Index>(i)) = dg.row(ineq_[i]);
    }
    return j;
  }

 private:
  const ProblemSpec* problem_;
  std::vector<int> ineq_;
};

struct ProjectOptions {
  int max_iters = 100;
  double feas_tol = 1e-10;
  double stat_tol = 1e-9;
};

namespace detail {

// Hessian of x -> mu . c(x) by central differences of the chart Jacobian.
inline Matrix lagrangian_curvature(const ManifoldChart& chart, const Vector& z, const Vector& mu) {
  const Eigen::Index n = z.size();
  Matrix w(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(z[j]));
    Vector zp = z, zm = z;
    zp[j] += h;
    zm[j] -= h;
    w.col(j) = (chart.jacobian(zp) - chart.jacobian(zm)).transpose() * mu / (2.0 * h);
  }
  return 0.5 * (w + w.transpose());
}

inline bool full_row_rank(const Matrix& j) {
  if (j.rows() == 0) return true;
  Eigen::JacobiSVD<Matrix> svd(j);
  const Vector& s = svd.singularValues();
  return s.size() == j.rows() && s[s.size() - 1] > kRankTolerance * s[0] && s[0] > 0.0;
}

// Tangential part of (z - y): zero exactly at stationary points of the distance.
inline double stationarity(const Matrix& j, const Vector& z, const Vector& y) {
  const Vector r = z - y;
  if (j.rows() == 0) return r.norm();
  const Vector mu = j.transpose().completeOrthogonalDecomposition().solve(-r);
  return (r + j.transpose() * mu).norm();
}

}  // namespace detail

/**
 * Nearest point to y on the chart's manifold (locally): Gauss-Newton
 * feasibility restoration followed by Lagrange-Newton polishing of
 *
 *   z - y + J(z)^T mu = 0,   c(z) = 0,
 *
 * with backtracking on the KKT residual. Throws NoConvergence when the chart
 * Jacobian degenerates (e.g. the centre of a sphere) or the budget runs out.
 */
inline Vector project(const ManifoldChart& chart, const Vector& y, const ProjectOptions& opt = {}) {
  if (y.size() != chart.dimension()) throw DimensionError("project: point has wrong dimension");
  if (!y.allFinite()) throw PreconditionError("project: point must be finite");
  if (chart.rows() == 0) return y;

  Vector z = y;
  int iter = 0;

  for (;; ++iter) {
    const Vector c = chart.values(z);
    if (c.cwiseAbs().maxCoeff() <= opt.feas_tol) break;
    if (iter >= opt.max_iters) throw NoConvergence("project: feasibility restoration did not converge");
    const Matrix j = chart.jacobian(z);
    if (!detail::full_row_rank(j)) throw NoConvergence("project: degenerate constraint Jacobian");
    Vector d = -j.completeOrthogonalDecomposition().solve(c);
    const double cap = std::max(1.0, z.norm());
    if (d.norm() > cap) d *= cap / d.norm();
    z += d;
  }

  const Eigen::Index n = z.size();
  const Eigen::Index k = chart.rows();
  Matrix j = chart.jacobian(z);
  Vector mu = j.transpose().completeOrthogonalDecomposition().solve(y - z);

  auto kkt = [&](const Vector& zz, const Vector& mm, const Matrix& jj) {
    Vector r(n + k);
    r.head(n) = zz - y + jj.transpose() * mm;
    r.tail(k) = chart.values(zz);
    return r;
  };

  for (; iter <= opt.max_iters; ++iter) {
    const Vector c = chart.values(z);
    if (c.cwiseAbs().maxCoeff() <= opt.feas_tol && detail::stationarity(j, z, y) <= opt.stat_tol) return z;
    if (!detail::full_row_rank(j)) throw NoConvergence("project: degenerate constraint Jacobian");

    const Vector r = kkt(z, mu, j);
    const double merit = r.squaredNorm();
    bool moved = false;
    for (int pass = 0; pass < 2 && !moved; ++pass) {
      Matrix sys = Matrix::Zero(n + k, n + k);
      sys.topLeftCorner(n, n) = Matrix::Identity(n, n);
      if (pass == 0) sys.topLeftCorner(n, n) += detail::lagrangian_curvature(chart, z, mu);
      sys.topRightCorner(n, k) = j.transpose();
      sys.bottomLeftCorner(k, n) = j;
      const Vector step = sys.fullPivLu().solve(-r);
      if (!step.allFinite()) continue;
      double a = 1.0;
      for (int half = 0; half < 40; ++half, a *= 0.5) {
        const Vector zt = z + a * step.head(n);
        const Vector mt = mu + a * step.tail(k);
        const Matrix jt = chart.jacobian(zt);
        if (kkt(zt, mt, jt).squaredNorm() < merit) {
          z = zt;
          mu = mt;
          j = jt;
          moved = true;
          break;
        }
      }
    }
    if (!moved) break;
  }
  throw NoConvergence("project: Lagrange-Newton iteration did not converge");
}

/**
 * Retraction x + w + s * grad c(x) for a chart with exactly one constraint
 * row, where s is the root of s -> c(x + w + s grad c(x)) of smallest
 * magnitude, bracketed by expanding outwards from s = 0.
 */
inline Vector retract_psi(const ManifoldChart& chart, const Vector& x, const Vector& w, double tol = 1e-10) {
  if (chart.rows() != 1) throw PreconditionError("retract_psi: chart must have exactly one constraint row");
  if (x.size() != chart.dimension() || w.size() != chart.dimension())
    throw DimensionError("retract_psi: wrong dimension");

  const Vector grad = chart.jacobian(x).row(0).transpose();
  const double gg = grad.squaredNorm();
  if (gg == 0.0) throw NoRoot("retract_psi: vanishing constraint gradient");

  const Vector base = x + w;
  auto phi = [&](double s) { return chart.values(base + s * grad)[0]; };

  const double f0 = phi(0.0);
  if (std::abs(f0) <= tol) return base;

  auto solve = [&](double a, double b, double fa, double fb) {
    boost::math::tools::eps_tolerance<double> stop(52);
    boost::uintmax_t iters = 200;
    const auto br = boost::math::tools::toms748_solve(phi, a, b, fa, fb, stop, iters);
    const double s = std::abs(phi(br.first)) <= std::abs(phi(br.second)) ? br.first : br.second;
    return s;
  };

  double inner = 0.0;
  double f_pos_in = f0, f_neg_in = f0;
  double delta = std::max(std::abs(f0) / gg, 1e-14) * 0.5;
  for (int grow = 0; grow < 200; ++grow, delta *= 2.0) {
    const double f_pos = phi(delta);
    const double f_neg = phi(-delta);
    const bool pos = (f_pos_in > 0.0) != (f_pos > 0.0) || f_pos == 0.0;
    const bool neg = (f_neg_in > 0.0) != (f_neg > 0.0) || f_neg == 0.0;
    if (pos || neg) {
      double best = 0.0;
      bool found = false;
      if (pos) {
        best = f_pos == 0.0 ? delta : solve(inner, delta, f_pos_in, f_pos);
        found = true;
      }
      if (neg) {
        const double s = f_neg == 0.0 ? -delta : solve(-delta, -inner, f_neg, f_neg_in);
        if (!found || std::abs(s) < std::abs(best)) best = s;
      }
      const Vector z = base + best * grad;
      if (std::abs(chart.values(z)[0]) > tol) throw NoRoot("retract_psi: root polish failed");
      return z;
    }
    inner = delta;
    f_pos_in = f_pos;
    f_neg_in = f_neg;
    if (delta * std::sqrt(gg) > 1e8 * (1.0 + base.norm())) break;
  }
  throw NoRoot("retract_psi: no sign change within the bracket growth limit");
}

enum class RetractionKind { Projection, Psi };

inline const char* to_string(RetractionKind k) { return k == RetractionKind::Projection ? "project" : "psi"; }

/// Maps the tangent step (x, w) back onto the chart. Psi is used only on
/// single-row charts; other charts fall back to the projection.
inline Vector retract(const ManifoldChart& chart, const Vector& x, const Vector& w, RetractionKind kind,
                      const ProjectOptions& opt = {}) {
  if (chart.rows() == 0) return x + w;
  if (kind == RetractionKind::Psi && chart.rows() == 1) return retract_psi(chart, x, w, opt.feas_tol);
  return project(chart, x + w, opt);
}

namespace detail {

// Projection that survives the degenerate equidistant case by restarting from
// a deterministic perturbation of y.
inline Vector robust_project(const ManifoldChart& chart, const Vector& y, const ProjectOptions& opt) {
  try {
    return project(chart, y, opt);
  } catch (const NoConvergence&) {
    Vector shifted = y;
    for (Eigen::Index i = 0; i < shifted.size(); ++i)
      shifted[i] += 1e-6 * std::max(1.0, std::abs(y[i])) * (1.0 + 0.5 * static_cast<double>(i));
    return project(chart, shifted, opt);
  }
}

}  // namespace detail

/**
 * A feasible point near x: x itself if feasible, else a local minimizer of
 * |z - x| over the feasible set found by an active-set loop of projections
 * (violated inequalities join the chart, those whose multiplier has the wrong
 * sign leave it).
 */
inline Vector feasible_start(const ProblemSpec& problem, const Vector& x, double tol = 1e-9) {
  detail::check_point(problem, x);
  const EvalBundle b0 = evaluate_values(problem, x);
  if (is_feasible(b0, tol)) return x;

  ProjectOptions opt;
  opt.feas_tol = std::min(opt.feas_tol, tol);

  std::vector<int> working;
  for (Eigen::Index i = 0; i < b0.g.size(); ++i)
    if (b0.g[i] > tol) working.push_back(static_cast<int>(i));

  for (int round = 0; round < 4 * problem.m_g + 4; ++round) {
    const ManifoldChart chart(problem, working);
    const Vector z = detail::robust_project(chart, x, opt);
    const EvalBundle b = evaluate_values(problem, z);

    std::vector<int> next = working;
    bool changed = false;
    for (Eigen::Index i = 0; i < b.g.size(); ++i)
      if (b.g[i] > tol && !std::binary_search(working.begin(), working.end(), static_cast<int>(i))) {
        next.push_back(static_cast<int>(i));
        changed = true;
      }
    if (!changed && !working.empty()) {
      const Matrix j = chart.jacobian(z);
      const Vector mu = j.transpose().completeOrthogonalDecomposition().solve(x - z);
      next.clear();
      for (std::size_t i = 0; i < working.size(); ++i) {
        if (mu[problem.m_h + static_cast<Eigen::Index>(i)] < -1e-10) {
          changed = true;
          continue;
        }
        next.push_back(working[i]);
      }
    }
    if (!changed) {
      if (is_feasible(b, tol)) return z;
      break;
    }
    std::sort(next.begin(), next.end());
    working = std::move(next);
  }
  throw NoConvergence("feasible_start: active-set projection did not reach a feasible point");
}

}  // namespace modescent

#endif  // MODESCENT_GEOMETRY_HPP
