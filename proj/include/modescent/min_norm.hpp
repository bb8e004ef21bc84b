#ifndef MODESCENT_MIN_NORM_HPP
#define MODESCENT_MIN_NORM_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "modescent/errors.hpp"
#include "modescent/problem.hpp"

namespace modescent {

struct MinNormResult {
  Vector lambda;  ///< simplex weights, one per generator
  Vector point;   ///< sum_j lambda_j g_j
  int major_iterations = 0;
};

namespace detail {

// Minimizer of |y| over the affine hull of the selected columns, as affine
// weights. Least squares on the differences keeps this well defined when the
// selection is affinely dependent.
inline Vector affine_min_norm_weights(const Matrix& gens, const std::vector<int>& sel) {
  const auto s = static_cast<Eigen::Index>(sel.size());
  Vector mu(s);
  if (s == 1) {
    mu[0] = 1.0;
    return mu;
  }
  const Vector base = gens.col(sel[0]);
  Matrix diff(gens.rows(), s - 1);
  for (Eigen::Index i = 1; i < s; ++i) diff.col(i - 1) = gens.col(sel[i]) - base;
  const Vector c = diff.completeOrthogonalDecomposition().solve(-base);
  mu[0] = 1.0 - c.sum();
  mu.tail(s - 1) = c;
  return mu;
}

}  // namespace detail

/**
 * Minimum-norm point of the convex hull of the columns of `generators`
 * (Wolfe's algorithm). Stops when min_j g_j.p >= |p|^2 - tol * max_j |g_j|^2.
 *
 * Zero-row generators (a trivial ambient space) are allowed: the result puts
 * all weight on the first generator.
 */
inline MinNormResult min_norm_in_hull(const Matrix& generators, double tol = 1e-12) {
  const Eigen::Index k = generators.cols();
  if (k == 0) throw PreconditionError("min_norm_in_hull: at least one generator is required");
  if (!generators.allFinite()) throw PreconditionError("min_norm_in_hull: generators must be finite");

  const Vector sq = generators.colwise().squaredNorm().transpose();
  const double scale = std::max(1.0, sq.maxCoeff());
  constexpr double kWeightTol = 1e-15;

  Eigen::Index start = 0;
  sq.minCoeff(&start);
  std::vector<int> support{static_cast<int>(start)};
  std::vector<double> weights{1.0};
  Vector p = generators.col(start);

  MinNormResult result;
  const int max_major = 50 * static_cast<int>(k) + 100;
  for (int major = 0; major < max_major; ++major) {
    result.major_iterations = major + 1;
    const Vector dots = generators.transpose() * p;
    Eigen::Index j = 0;
    dots.minCoeff(&j);
    if (p.squaredNorm() - dots[j] <= tol * scale) break;
    if (std::find(support.begin(), support.end(), static_cast<int>(j)) != support.end()) break;

    support.push_back(static_cast<int>(j));
    weights.push_back(0.0);

    for (;;) {
      const Vector mu = detail::affine_min_norm_weights(generators, support);
      if ((mu.array() > kWeightTol).all()) {
        weights.assign(mu.data(), mu.data() + mu.size());
        break;
      }
      // Walk from the current weights towards mu until the first weight hits 0.
      double theta = 1.0;
      std::size_t blocking = support.size();
      for (std::size_t i = 0; i < support.size(); ++i)
        if (mu[static_cast<Eigen::Index>(i)] <= kWeightTol) {
          const double denom = weights[i] - mu[static_cast<Eigen::Index>(i)];
          if (denom > 0.0 && weights[i] / denom <= theta) {
            theta = weights[i] / denom;
            blocking = i;
          }
        }
      for (std::size_t i = 0; i < support.size(); ++i)
        weights[i] = (1.0 - theta) * weights[i] + theta * mu[static_cast<Eigen::Index>(i)];
      if (blocking < support.size()) weights[blocking] = 0.0;

      std::vector<int> kept_support;
      std::vector<double> kept_weights;
      for (std::size_t i = 0; i < support.size(); ++i)
        if (weights[i] > kWeightTol) {
          kept_support.push_back(support[i]);
          kept_weights.push_back(weights[i]);
        }
      support = std::move(kept_support);
      weights = std::move(kept_weights);
      if (support.empty()) {
        support.push_back(static_cast<int>(j));
        weights.push_back(1.0);
        break;
      }
    }

    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    p.setZero();
    for (std::size_t i = 0; i < support.size(); ++i) {
      weights[i] /= total;
      p += weights[i] * generators.col(support[i]);
    }
  }

  result.lambda = Vector::Zero(k);
  for (std::size_t i = 0; i < support.size(); ++i) result.lambda[support[i]] = weights[i];
  result.point = generators * result.lambda;
  return result;
}

inline MinNormResult min_norm_in_hull(const std::vector<Vector>& generators, double tol = 1e-12) {
  if (generators.empty()) throw PreconditionError("min_norm_in_hull: at least one generator is required");
  Matrix g(generators.front().size(), static_cast<Eigen::Index>(generators.size()));
  for (std::size_t j = 0; j < generators.size(); ++j) {
    if (generators[j].size() != g.rows()) throw DimensionError("min_norm_in_hull: generators differ in length");
    g.col(static_cast<Eigen::Index>(j)) = generators[j];
  }
  return min_norm_in_hull(g, tol);
}

/**
 * Largest violation of the optimality certificate of (lambda, point):
 * simplex feasibility of lambda, point == G lambda, g_j.p >= |p|^2 for all j,
 * and g_j.p == |p|^2 wherever lambda_j > weight_tol.
 */
inline double kkt_residual(const Matrix& generators, const Vector& lambda, const Vector& point,
                           double weight_tol = 1e-8) {
  double r = std::abs(lambda.sum() - 1.0);
  r = std::max(r, std::max(0.0, -lambda.minCoeff()));
  if (point.size() > 0) r = std::max(r, (generators * lambda - point).cwiseAbs().maxCoeff());
  const double pp = point.squaredNorm();
  for (Eigen::Index j = 0; j < generators.cols(); ++j) {
    const double gap = generators.col(j).dot(point) - pp;
    r = std::max(r, -gap);
    if (lambda[j] > weight_tol) r = std::max(r, std::abs(gap));
  }
  return r;
}

}  // namespace modescent

#endif  // MODESCENT_MIN_NORM_HPP
