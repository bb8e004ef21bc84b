#ifndef MODESCENT_TOOLS_SIMPLEX_GRID_ORACLE_HPP
#define MODESCENT_TOOLS_SIMPLEX_GRID_ORACLE_HPP

// Brute-force reference for min-norm points of convex hulls. Deliberately
// shares nothing with the library's solver: plain enumeration of simplex
// weights, optionally followed by pairwise weight-transfer pattern search.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace modescent::oracle {

struct GridMinimum {
  Eigen::VectorXd lambda;
  Eigen::VectorXd point;
};

namespace detail {

inline void enumerate(int k, int remaining, int pos, std::vector<int>& counts,
                      const Eigen::MatrixXd& gens, double step, GridMinimum& best, double& best_sq) {
  if (pos == k - 1) {
    counts[pos] = remaining;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(gens.rows());
    for (int i = 0; i < k; ++i)
      if (counts[i]) p += (counts[i] * step) * gens.col(i);
    const double sq = p.squaredNorm();
    if (sq < best_sq) {
      best_sq = sq;
      for (int i = 0; i < k; ++i) best.lambda[i] = counts[i] * step;
      best.point = p;
    }
    return;
  }
  for (int c = 0; c <= remaining; ++c) {
    counts[pos] = c;
    enumerate(k, remaining - c, pos + 1, counts, gens, step, best, best_sq);
  }
}

}  // namespace detail

/// Smallest-norm hull point among weights on the grid {0, 1/N, ..., 1}^k.
inline GridMinimum simplex_grid_min_norm(const Eigen::MatrixXd& gens, int divisions) {
  const int k = static_cast<int>(gens.cols());
  GridMinimum best{Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(gens.rows())};
  double best_sq = INFINITY;
  std::vector<int> counts(k, 0);
  detail::enumerate(k, divisions, 0, counts, gens, 1.0 / divisions, best, best_sq);
  return best;
}

/// Grid minimum polished by moving weight between pairs of generators while
/// that lowers the norm, halving the transfer size down to min_step.
inline GridMinimum refined_min_norm(const Eigen::MatrixXd& gens, int divisions = 20, double min_step = 1e-14) {
  GridMinimum cur = simplex_grid_min_norm(gens, divisions);
  const int k = static_cast<int>(gens.cols());
  double sq = cur.point.squaredNorm();
  for (double step = 1.0 / divisions; step >= min_step; step *= 0.5) {
    bool improved = true;
    for (int sweep = 0; improved && sweep < 20000; ++sweep) {
      improved = false;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          if (i == j || cur.lambda[i] <= 0.0) continue;
          // Best transfer from i to j along the segment, capped by step and lambda_i.
          const Eigen::VectorXd d = gens.col(j) - gens.col(i);
          const double dd = d.squaredNorm();
          if (dd == 0.0) continue;
          double delta = std::clamp(-cur.point.dot(d) / dd, 0.0, std::min(step, cur.lambda[i]));
          if (delta <= 0.0) continue;
          const Eigen::VectorXd p = cur.point + delta * d;
          const double psq = p.squaredNorm();
          if (psq < sq * (1.0 - 1e-15) || (sq == 0.0 && psq < sq)) {
            cur.lambda[i] -= delta;
            cur.lambda[j] += delta;
            cur.point = p;
            sq = psq;
            improved = true;
          }
        }
    }
  }
  cur.point = gens * cur.lambda;
  return cur;
}

}  // namespace modescent::oracle

#endif  // MODESCENT_TOOLS_SIMPLEX_GRID_ORACLE_HPP
