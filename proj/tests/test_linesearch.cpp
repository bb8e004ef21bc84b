#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "modescent/direction.hpp"
#include "modescent/linesearch.hpp"
#include "modescent/registry.hpp"

using namespace modescent;
using modescent::testing::Gen;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), x.data());
  return x;
}

ProblemSpec square1d() {
  ProblemSpec p;
  p.name = "square";
  p.n = 1;
  p.m = 1;
  p.F = [](const Vector& x) { return Vector::Constant(1, x[0] * x[0]); };
  p.DF = [](const Vector& x) { return Matrix::Constant(1, 1, 2.0 * x[0]); };
  p.box = SamplingBox::cube(1, -2.0, 2.0);
  return p;
}

StepParams params(double beta0, double beta, double sigma, int k_max = 60) {
  StepParams s;
  s.beta0 = beta0;
  s.beta = beta;
  s.sigma = sigma;
  s.k_max = k_max;
  return s;
}

void expect_armijo(const StepResult& r, const EvalBundle& b, const Vector& v, double sigma) {
  const Vector rhs = b.f + sigma * r.t * (b.df * v);
  EXPECT_TRUE((r.armijo_lhs.array() < rhs.array()).all());
}

}  // namespace

TEST(ArmijoStep, SquareHalvesOnce) {
  const ProblemSpec p = square1d();
  const auto b = evaluate(p, vec({1.0}));
  // k=0: F(-1) = 1, bound 1 - 0.2 = 0.8 fails. k=1: F(0) = 0 < 0.9 holds.
  const auto r = armijo_step(p, b, vec({-2.0}), identity_retraction(), params(1.0, 0.5, 0.1));
  EXPECT_DOUBLE_EQ(r.t, 0.5);
  EXPECT_EQ(r.k, 1);
  EXPECT_DOUBLE_EQ(r.new_point[0], 0.0);
  EXPECT_DOUBLE_EQ(r.armijo_lhs[0], 0.0);
  EXPECT_DOUBLE_EQ(r.armijo_rhs[0], 0.8);
  EXPECT_FALSE(r.feasibility_repaired);
}

TEST(ArmijoStep, AffineAcceptsInitialStep) {
  const ProblemSpec p = registry_get("halfplane2d");
  const auto b = evaluate(p, vec({1.0, 1.0}));
  const auto r = armijo_step(p, b, vec({-1.0, -1.0}), identity_retraction(), params(0.3, 0.5, 1e-4));
  EXPECT_DOUBLE_EQ(r.t, 0.3);
  EXPECT_EQ(r.k, 0);
}

TEST(ArmijoStep, NonDescentDirectionThrows) {
  const ProblemSpec p = registry_get("circle2d");
  const auto b = evaluate(p, vec({-2.0, 0.5}));
  EXPECT_THROW(armijo_step(p, b, vec({0.0, 1.0}), identity_retraction(), StepParams{}), PreconditionError);
  EXPECT_THROW(armijo_step(p, b, vec({0.0, 0.0}), identity_retraction(), StepParams{}), PreconditionError);
}

TEST(ArmijoStep, ExhaustedBacktrackingThrowsNoStep) {
  const ProblemSpec p = square1d();
  const auto b = evaluate(p, vec({1.0}));
  EXPECT_THROW(armijo_step(p, b, vec({-2.0}), identity_retraction(), params(1.0, 0.5, 0.1, 0)), NoStep);
}

TEST(ArmijoStep, InvalidParamsThrow) {
  const ProblemSpec p = square1d();
  const auto b = evaluate(p, vec({1.0}));
  EXPECT_THROW(armijo_step(p, b, vec({-2.0}), identity_retraction(), params(1.0, 1.5, 0.1)), PreconditionError);
  EXPECT_THROW(armijo_step(p, b, vec({-2.0}), identity_retraction(), params(0.0, 0.5, 0.1)), PreconditionError);
  EXPECT_THROW(armijo_step(p, b, vec({-2.0}), identity_retraction(), params(1.0, 0.5, 1.0)), PreconditionError);
}

TEST(ArmijoStep, FailedRetractionCountsAsRejectedTrial) {
  const ProblemSpec p = square1d();
  const auto b = evaluate(p, vec({1.0}));
  const RetractFn picky = [](const Vector& x, const Vector& w) -> Vector {
    if (w.norm() > 1.5) throw NoConvergence("too far");
    return x + w;
  };
  const auto r = armijo_step(p, b, vec({-2.0}), picky, params(1.0, 0.5, 0.1));
  EXPECT_EQ(r.k, 1);
}

TEST(FeasibleArmijoStep, HalfplaneTakesFullStep) {
  const ProblemSpec p = registry_get("halfplane2d");
  const auto b = evaluate(p, vec({0.0, 1.0}));
  const auto d = solve_direction(b, SubproblemKind::ObjectiveIcs, 1e-4);
  ASSERT_TRUE(d.v.isApprox(vec({0.2, -0.4}), 1e-12));
  const auto r = feasible_armijo_step(p, b, d.v, d.active, identity_retraction(), params(0.1, 0.5, 1e-4));
  EXPECT_DOUBLE_EQ(r.t, 0.1);
  EXPECT_EQ(r.k, 0);
  EXPECT_FALSE(r.feasibility_repaired);
}

TEST(FeasibleArmijoStep, InactiveConstraintsMatchPlainArmijo) {
  const ProblemSpec p = registry_get("circle2d");
  const auto b = evaluate(p, vec({-2.0, 0.5}));
  const auto d = solve_direction(b, SubproblemKind::ObjectiveIcs, 1e-4);
  const StepParams sp = params(0.1, 0.5, 1e-4);
  const auto plain = armijo_step(p, b, d.v, identity_retraction(), sp);
  const auto feas = feasible_armijo_step(p, b, d.v, d.active, identity_retraction(), sp);
  EXPECT_EQ(plain.t, feas.t);
  EXPECT_EQ(plain.k, feas.k);
  EXPECT_EQ(plain.new_point, feas.new_point);
}

TEST(FeasibleArmijoStep, IncreasingActiveConstraintThrows) {
  const ProblemSpec p = registry_get("halfplane2d");
  const auto b = evaluate(p, vec({0.0, 1.0}));
  const auto active = active_set(b, 1e-4);
  EXPECT_THROW(feasible_armijo_step(p, b, vec({-0.1, -1.0}), active, identity_retraction(), StepParams{}),
               PreconditionError);
}

TEST(FeasibleArmijoStep, ShrinksUntilFeasible) {
  // From (-2, 0.5) the full step t = 1 along (8, 0) crosses the disk.
  const ProblemSpec p = registry_get("circle2d");
  const auto b = evaluate(p, vec({-2.0, 0.5}));
  const auto d = solve_direction(b, SubproblemKind::ObjectiveIcs, 1e-4);
  const auto r = feasible_armijo_step(p, b, d.v, d.active, identity_retraction(), params(0.2, 0.5, 1e-4));
  EXPECT_LE(constraint_violation(evaluate_values(p, r.new_point)), 1e-9);
  EXPECT_TRUE(r.feasibility_repaired);
  EXPECT_DOUBLE_EQ(r.t, 0.2 * std::pow(0.5, r.k));
}

TEST(BoundaryStep, FollowsCircle) {
  const ProblemSpec p = registry_get("circle2d");
  const auto b = evaluate(p, vec({0.0, 1.0}));
  const auto d = solve_direction(b, SubproblemKind::EqualityIcs, 1e-9);
  ASSERT_EQ(d.active.size(), 1u);
  const ManifoldChart chart(p, d.active);
  const StepParams sp = params(1.0, 0.5, 1e-4);
  const auto r = boundary_step(p, b, d.v, chart, RetractionKind::Projection, sp);

  // Hand enumeration: the projected trial point is (x + t v) / |x + t v|.
  int k_expected = -1;
  for (int k = 0; k <= 60 && k_expected < 0; ++k) {
    const double t = std::pow(0.5, k);
    const Vector y = (b.x + t * d.v).normalized();
    const Vector fy = vec({std::pow(y[0] - 2, 2) + std::pow(y[1] - 1, 2), std::pow(y[0] - 2, 2) + std::pow(y[1] + 1, 2)});
    if ((fy.array() < (b.f + 1e-4 * t * b.df * d.v).array()).all()) k_expected = k;
  }
  EXPECT_EQ(r.k, k_expected);
  EXPECT_NEAR(r.new_point.norm(), 1.0, 1e-10);
  EXPECT_FALSE(r.feasibility_repaired);
}

TEST(BoundaryStep, LandsOnSecondFace) {
  const ProblemSpec p = registry_get("corner2d");
  const auto b = evaluate(p, vec({0.0, 0.0}));
  EXPECT_EQ(active_set(b, 1e-9).size(), 1u);
  const auto d = solve_direction(b, SubproblemKind::EqualityIcs, 1e-9);
  ASSERT_TRUE(d.v.isApprox(vec({0.0, 1.0}), 1e-12));
  const ManifoldChart chart(p, d.active);
  const auto r = boundary_step(p, b, d.v, chart, RetractionKind::Projection, params(1.5, 0.5, 1e-4));
  EXPECT_TRUE(r.feasibility_repaired);
  EXPECT_NEAR(r.new_point[1], 1.0, 1e-9);
  EXPECT_LE(constraint_violation(evaluate_values(p, r.new_point)), 1e-9);
  EXPECT_EQ(active_set(evaluate(p, r.new_point), 1e-9).size(), 2u);

  // Independent check: the face is hit at t = 1 on a fine grid of lengths.
  double first_hit = INFINITY;
  for (int i = 1; i <= 150000; ++i) {
    const double t = i * 1e-5;
    if ((b.x + t * d.v)[1] - 1.0 >= -1e-9) {
      first_hit = t;
      break;
    }
  }
  EXPECT_NEAR(r.t, first_hit, 1e-5);
}

TEST(BoundaryStep, ExhaustedBacktrackingThrowsNoStep) {
  const ProblemSpec p = registry_get("circle2d");
  const auto b = evaluate(p, vec({0.0, 1.0}));
  const auto d = solve_direction(b, SubproblemKind::EqualityIcs, 1e-9);
  const ManifoldChart chart(p, d.active);
  // A long first step with sigma near one and no backtracking cannot pass.
  EXPECT_THROW(boundary_step(p, b, d.v, chart, RetractionKind::Projection, params(50.0, 0.5, 0.99, 0)), NoStep);
}

TEST(StepProperty, AcceptedStepsSatisfyContracts) {
  Gen gen(51);
  const ProblemSpec p = registry_get("circle2d");
  const StepParams sp = params(0.1, 0.5, 1e-4);
  int taken = 0;
  for (int s = 0; s < 300; ++s) {
    const Vector x = gen.circle2d_feasible();
    const auto b = evaluate(p, x);
    const auto d = solve_direction(b, SubproblemKind::ObjectiveIcs, 1e-4);
    if (d.critical(1e-8)) continue;
    const auto r = feasible_armijo_step(p, b, d.v, d.active, identity_retraction(), sp);
    expect_armijo(r, b, d.v, sp.sigma);
    EXPECT_GT(r.t, 0.0);
    EXPECT_LE(r.t, sp.beta0);
    EXPECT_DOUBLE_EQ(r.t, sp.beta0 * std::pow(sp.beta, r.k));
    EXPECT_LE(constraint_violation(evaluate_values(p, r.new_point)), 1e-9);
    ++taken;
  }
  EXPECT_GT(taken, 200);
}

TEST(StepProperty, BoundaryStepsStayFeasible) {
  Gen gen(52);
  const ProblemSpec p = registry_get("circle2d");
  const StepParams sp = params(0.1, 0.5, 1e-4);
  for (int s = 0; s < 200; ++s) {
    const double t = gen.uniform(-M_PI, M_PI);
    const auto b = evaluate(p, vec({std::cos(t), std::sin(t)}));
    const auto d = solve_direction(b, SubproblemKind::EqualityIcs, 1e-9);
    if (d.critical(1e-8)) continue;
    for (RetractionKind kind : {RetractionKind::Projection, RetractionKind::Psi}) {
      const auto r = boundary_step(p, b, d.v, ManifoldChart(p, d.active), kind, sp);
      expect_armijo(r, b, d.v, sp.sigma);
      EXPECT_GT(r.t, 0.0);
      EXPECT_LE(r.t, sp.beta0);
      EXPECT_LE(constraint_violation(evaluate_values(p, r.new_point)), 1e-9);
    }
  }
}
