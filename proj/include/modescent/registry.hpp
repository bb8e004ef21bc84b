#ifndef MODESCENT_REGISTRY_HPP
#define MODESCENT_REGISTRY_HPP

#include <string>
#include <string_view>
#include <vector>

#include "modescent/problem.hpp"

namespace modescent {

namespace problems {

/// Two shifted paraboloids outside the unit disc:
///   F = ((x1-2)^2 + (x2-1)^2, (x1-2)^2 + (x2+1)^2),  G = 1 - x1^2 - x2^2.
/// Critical set: the arc {(cos t, sin t) : |t - pi| <= atan(1/2)} and the
/// segment {2} x [-1, 1]; only the segment is globally Pareto optimal.
inline ProblemSpec circle2d() {
  ProblemSpec p;
  p.name = "circle2d";
  p.n = 2;
  p.m = 2;
  p.m_g = 1;
  p.F = [](const Vector& x) {
    Vector f(2);
    const double a = (x[0] - 2.0) * (x[0] - 2.0);
    f << a + (x[1] - 1.0) * (x[1] - 1.0), a + (x[1] + 1.0) * (x[1] + 1.0);
    return f;
  };
  p.DF = [](const Vector& x) {
    Matrix d(2, 2);
    d << 2.0 * (x[0] - 2.0), 2.0 * (x[1] - 1.0),  //
        2.0 * (x[0] - 2.0), 2.0 * (x[1] + 1.0);
    return d;
  };
  p.G = [](const Vector& x) { return Vector::Constant(1, 1.0 - x.squaredNorm()); };
  p.DG = [](const Vector& x) { return Matrix(-2.0 * x.transpose()); };
  p.box = SamplingBox::cube(2, -3.0, 3.0);
  return p;
}

inline ProblemSpec unit_sphere_base(std::string name, int m) {
  ProblemSpec p;
  p.name = std::move(name);
  p.n = 3;
  p.m = m;
  p.m_h = 1;
  p.H = [](const Vector& x) { return Vector::Constant(1, x.squaredNorm() - 1.0); };
  p.DH = [](const Vector& x) { return Matrix(2.0 * x.transpose()); };
  p.box = SamplingBox::cube(3, -1.5, 1.5);
  return p;
}

/// Minimize x3 on the unit sphere; unique minimizer (0, 0, -1).
inline ProblemSpec sphere3d() {
  ProblemSpec p = unit_sphere_base("sphere3d", 1);
  p.F = [](const Vector& x) { return Vector::Constant(1, x[2]); };
  p.DF = [](const Vector&) {
    Matrix d = Matrix::Zero(1, 3);
    d(0, 2) = 1.0;
    return d;
  };
  return p;
}

/// F = (a.x, -a.x) on the unit sphere: every feasible point is critical.
inline ProblemSpec antipodal_sphere3d() {
  ProblemSpec p = unit_sphere_base("antipodal-sphere3d", 2);
  static const Eigen::Vector3d a(1.0, -2.0, 0.5);
  p.F = [](const Vector& x) {
    Vector f(2);
    f << a.dot(x), -a.dot(x);
    return f;
  };
  p.DF = [](const Vector&) {
    Matrix d(2, 3);
    d.row(0) = a.transpose();
    d.row(1) = -a.transpose();
    return d;
  };
  return p;
}

/// F = x1 + x2 on the half plane x1 >= 0.
inline ProblemSpec halfplane2d() {
  ProblemSpec p;
  p.name = "halfplane2d";
  p.n = 2;
  p.m = 1;
  p.m_g = 1;
  p.F = [](const Vector& x) { return Vector::Constant(1, x[0] + x[1]); };
  p.DF = [](const Vector&) { return Matrix::Constant(1, 2, 1.0); };
  p.G = [](const Vector& x) { return Vector::Constant(1, -x[0]); };
  p.DG = [](const Vector&) {
    Matrix d(1, 2);
    d << -1.0, 0.0;
    return d;
  };
  p.box = SamplingBox::cube(2, -3.0, 3.0);
  return p;
}

/// F = x1 - x2 on the corner {x1 >= 0, x2 <= 1}; the corner (0, 1) is critical.
inline ProblemSpec corner2d() {
  ProblemSpec p;
  p.name = "corner2d";
  p.n = 2;
  p.m = 1;
  p.m_g = 2;
  p.F = [](const Vector& x) { return Vector::Constant(1, x[0] - x[1]); };
  p.DF = [](const Vector&) {
    Matrix d(1, 2);
    d << 1.0, -1.0;
    return d;
  };
  p.G = [](const Vector& x) {
    Vector g(2);
    g << -x[0], x[1] - 1.0;
    return g;
  };
  p.DG = [](const Vector&) {
    Matrix d(2, 2);
    d << -1.0, 0.0,  //
        0.0, 1.0;
    return d;
  };
  p.box = SamplingBox::cube(2, -3.0, 3.0);
  return p;
}

/// circle2d with a deliberately wrong objective Jacobian. Audits must flag it.
inline ProblemSpec broken_jacobian_fixture() {
  ProblemSpec p = circle2d();
  p.name = "broken-jacobian-fixture";
  p.DF = [](const Vector& x) {
    Matrix d(2, 2);
    d << 3.0 * (x[0] - 2.0), 2.0 * (x[1] - 1.0),  //
        2.0 * (x[0] - 2.0), 2.0 * (x[1] + 1.0) + 1.0;
    return d;
  };
  return p;
}

}  // namespace problems

namespace detail {

struct RegistryEntry {
  std::string_view name;
  ProblemSpec (*make)();
  bool fixture;
};

inline constexpr RegistryEntry kRegistry[] = {
    {"circle2d", &problems::circle2d, false},
    {"sphere3d", &problems::sphere3d, false},
    {"antipodal-sphere3d", &problems::antipodal_sphere3d, false},
    {"halfplane2d", &problems::halfplane2d, false},
    {"corner2d", &problems::corner2d, false},
    {"broken-jacobian-fixture", &problems::broken_jacobian_fixture, true},
};

}  // namespace detail

/// Names of the registered problems. Test fixtures (resolvable through
/// registry_get) are listed only when include_fixtures is set.
inline std::vector<std::string> registry_names(bool include_fixtures = false) {
  std::vector<std::string> names;
  for (const auto& e : detail::kRegistry)
    if (include_fixtures || !e.fixture) names.emplace_back(e.name);
  return names;
}

inline ProblemSpec registry_get(std::string_view name) {
  for (const auto& e : detail::kRegistry)
    if (e.name == name) return e.make();
  std::string list;
  for (const auto& n : registry_names()) list += (list.empty() ? "" : ", ") + n;
  throw LookupError("unknown problem '" + std::string(name) + "'; available: " + list);
}

}  // namespace modescent

#endif  // MODESCENT_REGISTRY_HPP
