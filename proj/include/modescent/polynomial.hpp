#ifndef MODESCENT_POLYNOMIAL_HPP
#define MODESCENT_POLYNOMIAL_HPP

#include <cmath>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "modescent/problem.hpp"

namespace modescent {

/// Sum of monomials c * x_1^e_1 * ... * x_n^e_n with non-negative exponents.
class Polynomial {
 public:
  struct Term {
    double coefficient;
    std::vector<int> exponents;
  };

  Polynomial(int n, std::vector<Term> terms) : n_(n), terms_(std::move(terms)) {
    for (const auto& t : terms_) {
      if (static_cast<int>(t.exponents.size()) != n_)
        throw DimensionError("monomial exponent vector has " + std::to_string(t.exponents.size()) +
                             " entries, expected " + std::to_string(n_));
      for (int e : t.exponents)
        if (e < 0) throw DimensionError("negative exponent in monomial");
    }
  }

  int dimension() const { return n_; }

  double value(const Vector& x) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      double p = t.coefficient;
      for (int i = 0; i < n_; ++i) p *= power(x[i], t.exponents[i]);
      s += p;
    }
    return s;
  }

  Vector gradient(const Vector& x) const {
    Vector grad = Vector::Zero(n_);
    for (const auto& t : terms_) {
      for (int j = 0; j < n_; ++j) {
        if (t.exponents[j] == 0) continue;
        double p = t.coefficient * t.exponents[j];
        for (int i = 0; i < n_; ++i) p *= power(x[i], i == j ? t.exponents[i] - 1 : t.exponents[i]);
        grad[j] += p;
      }
    }
    return grad;
  }

 private:
  static double power(double base, int e) {
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= base;
    return r;
  }

  int n_;
  std::vector<Term> terms_;
};

namespace detail {

inline VectorMap stack_values(std::shared_ptr<const std::vector<Polynomial>> polys) {
  return [polys](const Vector& x) {
    Vector v(static_cast<Eigen::Index>(polys->size()));
    for (std::size_t i = 0; i < polys->size(); ++i) v[static_cast<Eigen::Index>(i)] = (*polys)[i].value(x);
    return v;
  };
}

inline JacobianMap stack_gradients(std::shared_ptr<const std::vector<Polynomial>> polys, int n) {
  return [polys, n](const Vector& x) {
    Matrix d(static_cast<Eigen::Index>(polys->size()), n);
    for (std::size_t i = 0; i < polys->size(); ++i)
      d.row(static_cast<Eigen::Index>(i)) = (*polys)[i].gradient(x).transpose();
    return d;
  };
}

inline std::vector<Polynomial> parse_polynomials(const nlohmann::json& list, int n, const char* field) {
  std::vector<Polynomial> out;
  if (list.is_null()) return out;
  if (!list.is_array()) throw DimensionError(std::string("'") + field + "' must be an array");
  for (const auto& poly : list) {
    std::vector<Polynomial::Term> terms;
    for (const auto& mono : poly) {
      if (!mono.is_array() || mono.size() != 2)
        throw DimensionError(std::string("'") + field + "': monomials are [coefficient, [exponents...]] pairs");
      terms.push_back({mono[0].get<double>(), mono[1].get<std::vector<int>>()});
    }
    out.emplace_back(n, std::move(terms));
  }
  return out;
}

}  // namespace detail

/**
 * Builds a problem from a JSON description of polynomial maps:
 *
 *   { "name": "...", "n": 2, "m": 2,
 *     "objectives":   [ [[c, [e1, e2]], ...], ... ],
 *     "equalities":   [ ... ],
 *     "inequalities": [ ... ],
 *     "box": { "lower": [...], "upper": [...] } }
 *
 * name, equalities, inequalities and box are optional; the box defaults to
 * [-3, 3]^n.
 */
inline ProblemSpec polynomial_problem(const nlohmann::json& doc) {
  const int n = doc.at("n").get<int>();
  const int m = doc.at("m").get<int>();
  if (n < 1) throw DimensionError("'n' must be positive");

  auto objectives = std::make_shared<const std::vector<Polynomial>>(
      detail::parse_polynomials(doc.at("objectives"), n, "objectives"));
  auto equalities = std::make_shared<const std::vector<Polynomial>>(
      detail::parse_polynomials(doc.value("equalities", nlohmann::json()), n, "equalities"));
  auto inequalities = std::make_shared<const std::vector<Polynomial>>(
      detail::parse_polynomials(doc.value("inequalities", nlohmann::json()), n, "inequalities"));
  if (static_cast<int>(objectives->size()) != m)
    throw DimensionError("'m' is " + std::to_string(m) + " but " + std::to_string(objectives->size()) +
                         " objectives were given");

  ProblemSpec p;
  p.name = doc.value("name", std::string("polynomial"));
  p.n = n;
  p.m = m;
  p.m_h = static_cast<int>(equalities->size());
  p.m_g = static_cast<int>(inequalities->size());
  p.F = detail::stack_values(objectives);
  p.DF = detail::stack_gradients(objectives, n);
  if (p.m_h > 0) {
    p.H = detail::stack_values(equalities);
    p.DH = detail::stack_gradients(equalities, n);
  }
  if (p.m_g > 0) {
    p.G = detail::stack_values(inequalities);
    p.DG = detail::stack_gradients(inequalities, n);
  }
  if (doc.contains("box")) {
    const auto lo = doc["box"].at("lower").get<std::vector<double>>();
    const auto hi = doc["box"].at("upper").get<std::vector<double>>();
    if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
      throw DimensionError("'box' bounds must have n entries");
    p.box = {Eigen::Map<const Vector>(lo.data(), n), Eigen::Map<const Vector>(hi.data(), n)};
  } else {
    p.box = SamplingBox::cube(n, -3.0, 3.0);
  }
  p.validate();
  return p;
}

inline ProblemSpec load_polynomial_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot open problem file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
    return polynomial_problem(doc);
  } catch (const nlohmann::json::exception& e) {
    throw DimensionError("problem file '" + path + "': " + e.what());
  }
}

}  // namespace modescent

#endif  // MODESCENT_POLYNOMIAL_HPP
