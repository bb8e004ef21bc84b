#ifndef MODESCENT_ERRORS_HPP
#define MODESCENT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace modescent {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A problem map returned a non-finite value or an array of the wrong shape.
class EvaluationError : public Error {
 public:
  EvaluationError(std::string component, int index, const std::string& what)
      : Error(what), component_(std::move(component)), index_(index) {}

  /// "F", "DF", "H", "DH", "G" or "DG".
  const std::string& component() const noexcept { return component_; }
  /// Offending entry (row-major for Jacobians), -1 for shape errors.
  int index() const noexcept { return index_; }

 private:
  std::string component_;
  int index_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Constraint gradients are not linearly independent where they must be.
class RankError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class NoRoot : public Error {
 public:
  using Error::Error;
};

/// Backtracking exhausted its exponent budget.
class NoStep : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace modescent

#endif  // MODESCENT_ERRORS_HPP
