#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qsuff {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside an operation's domain: non-Hermitian argument, dimension
/// mismatch, a function undefined on a retained eigenvalue.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition does not hold (non-faithful state where a
/// faithful one is required, non-unital channel, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative or adaptive numerical procedure did not converge.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Raised by structure extraction when the channel or subalgebra is not
/// sufficient, as opposed to a numerical failure on a sufficient instance.
class InsufficientError : public Error {
 public:
  using Error::Error;
};

/// Cocycle-generated algebra kept growing under t-grid refinement.
class NonStabilizingError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// Newton moment matching left the mean-value region or diverged.
class RegionExitError : public NumericalFailure {
 public:
  RegionExitError(const std::string& what, std::vector<double> last_iterate, double residual)
      : NumericalFailure(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<double> last_iterate_;
  double residual_;
};

}  // namespace qsuff
