#pragma once

#include <stdexcept>
#include <string>

namespace yellowfin {

/// Raised when an input violates the mathematical domain of an operation
/// (non-positive curvature, momentum outside [0, 1), empty spectra, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A gradient the measurement estimators cannot consume (zero norm or
/// non-finite). The caller skips the tuner update for that step.
class RejectedGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The iterate or gradient became non-finite during a run.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace yellowfin
