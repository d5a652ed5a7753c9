// errors.hpp
// Exception types shared by the efk library. Each maps to one failure class
// named in the module contracts; the CLI translates them into exit codes.

#pragma once

#include <stdexcept>
#include <string>

namespace efk {

/// Mode index outside 1..N.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Argument outside the mathematical domain (γ ≤ 0, t < 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mode-count or sample-count mismatch between operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid discretization or schema input.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A delay lookup fell outside the stored history window.
class HistoryUnderrun : public std::runtime_error {
 public:
  HistoryUnderrun(double query, double window_lo, double window_hi);

  double query() const noexcept { return query_; }
  double window_lo() const noexcept { return lo_; }
  double window_hi() const noexcept { return hi_; }

 private:
  double query_;
  double lo_;
  double hi_;
};

/// The state became non-finite or exceeded the divergence guard.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(double time, double max_coefficient);

  double time() const noexcept { return time_; }
  double max_coefficient() const noexcept { return max_coeff_; }

 private:
  double time_;
  double max_coeff_;
};

/// A certificate-mode precondition (H2, H2', H3) is not satisfied.
class CertificateRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Distance to the periodic solution exceeded every admissible envelope.
class BoundViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace efk
