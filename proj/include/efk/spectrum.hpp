// spectrum.hpp
//
// Diagonal realization of the fourth-order operator
//
//     A u = γ u'''' − u'' − u,   u(0) = u(1) = u''(0) = u''(1) = 0,
//
// on the sine basis, where A (√2 sin kπx) = λ_k (√2 sin kπx) with
// λ_k = γ(kπ)⁴ + (kπ)² − 1. Every function here is a pure map on
// SpectralField values.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "efk/spectral_field.hpp"

namespace efk {

class OperatorSpectrum {
 public:
  /// Throws DomainError for γ ≤ 0 or non-finite γ, ConfigError for N = 0.
  OperatorSpectrum(double gamma, std::size_t modes);

  double gamma() const noexcept { return gamma_; }
  std::size_t modes() const noexcept { return lambdas_.size(); }

  /// λ_k for 1 ≤ k ≤ N; IndexError otherwise.
  double eigenvalue(std::size_t k) const;
  double lambda1() const noexcept { return lambdas_.front(); }
  std::span<const double> lambdas() const noexcept { return lambdas_; }

 private:
  double gamma_;
  std::vector<double> lambdas_;
};

/// γ(kπ)⁴ + (kπ)² − 1 without constructing a spectrum.
double eigenvalue(double gamma, std::size_t k);

/// First eigenvalue γπ⁴ + π² − 1.
double first_eigenvalue(double gamma);

/// Roots of the factorization A = γ(−D² + μ₁)(−D² + μ₂).
struct FactorizationRoots {
  double mu1;  ///< (1 + √(1+4γ)) / (2γ) > 0
  double mu2;  ///< (1 − √(1+4γ)) / (2γ) ∈ (−π², 0)
};

FactorizationRoots factorization_roots(double gamma);

SpectralField apply_A(const OperatorSpectrum& spectrum, const SpectralField& u);

/// T(t)u: coefficient k scaled by e^{−λ_k t}. DomainError for t < 0.
SpectralField apply_semigroup(const OperatorSpectrum& spectrum, double t, const SpectralField& u);

/// A^α u: coefficient k scaled by λ_k^α. α = −1 is the exact inverse.
SpectralField apply_fractional_power(const OperatorSpectrum& spectrum, double alpha,
                                     const SpectralField& u);

}  // namespace efk
