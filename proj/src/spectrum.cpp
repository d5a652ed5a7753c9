#include "efk/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "efk/errors.hpp"

namespace efk {

namespace {

void require_positive_gamma(double gamma, const char* where) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw DomainError(std::string(where) + ": gamma must be positive and finite");
  }
}

void require_matching(const OperatorSpectrum& s, const SpectralField& u, const char* where) {
  if (s.modes() != u.modes()) {
    throw ShapeError(std::string(where) + ": field has " + std::to_string(u.modes()) +
                     " modes, spectrum has " + std::to_string(s.modes()));
  }
}

}  // namespace

double eigenvalue(double gamma, std::size_t k) {
  const double kp = static_cast<double>(k) * std::numbers::pi;
  const double kp2 = kp * kp;
  return gamma * kp2 * kp2 + kp2 - 1.0;
}

double first_eigenvalue(double gamma) {
  require_positive_gamma(gamma, "first_eigenvalue");
  return eigenvalue(gamma, 1);
}

OperatorSpectrum::OperatorSpectrum(double gamma, std::size_t modes) : gamma_(gamma) {
  require_positive_gamma(gamma, "OperatorSpectrum");
  if (modes == 0) throw ConfigError("OperatorSpectrum: mode count must be positive");
  lambdas_.resize(modes);
  for (std::size_t k = 1; k <= modes; ++k) lambdas_[k - 1] = efk::eigenvalue(gamma, k);
}

double OperatorSpectrum::eigenvalue(std::size_t k) const {
  if (k < 1 || k > lambdas_.size()) {
    throw IndexError("eigenvalue: mode " + std::to_string(k) + " outside 1.." +
                     std::to_string(lambdas_.size()));
  }
  return lambdas_[k - 1];
}

FactorizationRoots factorization_roots(double gamma) {
  require_positive_gamma(gamma, "factorization_roots");
  const double s = std::sqrt(1.0 + 4.0 * gamma);
  const double mu1 = (1.0 + s) / (2.0 * gamma);
  // 1 − s cancels for small γ; μ₁μ₂ = −1/γ gives μ₂ without the subtraction.
  const double mu2 = -1.0 / (gamma * mu1);
  return {mu1, mu2};
}

SpectralField apply_A(const OperatorSpectrum& spectrum, const SpectralField& u) {
  require_matching(spectrum, u, "apply_A");
  SpectralField out = u;
  auto lam = spectrum.lambdas();
  for (std::size_t i = 0; i < out.modes(); ++i) out[i] *= lam[i];
  return out;
}

SpectralField apply_semigroup(const OperatorSpectrum& spectrum, double t, const SpectralField& u) {
  require_matching(spectrum, u, "apply_semigroup");
  if (!(t >= 0.0)) throw DomainError("apply_semigroup: t must be nonnegative");
  SpectralField out = u;
  if (t == 0.0) return out;
  auto lam = spectrum.lambdas();
  for (std::size_t i = 0; i < out.modes(); ++i) out[i] *= std::exp(-lam[i] * t);
  return out;
}

SpectralField apply_fractional_power(const OperatorSpectrum& spectrum, double alpha,
                                     const SpectralField& u) {
  require_matching(spectrum, u, "apply_fractional_power");
  SpectralField out = u;
  if (alpha == 0.0) return out;
  auto lam = spectrum.lambdas();
  for (std::size_t i = 0; i < out.modes(); ++i) {
    if (alpha == 1.0) {
      out[i] *= lam[i];
    } else if (alpha == -1.0) {
      out[i] /= lam[i];
    } else {
      out[i] *= std::pow(lam[i], alpha);
    }
  }
  return out;
}

}  // namespace efk
