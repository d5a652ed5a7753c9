#include "efk/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "efk/errors.hpp"

namespace efk {

SpectralField::SpectralField(std::size_t modes) : coeffs_(modes, 0.0) {}

SpectralField::SpectralField(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (!all_finite()) throw DomainError("SpectralField: non-finite coefficient");
}

SpectralField SpectralField::unit(std::size_t modes, std::size_t k) {
  if (k < 1 || k > modes) {
    throw IndexError("SpectralField::unit: mode " + std::to_string(k) + " outside 1.." +
                     std::to_string(modes));
  }
  SpectralField e(modes);
  e.coeffs_[k - 1] = 1.0;
  return e;
}

double SpectralField::mode(std::size_t k) const {
  if (k < 1 || k > modes()) {
    throw IndexError("SpectralField::mode: mode " + std::to_string(k) + " outside 1.." +
                     std::to_string(modes()));
  }
  return coeffs_[k - 1];
}

double SpectralField::norm() const noexcept {
  // Scaled accumulation; coefficients span many decades for stiff modes.
  double scale = max_abs();
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double sum = 0.0;
  for (double a : coeffs_) {
    double r = a / scale;
    sum += r * r;
  }
  return scale * std::sqrt(sum);
}

double SpectralField::dot(const SpectralField& other) const {
  require_same_modes(*this, other, "SpectralField::dot");
  double sum = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) sum += coeffs_[i] * other.coeffs_[i];
  return sum;
}

double SpectralField::max_abs() const noexcept {
  double m = 0.0;
  for (double a : coeffs_) {
    if (std::isnan(a)) return a;
    m = std::max(m, std::abs(a));
  }
  return m;
}

bool SpectralField::all_finite() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double a) { return std::isfinite(a); });
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_modes(*this, other, "SpectralField::operator+=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_modes(*this, other, "SpectralField::operator-=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) noexcept {
  for (double& a : coeffs_) a *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
  require_same_modes(*this, other, "SpectralField::axpy");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * other.coeffs_[i];
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

void require_same_modes(const SpectralField& a, const SpectralField& b, const char* where) {
  if (a.modes() != b.modes()) {
    throw ShapeError(std::string(where) + ": mode count mismatch (" + std::to_string(a.modes()) +
                     " vs " + std::to_string(b.modes()) + ")");
  }
}

}  // namespace efk
