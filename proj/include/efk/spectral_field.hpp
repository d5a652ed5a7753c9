// spectral_field.hpp
//
// A function on [0,1] with homogeneous Navier boundary conditions, stored as
// coefficients in the orthonormal sine family
//
//     u(x) = Σ_{k=1..N} a_k · √2 sin(kπx),
//
// so that ‖u‖₂² = Σ a_k² and ⟨u,v⟩ = Σ a_k b_k. Coefficients are stored
// 0-based (a_1 lives at index 0); mode numbers in the public API are 1-based.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace efk {

class SpectralField {
 public:
  SpectralField() = default;

  /// Zero field with `modes` coefficients.
  explicit SpectralField(std::size_t modes);

  /// Takes ownership of `coeffs`; throws DomainError on NaN/Inf entries.
  explicit SpectralField(std::vector<double> coeffs);

  /// Unit vector e_k (1-based mode index).
  static SpectralField unit(std::size_t modes, std::size_t k);

  std::size_t modes() const noexcept { return coeffs_.size(); }
  bool empty() const noexcept { return coeffs_.empty(); }

  double operator[](std::size_t i) const noexcept { return coeffs_[i]; }
  double& operator[](std::size_t i) noexcept { return coeffs_[i]; }

  /// Coefficient of mode k (1-based, bounds-checked).
  double mode(std::size_t k) const;

  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<double> coeffs() noexcept { return coeffs_; }
  const std::vector<double>& vector() const noexcept { return coeffs_; }

  double norm() const noexcept;
  double dot(const SpectralField& other) const;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s) noexcept;

  /// this += s * other
  SpectralField& axpy(double s, const SpectralField& other);

  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  std::vector<double> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Throws ShapeError unless both fields carry the same mode count.
void require_same_modes(const SpectralField& a, const SpectralField& b, const char* where);

}  // namespace efk
