// greens.hpp
//
// Closed-form inverse of A through its factorization
//
//     A = γ(−D² + μ₁)(−D² + μ₂),  μ₁ > 0 > μ₂ > −π²,
//
// so A⁻¹ = γ⁻¹ G₁ G₂ with G_i the Dirichlet Green's function of −u'' + μ_i u.
// G₁ has the hyperbolic form (μ₁ > 0), G₂ the trigonometric form (μ₂ < 0):
//
//   G₁(x,y) = sinh(s₁ min) sinh(s₁(1 − max)) / (s₁ sinh s₁),   s₁ = √μ₁
//   G₂(x,y) = sin (s₂ min) sin (s₂(1 − max)) / (s₂ sin  s₂),   s₂ = √|μ₂|
//
// greens_solve() evaluates the double integral as two nested 1D quadrature
// passes on a composite Gauss–Legendre grid. Both kernels have a derivative
// kink on the diagonal; the panel containing the evaluation node is split
// there and each half is integrated with the grid's partial-panel matrix.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "efk/quadrature.hpp"
#include "efk/spectral_field.hpp"

namespace efk {

class GreensKernelPair {
 public:
  /// Pair for the factorization of A with parameter γ.
  static GreensKernelPair for_gamma(double gamma);

  /// Explicit roots. `hyperbolic_root` must be positive; the trigonometric
  /// kernel uses √|trig_root|, which must lie in (0, π).
  GreensKernelPair(double hyperbolic_root, double trig_root);

  double mu1() const noexcept { return mu1_; }
  double mu2() const noexcept { return mu2_; }

  double g1(double x, double y) const noexcept;
  double g2(double x, double y) const noexcept;

 private:
  double mu1_;
  double mu2_;
  double s1_;
  double s2_;
  double c1_;  // s₁ sinh s₁
  double c2_;  // s₂ sin s₂
};

/// Quadrature settings for greens_solve. Default: 256 panels × 8 nodes =
/// 2048 nodes per axis.
struct GreensQuadrature {
  std::size_t panels = 256;
  std::size_t order = 8;

  std::size_t nodes() const noexcept { return panels * order; }
};

/// Smallest accepted node count; below it the projection onto N modes is
/// underresolved.
std::size_t greens_minimum_nodes(std::size_t modes);

/// Solve Au = φ from samples of φ at the grid nodes and project u onto the
/// first `modes` sine modes. ConfigError if the grid is below minimum.
SpectralField greens_solve(const GreensKernelPair& pair, double gamma, const PanelGrid& grid,
                           std::span<const double> phi_samples, std::size_t modes);

/// Convenience overload sampling φ on a grid built from `quad`.
SpectralField greens_solve(const GreensKernelPair& pair, double gamma,
                           const std::function<double(double)>& phi, std::size_t modes,
                           GreensQuadrature quad = {});

/// Values of u = γ⁻¹ G₁ G₂ φ at the grid nodes (before projection).
std::vector<double> greens_apply(const GreensKernelPair& pair, double gamma, const PanelGrid& grid,
                                 std::span<const double> phi_samples);

/// Sine coefficients of nodal values on `grid` via Gauss quadrature.
SpectralField project_to_sine(const PanelGrid& grid, std::span<const double> values,
                              std::size_t modes);

}  // namespace efk
