// periodic_solver.hpp
// ω-periodic mild solutions as fixed points of the periodic map
//
//   (F u)(t) = T(t)(I − T(ω))⁻¹ ∫₀^ω T(ω−s)φ(s) ds + ∫₀ᵗ T(t−s)φ(s) ds,
//   φ(s) = f(u(s−τ₁), …, u(s−τₙ)) + g(s),
//
// where delayed arguments wrap modulo ω. (I − T(ω))⁻¹ is diagonal with
// factors 1/(1 − e^{−λ_kω}); the integrals use the exponential trapezoidal
// weights of the stepper on a uniform grid of P intervals.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "efk/io.hpp"
#include "efk/problem.hpp"
#include "efk/spectral_field.hpp"
#include "efk/spectrum.hpp"

namespace efk {

/// Values on t_i = iω/P, i = 0..P, with Hermite derivative slots, extended
/// periodically.
class PeriodicTrajectory {
 public:
  PeriodicTrajectory(double omega, std::vector<SpectralField> values, std::vector<SpectralField> derivatives);

  static PeriodicTrajectory zero(double omega, std::size_t intervals, std::size_t modes);

  double omega() const noexcept { return omega_; }
  std::size_t intervals() const noexcept { return values_.size() - 1; }
  std::size_t modes() const noexcept { return values_.front().modes(); }
  double step() const noexcept { return omega_ / static_cast<double>(intervals()); }
  double time(std::size_t i) const noexcept { return static_cast<double>(i) * step(); }

  const SpectralField& value(std::size_t i) const { return values_.at(i); }
  const SpectralField& derivative(std::size_t i) const { return derivs_.at(i); }
  const std::vector<SpectralField>& values() const noexcept { return values_; }

  /// u(t mod ω), Hermite-interpolated; any real t.
  SpectralField at(double t) const;

  /// max_i ‖u(t_i)‖₂.
  double sup_norm() const;

  /// max_i ‖u(t_i) − v(t_i)‖₂ on a shared grid.
  double distance(const PeriodicTrajectory& other) const;

  /// max_k |a_k(0) − a_k(ω)|.
  double seam_gap() const;

 private:
  double omega_;
  std::vector<SpectralField> values_;
  std::vector<SpectralField> derivs_;
};

/// u₀ = (I − T(ω))⁻¹ ∫₀^ω T(ω−s)φ(s) ds from φ on the P+1 grid points.
SpectralField periodic_initial_value(const OperatorSpectrum& spectrum, double omega,
                                     std::span<const SpectralField> phi);

struct MapOptions {
  std::size_t workers = 1;  ///< threads for the per-point rhs evaluation
};

/// Grid size used for a problem: round(ω/h).
std::size_t periodic_intervals(const ProblemSpec& problem);

/// One application of F on the grid of `u`.
PeriodicTrajectory apply_periodic_map(const ProblemSpec& problem, const PeriodicTrajectory& u,
                                      const MapOptions& options = {});

/// Periodic response to φ sampled on the grid (the linear part of F).
PeriodicTrajectory periodic_response(const OperatorSpectrum& spectrum, double omega,
                                     std::span<const SpectralField> phi);

struct ConvergenceReport {
  std::size_t iterations = 0;
  std::vector<double> residuals;  ///< ‖u_{j+1} − u_j‖_C per iteration
  std::optional<double> theoretical_factor;  ///< Σβ_k/λ₁ when betas are declared
  std::optional<double> empirical_factor;    ///< geometric mean of residual ratios
  bool converged = false;
  std::optional<double> fixed_point_residual;  ///< ‖F(u*) − u*‖_C
  double seam_gap = 0.0;
  bool certificate = false;
  bool accelerated = false;
  /// empirical_factor ≤ theoretical_factor + 0.05 (true when either is absent).
  bool factor_consistent = true;
};

class ConvergenceFailure : public std::runtime_error {
 public:
  explicit ConvergenceFailure(ConvergenceReport report);
  const ConvergenceReport& report() const noexcept { return report_; }

 private:
  ConvergenceReport report_;
};

struct PicardOptions {
  std::optional<PeriodicTrajectory> initial_guess;
  bool certificate = false;
  std::size_t anderson_depth = 0;  ///< 0 = plain Picard; ignored in certificate mode
  std::size_t workers = 1;
  bool verify_fixed_point = true;
  std::uint64_t seed = 0;  ///< for the sampled Lipschitz check
  std::size_t lipschitz_samples = 100000;
  double divergence_guard = 1e12;
};

struct PicardResult {
  PeriodicTrajectory trajectory;
  ConvergenceReport report;
};

/// Iterates u ← F(u) until ‖F(u) − u‖_C < picard_tol. Certificate mode
/// refuses (CertificateRefused) unless H3 passes sampling and H2 holds.
PicardResult picard_iterate(const ProblemSpec& problem, const PicardOptions& options = {});

struct LinearPeriodicSolution {
  PeriodicTrajectory trajectory;
  bool quadrature_fallback = false;
};

/// Periodic solution of u′ + Au = g. Separable forcing uses the closed-form
/// per-mode response; sampled tables fall back to the quadrature map.
LinearPeriodicSolution linear_periodic_solution(const OperatorSpectrum& spectrum, double omega,
                                                const ForcingSpec& forcing, std::size_t intervals,
                                                std::size_t nodes = 0);

/// Closed-form mode response to c·σ(Ωt + φ₀): value and time derivative.
struct ModeResponse {
  double value;
  double derivative;
};
ModeResponse forced_mode_response(double lambda, double amplitude, bool cosine, double angular_frequency,
                                  double phase, double t);

/// CSV `t,norm_l2,a_1..a_J` over the P+1 grid points.
void write_periodic_csv(std::ostream& os, const PeriodicTrajectory& u, std::size_t leading_modes,
                        const OutputMeta& meta);

/// JSON with keys iterations, residuals, theoretical_factor, empirical_factor.
void write_convergence_json(std::ostream& os, const ConvergenceReport& report, const OutputMeta& meta);

}  // namespace efk
