// delay_integrator.hpp
// Delayed initial-value problem
//
//   u′ + Au = f(u(t−τ₁), …, u(t−τₙ)) + g(t),   u = κ on [−r, 0],
//
// advanced with second-order exponential time differencing (exponential
// trapezoidal rule) on the sine basis. Delayed states come from a Hermite
// history; the nonlinearity is applied pseudo-spectrally at M nodes.
//
// The step must not exceed the shortest delay, so the right-hand side at the
// new time level reads only stored history and no predictor is used. A
// longer step fails with HistoryUnderrun.

#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "efk/history.hpp"
#include "efk/io.hpp"
#include "efk/problem.hpp"
#include "efk/sine_transform.hpp"
#include "efk/spectral_field.hpp"
#include "efk/spectrum.hpp"

namespace efk {

/// Spectral right-hand side φ(t) = P_N[f(u(t−τ₁), …) + g(t)].
/// Stateless after construction; safe to call from several threads.
class RhsEvaluator {
 public:
  using Lookup = std::function<SpectralField(double)>;

  explicit RhsEvaluator(const ProblemSpec& problem);

  std::size_t modes() const noexcept { return transform_.modes(); }
  const SineTransform& transform() const noexcept { return transform_; }
  const DelaySpec& delays() const noexcept { return delays_; }

  /// φ(t) from explicit delayed states, delayed[k] = u(t − τ_{k+1}).
  SpectralField evaluate(double t, std::span<const SpectralField> delayed) const;

  /// φ(t) with delayed states fetched through `lookup`.
  SpectralField evaluate(double t, const Lookup& lookup) const;

  /// Projection of g(t, ·) alone.
  SpectralField forcing(double t) const;

  /// Adds the projection of g(t, ·) into `out`.
  void add_forcing(double t, SpectralField& out) const;

 private:
  DelaySpec delays_;
  NonlinearitySpec nl_;
  ForcingSpec forcing_;
  SineTransform transform_;
};

/// φ(t) fetched from a running history buffer.
SpectralField evaluate_delayed_rhs(double t, const HistoryBuffer& history, const RhsEvaluator& rhs);

/// Convenience overload building the evaluator on the fly.
SpectralField evaluate_delayed_rhs(double t, const HistoryBuffer& history, const ProblemSpec& problem);

/// ETD weights for z = λh ≥ 0:
///   e1 = (1 − e^{−z})/z,   e2 = (z − 1 + e^{−z})/z².
struct EtdWeights {
  double e1;
  double e2;
};
EtdWeights etd_weights(double z);

/// Per-mode coefficients of one exponential trapezoidal step of size h:
///   a⁺ = e^{−λh} a + h(e1 − e2) φ(t) + h e2 φ(t+h).
class EtdStepper {
 public:
  EtdStepper(const OperatorSpectrum& spectrum, double h);

  double step() const noexcept { return h_; }
  std::size_t modes() const noexcept { return decay_.size(); }

  void advance(const SpectralField& a, const SpectralField& phi_now, const SpectralField& phi_next,
               SpectralField& out) const;

  /// Exact for φ affine in time; for general φ, a⁺ ≈ e^{−λh}a + ∫ e^{−λ(h−s)}φ.
  SpectralField advance(const SpectralField& a, const SpectralField& phi_now,
                        const SpectralField& phi_next) const;

  std::span<const double> decay() const noexcept { return decay_; }

 private:
  double h_;
  std::vector<double> decay_;
  std::vector<double> w_now_;
  std::vector<double> w_next_;
};

/// One step from `history.now()` using the stored past for both φ values.
/// The state at the current time is the last history knot.
SpectralField step_etd(const OperatorSpectrum& spectrum, double h, const HistoryBuffer& history,
                       const RhsEvaluator& rhs);

struct IvpOptions {
  std::optional<double> step;  ///< overrides the problem step
  bool certificate = false;    ///< require declared Lipschitz constants
  double divergence_guard = 1e12;
};

struct IvpResult {
  Trajectory trajectory;
  double step;
  std::size_t steps;
  std::size_t rhs_evaluations;
};

/// Integrates to `horizon` with a uniform step T/⌈T/h⌉ (never larger than h).
IvpResult solve_ivp(const ProblemSpec& problem, const InitialHistory& kappa, double horizon,
                    const IvpOptions& options = {});

/// Evaluates ‖u(t) − T(t)u(0) − ∫₀ᵗ T(t−s)φ(s) ds‖₂ directly from a stored
/// trajectory with composite Gauss–Legendre quadrature: uniform panels of
/// the given width, then panels graded geometrically toward s = t so that
/// the stiffest modes are resolved. φ is rebuilt from the trajectory.
class MildResidualChecker {
 public:
  MildResidualChecker(const ProblemSpec& problem, const Trajectory& trajectory, double panel_width);

  double residual(double t);

  /// Duhamel integral ∫₀ᵗ T(t−s)φ(s) ds alone.
  SpectralField duhamel(double t);

  /// Residual at every solution knot, accumulating the integral knot by
  /// knot; entry 0 (t = 0) is zero.
  std::vector<double> knot_residuals();

 private:
  void accumulate_segment(double a, double t, SpectralField& acc);
  const SpectralField& cached_phi(std::size_t panel, std::size_t node);

  const Trajectory& traj_;
  RhsEvaluator rhs_;
  OperatorSpectrum spectrum_;
  double width_;
  std::vector<double> gx_;
  std::vector<double> gw_;
  std::vector<std::vector<SpectralField>> cache_;
};

struct MildResidualSample {
  double t;
  double residual;
};

struct MildResidualReport {
  std::vector<MildResidualSample> samples;
  double max_residual = 0.0;
};

/// Residuals at the given times, using the trajectory's step as panel width.
MildResidualReport mild_residual(const ProblemSpec& problem, const IvpResult& result,
                                 std::span<const double> times);

/// CSV: preamble, header `t,norm_l2,a_1,...,a_J`, one row per knot t ≥ 0.
/// A non-empty `mild_residual` (one value per knot) adds that column.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, std::size_t leading_modes,
                          const OutputMeta& meta, std::span<const double> mild_residual = {});

/// NDJSON: a meta record, then {"t": …, "coeffs": […]} per knot.
void write_trajectory_ndjson(std::ostream& os, const Trajectory& trajectory, const OutputMeta& meta);

}  // namespace efk
