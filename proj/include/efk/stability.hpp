// stability.hpp
// Attraction toward the periodic solution: solve the IVP from a history κ,
// track d(t) = ‖u_κ(t) − ū(t)‖₂ against the envelope
//
//   d(t) ≤ C · e^{−ρt},   C = max_{s∈[−r,0]} e^{λ₁s} ‖ū(s) − κ(s)‖₂,
//
// and fit the tail slope of log d.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "efk/history.hpp"
#include "efk/hypotheses.hpp"
#include "efk/io.hpp"
#include "efk/periodic_solver.hpp"
#include "efk/problem.hpp"

namespace efk {

/// κ(s) = ū(s mod ω) + δ on [−r, 0].
InitialHistory periodic_plus(const PeriodicTrajectory& ubar, SpectralField delta);

struct DecaySample {
  double t;
  double distance;
  double bound_rhs;   ///< as-written envelope C e^{−ρt}
  double bound_sup;   ///< envelope with sup_{[−r,0]} ‖ū − κ‖ as prefactor
};

enum class FitStatus { Fitted, AtFloor };

struct DecayFit {
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::vector<std::pair<double, double>> fit_samples;  ///< (t, log d) inside the window above the floor
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  FitStatus status = FitStatus::Fitted;
  double floor = 1e-13;

  std::optional<double> rho;                   ///< absent without declared betas
  std::optional<double> theoretical_exponent;  ///< −ρ
  bool certified = false;                      ///< ρ > 0

  double prefactor = 0.0;      ///< as written
  double prefactor_sup = 0.0;  ///< fallback
  bool bound_holds = true;     ///< every sample under the as-written envelope
  bool bound_sup_holds = true; ///< every sample under the fallback envelope
  bool slope_ok = true;        ///< slope ≤ −ρ(1 − slope_slack), or at floor, or not certified

  std::vector<DecaySample> samples;
  ConvergenceReport periodic_report;

  bool passed() const noexcept { return slope_ok && (bound_holds || bound_sup_holds); }
};

struct AttractionOptions {
  double horizon = 0.15;
  std::optional<std::pair<double, double>> fit_window;  ///< default [T/2, T]
  std::optional<PeriodicTrajectory> periodic;           ///< reuse a precomputed ū
  bool certificate = false;
  bool throw_on_violation = true;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  std::size_t lipschitz_samples = 100000;
  std::size_t prefactor_samples = 4096;
};

/// Runs the experiment. Certificate mode refuses unless H2′ holds; a
/// sample above both envelopes raises BoundViolation when requested.
DecayFit attraction_experiment(const ProblemSpec& problem, const InitialHistory& kappa,
                               const AttractionOptions& options = {});

/// Least-squares line through (t, y): slope, intercept, r².
struct LineFit {
  double slope;
  double intercept;
  double r_squared;
};
LineFit fit_line(const std::vector<std::pair<double, double>>& points);

void write_decay_csv(std::ostream& os, const DecayFit& fit, const OutputMeta& meta);
void write_decay_json(std::ostream& os, const DecayFit& fit, const OutputMeta& meta);
void write_hypotheses_json(std::ostream& os, const HypothesisReport& report, const OutputMeta& meta);

}  // namespace efk
