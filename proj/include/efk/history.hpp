// history.hpp
// Stored solution tails for delay lookups.
//
// HermiteSeries is the common storage: ordered knots with a value and a
// time derivative per knot, evaluated by piecewise cubic Hermite
// interpolation per coefficient. InitialHistory is κ on [−r, 0].
// HistoryBuffer is what the integrator writes into while stepping, and
// Trajectory is what it hands back.

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "efk/spectral_field.hpp"

namespace efk {

class HermiteSeries {
 public:
  HermiteSeries() = default;

  /// Appends a knot; ConfigError unless t exceeds the last knot.
  void push(double t, SpectralField value, SpectralField derivative);

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  double front_time() const { return times_.front(); }
  double back_time() const { return times_.back(); }

  double time(std::size_t i) const { return times_[i]; }
  const SpectralField& value(std::size_t i) const { return values_[i]; }
  const SpectralField& derivative(std::size_t i) const { return derivs_[i]; }
  const std::vector<double>& times() const noexcept { return times_; }

  /// Interpolated value; exact at knots. HistoryUnderrun outside the knot
  /// range (queries within `slack` of an end are clamped).
  SpectralField evaluate(double t, double slack = 0.0) const;
  void evaluate_into(double t, SpectralField& out, double slack = 0.0) const;

  SpectralField& mutable_value(std::size_t i) { return values_[i]; }
  SpectralField& mutable_derivative(std::size_t i) { return derivs_[i]; }

 private:
  std::vector<double> times_;
  std::vector<SpectralField> values_;
  std::vector<SpectralField> derivs_;
};

/// The initial history κ(t), t ∈ [−r, 0].
class InitialHistory {
 public:
  using Function = std::function<SpectralField(double)>;

  static InitialHistory zero(std::size_t modes);
  static InitialHistory constant(SpectralField value);
  static InitialHistory from_function(std::size_t modes, Function f);

  /// One closed-form function per mode: κ(t) = Σ_k φ_k(t) e_k.
  static InitialHistory from_mode_functions(std::vector<std::function<double(double)>> per_mode);

  /// Sampled table, Hermite-interpolated with finite-difference derivative
  /// estimates (three-point centred inside, three-point one-sided at ends).
  static InitialHistory from_table(std::vector<double> times, std::vector<SpectralField> values);

  std::size_t modes() const noexcept { return modes_; }
  SpectralField operator()(double t) const { return f_(t); }

 private:
  InitialHistory(std::size_t modes, Function f) : modes_(modes), f_(std::move(f)) {}

  std::size_t modes_;
  Function f_;
};

/// Solution on [−r, T]: κ for t ≤ 0, the Hermite knots for t ≥ 0.
class Trajectory {
 public:
  Trajectory(InitialHistory kappa, double max_delay, HermiteSeries solution);

  /// HistoryUnderrun for t < −r or t beyond the last knot.
  SpectralField at(double t) const;

  const InitialHistory& history() const noexcept { return kappa_; }
  const HermiteSeries& solution() const noexcept { return solution_; }
  double max_delay() const noexcept { return r_; }
  double horizon() const { return solution_.back_time(); }
  std::size_t modes() const noexcept { return kappa_.modes(); }

 private:
  InitialHistory kappa_;
  double r_;
  HermiteSeries solution_;
};

/// Running history for an integrator. Lookups are restricted to the window
/// [now − r, now]; anything outside raises HistoryUnderrun.
class HistoryBuffer {
 public:
  HistoryBuffer(InitialHistory kappa, double max_delay);

  void push(double t, SpectralField value, SpectralField derivative);

  double now() const noexcept { return solution_.empty() ? 0.0 : solution_.back_time(); }
  double max_delay() const noexcept { return r_; }
  std::size_t modes() const noexcept { return kappa_.modes(); }
  const HermiteSeries& solution() const noexcept { return solution_; }

  SpectralField lookup(double t) const;

  Trajectory release() &&;

 private:
  double tolerance() const noexcept;

  InitialHistory kappa_;
  double r_;
  HermiteSeries solution_;
};

}  // namespace efk
