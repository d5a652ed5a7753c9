// forcing.hpp
// Source term g(t, x): a finite sum of separable terms
//
//     c · σ(Ω t + φ₀) · sin(jπx),   σ ∈ {cos, sin},
//
// or, as a fallback, a table of samples at the collocation nodes.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace efk {

enum class Temporal { Cos, Sin };

struct ForcingTerm {
  double amplitude = 0.0;
  Temporal shape = Temporal::Cos;
  double angular_frequency = 0.0;
  double phase = 0.0;
  std::size_t mode = 1;  ///< spatial index j ≥ 1
};

/// Periodic description: Ω = 2π·harmonic/period.
struct PeriodicTerm {
  double amplitude = 0.0;
  Temporal shape = Temporal::Cos;
  std::size_t harmonic = 0;
  double phase = 0.0;
  std::size_t mode = 1;
};

/// g sampled at the M collocation nodes on a uniform time grid
/// t_i = start + i·dt. Periodic tables wrap with period count·dt.
struct ForcingTable {
  double start = 0.0;
  double dt = 0.0;
  std::vector<std::vector<double>> samples;  ///< samples[i][j] = g(t_i, x_j)
  bool periodic = false;
};

class ForcingSpec {
 public:
  ForcingSpec() = default;

  static ForcingSpec none() { return {}; }
  static ForcingSpec periodic(double period, std::vector<PeriodicTerm> terms);
  static ForcingSpec aperiodic(std::vector<ForcingTerm> terms);
  static ForcingSpec tabulated(ForcingTable table);

  std::span<const ForcingTerm> terms() const noexcept { return terms_; }
  const std::optional<ForcingTable>& table() const noexcept { return table_; }
  std::optional<double> period() const noexcept { return period_; }

  bool separable() const noexcept { return !table_.has_value(); }
  bool is_zero() const noexcept;

  /// Temporal factor c·σ(Ωt + φ₀) of term i.
  double temporal(std::size_t i, double t) const;

  /// g(t, x). Tables are interpolated linearly between nodes (and to zero
  /// at the boundary), linearly in time.
  double value(double t, double x) const;

  /// g(t, x_j) for the given collocation nodes x_j = j/(M+1).
  void sample(double t, std::span<const double> nodes, std::span<double> out) const;

  /// Upper bound on sup |g| (used by growth-bound sanity checks).
  double sup_bound() const;

 private:
  std::vector<ForcingTerm> terms_;
  std::optional<ForcingTable> table_;
  std::optional<double> period_;

  void table_row(double t, std::vector<double>& out) const;
};

}  // namespace efk
