// nonlinearity.hpp
//
// Pointwise nonlinearity f(ξ₁, …, ξₙ) applied to the delayed states, with
// optional Lipschitz constants β_k (global Lipschitz condition) and an
// affine growth bound (β, K).
//
// Built-ins available through parse():
//
//   zero                   f ≡ 0
//   linear(c1, …, cn)      Σ c_k ξ_k
//   tanh_scaled(beta, k)   beta · tanh(ξ_k)
//   sin_scaled(beta, k)    beta · sin(ξ_k)
//   cubic(k)               −ξ_k³   (locally Lipschitz only)
//   sum(e1, e2, …)         e1 + e2 + …
//
// Delay indices k are 1-based.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace efk {

struct AffineBound {
  std::vector<double> betas;
  double K = 0.0;
};

class NonlinearitySpec {
 public:
  using Evaluator = std::function<double(std::span<const double>)>;

  NonlinearitySpec(std::size_t arity, Evaluator f, std::string description = "custom");

  static NonlinearitySpec zero(std::size_t arity);

  /// Parse a built-in expression; ConfigError on syntax or arity problems.
  static NonlinearitySpec parse(std::string_view expr, std::size_t arity);

  std::size_t arity() const noexcept { return arity_; }
  const std::string& description() const noexcept { return description_; }
  bool is_zero() const noexcept { return is_zero_; }

  double operator()(std::span<const double> xi) const { return f_(xi); }

  /// Declared Lipschitz constants (H3 data); absent means unknown.
  const std::optional<std::vector<double>>& lipschitz_betas() const noexcept { return betas_; }
  void set_lipschitz_betas(std::vector<double> betas);

  const std::optional<AffineBound>& affine_bound() const noexcept { return affine_; }
  void set_affine_bound(AffineBound bound);

  /// Lipschitz constants implied by the built-in expression, when the
  /// expression is globally Lipschitz. Informational; hypotheses use the
  /// declared constants.
  const std::optional<std::vector<double>>& natural_betas() const noexcept { return natural_; }

 private:
  std::size_t arity_;
  Evaluator f_;
  std::string description_;
  bool is_zero_ = false;
  std::optional<std::vector<double>> betas_;
  std::optional<AffineBound> affine_;
  std::optional<std::vector<double>> natural_;
};

/// Outcome of a randomized pointwise inequality check.
struct SampledCheck {
  bool holds = true;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  ///< max over samples of lhs / rhs
  std::uint64_t seed = 0;
  double box = 0.0;
};

/// Two-point check |f(ξ) − f(η)| ≤ Σ β_k |ξ_k − η_k| over [−box, box]ⁿ.
SampledCheck sample_lipschitz(const NonlinearitySpec& f, std::span<const double> betas, double box,
                              std::size_t samples, std::uint64_t seed);

}  // namespace efk
