// hypotheses.hpp
// Structural conditions on (f, g, γ, τ):
//
//   H1   |f(ξ) + g(t,x)| ≤ Σ β_k|ξ_k| + K                 (sampled)
//   H2   Σ β_k < λ₁                                        (arithmetic)
//   H3   |f(ξ) − f(η)| ≤ Σ β_k|ξ_k − η_k|                  (sampled)
//   H2′  Σ β_k e^{λ₁τ_k} < λ₁                              (arithmetic)
//
// and the attraction exponent ρ = λ₁ − Σ β_k e^{λ₁τ_k}.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "efk/nonlinearity.hpp"
#include "efk/problem.hpp"

namespace efk {

enum class Status { Holds, Fails, Unknown };

const char* to_string(Status s) noexcept;

struct ConditionResult {
  Status status = Status::Unknown;
  std::optional<double> margin;  ///< rhs − lhs for arithmetic conditions
  std::optional<double> lhs;
  std::optional<SampledCheck> sampling;
  std::string detail;

  bool holds() const noexcept { return status == Status::Holds; }
};

struct HypothesisReport {
  double lambda1 = 0.0;
  ConditionResult h1;
  ConditionResult h2;
  ConditionResult h3;
  ConditionResult h2prime;
  std::optional<double> rho;
  std::vector<std::string> warnings;

  /// No condition with data fails.
  bool all_known_hold() const noexcept;
  bool complete() const noexcept;
};

struct HypothesisOptions {
  double box = 10.0;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
};

HypothesisReport check_hypotheses(const ProblemSpec& problem, const HypothesisOptions& options = {});

/// Σ β_k e^{λ₁τ_k}.
double h2prime_lhs(double gamma, std::span<const double> taus, std::span<const double> betas);

/// ρ = λ₁ − Σ β_k e^{λ₁τ_k}.
double decay_exponent(double gamma, std::span<const double> taus, std::span<const double> betas);

/// ρ from the declared Lipschitz constants; ConfigError when none are declared.
double decay_exponent(const ProblemSpec& problem);

/// ‖ψ‖_{C[−r,0]} e^{(Σ b_k) t}. DomainError for t < 0, negative ψ₀ or b_k.
double bellman_envelope(double psi0_sup, std::span<const double> bs, double t);

/// Randomized check of H1 over ξ ∈ [−box, box]ⁿ, t ∈ [0, ω], x ∈ [0, 1].
SampledCheck sample_growth(const ProblemSpec& problem, const AffineBound& bound, double box, std::size_t samples,
                           std::uint64_t seed);

}  // namespace efk
