// problem.hpp
// Problem data shared by the integrator, the periodic solver and the
// stability analyzer:
//
//   u_t + γu_xxxx − u_xx − u = f(u(t−τ₁,x), …, u(t−τₙ,x)) + g(t,x)
//
// on (0,1) with u = u_xx = 0 at both ends.

#pragma once

#include <cstddef>
#include <vector>

#include "efk/forcing.hpp"
#include "efk/nonlinearity.hpp"

namespace efk {

class DelaySpec {
 public:
  /// ConfigError unless taus is non-empty with every τ_k > 0.
  explicit DelaySpec(std::vector<double> taus);

  std::size_t size() const noexcept { return taus_.size(); }
  const std::vector<double>& taus() const noexcept { return taus_; }
  double max_delay() const noexcept { return max_; }
  double min_delay() const noexcept { return min_; }

 private:
  std::vector<double> taus_;
  double max_;
  double min_;
};

struct Discretization {
  std::size_t modes = 64;  ///< N
  std::size_t nodes = 0;   ///< M; 0 selects 2N
  double step = 0.0;       ///< h; 0 selects default_step()
};

struct Tolerances {
  double picard_tol = 1e-10;
  std::size_t max_iters = 50;
  double residual_tol = 1e-6;
  double slope_slack = 0.05;
  double bound_slack = 0.05;
};

/// min(τ_min/20, ω/200, 1e−3).
double default_step(const DelaySpec& delays, double omega);

struct ProblemSpec {
  double gamma = 1.0;
  double omega = 1.0;
  DelaySpec delays;
  NonlinearitySpec nonlinearity;
  ForcingSpec forcing;
  Discretization discretization;
  Tolerances tolerances;

  /// ConfigError on any violated invariant (arity, forcing period, ...).
  void validate() const;

  std::size_t modes() const noexcept { return discretization.modes; }
  std::size_t nodes() const noexcept;
  double step() const;
};

}  // namespace efk
