#include "efk/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "efk/errors.hpp"

namespace efk {

DelaySpec::DelaySpec(std::vector<double> taus) : taus_(std::move(taus)), max_(0.0), min_(0.0) {
  if (taus_.empty()) throw ConfigError("delays: at least one delay is required");
  for (double t : taus_) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("delays: every tau must be positive and finite");
  }
  max_ = *std::max_element(taus_.begin(), taus_.end());
  min_ = *std::min_element(taus_.begin(), taus_.end());
}

double default_step(const DelaySpec& delays, double omega) {
  return std::min({delays.min_delay() / 20.0, omega / 200.0, 1e-3});
}

std::size_t ProblemSpec::nodes() const noexcept {
  return discretization.nodes == 0 ? 2 * discretization.modes : discretization.nodes;
}

double ProblemSpec::step() const {
  return discretization.step > 0.0 ? discretization.step : default_step(delays, omega);
}

void ProblemSpec::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("omega must be positive");
  if (nonlinearity.arity() != delays.size()) {
    throw ConfigError("nonlinearity arity " + std::to_string(nonlinearity.arity()) +
                      " does not match delay count " + std::to_string(delays.size()));
  }
  if (discretization.modes == 0) throw ConfigError("discretization.N must be positive");
  if (nodes() < discretization.modes) throw ConfigError("discretization.M must be >= N");
  if (discretization.step < 0.0 || !std::isfinite(discretization.step)) {
    throw ConfigError("discretization.h must be positive");
  }
  if (auto p = forcing.period(); p && std::abs(*p - omega) > 1e-12 * omega) {
    throw ConfigError("forcing period does not match omega");
  }
  if (forcing.table() && forcing.table()->samples.front().size() != nodes()) {
    throw ConfigError("forcing table width must equal the collocation node count M");
  }
  if (!(tolerances.picard_tol > 0.0)) throw ConfigError("tolerances.picard_tol must be positive");
  if (tolerances.max_iters == 0) throw ConfigError("tolerances.max_iters must be positive");
  if (!(tolerances.residual_tol > 0.0)) throw ConfigError("tolerances.residual_tol must be positive");
  if (!(tolerances.slope_slack >= 0.0) || !(tolerances.bound_slack >= 0.0)) {
    throw ConfigError("slack values must be nonnegative");
  }
}

}  // namespace efk
