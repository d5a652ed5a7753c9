// config.hpp
// JSON run configuration.
//
//   {
//     "gamma": 1.0, "omega": 1.0, "delays": [0.01],
//     "betas": [10], "K": 1.0,
//     "nonlinearity": "tanh_scaled(10, 1)",
//     "forcing": [{"c": 1.0, "fn": "cos", "m": 1, "phase": 0.0, "j": 1}],
//     "discretization": {"N": 64, "M": 128, "h": 5e-4},
//     "tolerances": {"picard_tol": 1e-10, "max_iters": 50, "residual_tol": 1e-6,
//                    "slope_slack": 0.05, "bound_slack": 0.05},
//     "experiment": {"horizon": 0.15,
//                    "history": {"type": "periodic_plus", "coeffs": [0.1]},
//                    "fit_window": [0.075, 0.15]},
//     "seed": 0
//   }
//
// Forcing terms read c·fn(2π m t/ω + phase)·sin(jπx). A sampled table is
// given as {"table": {"dt": …, "samples": [[…], …]}} and wraps with period
// rows·dt, which must equal ω. Unknown keys are rejected.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "efk/problem.hpp"

namespace efk {

struct HistoryConfig {
  enum class Kind { Zero, Constant, PeriodicPlus, Table };
  Kind kind = Kind::Zero;
  std::vector<double> coeffs;               ///< Constant / PeriodicPlus (leading modes)
  std::vector<double> times;                ///< Table
  std::vector<std::vector<double>> values;  ///< Table rows (leading modes)
};

struct ExperimentConfig {
  double horizon = 1.0;
  HistoryConfig history;
  std::optional<std::pair<double, double>> fit_window;
};

struct RunConfig {
  ProblemSpec problem;
  ExperimentConfig experiment{};
  std::uint64_t seed = 0;
  bool certificate = false;
  std::size_t leading_modes = 8;
  std::size_t anderson_depth = 0;
  double hypothesis_box = 10.0;
  std::size_t hypothesis_samples = 100000;
  int verbosity = 1;
  std::string hash{};  ///< FNV-1a of the canonical JSON form
};

/// ConfigError with a field path or a line/column on malformed input.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// 16 hex digits of 64-bit FNV-1a over `bytes`.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace efk
