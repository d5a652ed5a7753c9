#include "efk/periodic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>

#include <Eigen/Dense>

#include "efk/delay_integrator.hpp"
#include "efk/errors.hpp"
#include "efk/hypotheses.hpp"
#include "efk/sine_transform.hpp"

namespace efk {

PeriodicTrajectory::PeriodicTrajectory(double omega, std::vector<SpectralField> values,
                                       std::vector<SpectralField> derivatives)
    : omega_(omega), values_(std::move(values)), derivs_(std::move(derivatives)) {
  if (!(omega > 0.0)) throw ConfigError("PeriodicTrajectory: omega must be positive");
  if (values_.size() < 2) throw ConfigError("PeriodicTrajectory: need at least one interval");
  if (derivs_.size() != values_.size()) throw ShapeError("PeriodicTrajectory: one derivative per value");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    require_same_modes(values_.front(), values_[i], "PeriodicTrajectory");
    require_same_modes(values_.front(), derivs_[i], "PeriodicTrajectory");
  }
}

PeriodicTrajectory PeriodicTrajectory::zero(double omega, std::size_t intervals, std::size_t modes) {
  if (intervals == 0) throw ConfigError("PeriodicTrajectory: need at least one interval");
  std::vector<SpectralField> v(intervals + 1, SpectralField(modes));
  return PeriodicTrajectory(omega, v, v);
}

SpectralField PeriodicTrajectory::at(double t) const {
  if (!std::isfinite(t)) throw DomainError("PeriodicTrajectory::at: non-finite time");
  const std::size_t p = intervals();
  double s = t - omega_ * std::floor(t / omega_);
  double pos = s / step();
  auto i = static_cast<std::size_t>(std::max(0.0, std::floor(pos)));
  if (i >= p) {
    i = p - 1;
    pos = static_cast<double>(p);
  }
  const double u = pos - static_cast<double>(i);
  const double h = step();
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
  const double h10 = (u3 - 2.0 * u2 + u) * h;
  const double h01 = -2.0 * u3 + 3.0 * u2;
  const double h11 = (u3 - u2) * h;
  const auto& y0 = values_[i];
  const auto& y1 = values_[i + 1];
  const auto& d0 = derivs_[i];
  const auto& d1 = derivs_[i + 1];
  SpectralField out(y0.modes());
  for (std::size_t k = 0; k < out.modes(); ++k) out[k] = h00 * y0[k] + h10 * d0[k] + h01 * y1[k] + h11 * d1[k];
  return out;
}

double PeriodicTrajectory::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, v.norm());
  return m;
}

double PeriodicTrajectory::distance(const PeriodicTrajectory& other) const {
  if (other.values_.size() != values_.size()) throw ShapeError("PeriodicTrajectory::distance: grid mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) m = std::max(m, (values_[i] - other.values_[i]).norm());
  return m;
}

double PeriodicTrajectory::seam_gap() const { return (values_.front() - values_.back()).max_abs(); }

namespace {

double grid_step(double omega, std::span<const SpectralField> phi) {
  if (phi.size() < 2) throw ConfigError("periodic map: need at least two grid samples");
  return omega / static_cast<double>(phi.size() - 1);
}

}  // namespace

SpectralField periodic_initial_value(const OperatorSpectrum& spectrum, double omega,
                                     std::span<const SpectralField> phi) {
  const EtdStepper stepper(spectrum, grid_step(omega, phi));
  SpectralField v(spectrum.modes());
  SpectralField next(spectrum.modes());
  for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
    stepper.advance(v, phi[i], phi[i + 1], next);
    std::swap(v, next);
  }
  const auto lam = spectrum.lambdas();
  for (std::size_t k = 0; k < v.modes(); ++k) v[k] /= -std::expm1(-lam[k] * omega);
  return v;
}

PeriodicTrajectory periodic_response(const OperatorSpectrum& spectrum, double omega,
                                     std::span<const SpectralField> phi) {
  const std::size_t p = phi.size() - 1;
  const EtdStepper stepper(spectrum, grid_step(omega, phi));
  const auto lam = spectrum.lambdas();
  std::vector<SpectralField> values(p + 1);
  std::vector<SpectralField> derivs(p + 1);
  values[0] = periodic_initial_value(spectrum, omega, phi);
  for (std::size_t i = 0; i < p; ++i) values[i + 1] = stepper.advance(values[i], phi[i], phi[i + 1]);
  values[p] = values[0];
  for (std::size_t i = 0; i <= p; ++i) {
    derivs[i] = SpectralField(values[i].modes());
    for (std::size_t k = 0; k < lam.size(); ++k) derivs[i][k] = -lam[k] * values[i][k] + phi[i][k];
  }
  return PeriodicTrajectory(omega, std::move(values), std::move(derivs));
}

std::size_t periodic_intervals(const ProblemSpec& problem) {
  const double ratio = problem.omega / problem.step();
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(ratio)));
}

namespace {

std::vector<SpectralField> sample_phi(const ProblemSpec& problem, const RhsEvaluator& rhs,
                                      const PeriodicTrajectory& u, std::size_t workers) {
  const std::size_t p = u.intervals();
  std::vector<SpectralField> phi(p + 1);
  auto lookup = [&u](double s) { return u.at(s); };
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) phi[i] = rhs.evaluate(u.time(i), lookup);
  };
  workers = std::clamp<std::size_t>(workers, 1, p);
  if (workers == 1) {
    work(0, p);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (p + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk, hi = std::min(p, lo + chunk);
      pool.emplace_back([&, w, lo, hi] {
        try {
          work(lo, hi);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  phi[p] = phi[0];
  (void)problem;
  return phi;
}

void guard(const PeriodicTrajectory& u, double limit) {
  for (std::size_t i = 0; i <= u.intervals(); ++i) {
    const auto& v = u.value(i);
    const double m = v.max_abs();
    if (!v.all_finite() || !(m <= limit)) throw DivergenceError(u.time(i), v.all_finite() ? m : std::nan(""));
  }
}

}  // namespace

PeriodicTrajectory apply_periodic_map(const ProblemSpec& problem, const PeriodicTrajectory& u,
                                      const MapOptions& options) {
  problem.validate();
  if (std::abs(u.omega() - problem.omega) > 1e-12 * problem.omega) {
    throw ConfigError("apply_periodic_map: trajectory period differs from omega");
  }
  if (u.modes() != problem.modes()) throw ShapeError("apply_periodic_map: mode count differs from N");
  const OperatorSpectrum spectrum(problem.gamma, problem.modes());
  const RhsEvaluator rhs(problem);
  auto phi = sample_phi(problem, rhs, u, options.workers);
  return periodic_response(spectrum, problem.omega, phi);
}

ConvergenceFailure::ConvergenceFailure(ConvergenceReport report)
    : std::runtime_error("Picard iteration did not converge in " + std::to_string(report.iterations) +
                         " iterations"),
      report_(std::move(report)) {}

namespace {

// Flattened (values, derivatives) for Anderson mixing.
Eigen::VectorXd flatten(const PeriodicTrajectory& u) {
  const std::size_t n = u.modes(), m = u.intervals() + 1;
  Eigen::VectorXd x(2 * n * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      x[static_cast<Eigen::Index>(i * n + k)] = u.value(i)[k];
      x[static_cast<Eigen::Index>((m + i) * n + k)] = u.derivative(i)[k];
    }
  return x;
}

PeriodicTrajectory unflatten(const Eigen::VectorXd& x, double omega, std::size_t intervals, std::size_t modes) {
  const std::size_t m = intervals + 1;
  std::vector<SpectralField> v(m, SpectralField(modes)), d(m, SpectralField(modes));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < modes; ++k) {
      v[i][k] = x[static_cast<Eigen::Index>(i * modes + k)];
      d[i][k] = x[static_cast<Eigen::Index>((m + i) * modes + k)];
    }
  return PeriodicTrajectory(omega, std::move(v), std::move(d));
}

}  // namespace

PicardResult picard_iterate(const ProblemSpec& problem, const PicardOptions& options) {
  problem.validate();
  ConvergenceReport report;
  report.certificate = options.certificate;
  const double lam1 = first_eigenvalue(problem.gamma);
  if (const auto& b = problem.nonlinearity.lipschitz_betas()) {
    double sum = 0.0;
    for (double x : *b) sum += x;
    report.theoretical_factor = sum / lam1;
  }
  if (!problem.forcing.period() && !problem.forcing.is_zero()) {
    for (const auto& term : problem.forcing.terms()) {
      const double cycles = term.angular_frequency * problem.omega / (2.0 * std::numbers::pi);
      if (!problem.forcing.separable() || std::abs(cycles - std::round(cycles)) > 1e-9) {
        throw ConfigError("periodic solve needs omega-periodic forcing");
      }
    }
  }
  if (options.certificate) {
    if (!problem.nonlinearity.lipschitz_betas()) {
      throw CertificateRefused("certificate mode needs declared Lipschitz constants");
    }
    HypothesisOptions hopt;
    hopt.samples = options.lipschitz_samples;
    hopt.seed = options.seed;
    const auto hyp = check_hypotheses(problem, hopt);
    if (!hyp.h2.holds()) throw CertificateRefused("H2 fails: sum of betas is not below lambda1");
    if (!hyp.h3.holds()) throw CertificateRefused("H3 fails: Lipschitz bound violated at sampled points");
  }

  const std::size_t p = periodic_intervals(problem);
  PeriodicTrajectory u = options.initial_guess.value_or(PeriodicTrajectory::zero(problem.omega, p, problem.modes()));
  if (u.intervals() != p || u.modes() != problem.modes()) {
    throw ShapeError("picard_iterate: initial guess grid does not match the problem");
  }
  const MapOptions mopt{options.workers};
  const std::size_t depth = options.certificate ? 0 : options.anderson_depth;
  report.accelerated = depth > 0;
  const double tol = problem.tolerances.picard_tol;

  std::vector<Eigen::VectorXd> xs, gs;  // iterates and residuals F(x) − x
  for (std::size_t it = 1; it <= problem.tolerances.max_iters; ++it) {
    PeriodicTrajectory fu = apply_periodic_map(problem, u, mopt);
    guard(fu, options.divergence_guard);
    const double r = fu.distance(u);
    report.residuals.push_back(r);
    report.iterations = it;
    if (problem.nonlinearity.is_zero() || r < tol) {
      u = std::move(fu);
      report.converged = true;
      break;
    }
    if (depth == 0) {
      u = std::move(fu);
      continue;
    }
    // Anderson mixing over the last `depth` residuals.
    Eigen::VectorXd x = flatten(u), fx = flatten(fu);
    xs.push_back(x);
    gs.push_back(fx - x);
    if (xs.size() > depth + 1) {
      xs.erase(xs.begin());
      gs.erase(gs.begin());
    }
    const std::size_t m = gs.size() - 1;
    if (m == 0) {
      u = std::move(fu);
      continue;
    }
    Eigen::MatrixXd dg(gs.back().size(), static_cast<Eigen::Index>(m));
    Eigen::MatrixXd dx(gs.back().size(), static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
      dg.col(static_cast<Eigen::Index>(j)) = gs[j + 1] - gs[j];
      dx.col(static_cast<Eigen::Index>(j)) = xs[j + 1] - xs[j];
    }
    const Eigen::VectorXd gamma = dg.colPivHouseholderQr().solve(gs.back());
    const Eigen::VectorXd next = fx - (dx + dg) * gamma;
    u = unflatten(next, problem.omega, p, problem.modes());
  }

  if (report.residuals.size() >= 2) {
    const double first = report.residuals.front(), last = report.residuals.back();
    if (first > 0.0 && last > 0.0) {
      report.empirical_factor = std::pow(last / first, 1.0 / static_cast<double>(report.residuals.size() - 1));
    }
  }
  if (report.empirical_factor && report.theoretical_factor) {
    report.factor_consistent = *report.empirical_factor <= *report.theoretical_factor + 0.05;
  }
  report.seam_gap = u.seam_gap();
  if (!report.converged) throw ConvergenceFailure(report);
  if (options.verify_fixed_point) {
    report.fixed_point_residual = apply_periodic_map(problem, u, mopt).distance(u);
  }
  return PicardResult{std::move(u), std::move(report)};
}

ModeResponse forced_mode_response(double lambda, double amplitude, bool cosine, double angular_frequency,
                                  double phase, double t) {
  const double arg = angular_frequency * t + phase;
  const double c = std::cos(arg), s = std::sin(arg);
  const double d = lambda * lambda + angular_frequency * angular_frequency;
  const double value = cosine ? amplitude * (lambda * c + angular_frequency * s) / d
                              : amplitude * (lambda * s - angular_frequency * c) / d;
  const double drive = amplitude * (cosine ? c : s);
  return {value, -lambda * value + drive};
}

LinearPeriodicSolution linear_periodic_solution(const OperatorSpectrum& spectrum, double omega,
                                                const ForcingSpec& forcing, std::size_t intervals,
                                                std::size_t nodes) {
  if (intervals == 0) throw ConfigError("linear_periodic_solution: need at least one interval");
  const std::size_t n = spectrum.modes();
  const auto lam = spectrum.lambdas();
  if (!forcing.separable()) {
    const SineTransform tr(n, nodes == 0 ? 2 * n : nodes);
    std::vector<SpectralField> phi(intervals + 1);
    std::vector<double> g(tr.nodes());
    const double h = omega / static_cast<double>(intervals);
    for (std::size_t i = 0; i < intervals; ++i) {
      forcing.sample(static_cast<double>(i) * h, tr.node_positions(), g);
      phi[i] = tr.forward(g);
    }
    phi[intervals] = phi[0];
    return {periodic_response(spectrum, omega, phi), true};
  }
  for (const auto& term : forcing.terms()) {
    const double cycles = term.angular_frequency * omega / (2.0 * std::numbers::pi);
    if (std::abs(cycles - std::round(cycles)) > 1e-9) {
      throw ConfigError("linear_periodic_solution: forcing term is not omega-periodic");
    }
  }
  std::vector<SpectralField> values(intervals + 1, SpectralField(n)), derivs(intervals + 1, SpectralField(n));
  const double h = omega / static_cast<double>(intervals);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double t = i == intervals ? 0.0 : static_cast<double>(i) * h;
    for (const auto& term : forcing.terms()) {
      if (term.mode == 0 || term.mode > n) continue;
      const auto r = forced_mode_response(lam[term.mode - 1], term.amplitude / std::numbers::sqrt2,
                                          term.shape == Temporal::Cos, term.angular_frequency, term.phase, t);
      values[i][term.mode - 1] += r.value;
      derivs[i][term.mode - 1] += r.derivative;
    }
  }
  return {PeriodicTrajectory(omega, std::move(values), std::move(derivs)), false};
}

void write_periodic_csv(std::ostream& os, const PeriodicTrajectory& u, std::size_t leading_modes,
                        const OutputMeta& meta) {
  const std::size_t j = std::min(leading_modes, u.modes());
  write_csv_preamble(os, meta);
  os << "t,norm_l2";
  for (std::size_t k = 1; k <= j; ++k) os << ",a_" << k;
  os << '\n';
  for (std::size_t i = 0; i <= u.intervals(); ++i) {
    const auto& v = u.value(i);
    os << format_number(u.time(i)) << ',' << format_number(v.norm());
    for (std::size_t k = 0; k < j; ++k) os << ',' << format_number(v[k]);
    os << '\n';
  }
}

void write_convergence_json(std::ostream& os, const ConvergenceReport& r, const OutputMeta& meta) {
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("null"); };
  os << "{\n  \"config_hash\": \"" << meta.config_hash << "\",\n  \"seed\": " << meta.seed
     << ",\n  \"iterations\": " << r.iterations << ",\n  \"residuals\": [";
  for (std::size_t i = 0; i < r.residuals.size(); ++i) os << (i ? ", " : "") << format_number(r.residuals[i]);
  os << "],\n  \"theoretical_factor\": " << opt(r.theoretical_factor)
     << ",\n  \"empirical_factor\": " << opt(r.empirical_factor) << ",\n  \"converged\": "
     << (r.converged ? "true" : "false") << ",\n  \"fixed_point_residual\": " << opt(r.fixed_point_residual)
     << ",\n  \"seam_gap\": " << format_number(r.seam_gap) << ",\n  \"certificate\": "
     << (r.certificate ? "true" : "false") << ",\n  \"accelerated\": " << (r.accelerated ? "true" : "false")
     << ",\n  \"factor_consistent\": " << (r.factor_consistent ? "true" : "false") << "\n}\n";
}

}  // namespace efk
