#include "efk/delay_integrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "efk/errors.hpp"
#include "efk/quadrature.hpp"

namespace efk {

RhsEvaluator::RhsEvaluator(const ProblemSpec& problem)
    : delays_(problem.delays),
      nl_(problem.nonlinearity),
      forcing_(problem.forcing),
      transform_(problem.modes(), problem.nodes()) {
  problem.validate();
}

void RhsEvaluator::add_forcing(double t, SpectralField& out) const {
  if (forcing_.separable()) {
    // sin(jπx) = (1/√2)·e_j exactly; modes above N are truncated.
    const auto terms = forcing_.terms();
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::size_t j = terms[i].mode;
      if (j == 0 || j > out.modes()) continue;
      out[j - 1] += forcing_.temporal(i, t) * (1.0 / std::numbers::sqrt2);
    }
    return;
  }
  std::vector<double> g(transform_.nodes());
  forcing_.sample(t, transform_.node_positions(), g);
  out += transform_.forward(g);
}

SpectralField RhsEvaluator::forcing(double t) const {
  SpectralField out(modes());
  add_forcing(t, out);
  return out;
}

SpectralField RhsEvaluator::evaluate(double t, std::span<const SpectralField> delayed) const {
  if (delayed.size() != delays_.size()) throw ShapeError("RhsEvaluator: wrong number of delayed states");
  SpectralField out(modes());
  if (!nl_.is_zero()) {
    const std::size_t n = delayed.size();
    const std::size_t m = transform_.nodes();
    std::vector<double> samples(n * m);
    for (std::size_t k = 0; k < n; ++k) {
      transform_.inverse(delayed[k], std::span<double>(samples).subspan(k * m, m));
    }
    std::vector<double> fvals(m);
    std::vector<double> xi(n);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < n; ++k) xi[k] = samples[k * m + j];
      fvals[j] = nl_(xi);
    }
    out = transform_.forward(fvals);
  }
  add_forcing(t, out);
  return out;
}

SpectralField RhsEvaluator::evaluate(double t, const Lookup& lookup) const {
  std::vector<SpectralField> delayed;
  delayed.reserve(delays_.size());
  if (nl_.is_zero()) {
    // Still validate the window so misconfigured steps surface.
    for (double tau : delays_.taus()) (void)lookup(t - tau);
    for (std::size_t k = 0; k < delays_.size(); ++k) delayed.emplace_back(modes());
  } else {
    for (double tau : delays_.taus()) delayed.push_back(lookup(t - tau));
  }
  return evaluate(t, delayed);
}

SpectralField evaluate_delayed_rhs(double t, const HistoryBuffer& history, const RhsEvaluator& rhs) {
  return rhs.evaluate(t, [&](double s) { return history.lookup(s); });
}

SpectralField evaluate_delayed_rhs(double t, const HistoryBuffer& history, const ProblemSpec& problem) {
  return evaluate_delayed_rhs(t, history, RhsEvaluator(problem));
}

EtdWeights etd_weights(double z) {
  if (z < 0.0 || !std::isfinite(z)) throw DomainError("etd_weights: z must be finite and nonnegative");
  if (z < 0.1) {
    // e1 = Σ (−z)^k/(k+1)!,  e2 = Σ (−z)^k/(k+2)!
    double e1 = 0.0, e2 = 0.0;
    double term = 1.0;  // (−z)^k / k!
    for (int k = 0; k < 16; ++k) {
      e1 += term / (k + 1);
      e2 += term / ((k + 1) * (k + 2));
      term *= -z / (k + 1);
    }
    return {e1, e2};
  }
  const double em = std::expm1(-z);
  return {-em / z, (z + em) / (z * z)};
}

EtdStepper::EtdStepper(const OperatorSpectrum& spectrum, double h) : h_(h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("EtdStepper: step must be positive");
  const auto lam = spectrum.lambdas();
  decay_.resize(lam.size());
  w_now_.resize(lam.size());
  w_next_.resize(lam.size());
  for (std::size_t k = 0; k < lam.size(); ++k) {
    const double z = lam[k] * h;
    const auto w = etd_weights(z);
    decay_[k] = std::exp(-z);
    w_now_[k] = h * (w.e1 - w.e2);
    w_next_[k] = h * w.e2;
  }
}

void EtdStepper::advance(const SpectralField& a, const SpectralField& phi_now, const SpectralField& phi_next,
                         SpectralField& out) const {
  const std::size_t n = decay_.size();
  if (a.modes() != n || phi_now.modes() != n || phi_next.modes() != n) {
    throw ShapeError("EtdStepper::advance: mode count mismatch");
  }
  if (out.modes() != n) out = SpectralField(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = decay_[k] * a[k] + w_now_[k] * phi_now[k] + w_next_[k] * phi_next[k];
  }
}

SpectralField EtdStepper::advance(const SpectralField& a, const SpectralField& phi_now,
                                  const SpectralField& phi_next) const {
  SpectralField out(decay_.size());
  advance(a, phi_now, phi_next, out);
  return out;
}

SpectralField step_etd(const OperatorSpectrum& spectrum, double h, const HistoryBuffer& history,
                       const RhsEvaluator& rhs) {
  const double t = history.now();
  const SpectralField a = history.lookup(t);
  const SpectralField phi0 = evaluate_delayed_rhs(t, history, rhs);
  const SpectralField phi1 = evaluate_delayed_rhs(t + h, history, rhs);
  return EtdStepper(spectrum, h).advance(a, phi0, phi1);
}

namespace {

SpectralField knot_derivative(std::span<const double> lambdas, const SpectralField& a, const SpectralField& phi) {
  SpectralField d(a.modes());
  for (std::size_t k = 0; k < a.modes(); ++k) d[k] = -lambdas[k] * a[k] + phi[k];
  return d;
}

void guard(double t, const SpectralField& a, double limit) {
  const double m = a.max_abs();
  if (!a.all_finite() || !(m <= limit)) throw DivergenceError(t, a.all_finite() ? m : std::nan(""));
}

}  // namespace

IvpResult solve_ivp(const ProblemSpec& problem, const InitialHistory& kappa, double horizon,
                    const IvpOptions& options) {
  problem.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("solve_ivp: horizon must be positive");
  if (kappa.modes() != problem.modes()) throw ShapeError("solve_ivp: history mode count differs from N");
  if (options.certificate && !problem.nonlinearity.lipschitz_betas()) {
    throw CertificateRefused("certificate mode needs declared Lipschitz constants");
  }
  const double h_max = options.step.value_or(problem.step());
  if (!(h_max > 0.0)) throw ConfigError("solve_ivp: step must be positive");
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / h_max * (1.0 - 1e-12)));
  const double h = horizon / static_cast<double>(steps);

  const OperatorSpectrum spectrum(problem.gamma, problem.modes());
  const RhsEvaluator rhs(problem);
  const EtdStepper stepper(spectrum, h);
  HistoryBuffer history(kappa, problem.delays.max_delay());
  auto lookup = [&](double s) { return history.lookup(s); };

  SpectralField a = kappa(0.0);
  guard(0.0, a, options.divergence_guard);
  SpectralField phi = rhs.evaluate(0.0, lookup);
  history.push(0.0, a, knot_derivative(spectrum.lambdas(), a, phi));
  std::size_t evals = 1;

  SpectralField next(problem.modes());
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t = static_cast<double>(i) * h;
    SpectralField phi_next = rhs.evaluate(t, lookup);
    ++evals;
    stepper.advance(a, phi, phi_next, next);
    guard(t, next, options.divergence_guard);
    history.push(t, next, knot_derivative(spectrum.lambdas(), next, phi_next));
    std::swap(a, next);
    phi = std::move(phi_next);
  }
  return IvpResult{std::move(history).release(), h, steps, evals};
}

MildResidualChecker::MildResidualChecker(const ProblemSpec& problem, const Trajectory& trajectory,
                                         double panel_width)
    : traj_(trajectory), rhs_(problem), spectrum_(problem.gamma, problem.modes()), width_(panel_width) {
  if (!(panel_width > 0.0)) throw ConfigError("MildResidualChecker: panel width must be positive");
  const auto rule = gauss_legendre(8);
  gx_ = rule.nodes;
  gw_ = rule.weights;
}

const SpectralField& MildResidualChecker::cached_phi(std::size_t panel, std::size_t node) {
  if (cache_.size() <= panel) cache_.resize(panel + 1);
  auto& row = cache_[panel];
  if (row.empty()) {
    const double a = static_cast<double>(panel) * width_;
    row.reserve(gx_.size());
    for (double x : gx_) {
      const double s = a + 0.5 * width_ * (x + 1.0);
      row.push_back(rhs_.evaluate(s, [&](double q) { return traj_.at(q); }));
    }
  }
  return row[node];
}

void MildResidualChecker::accumulate_segment(double a, double t, SpectralField& acc) {
  const double len = t - a;
  if (len <= 0.0) return;
  const auto lam = spectrum_.lambdas();
  auto lookup = [&](double q) { return traj_.at(q); };
  auto panel = [&](double lo, double hi) {
    const double w = hi - lo;
    for (std::size_t q = 0; q < gx_.size(); ++q) {
      const double s = lo + 0.5 * w * (gx_[q] + 1.0);
      const auto phi = rhs_.evaluate(s, lookup);
      const double wq = 0.5 * w * gw_[q];
      for (std::size_t k = 0; k < acc.modes(); ++k) acc[k] += wq * std::exp(-lam[k] * (t - s)) * phi[k];
    }
  };
  // Panels [t − ℓ2^{−l}, t − ℓ2^{−l−1}], then a last one of width ℓ2^{−L}
  // with λ_max·ℓ2^{−L} ≤ 1 so every kernel is smooth on it.
  const int levels = std::max(0, static_cast<int>(std::ceil(std::log2(len * lam.back()))));
  double lo = a;
  for (int l = 0; l < levels; ++l) {
    const double hi = t - len * std::ldexp(1.0, -(l + 1));
    panel(lo, hi);
    lo = hi;
  }
  panel(lo, t);
}

SpectralField MildResidualChecker::duhamel(double t) {
  const std::size_t n = spectrum_.modes();
  const auto lam = spectrum_.lambdas();
  SpectralField acc(n);

  auto full = static_cast<std::size_t>(std::floor(t / width_ + 1e-9));
  double rem = t - static_cast<double>(full) * width_;
  if (full > 0 && rem < 1e-9 * width_) {
    --full;
    rem = t - static_cast<double>(full) * width_;
  }
  for (std::size_t p = 0; p < full; ++p) {
    const double a = static_cast<double>(p) * width_;
    for (std::size_t q = 0; q < gx_.size(); ++q) {
      const double s = a + 0.5 * width_ * (gx_[q] + 1.0);
      const double w = 0.5 * width_ * gw_[q];
      const auto& phi = cached_phi(p, q);
      for (std::size_t k = 0; k < n; ++k) acc[k] += w * std::exp(-lam[k] * (t - s)) * phi[k];
    }
  }
  accumulate_segment(t - rem, t, acc);
  return acc;
}

std::vector<double> MildResidualChecker::knot_residuals() {
  const auto& sol = traj_.solution();
  const auto lam = spectrum_.lambdas();
  const SpectralField u0 = traj_.at(0.0);
  std::vector<double> out(sol.size(), 0.0);
  SpectralField acc(spectrum_.modes());
  for (std::size_t i = 1; i < sol.size(); ++i) {
    const double t0 = sol.time(i - 1), t1 = sol.time(i);
    for (std::size_t k = 0; k < acc.modes(); ++k) acc[k] *= std::exp(-lam[k] * (t1 - t0));
    accumulate_segment(t0, t1, acc);
    SpectralField r = sol.value(i);
    r -= apply_semigroup(spectrum_, t1, u0);
    r -= acc;
    out[i] = r.norm();
  }
  return out;
}

double MildResidualChecker::residual(double t) {
  if (t < 0.0 || t > traj_.horizon() * (1.0 + 1e-12)) throw DomainError("residual: time outside trajectory");
  SpectralField r = traj_.at(t);
  r -= apply_semigroup(spectrum_, t, traj_.at(0.0));
  r -= duhamel(t);
  return r.norm();
}

MildResidualReport mild_residual(const ProblemSpec& problem, const IvpResult& result,
                                 std::span<const double> times) {
  MildResidualChecker checker(problem, result.trajectory, result.step);
  MildResidualReport report;
  for (double t : times) {
    const double r = checker.residual(t);
    report.samples.push_back({t, r});
    report.max_residual = std::max(report.max_residual, r);
  }
  return report;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, std::size_t leading_modes,
                          const OutputMeta& meta, std::span<const double> mild_residual) {
  const std::size_t j = std::min(leading_modes, trajectory.modes());
  const auto& sol = trajectory.solution();
  const bool extra = !mild_residual.empty();
  if (extra && mild_residual.size() != sol.size()) throw ShapeError("write_trajectory_csv: one residual per knot");
  write_csv_preamble(os, meta);
  os << "t,norm_l2";
  for (std::size_t k = 1; k <= j; ++k) os << ",a_" << k;
  if (extra) os << ",mild_residual";
  os << '\n';
  for (std::size_t i = 0; i < sol.size(); ++i) {
    const auto& v = sol.value(i);
    os << format_number(sol.time(i)) << ',' << format_number(v.norm());
    for (std::size_t k = 0; k < j; ++k) os << ',' << format_number(v[k]);
    if (extra) os << ',' << format_number(mild_residual[i]);
    os << '\n';
  }
}

void write_trajectory_ndjson(std::ostream& os, const Trajectory& trajectory, const OutputMeta& meta) {
  os << "{\"config_hash\":\"" << meta.config_hash << "\",\"seed\":" << meta.seed
     << ",\"modes\":" << trajectory.modes() << "}\n";
  const auto& sol = trajectory.solution();
  for (std::size_t i = 0; i < sol.size(); ++i) {
    os << "{\"t\":" << format_number(sol.time(i)) << ",\"coeffs\":[";
    const auto& v = sol.value(i);
    for (std::size_t k = 0; k < v.modes(); ++k) os << (k ? "," : "") << format_number(v[k]);
    os << "]}\n";
  }
}

}  // namespace efk
