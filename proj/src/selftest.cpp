#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "efk/cli.hpp"
#include "efk/delay_integrator.hpp"
#include "efk/errors.hpp"
#include "efk/greens.hpp"
#include "efk/hypotheses.hpp"
#include "efk/io.hpp"
#include "efk/periodic_solver.hpp"
#include "efk/spectrum.hpp"
#include "efk/stability.hpp"

namespace efk {

namespace {

constexpr double kPi = std::numbers::pi;

ProblemSpec small_problem(NonlinearitySpec nl, ForcingSpec g, std::size_t modes, double step) {
  return ProblemSpec{.gamma = 1.0,
                     .omega = 1.0,
                     .delays = DelaySpec({0.01}),
                     .nonlinearity = std::move(nl),
                     .forcing = std::move(g),
                     .discretization = {modes, 0, step},
                     .tolerances = {}};
}

ForcingSpec cos_mode1() { return ForcingSpec::periodic(1.0, {PeriodicTerm{1.0, Temporal::Cos, 1, 0.0, 1}}); }

NonlinearitySpec tanh10() {
  auto nl = NonlinearitySpec::parse("tanh_scaled(10, 1)", 1);
  nl.set_lipschitz_betas({10.0});
  return nl;
}

std::string num(double v) { return format_number(v); }

// Sine coefficient of x(1 - x) on √2 sin(kπx).
double parabola_coeff(std::size_t k) {
  if (k % 2 == 0) return 0.0;
  const double kp = kPi * static_cast<double>(k);
  return 4.0 * std::numbers::sqrt2 / (kp * kp * kp);
}

SelftestResult greens_check(bool typo) {
  const std::size_t n = 16;
  const OperatorSpectrum s(1.0, n);
  auto pair = GreensKernelPair::for_gamma(1.0);
  if (typo) pair = GreensKernelPair(pair.mu1(), -pair.mu1());
  SpectralField phi(n);
  for (std::size_t k = 1; k <= n; ++k) phi[k - 1] = parabola_coeff(k);
  const auto expected = apply_fractional_power(s, -1.0, phi);
  const auto got = greens_solve(pair, 1.0, [](double x) { return x * (1.0 - x); }, n);
  const double rel = (got - expected).norm() / expected.norm();
  return {"greens_inverse", rel <= 1e-8, "relative error " + num(rel) + " (tol 1e-8)"};
}

SelftestResult semigroup_check(std::uint64_t seed) {
  const std::size_t n = 16;
  const OperatorSpectrum s(1.0, n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> td(0.0, 0.1);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    SpectralField u(n);
    for (std::size_t k = 0; k < n; ++k) u[k] = nd(rng);
    const double t = td(rng);
    const double ratio = apply_semigroup(s, t, u).norm() / (std::exp(-s.lambda1() * t) * u.norm());
    worst = std::max(worst, ratio);
  }
  return {"semigroup_bound", worst <= 1.0 + 1e-12, "max ratio " + num(worst) + " (tol 1 + 1e-12)"};
}

SelftestResult etd_constant_check() {
  const std::size_t n = 8;
  const OperatorSpectrum s(1.0, n);
  EtdStepper stepper(s, 1e-3);
  SpectralField phi(n);
  for (std::size_t k = 0; k < n; ++k) phi[k] = 1.0 / static_cast<double>(k + 1);
  SpectralField fixed(n);
  for (std::size_t k = 0; k < n; ++k) fixed[k] = phi[k] / s.lambdas()[k];
  SpectralField a = fixed;
  for (int i = 0; i < 100; ++i) a = stepper.advance(a, phi, phi);
  const double rel = (a - fixed).norm() / fixed.norm();
  return {"etd_constant_forcing", rel <= 1e-13, "drift " + num(rel) + " (tol 1e-13)"};
}

SelftestResult ivp_residual_check(bool overrun) {
  auto p = small_problem(tanh10(), cos_mode1(), 8, overrun ? 0.02 : 1e-3);
  try {
    const auto kappa = InitialHistory::constant(0.01 * SpectralField::unit(8, 1));
    const auto res = solve_ivp(p, kappa, 0.05);
    MildResidualChecker checker(p, res.trajectory, res.step);
    const auto r = checker.knot_residuals();
    const double worst = r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
    return {"ivp_mild_residual", worst < 1e-6, "max knot residual " + num(worst) + " (tol 1e-6)"};
  } catch (const HistoryUnderrun& e) {
    return {"ivp_mild_residual", false,
            "history underrun at " + num(e.query()) + " outside [" + num(e.window_lo()) + ", " +
                num(e.window_hi()) + "]"};
  }
}

SelftestResult linear_periodic_check() {
  auto p = small_problem(NonlinearitySpec::zero(1), cos_mode1(), 8, 1e-3);
  const auto res = picard_iterate(p);
  const OperatorSpectrum s(1.0, 8);
  const auto oracle = linear_periodic_solution(s, 1.0, p.forcing, periodic_intervals(p));
  const double rel = res.trajectory.distance(oracle.trajectory) / oracle.trajectory.sup_norm();
  const bool ok = rel < 1e-5 && res.report.iterations == 1;
  return {"linear_periodic_oracle", ok,
          "relative distance " + num(rel) + " (tol 1e-5), iterations " + std::to_string(res.report.iterations)};
}

SelftestResult contraction_check() {
  auto p = small_problem(tanh10(), cos_mode1(), 8, 1e-3);
  const auto res = picard_iterate(p);
  const auto& r = res.report;
  const bool ok = r.converged && r.empirical_factor && r.theoretical_factor && r.factor_consistent;
  std::string detail = "iterations " + std::to_string(r.iterations);
  if (r.empirical_factor) detail += ", empirical " + num(*r.empirical_factor);
  if (r.theoretical_factor) detail += ", theoretical " + num(*r.theoretical_factor);
  return {"picard_contraction", ok, detail + " (empirical <= theoretical + 0.05)"};
}

SelftestResult rho_check() {
  const double rho = decay_exponent(1.0, std::vector<double>{0.01}, std::vector<double>{10.0});
  const double expected = 77.3344315024664855;
  const double rel = std::abs(rho - expected) / expected;
  return {"decay_exponent", rel < 1e-12, "rho " + num(rho) + " vs " + num(expected)};
}

SelftestResult bellman_check() {
  const double v = bellman_envelope(1.0, std::vector<double>{2.0, 3.0}, 0.5);
  const double expected = 12.1824939607034734;
  const double rel = std::abs(v - expected) / expected;
  return {"bellman_envelope", rel < 1e-14, "value " + num(v) + " vs " + num(expected)};
}

SelftestResult attraction_check() {
  auto p = small_problem(tanh10(), cos_mode1(), 8, 5e-4);
  const auto ubar = picard_iterate(p).trajectory;
  AttractionOptions o;
  o.horizon = 0.1;
  o.periodic = ubar;
  o.certificate = true;
  o.lipschitz_samples = 10000;
  o.throw_on_violation = false;
  const auto fit = attraction_experiment(p, periodic_plus(ubar, 0.1 * SpectralField::unit(8, 1)), o);
  return {"attraction", fit.passed(),
          "slope " + num(fit.slope) + ", rho " + num(fit.rho.value_or(0.0)) +
              (fit.bound_holds ? ", bound holds" : ", bound violated")};
}

}  // namespace

std::vector<SelftestResult> run_selftest(const std::optional<std::string>& fault, std::uint64_t seed) {
  const bool typo = fault && *fault == "g2-typo";
  const bool overrun = fault && *fault == "step-overrun";
  std::vector<SelftestResult> out;
  auto guarded = [&](const char* name, auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("exception: ") + e.what()});
    }
  };
  guarded("greens_inverse", [&] { return greens_check(typo); });
  guarded("semigroup_bound", [&] { return semigroup_check(seed); });
  guarded("etd_constant_forcing", [&] { return etd_constant_check(); });
  guarded("ivp_mild_residual", [&] { return ivp_residual_check(overrun); });
  guarded("linear_periodic_oracle", [&] { return linear_periodic_check(); });
  guarded("picard_contraction", [&] { return contraction_check(); });
  guarded("decay_exponent", [&] { return rho_check(); });
  guarded("bellman_envelope", [&] { return bellman_check(); });
  guarded("attraction", [&] { return attraction_check(); });
  return out;
}

}  // namespace efk
