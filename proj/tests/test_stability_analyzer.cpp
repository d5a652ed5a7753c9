#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "efk/errors.hpp"
#include "efk/spectrum.hpp"
#include "efk/stability.hpp"

using namespace efk;

namespace {

constexpr double kLambda1 = 106.278695435091796;

ProblemSpec make_problem(std::vector<double> taus, NonlinearitySpec nl, std::size_t modes = 16, double step = 0.0) {
  return ProblemSpec{.gamma = 1.0,
                     .omega = 1.0,
                     .delays = DelaySpec(std::move(taus)),
                     .nonlinearity = std::move(nl),
                     .forcing = ForcingSpec::periodic(1.0, {PeriodicTerm{1.0, Temporal::Cos, 1, 0.0, 1}}),
                     .discretization = {modes, 0, step},
                     .tolerances = {}};
}

NonlinearitySpec with_betas(const char* expr, std::vector<double> betas) {
  auto nl = NonlinearitySpec::parse(expr, betas.size());
  nl.set_lipschitz_betas(std::move(betas));
  return nl;
}

HypothesisOptions quick() {
  HypothesisOptions o;
  o.samples = 20000;
  o.seed = 5;
  return o;
}

}  // namespace

TEST_CASE("hypothesis margins for the short delay") {
  auto rep = check_hypotheses(make_problem({0.01}, with_betas("tanh_scaled(10, 1)", {10})), quick());
  CHECK(rep.lambda1 == doctest::Approx(kLambda1).epsilon(1e-15));
  CHECK(rep.h2.holds());
  CHECK(*rep.h2.margin == doctest::Approx(96.2786954350917959).epsilon(1e-12));
  CHECK(rep.h2prime.holds());
  CHECK(*rep.h2prime.lhs == doctest::Approx(28.9442639326253103).epsilon(1e-12));
  CHECK(*rep.rho == doctest::Approx(77.3344315024664855).epsilon(1e-12));
  CHECK(rep.h3.holds());
  CHECK(rep.h3.sampling->samples == 20000);
  CHECK(rep.h1.status == Status::Unknown);
}

TEST_CASE("hypothesis margins for the long delay") {
  auto rep = check_hypotheses(make_problem({0.05}, with_betas("tanh_scaled(10, 1)", {10})), quick());
  CHECK(rep.h2.holds());
  CHECK(rep.h2prime.status == Status::Fails);
  CHECK(*rep.h2prime.lhs == doctest::Approx(2031.47998844387885).epsilon(1e-12));
  CHECK(*rep.rho == doctest::Approx(-1925.20129300878706).epsilon(1e-12));
  CHECK_FALSE(rep.all_known_hold());
}

TEST_CASE("zero betas satisfy everything with rho equal to lambda1") {
  auto nl = with_betas("zero", {0.0});
  nl.set_affine_bound({{0.0}, 1.0});
  auto rep = check_hypotheses(make_problem({0.02}, nl), quick());
  CHECK(rep.complete());
  CHECK(rep.all_known_hold());
  CHECK(*rep.rho == doctest::Approx(kLambda1).epsilon(1e-14));
  CHECK(decay_exponent(1.0, std::vector<double>{0.3}, std::vector<double>{0.0}) == first_eigenvalue(1.0));
}

TEST_CASE("missing data is reported as unknown, wrong data as failing") {
  auto rep = check_hypotheses(make_problem({0.01}, NonlinearitySpec::parse("tanh_scaled(10, 1)", 1)), quick());
  CHECK(rep.h2.status == Status::Unknown);
  CHECK(rep.h3.status == Status::Unknown);
  CHECK(rep.h2prime.status == Status::Unknown);
  CHECK_FALSE(rep.rho.has_value());
  CHECK(rep.all_known_hold());
  CHECK_FALSE(rep.complete());
  CHECK_FALSE(rep.warnings.empty());
  CHECK_THROWS_AS(decay_exponent(make_problem({0.01}, NonlinearitySpec::zero(1))), ConfigError);

  auto under = check_hypotheses(make_problem({0.01}, with_betas("tanh_scaled(10, 1)", {5})), quick());
  CHECK(under.h3.status == Status::Fails);
  CHECK(under.h3.sampling->violations > 0);

  auto nl = with_betas("tanh_scaled(10, 1)", {10});
  nl.set_affine_bound({{10.0}, 0.5});  // |g| reaches 1
  CHECK(check_hypotheses(make_problem({0.01}, nl), quick()).h1.status == Status::Fails);
  nl.set_affine_bound({{10.0}, 1.0});
  CHECK(check_hypotheses(make_problem({0.01}, nl), quick()).h1.holds());
}

TEST_CASE("H2 prime implies H2 and rho sign tracks H2 prime") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> g(0.05, 3.0), b(0.0, 60.0), t(1e-4, 0.05);
  std::uniform_int_distribution<int> n(1, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = n(rng);
    std::vector<double> taus, betas;
    for (int i = 0; i < k; ++i) {
      taus.push_back(t(rng));
      betas.push_back(b(rng));
    }
    auto nl = NonlinearitySpec::zero(static_cast<std::size_t>(k));
    nl.set_lipschitz_betas(betas);
    auto p = make_problem(taus, nl);
    p.gamma = g(rng);
    HypothesisOptions o;
    o.samples = 10;
    auto rep = check_hypotheses(p, o);
    if (rep.h2prime.holds()) CHECK(rep.h2.holds());
    CHECK((*rep.rho > 0.0) == rep.h2prime.holds());
  }
}

TEST_CASE("rho decreases strictly in every beta and every delay") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> b(0.1, 20.0), t(1e-3, 0.03);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> taus{t(rng), t(rng)}, betas{b(rng), b(rng)};
    const double base = decay_exponent(1.0, taus, betas);
    for (std::size_t k = 0; k < 2; ++k) {
      auto tb = betas;
      tb[k] += 1e-3;
      CHECK(decay_exponent(1.0, taus, tb) < base);
      auto tt = taus;
      tt[k] += 1e-4;
      CHECK(decay_exponent(1.0, tt, betas) < base);
    }
  }
}

TEST_CASE("bellman envelope values") {
  CHECK(bellman_envelope(0.7, std::vector<double>{1.0, 2.0}, 0.0) == 0.7);
  CHECK(bellman_envelope(1.0, std::vector<double>{2.0, 3.0}, 0.5) ==
        doctest::Approx(12.1824939607034734).epsilon(1e-15));
  CHECK_THROWS_AS(bellman_envelope(1.0, std::vector<double>{1.0}, -0.1), DomainError);
}

TEST_CASE("bellman envelope dominates the delayed integral recurrence") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> bd(1e-6, 5.0), td(1e-3, 1.0), pd(0.0, 3.0);
  std::uniform_int_distribution<int> nd(1, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = nd(rng);
    std::vector<double> b(n), tau(n);
    for (int k = 0; k < n; ++k) {
      b[k] = bd(rng);
      tau[k] = td(rng);
    }
    const double psi0 = pd(rng);
    const double r = *std::max_element(tau.begin(), tau.end());
    const double dt = r / 2000.0;
    const std::size_t steps = 10000;
    std::vector<double> psi(steps + 1, psi0);
    auto at = [&](double s) {
      if (s <= 0.0) return psi0;
      const double pos = s / dt;
      const auto i = static_cast<std::size_t>(pos);
      const double f = pos - static_cast<double>(i);
      return i + 1 <= steps ? (1.0 - f) * psi[i] + f * psi[i + 1] : psi[steps];
    };
    // Trapezoid in s of Σ b_k ψ(s − τ_k).
    double integral = 0.0;
    auto integrand = [&](double s) {
      double v = 0.0;
      for (int k = 0; k < n; ++k) v += b[k] * at(s - tau[k]);
      return v;
    };
    bool ok = true;
    for (std::size_t i = 0; i < steps; ++i) {
      const double s = static_cast<double>(i) * dt;
      integral += 0.5 * dt * (integrand(s) + integrand(s + dt));
      psi[i + 1] = psi0 + integral;
      if (psi[i + 1] > bellman_envelope(psi0, b, s + dt) * (1.0 + 1e-12)) ok = false;
    }
    CHECK(ok);
  }
}

TEST_CASE("starting on the periodic orbit stays at the floor") {
  auto p = make_problem({0.01}, with_betas("tanh_scaled(10, 1)", {10}), 16, 2e-4);
  auto ubar = picard_iterate(p).trajectory;
  AttractionOptions o;
  o.periodic = ubar;
  auto fit = attraction_experiment(p, periodic_plus(ubar, SpectralField(16)), o);
  CHECK(fit.status == FitStatus::AtFloor);
  CHECK(fit.passed());
  for (const auto& s : fit.samples) CHECK(s.distance < 1e-9);
}

TEST_CASE("perturbation of the periodic orbit decays at least at rate rho") {
  auto p = make_problem({0.01}, with_betas("tanh_scaled(10, 1)", {10}), 16, 2e-4);
  AttractionOptions o;
  o.horizon = 0.15;
  o.certificate = true;
  o.lipschitz_samples = 10000;
  auto ubar = picard_iterate(p).trajectory;
  auto fit = attraction_experiment(p, periodic_plus(ubar, 0.1 * SpectralField::unit(16, 1)), o);
  CHECK(fit.status == FitStatus::Fitted);
  CHECK(*fit.rho == doctest::Approx(77.3344315024664855).epsilon(1e-12));
  CHECK(fit.slope <= -77.3344315024664855 * 0.95);
  CHECK(fit.bound_holds);
  CHECK(fit.prefactor == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(fit.r_squared > 0.99);
  CHECK(fit.passed());
  CHECK(fit.window_lo == 0.075);
  for (const auto& [t, y] : fit.fit_samples) CHECK(t >= 0.075 - 1e-12);
}

TEST_CASE("linear single-mode attraction matches the scalar delay equation") {
  const double beta = 10.0, tau = 0.01, d0 = 0.1, T = 0.1, h = 1e-5;
  auto p = make_problem({tau}, with_betas("linear(10)", {beta}), 4, h);
  p.tolerances.picard_tol = 1e-14;
  auto ubar = picard_iterate(p).trajectory;
  AttractionOptions o;
  o.horizon = T;
  o.periodic = ubar;
  auto fit = attraction_experiment(p, periodic_plus(ubar, d0 * SpectralField::unit(4, 1)), o);

  const double lam = first_eigenvalue(1.0);
  const int per_tau = 2000;
  const double hr = tau / per_tau;
  const int n = static_cast<int>(std::lround(T / hr));
  std::vector<double> y(n + 1), dy(n + 1);
  auto delayed = [&](double s) {
    if (s <= 0.0) return d0;
    const double pos = s / hr;
    const int i = std::min(static_cast<int>(pos), n - 1);
    const double u = pos - i;
    return (2 * u * u * u - 3 * u * u + 1) * y[i] + (u * u * u - 2 * u * u + u) * hr * dy[i] +
           (-2 * u * u * u + 3 * u * u) * y[i + 1] + (u * u * u - u * u) * hr * dy[i + 1];
  };
  auto rhs = [&](double t, double a) { return -lam * a + beta * delayed(t - tau); };
  y[0] = d0;
  dy[0] = rhs(0.0, d0);
  for (int i = 0; i < n; ++i) {
    const double t = i * hr;
    const double k1 = rhs(t, y[i]);
    const double k2 = rhs(t + hr / 2, y[i] + hr / 2 * k1);
    const double k3 = rhs(t + hr / 2, y[i] + hr / 2 * k2);
    const double k4 = rhs(t + hr, y[i] + hr * k3);
    y[i + 1] = y[i] + hr / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    dy[i + 1] = rhs(t + hr, y[i + 1]);
  }
  std::vector<std::pair<double, double>> oracle_pts;
  for (const auto& s : fit.samples) {
    const auto idx = static_cast<std::size_t>(std::lround(s.t / hr));
    CHECK(s.distance == doctest::Approx(std::abs(y[idx])).epsilon(1e-6));
    if (s.t >= T / 2 - 1e-12) oracle_pts.emplace_back(s.t, std::log(std::abs(y[idx])));
  }
  const double oracle_slope = fit_line(oracle_pts).slope;
  CHECK(std::abs(fit.slope - oracle_slope) <= 0.02 * std::abs(oracle_slope));
}

TEST_CASE("certificate gate and best-effort runs without a certificate") {
  auto p = make_problem({0.05}, with_betas("tanh_scaled(10, 1)", {10}), 8, 1e-3);
  AttractionOptions o;
  o.horizon = 0.2;
  o.certificate = true;
  auto kappa = InitialHistory::constant(0.1 * SpectralField::unit(8, 1));
  CHECK_THROWS_AS(attraction_experiment(p, kappa, o), CertificateRefused);
  o.certificate = false;
  auto fit = attraction_experiment(p, kappa, o);
  CHECK_FALSE(fit.certified);
  CHECK(fit.slope_ok);
}

TEST_CASE("understated Lipschitz data breaks the envelope") {
  auto p = make_problem({0.01}, with_betas("linear(90)", {1.0}), 4, 5e-4);
  p.tolerances.max_iters = 400;
  AttractionOptions o;
  o.horizon = 0.1;
  auto kappa = InitialHistory::constant(0.1 * SpectralField::unit(4, 1));
  CHECK_THROWS_AS(attraction_experiment(p, kappa, o), BoundViolation);
  o.throw_on_violation = false;
  auto fit = attraction_experiment(p, kappa, o);
  CHECK_FALSE(fit.bound_holds);
  CHECK_FALSE(fit.bound_sup_holds);
  CHECK_FALSE(fit.passed());
}

TEST_CASE("decay and hypothesis serialization") {
  auto p = make_problem({0.01}, with_betas("tanh_scaled(10, 1)", {10}), 8, 1e-3);
  AttractionOptions o;
  o.horizon = 0.05;
  auto fit = attraction_experiment(p, InitialHistory::constant(0.1 * SpectralField::unit(8, 1)), o);
  std::ostringstream csv, js, hs;
  write_decay_csv(csv, fit, OutputMeta{"x", 9});
  write_decay_json(js, fit, OutputMeta{"x", 9});
  write_hypotheses_json(hs, check_hypotheses(p, quick()), OutputMeta{"x", 9});
  CHECK(csv.str().rfind("# config_hash=x seed=9\nt,distance,log_distance,bound_rhs\n", 0) == 0);
  auto j = nlohmann::json::parse(js.str());
  CHECK(j["seed"] == 9);
  CHECK(j["rho"].get<double>() == doctest::Approx(77.3344315024664855));
  auto h = nlohmann::json::parse(hs.str());
  CHECK(h["H2prime"]["status"] == "holds");
  CHECK(h["config_hash"] == "x");
}
