#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "efk/errors.hpp"
#include "efk/periodic_solver.hpp"

using namespace efk;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLambda1 = 106.278695435091796;

ProblemSpec make_problem(std::vector<double> taus, NonlinearitySpec nl, ForcingSpec g, std::size_t modes,
                         double step, double gamma = 1.0) {
  return ProblemSpec{.gamma = gamma,
                     .omega = 1.0,
                     .delays = DelaySpec(std::move(taus)),
                     .nonlinearity = std::move(nl),
                     .forcing = std::move(g),
                     .discretization = {modes, 0, step},
                     .tolerances = {}};
}

ForcingSpec cos2pi_mode1() { return ForcingSpec::periodic(1.0, {PeriodicTerm{1.0, Temporal::Cos, 1, 0.0, 1}}); }

NonlinearitySpec tanh10() {
  auto nl = NonlinearitySpec::parse("tanh_scaled(10, 1)", 1);
  nl.set_lipschitz_betas({10.0});
  return nl;
}

std::vector<SpectralField> mode1_samples(std::size_t p, std::size_t modes, double (*f)(double)) {
  std::vector<SpectralField> phi(p + 1, SpectralField(modes));
  for (std::size_t i = 0; i <= p; ++i) phi[i][0] = f(static_cast<double>(i) / static_cast<double>(p));
  return phi;
}

}  // namespace

TEST_CASE("periodic initial value for constant, zero and cosine inputs") {
  OperatorSpectrum spec(1.0, 4);
  auto c = mode1_samples(1000, 4, [](double) { return 2.5; });
  CHECK(periodic_initial_value(spec, 1.0, c)[0] == doctest::Approx(2.5 / kLambda1).epsilon(1e-14));
  auto z = mode1_samples(1000, 4, [](double) { return 0.0; });
  CHECK(periodic_initial_value(spec, 1.0, z) == SpectralField(4));
  auto cs = mode1_samples(2000, 4, [](double s) { return std::cos(2.0 * kPi * s); });
  CHECK(periodic_initial_value(spec, 1.0, cs)[0] == doctest::Approx(0.00937645129677799562).epsilon(1e-6));
}

TEST_CASE("closed-form linear periodic responses") {
  OperatorSpectrum spec(1.0, 8);
  SUBCASE("cosine forcing amplitude") {
    auto sol = linear_periodic_solution(spec, 1.0, cos2pi_mode1(), 1000);
    CHECK_FALSE(sol.quadrature_fallback);
    const double a0 = sol.trajectory.value(0)[0];
    const double aq = sol.trajectory.value(250)[0];
    CHECK(std::hypot(a0, aq) == doctest::Approx(0.00664172891679875199).epsilon(1e-13));
    CHECK(a0 == doctest::Approx(0.00937645129677799562 / std::sqrt(2.0)).epsilon(1e-13));
    for (std::size_t k = 1; k < 8; ++k) CHECK(sol.trajectory.value(17)[k] == 0.0);
  }
  SUBCASE("zero forcing") {
    auto sol = linear_periodic_solution(spec, 1.0, ForcingSpec::none(), 100);
    CHECK(sol.trajectory.sup_norm() == 0.0);
  }
  SUBCASE("time-constant forcing gives the stationary response") {
    auto g = ForcingSpec::periodic(1.0, {PeriodicTerm{1.0, Temporal::Cos, 0, 0.0, 1}});
    auto sol = linear_periodic_solution(spec, 1.0, g, 50);
    for (std::size_t i = 0; i <= 50; ++i) {
      CHECK(sol.trajectory.value(i)[0] == doctest::Approx(0.00665332575161691696).epsilon(1e-14));
    }
  }
  SUBCASE("sampled tables use the quadrature path") {
    ForcingTable tab;
    tab.dt = 0.25;
    tab.periodic = true;
    tab.samples.assign(4, std::vector<double>(16));
    for (std::size_t j = 0; j < 16; ++j)
      for (auto& row : tab.samples) row[j] = std::sin(kPi * (j + 1.0) / 17.0);
    auto sol = linear_periodic_solution(spec, 1.0, ForcingSpec::tabulated(tab), 100, 16);
    CHECK(sol.quadrature_fallback);
    CHECK(sol.trajectory.value(40)[0] == doctest::Approx(0.00665332575161691696).epsilon(1e-12));
  }
  SUBCASE("non-periodic terms are rejected") {
    auto g = ForcingSpec::aperiodic({ForcingTerm{1.0, Temporal::Cos, 1.0, 0.0, 1}});
    CHECK_THROWS_AS(linear_periodic_solution(spec, 1.0, g, 100), ConfigError);
  }
}

TEST_CASE("with f zero the map ignores its argument") {
  auto p = make_problem({0.01}, NonlinearitySpec::zero(1), cos2pi_mode1(), 8, 1e-3);
  auto zero = PeriodicTrajectory::zero(1.0, 1000, 8);
  std::vector<SpectralField> v(1001, SpectralField(8));
  for (std::size_t i = 0; i <= 1000; ++i) v[i][2] = std::sin(2.0 * kPi * i / 1000.0);
  PeriodicTrajectory other(1.0, v, v);
  CHECK(apply_periodic_map(p, zero).values() == apply_periodic_map(p, other).values());

  auto pz = make_problem({0.01}, NonlinearitySpec::zero(1), ForcingSpec::none(), 8, 1e-3);
  CHECK(apply_periodic_map(pz, other).sup_norm() == 0.0);
}

TEST_CASE("linear Picard run converges in one iteration and matches the oracle") {
  for (double h : {1e-3, 5e-4}) {
    auto p = make_problem({0.01}, NonlinearitySpec::zero(1), cos2pi_mode1(), 8, h);
    auto res = picard_iterate(p);
    CHECK(res.report.iterations == 1);
    CHECK(res.report.converged);
    CHECK(*res.report.fixed_point_residual == 0.0);
    OperatorSpectrum spec(1.0, 8);
    auto oracle = linear_periodic_solution(spec, 1.0, cos2pi_mode1(), periodic_intervals(p));
    const double rel = res.trajectory.distance(oracle.trajectory) / oracle.trajectory.sup_norm();
    CHECK(rel < 10.0 * h * h);
    if (h == 5e-4) CHECK(rel < 1e-6);
  }
}

TEST_CASE("tanh certificate run contracts at the predicted rate") {
  auto p = make_problem({0.01}, tanh10(), cos2pi_mode1(), 16, 1e-3);
  p.tolerances.picard_tol = 1e-10;
  PicardOptions opt;
  opt.certificate = true;
  opt.lipschitz_samples = 20000;
  auto res = picard_iterate(p, opt);
  const auto& r = res.report;
  CHECK(*r.theoretical_factor == doctest::Approx(0.0940922351282281).epsilon(1e-13));
  CHECK(r.iterations <= 12);
  CHECK(*r.empirical_factor <= *r.theoretical_factor + 0.05);
  CHECK(r.factor_consistent);
  CHECK(*r.fixed_point_residual < 2.0 * p.tolerances.picard_tol);
  CHECK(r.seam_gap < p.tolerances.picard_tol);
  for (std::size_t i = 0; i + 1 < r.residuals.size(); ++i) CHECK(r.residuals[i] > 0.0);
  CHECK_FALSE(r.accelerated);
}

TEST_CASE("radius bound under the growth condition") {
  auto p = make_problem({0.01}, tanh10(), cos2pi_mode1(), 16, 1e-3);
  auto res = picard_iterate(p);
  // |10 tanh ξ + g| ≤ 10|ξ| + 1.
  CHECK(res.trajectory.sup_norm() <= 1.0 / (kLambda1 - 10.0) * 1.05);
}

TEST_CASE("map differences contract by the beta sum over lambda1") {
  auto p = make_problem({0.01}, tanh10(), cos2pi_mode1(), 8, 1e-3);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd(0.0, 0.3);
  const double theo = 10.0 / kLambda1;
  for (int trial = 0; trial < 5; ++trial) {
    auto smooth = [&] {
      std::vector<double> c(8), d(8);
      for (auto& x : c) x = nd(rng);
      for (auto& x : d) x = nd(rng);
      std::vector<SpectralField> v(1001, SpectralField(8)), dv(1001, SpectralField(8));
      for (std::size_t i = 0; i <= 1000; ++i) {
        const double t = 2.0 * kPi * static_cast<double>(i % 1000) / 1000.0;
        for (std::size_t k = 0; k < 8; ++k) {
          v[i][k] = c[k] * std::cos(t) + d[k] * std::sin(t);
          dv[i][k] = 2.0 * kPi * (-c[k] * std::sin(t) + d[k] * std::cos(t));
        }
      }
      return PeriodicTrajectory(1.0, v, dv);
    };
    auto u = smooth(), v = smooth();
    const double ratio = apply_periodic_map(p, u).distance(apply_periodic_map(p, v)) / u.distance(v);
    CHECK(ratio <= theo * 1.05);
  }
}

TEST_CASE("certificate mode refuses when H2 fails") {
  auto nl = NonlinearitySpec::parse("tanh_scaled(200, 1)", 1);
  nl.set_lipschitz_betas({200.0});
  auto p = make_problem({0.01}, nl, cos2pi_mode1(), 8, 1e-3);
  PicardOptions opt;
  opt.certificate = true;
  CHECK_THROWS_AS(picard_iterate(p, opt), CertificateRefused);
  auto nobetas = make_problem({0.01}, NonlinearitySpec::parse("tanh_scaled(1, 1)", 1), cos2pi_mode1(), 8, 1e-3);
  CHECK_THROWS_AS(picard_iterate(nobetas, opt), CertificateRefused);
  // Best effort either converges or reports failure.
  p.tolerances.max_iters = 30;
  try {
    auto res = picard_iterate(p);
    CHECK(res.report.converged);
  } catch (const ConvergenceFailure& e) {
    CHECK(e.report().iterations == 30);
  }
}

TEST_CASE("convergence failure carries the report") {
  auto p = make_problem({0.01}, tanh10(), cos2pi_mode1(), 8, 1e-3);
  p.tolerances.max_iters = 2;
  try {
    picard_iterate(p);
    FAIL("expected failure");
  } catch (const ConvergenceFailure& e) {
    CHECK(e.report().iterations == 2);
    CHECK(e.report().residuals.size() == 2);
    CHECK_FALSE(e.report().converged);
  }
}

TEST_CASE("worker partitioning does not change results") {
  auto p = make_problem({0.013, 0.007}, NonlinearitySpec::parse("sum(tanh_scaled(4, 1), sin_scaled(3, 2))", 2),
                        cos2pi_mode1(), 8, 1e-3);
  PicardOptions a, b;
  b.workers = 3;
  auto ra = picard_iterate(p, a);
  auto rb = picard_iterate(p, b);
  CHECK(ra.trajectory.values() == rb.trajectory.values());
  CHECK(ra.report.residuals == rb.report.residuals);
}

TEST_CASE("anderson acceleration reaches the same fixed point") {
  auto p = make_problem({0.01}, tanh10(), cos2pi_mode1(), 8, 1e-3);
  auto plain = picard_iterate(p);
  PicardOptions opt;
  opt.anderson_depth = 3;
  auto acc = picard_iterate(p, opt);
  CHECK(acc.report.accelerated);
  CHECK(acc.report.iterations <= plain.report.iterations);
  CHECK(acc.trajectory.distance(plain.trajectory) < 1e-9);
  opt.certificate = true;
  opt.lipschitz_samples = 1000;
  CHECK_FALSE(picard_iterate(p, opt).report.accelerated);
}

TEST_CASE("periodic trajectories wrap consistently") {
  auto p = make_problem({0.01}, tanh10(), cos2pi_mode1(), 8, 1.0 / 1024.0);
  auto u = picard_iterate(p).trajectory;
  CHECK(u.intervals() == 1024);
  for (double t : {0.0, 0.125, 0.5, 0.75, 0.999755859375}) {
    CHECK(u.at(t) == u.at(t + 1.0));
    CHECK(u.at(t) == u.at(t - 3.0));
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double t = ud(rng);
    CHECK((u.at(t) - u.at(t + 1.0)).max_abs() < 1e-13);
  }
  CHECK((u.at(1.0) - u.at(0.0)).max_abs() == 0.0);
  CHECK(u.value(3) == u.at(u.time(3)));
}

TEST_CASE("exports") {
  auto p = make_problem({0.01}, tanh10(), cos2pi_mode1(), 8, 0.25);
  auto res = picard_iterate(p);
  std::ostringstream csv, js;
  write_periodic_csv(csv, res.trajectory, 3, OutputMeta{"h", 1});
  write_convergence_json(js, res.report, OutputMeta{"h", 1});
  CHECK(csv.str().find("t,norm_l2,a_1,a_2,a_3\n") != std::string::npos);
  for (const char* key : {"\"iterations\"", "\"residuals\"", "\"theoretical_factor\"", "\"empirical_factor\""}) {
    CHECK(js.str().find(key) != std::string::npos);
  }
}
