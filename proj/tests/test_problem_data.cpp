#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "efk/errors.hpp"
#include "efk/forcing.hpp"
#include "efk/problem.hpp"

using namespace efk;

namespace {
double call(const NonlinearitySpec& f, std::vector<double> xi) { return f(xi); }
}  // namespace

TEST_CASE("nonlinearity built-ins evaluate pointwise") {
  CHECK(call(NonlinearitySpec::parse("linear(2, -3)", 2), {1.5, 0.5}) == 1.5);
  CHECK(call(NonlinearitySpec::parse("tanh_scaled(10, 2)", 2), {9.0, 0.3}) == 10.0 * std::tanh(0.3));
  CHECK(call(NonlinearitySpec::parse("sin_scaled(0.5, 1)", 1), {1.0}) == 0.5 * std::sin(1.0));
  CHECK(call(NonlinearitySpec::parse("cubic(1)", 1), {2.0}) == -8.0);
  CHECK(call(NonlinearitySpec::parse(" sum( linear(1,0), cubic(2) ) ", 2), {3.0, 1.0}) == 2.0);
  CHECK(NonlinearitySpec::parse("zero", 3).is_zero());
  CHECK(NonlinearitySpec::parse("sum(linear(0), tanh_scaled(0, 1))", 1).is_zero());
  CHECK_FALSE(NonlinearitySpec::parse("cubic(1)", 1).is_zero());
}

TEST_CASE("natural Lipschitz constants follow the expression") {
  auto f = NonlinearitySpec::parse("sum(tanh_scaled(3, 1), sin_scaled(-2, 2), linear(1, 0.5))", 2);
  REQUIRE(f.natural_betas());
  CHECK(*f.natural_betas() == std::vector<double>{4.0, 2.5});
  CHECK_FALSE(NonlinearitySpec::parse("sum(cubic(1), linear(1))", 1).natural_betas());
  CHECK_FALSE(f.lipschitz_betas());
}

TEST_CASE("nonlinearity syntax and arity errors") {
  for (const char* bad : {"", "tanh(1)", "linear(1, 2)", "tanh_scaled(1, 2)", "tanh_scaled(1, 0)",
                          "cubic(1.5)", "sum()", "linear(1", "zero extra", "sin_scaled(nan, 1)"}) {
    CHECK_THROWS_AS(NonlinearitySpec::parse(bad, 1), ConfigError);
  }
  auto f = NonlinearitySpec::parse("linear(1)", 1);
  CHECK_THROWS_AS(f.set_lipschitz_betas({1.0, 2.0}), ConfigError);
  CHECK_THROWS_AS(f.set_lipschitz_betas({-1.0}), ConfigError);
  CHECK_THROWS_AS(f.set_affine_bound({{1.0}, -1.0}), ConfigError);
}

TEST_CASE("sampled Lipschitz check accepts true constants and rejects small ones") {
  auto f = NonlinearitySpec::parse("sum(tanh_scaled(3, 1), sin_scaled(2, 2))", 2);
  std::vector<double> good{3.0, 2.0}, bad{1.0, 2.0};
  auto ok = sample_lipschitz(f, good, 10.0, 50000, 42);
  CHECK(ok.holds);
  CHECK(ok.violations == 0);
  CHECK(ok.worst_ratio <= 1.0 + 1e-12);
  auto no = sample_lipschitz(f, bad, 10.0, 50000, 42);
  CHECK_FALSE(no.holds);
  CHECK(no.worst_ratio > 1.0);
  auto again = sample_lipschitz(f, bad, 10.0, 50000, 42);
  CHECK(again.violations == no.violations);
  CHECK(again.worst_ratio == no.worst_ratio);
}

TEST_CASE("periodic forcing repeats with its period") {
  auto g = ForcingSpec::periodic(0.5, {PeriodicTerm{1.0, Temporal::Cos, 2, 0.3, 1},
                                       PeriodicTerm{-0.4, Temporal::Sin, 1, 0.0, 3}});
  CHECK(g.period() == 0.5);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double t = u(rng), x = u(rng);
    CHECK(g.value(t + 0.5, x) == doctest::Approx(g.value(t, x)).epsilon(1e-12));
  }
  CHECK(g.value(0.0, 0.5) == doctest::Approx(std::cos(0.3) + 0.0).epsilon(1e-15));
  CHECK(g.sup_bound() == doctest::Approx(1.4));
  CHECK_FALSE(g.is_zero());
  CHECK(ForcingSpec::none().is_zero());
}

TEST_CASE("forcing samples match pointwise values") {
  auto g = ForcingSpec::periodic(1.0, {PeriodicTerm{2.0, Temporal::Sin, 1, 0.1, 2}});
  std::vector<double> x{0.1, 0.25, 0.9}, out(3);
  g.sample(0.3, x, out);
  for (std::size_t j = 0; j < 3; ++j) CHECK(out[j] == doctest::Approx(g.value(0.3, x[j])));
  std::vector<double> wrong(2);
  CHECK_THROWS_AS(g.sample(0.3, x, wrong), ShapeError);
  CHECK_THROWS_AS(ForcingSpec::periodic(1.0, {PeriodicTerm{1.0, Temporal::Cos, 1, 0.0, 0}}), ConfigError);
}

TEST_CASE("tables interpolate in time and wrap when periodic") {
  ForcingTable tab;
  tab.dt = 0.5;
  tab.periodic = true;
  tab.samples = {{0.0, 1.0}, {2.0, 3.0}};
  auto g = ForcingSpec::tabulated(tab);
  CHECK(*g.period() == 1.0);
  std::vector<double> nodes{1.0 / 3.0, 2.0 / 3.0}, out(2);
  g.sample(0.25, nodes, out);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 2.0);
  g.sample(1.25, nodes, out);
  CHECK(out[0] == 1.0);
  g.sample(0.75, nodes, out);  // halfway back to the first row
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 2.0);
  CHECK(g.value(0.0, 0.0) == 0.0);
  CHECK(g.value(0.0, 2.0 / 3.0) == doctest::Approx(1.0));
  tab.samples = {{1.0}, {1.0, 2.0}};
  CHECK_THROWS_AS(ForcingSpec::tabulated(tab), ConfigError);
}

TEST_CASE("delay and problem validation") {
  DelaySpec d({0.03, 0.01, 0.02});
  CHECK(d.max_delay() == 0.03);
  CHECK(d.min_delay() == 0.01);
  CHECK_THROWS_AS(DelaySpec({}), ConfigError);
  CHECK_THROWS_AS(DelaySpec({0.01, 0.0}), ConfigError);
  CHECK(default_step(DelaySpec({0.01}), 1.0) == 5e-4);
  CHECK(default_step(DelaySpec({1.0}), 1.0) == 1e-3);
  CHECK(default_step(DelaySpec({1.0}), 0.1) == 5e-4);

  ProblemSpec p{.gamma = 1.0,
                .omega = 1.0,
                .delays = DelaySpec({0.01}),
                .nonlinearity = NonlinearitySpec::zero(1),
                .forcing = ForcingSpec::none(),
                .discretization = {},
                .tolerances = {}};
  CHECK_NOTHROW(p.validate());
  CHECK(p.nodes() == 128);
  CHECK(p.step() == 5e-4);
  auto bad = p;
  bad.gamma = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.nonlinearity = NonlinearitySpec::zero(2);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.discretization.nodes = 10;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.forcing = ForcingSpec::periodic(2.0, {});
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.tolerances.picard_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
