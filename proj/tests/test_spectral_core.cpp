#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "efk/errors.hpp"
#include "efk/greens.hpp"
#include "efk/sine_transform.hpp"
#include "efk/spectrum.hpp"

using namespace efk;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralField random_field(std::mt19937_64& rng, std::size_t n, double decay = 0.0) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> c(n);
  for (std::size_t k = 0; k < n; ++k) c[k] = dist(rng) / std::pow(static_cast<double>(k + 1), decay);
  return SpectralField(std::move(c));
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Sine coefficient of x(1−x) in the √2 sin(kπx) basis: 2√2(1−(−1)^k)/(kπ)³.
double parabola_coeff(std::size_t k) {
  const double kp = static_cast<double>(k) * kPi;
  return (k % 2 == 1) ? 4.0 * std::numbers::sqrt2 / (kp * kp * kp) : 0.0;
}

}  // namespace

TEST_CASE("eigenvalues match the closed form") {
  // Frozen from 30-digit evaluation of γ(kπ)⁴ + (kπ)² − 1.
  const OperatorSpectrum s1(1.0, 4);
  CHECK(rel(s1.eigenvalue(1), 106.278695435091796) < 1e-14);
  CHECK(rel(s1.eigenvalue(2), 1597.02387414839643) < 1e-14);
  CHECK(rel(OperatorSpectrum(0.5, 2).eigenvalue(2), 817.751145876376932) < 1e-14);
  CHECK(rel(first_eigenvalue(1.0), 106.278695435091796) < 1e-14);

  CHECK_THROWS_AS(s1.eigenvalue(0), IndexError);
  CHECK_THROWS_AS(s1.eigenvalue(5), IndexError);
  CHECK_THROWS_AS(OperatorSpectrum(0.0, 4), DomainError);
  CHECK_THROWS_AS(OperatorSpectrum(-1.0, 4), DomainError);

  const OperatorSpectrum s(0.3, 64);
  for (std::size_t k = 1; k < 64; ++k) CHECK(s.eigenvalue(k) < s.eigenvalue(k + 1));
  for (double g : {1e-6, 0.01, 1.0, 100.0}) CHECK(first_eigenvalue(g) > 0.0);
}

TEST_CASE("factorization roots") {
  auto r1 = factorization_roots(1.0);
  CHECK(rel(r1.mu1, 1.61803398874989485) < 1e-15);
  CHECK(rel(r1.mu2, -0.61803398874989485) < 1e-15);

  auto r2 = factorization_roots(2.0);  // (1 ± 3)/4
  CHECK(rel(r2.mu1, 1.0) < 1e-15);
  CHECK(rel(r2.mu2, -0.5) < 1e-15);

  for (double g : {0.01, 0.1, 0.25, 0.5, 1.0, 2.0, 10.0}) {
    CAPTURE(g);
    auto r = factorization_roots(g);
    CHECK(std::abs(g * (r.mu1 + r.mu2) - 1.0) < 4e-16);
    CHECK(std::abs(g * r.mu1 * r.mu2 + 1.0) < 4e-16);
    CHECK(r.mu1 > 0.0);
    CHECK(r.mu2 < 0.0);
    CHECK(r.mu2 > -kPi * kPi);
  }
  CHECK_THROWS_AS(factorization_roots(0.0), DomainError);
  CHECK_THROWS_AS(factorization_roots(-2.0), DomainError);
}

TEST_CASE("apply_A is diagonal, symmetric and positive definite") {
  const OperatorSpectrum s(1.0, 32);
  auto e1 = SpectralField::unit(32, 1);
  auto a1 = apply_A(s, e1);
  CHECK(rel(a1[0], 106.278695435091796) < 1e-14);
  for (std::size_t k = 1; k < 32; ++k) CHECK(a1[k] == 0.0);
  CHECK(apply_A(s, SpectralField(32)) == SpectralField(32));
  CHECK_THROWS_AS(apply_A(s, SpectralField(16)), ShapeError);

  std::mt19937_64 rng(20240607);
  for (int trial = 0; trial < 200; ++trial) {
    auto u = random_field(rng, 32);
    auto v = random_field(rng, 32);
    auto au = apply_A(s, u);
    auto av = apply_A(s, v);
    CHECK(std::abs(au.dot(v) - u.dot(av)) <= 1e-12 * au.norm() * v.norm());
    CHECK(au.dot(u) >= s.lambda1() * u.dot(u));
  }
}

TEST_CASE("semigroup action and decay bound") {
  const OperatorSpectrum s(1.0, 24);
  auto e1 = SpectralField::unit(24, 1);
  CHECK(apply_semigroup(s, 0.0, e1) == e1);
  auto t1 = apply_semigroup(s, 0.01, e1);
  CHECK(rel(t1[0], 0.345491598033979693) < 1e-14);
  CHECK_THROWS_AS(apply_semigroup(s, -1e-9, e1), DomainError);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> tdist(0.0, 0.2);
  for (int trial = 0; trial < 200; ++trial) {
    auto u = random_field(rng, 24);
    const double t = tdist(rng);
    const double sv = tdist(rng);
    auto tu = apply_semigroup(s, t, u);
    CHECK(tu.norm() <= std::exp(-s.lambda1() * t) * u.norm() * (1.0 + 1e-15));

    auto lhs = apply_semigroup(s, t, apply_semigroup(s, sv, u));
    auto rhs = apply_semigroup(s, t + sv, u);
    CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm() + 1e-300);
  }
  // Equality only for pure mode 1.
  auto u1 = 3.5 * e1;
  CHECK(rel(apply_semigroup(s, 0.02, u1).norm(), std::exp(-s.lambda1() * 0.02) * 3.5) < 1e-14);
  auto u2 = e1 + 1e-3 * SpectralField::unit(24, 2);
  CHECK(apply_semigroup(s, 0.02, u2).norm() < std::exp(-s.lambda1() * 0.02) * u2.norm());
}

TEST_CASE("fractional powers") {
  const OperatorSpectrum s(1.0, 16);
  std::mt19937_64 rng(3);
  auto u = random_field(rng, 16);
  CHECK(apply_fractional_power(s, 0.0, u) == u);
  CHECK(apply_fractional_power(s, 1.0, u) == apply_A(s, u));
  auto back = apply_fractional_power(s, 1.0, apply_fractional_power(s, -1.0, u));
  CHECK((back - u).norm() <= 1e-12 * u.norm());

  auto half = apply_fractional_power(s, 0.5, SpectralField::unit(16, 1));
  CHECK(rel(half[0], 10.3091559031325060) < 1e-14);

  // Integral identity: Γ(α)⁻¹ ∫₀^∞ s^{α−1} e^{−λs} ds = λ^{−α}, α = 1/2.
  // With s = v²: (2/√π) ∫₀^∞ e^{−λv²} dv, integrated by composite Simpson.
  const double lam = s.eigenvalue(3);
  const double vmax = 12.0 / std::sqrt(lam);
  const int n = 4000;
  const double dv = vmax / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double v = i * dv;
    acc += wgt * std::exp(-lam * v * v);
  }
  const double integral = 2.0 / std::sqrt(kPi) * acc * dv / 3.0;
  auto minus_half = apply_fractional_power(s, -0.5, SpectralField::unit(16, 3));
  CHECK(rel(minus_half[2], integral) < 1e-10);
}

TEST_CASE("sine transform round trip and Parseval") {
  const SineTransform tr(8, 16);
  auto e1 = SpectralField::unit(8, 1);
  auto samples = tr.inverse(e1);
  auto x = tr.node_positions();
  for (std::size_t j = 0; j < 16; ++j) {
    CHECK(std::abs(samples[j] - std::numbers::sqrt2 * std::sin(kPi * x[j])) < 1e-15);
  }
  CHECK((tr.forward(samples) - e1).max_abs() < 1e-12);
  CHECK(tr.forward(std::vector<double>(16, 0.0)) == SpectralField(8));

  const SineTransform big(32, 64);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto u = random_field(rng, 32);
    auto s = big.inverse(u);
    CHECK((big.forward(s) - u).max_abs() < 1e-12);
    CHECK(std::abs(big.sample_norm(s) - u.norm()) < 1e-12 * u.norm());
  }
  CHECK_THROWS_AS(SineTransform(16, 8), ConfigError);
  CHECK_THROWS_AS(big.forward(std::vector<double>(10)), ShapeError);
}

TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
  for (std::size_t q : {2u, 5u, 8u, 12u}) {
    auto rule = gauss_legendre(q);
    for (std::size_t deg = 0; deg < 2 * q; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < q; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], deg);
      const double exact = (deg % 2 == 0) ? 2.0 / static_cast<double>(deg + 1) : 0.0;
      CHECK(std::abs(s - exact) < 1e-14);
    }
  }
  // Partial rows integrate x^d from −1 to ξ_i exactly for d < q.
  const PanelGrid grid(1, 6, -1.0, 1.0);
  for (std::size_t i = 0; i < 6; ++i) {
    const double xi = grid.nodes()[i];
    auto row = grid.partial_row(i);
    for (std::size_t deg = 0; deg < 6; ++deg) {
      double s = 0.0;
      for (std::size_t j = 0; j < 6; ++j) s += row[j] * std::pow(grid.nodes()[j], deg);
      const double exact = (std::pow(xi, deg + 1) - std::pow(-1.0, deg + 1)) / static_cast<double>(deg + 1);
      CHECK(std::abs(s - exact) < 1e-14);
    }
  }
}

TEST_CASE("green's kernels are symmetric and vanish on the boundary") {
  for (double g : {0.5, 1.0, 2.0}) {
    auto pair = GreensKernelPair::for_gamma(g);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const double x = u(rng), y = u(rng);
      CHECK(std::abs(pair.g1(x, y) - pair.g1(y, x)) < 1e-15);
      CHECK(std::abs(pair.g2(x, y) - pair.g2(y, x)) < 1e-15);
      CHECK(std::abs(pair.g1(0.0, y)) < 1e-15);
      CHECK(std::abs(pair.g1(1.0, y)) < 1e-15);
      CHECK(std::abs(pair.g2(x, 0.0)) < 1e-15);
      CHECK(std::abs(pair.g2(x, 1.0)) < 1e-15);
    }
  }
  CHECK_THROWS_AS(GreensKernelPair(-1.0, -0.5), DomainError);
  CHECK_THROWS_AS(GreensKernelPair(1.0, -10.0), DomainError);
}

TEST_CASE("green's solve inverts eigenfunctions") {
  auto pair = GreensKernelPair::for_gamma(1.0);
  const OperatorSpectrum s(1.0, 16);

  // φ = sin(πx) → u = sin(πx)/λ₁; the sine coefficient is (1/√2)/λ₁ and the
  // peak value u(1/2) = √2·a₁ is 1/λ₁ ≈ 0.0094093.
  auto u1 = greens_solve(pair, 1.0, [](double x) { return std::sin(kPi * x); }, 16);
  CHECK(rel(std::numbers::sqrt2 * u1[0], 0.00940922351282281029) < 1e-10);
  for (std::size_t k = 1; k < 16; ++k) CHECK(std::abs(u1[k]) < 1e-13);

  auto u2 = greens_solve(pair, 1.0, [](double x) { return std::sin(2.0 * kPi * x); }, 16);
  CHECK(rel(std::numbers::sqrt2 * u2[1], 1.0 / 1597.02387414839643) < 1e-10);

  auto u0 = greens_solve(pair, 1.0, [](double) { return 0.0; }, 16);
  CHECK(u0.max_abs() == 0.0);
}

TEST_CASE("green's solve agrees with the spectral inverse") {
  for (double g : {0.5, 1.0, 2.0}) {
    CAPTURE(g);
    const std::size_t n = 64;
    const OperatorSpectrum s(g, n);
    auto pair = GreensKernelPair::for_gamma(g);
    std::vector<double> phi(n);
    for (std::size_t k = 1; k <= n; ++k) phi[k - 1] = parabola_coeff(k);
    auto expected = apply_fractional_power(s, -1.0, SpectralField(phi));
    auto got = greens_solve(pair, g, [](double x) { return x * (1.0 - x); }, n);
    CHECK((got - expected).norm() <= 1e-8 * expected.norm());
  }
}

TEST_CASE("green's solve resolution and fault injection") {
  auto pair = GreensKernelPair::for_gamma(1.0);
  auto phi = [](double x) { return std::sin(kPi * x); };
  CHECK_THROWS_AS(greens_solve(pair, 1.0, phi, 64, GreensQuadrature{8, 8}), ConfigError);
  const PanelGrid coarse(4, 4);
  CHECK_THROWS_AS(greens_solve(pair, 1.0, coarse, std::vector<double>(16, 0.0), 8), ConfigError);

  // μ₁ in the trigonometric kernel instead of μ₂ breaks A⁻¹.
  GreensKernelPair typo(pair.mu1(), -pair.mu1());
  auto bad = greens_solve(typo, 1.0, phi, 16);
  const double expected = (1.0 / std::numbers::sqrt2) / 106.278695435091796;
  CHECK(rel(bad[0], expected) > 1e-2);
}
