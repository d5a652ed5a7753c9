#include "efk/hypotheses.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "efk/errors.hpp"
#include "efk/spectrum.hpp"

namespace efk {

const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::Holds:
      return "holds";
    case Status::Fails:
      return "fails";
    case Status::Unknown:
      return "unknown";
  }
  return "unknown";
}

bool HypothesisReport::all_known_hold() const noexcept {
  for (const auto* c : {&h1, &h2, &h3, &h2prime}) {
    if (c->status == Status::Fails) return false;
  }
  return true;
}

bool HypothesisReport::complete() const noexcept {
  for (const auto* c : {&h1, &h2, &h3, &h2prime}) {
    if (c->status == Status::Unknown) return false;
  }
  return true;
}

double h2prime_lhs(double gamma, std::span<const double> taus, std::span<const double> betas) {
  if (taus.size() != betas.size()) throw ShapeError("h2prime_lhs: one beta per delay");
  const double lam = first_eigenvalue(gamma);
  double s = 0.0;
  for (std::size_t k = 0; k < taus.size(); ++k) s += betas[k] * std::exp(lam * taus[k]);
  return s;
}

double decay_exponent(double gamma, std::span<const double> taus, std::span<const double> betas) {
  return first_eigenvalue(gamma) - h2prime_lhs(gamma, taus, betas);
}

double decay_exponent(const ProblemSpec& problem) {
  const auto& b = problem.nonlinearity.lipschitz_betas();
  if (!b) throw ConfigError("decay_exponent: no Lipschitz constants declared");
  return decay_exponent(problem.gamma, problem.delays.taus(), *b);
}

double bellman_envelope(double psi0_sup, std::span<const double> bs, double t) {
  if (t < 0.0) throw DomainError("bellman_envelope: t must be nonnegative");
  if (psi0_sup < 0.0) throw DomainError("bellman_envelope: psi0 must be nonnegative");
  double sum = 0.0;
  for (double b : bs) {
    if (b < 0.0) throw DomainError("bellman_envelope: b_k must be nonnegative");
    sum += b;
  }
  return psi0_sup * std::exp(sum * t);
}

SampledCheck sample_growth(const ProblemSpec& problem, const AffineBound& bound, double box, std::size_t samples,
                           std::uint64_t seed) {
  const std::size_t n = problem.delays.size();
  if (bound.betas.size() != n) throw ShapeError("sample_growth: one beta per delay");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xi_dist(-box, box);
  std::uniform_real_distribution<double> t_dist(0.0, problem.omega);
  std::uniform_real_distribution<double> x_dist(0.0, 1.0);
  SampledCheck out;
  out.seed = seed;
  out.box = box;
  out.samples = samples;
  std::vector<double> xi(n);
  for (std::size_t s = 0; s < samples; ++s) {
    double rhs = bound.K;
    for (std::size_t k = 0; k < n; ++k) {
      xi[k] = xi_dist(rng);
      rhs += bound.betas[k] * std::abs(xi[k]);
    }
    const double t = t_dist(rng);
    const double x = x_dist(rng);
    const double lhs = std::abs(problem.nonlinearity(xi) + problem.forcing.value(t, x));
    const double tol = 1e-12 * std::max(1.0, rhs) + 1e-14;
    if (rhs > 0.0) out.worst_ratio = std::max(out.worst_ratio, lhs / rhs);
    if (lhs > rhs + tol) ++out.violations;
  }
  out.holds = out.violations == 0;
  return out;
}

HypothesisReport check_hypotheses(const ProblemSpec& problem, const HypothesisOptions& options) {
  HypothesisReport rep;
  const double lam = first_eigenvalue(problem.gamma);
  rep.lambda1 = lam;
  const auto& nl = problem.nonlinearity;
  const auto& betas = nl.lipschitz_betas();

  if (const auto& aff = nl.affine_bound()) {
    const double sum = std::accumulate(aff->betas.begin(), aff->betas.end(), 0.0);
    auto chk = sample_growth(problem, *aff, options.box, options.samples, options.seed);
    rep.h1.status = chk.holds ? Status::Holds : Status::Fails;
    rep.h1.lhs = sum;
    rep.h1.margin = lam - sum;
    rep.h1.detail = chk.holds ? "growth bound passed sampling" : "growth bound violated at sampled points";
    rep.h1.sampling = chk;
  } else {
    rep.h1.detail = "no affine bound declared";
    rep.warnings.push_back("H1 unknown: K not declared");
  }

  if (betas) {
    const double sum = std::accumulate(betas->begin(), betas->end(), 0.0);
    rep.h2.lhs = sum;
    rep.h2.margin = lam - sum;
    rep.h2.status = sum < lam ? Status::Holds : Status::Fails;
    rep.h2.detail = "sum of betas vs lambda1";

    auto chk = sample_lipschitz(nl, *betas, options.box, options.samples, options.seed);
    rep.h3.status = chk.holds ? Status::Holds : Status::Fails;
    rep.h3.sampling = chk;
    rep.h3.detail = chk.holds ? "two-point Lipschitz check passed sampling" : "Lipschitz bound violated";

    const double lhs = h2prime_lhs(problem.gamma, problem.delays.taus(), *betas);
    rep.h2prime.lhs = lhs;
    rep.h2prime.margin = lam - lhs;
    rep.h2prime.status = lhs < lam ? Status::Holds : Status::Fails;
    rep.h2prime.detail = "delay-weighted beta sum vs lambda1";
    rep.rho = lam - lhs;
  } else {
    for (auto* c : {&rep.h2, &rep.h3, &rep.h2prime}) c->detail = "no Lipschitz constants declared";
    rep.warnings.push_back("H2, H3, H2' unknown: betas not declared");
  }
  return rep;
}

}  // namespace efk
