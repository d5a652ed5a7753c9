#include "efk/stability.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "efk/delay_integrator.hpp"
#include "efk/errors.hpp"
#include "efk/spectrum.hpp"

namespace efk {

InitialHistory periodic_plus(const PeriodicTrajectory& ubar, SpectralField delta) {
  require_same_modes(ubar.value(0), delta, "periodic_plus");
  return InitialHistory::from_function(delta.modes(), [ubar, delta](double s) { return ubar.at(s) + delta; });
}

LineFit fit_line(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) throw DomainError("fit_line: need at least two points");
  const double n = static_cast<double>(pts.size());
  double mt = 0.0, my = 0.0;
  for (const auto& [t, y] : pts) {
    mt += t;
    my += y;
  }
  mt /= n;
  my /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (const auto& [t, y] : pts) {
    stt += (t - mt) * (t - mt);
    sty += (t - mt) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (stt == 0.0) throw DomainError("fit_line: all abscissae equal");
  const double slope = sty / stt;
  const double r2 = syy == 0.0 ? 1.0 : (sty * sty) / (stt * syy);
  return {slope, my - slope * mt, r2};
}

DecayFit attraction_experiment(const ProblemSpec& problem, const InitialHistory& kappa,
                               const AttractionOptions& options) {
  problem.validate();
  const double T = options.horizon;
  const double r = problem.delays.max_delay();
  if (!(T > r)) throw ConfigError("attraction_experiment: horizon must exceed the maximal delay");

  DecayFit fit;
  fit.floor = std::max(1e-13, 10.0 * problem.tolerances.picard_tol);
  const auto& betas = problem.nonlinearity.lipschitz_betas();
  if (betas) {
    fit.rho = decay_exponent(problem.gamma, problem.delays.taus(), *betas);
    fit.theoretical_exponent = -*fit.rho;
    fit.certified = *fit.rho > 0.0;
  }
  if (options.certificate) {
    if (!betas) throw CertificateRefused("certificate mode needs declared Lipschitz constants");
    if (!fit.certified) throw CertificateRefused("H2' fails: delay-weighted beta sum is not below lambda1");
  }

  PeriodicTrajectory ubar = [&] {
    if (options.periodic) return *options.periodic;
    PicardOptions popt;
    popt.certificate = options.certificate;
    popt.workers = options.workers;
    popt.seed = options.seed;
    popt.lipschitz_samples = options.lipschitz_samples;
    auto res = picard_iterate(problem, popt);
    fit.periodic_report = res.report;
    return std::move(res.trajectory);
  }();

  // Envelope prefactors over [−r, 0].
  const double lam1 = first_eigenvalue(problem.gamma);
  const std::size_t ns = std::max<std::size_t>(2, options.prefactor_samples);
  for (std::size_t i = 0; i <= ns; ++i) {
    const double s = -r + r * static_cast<double>(i) / static_cast<double>(ns);
    const double gap = (ubar.at(s) - kappa(s)).norm();
    fit.prefactor = std::max(fit.prefactor, std::exp(lam1 * s) * gap);
    fit.prefactor_sup = std::max(fit.prefactor_sup, gap);
  }

  IvpOptions iopt;
  iopt.step = ubar.step();
  const auto ivp = solve_ivp(problem, kappa, T, iopt);
  const auto& sol = ivp.trajectory.solution();

  const double rate = fit.rho.value_or(0.0);
  const double slack = 1.0 + problem.tolerances.bound_slack;
  for (std::size_t i = 0; i < sol.size(); ++i) {
    const double t = sol.time(i);
    const double d = (sol.value(i) - ubar.at(t)).norm();
    DecaySample smp{t, d, fit.prefactor * std::exp(-rate * t), fit.prefactor_sup * std::exp(-rate * t)};
    if (fit.rho) {
      if (d > smp.bound_rhs * slack + fit.floor) fit.bound_holds = false;
      if (d > smp.bound_sup * slack + fit.floor) fit.bound_sup_holds = false;
    }
    fit.samples.push_back(smp);
  }

  fit.window_lo = options.fit_window ? options.fit_window->first : 0.5 * T;
  fit.window_hi = options.fit_window ? options.fit_window->second : T;
  if (!(fit.window_hi > fit.window_lo) || fit.window_lo < 0.0 || fit.window_hi > T * (1.0 + 1e-12)) {
    throw ConfigError("attraction_experiment: fit window must satisfy 0 <= lo < hi <= horizon");
  }
  const double eps = 1e-12 * T;
  for (const auto& smp : fit.samples) {
    if (smp.t + eps >= fit.window_lo && smp.t <= fit.window_hi + eps && smp.distance >= fit.floor) {
      fit.fit_samples.emplace_back(smp.t, std::log(smp.distance));
    }
  }
  if (fit.fit_samples.size() < 3) {
    fit.status = FitStatus::AtFloor;
    fit.slope = std::nan("");
    fit.intercept = std::nan("");
    fit.r_squared = std::nan("");
  } else {
    const auto lf = fit_line(fit.fit_samples);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.r_squared = lf.r_squared;
    if (fit.certified) fit.slope_ok = fit.slope <= -*fit.rho * (1.0 - problem.tolerances.slope_slack);
  }

  if (options.throw_on_violation && !fit.bound_holds && !fit.bound_sup_holds) {
    throw BoundViolation("distance exceeded both attraction envelopes");
  }
  return fit;
}

namespace {

using ordered = nlohmann::ordered_json;

ordered opt_num(const std::optional<double>& v) { return v ? ordered(*v) : ordered(nullptr); }

ordered num(double v) { return std::isfinite(v) ? ordered(v) : ordered(nullptr); }

ordered condition_json(const ConditionResult& c) {
  ordered j;
  j["status"] = to_string(c.status);
  j["lhs"] = opt_num(c.lhs);
  j["margin"] = opt_num(c.margin);
  j["detail"] = c.detail;
  if (c.sampling) {
    j["sampling"] = {{"samples", c.sampling->samples},
                     {"violations", c.sampling->violations},
                     {"worst_ratio", num(c.sampling->worst_ratio)},
                     {"seed", c.sampling->seed},
                     {"box", c.sampling->box}};
  }
  return j;
}

}  // namespace

void write_decay_csv(std::ostream& os, const DecayFit& fit, const OutputMeta& meta) {
  write_csv_preamble(os, meta);
  os << "t,distance,log_distance,bound_rhs\n";
  for (const auto& s : fit.samples) {
    os << format_number(s.t) << ',' << format_number(s.distance) << ','
       << format_number(s.distance > 0.0 ? std::log(s.distance) : -INFINITY) << ',' << format_number(s.bound_rhs)
       << '\n';
  }
}

void write_decay_json(std::ostream& os, const DecayFit& fit, const OutputMeta& meta) {
  ordered j;
  j["config_hash"] = meta.config_hash;
  j["seed"] = meta.seed;
  j["status"] = fit.status == FitStatus::Fitted ? "fitted" : "at_floor";
  j["window"] = {fit.window_lo, fit.window_hi};
  j["slope"] = num(fit.slope);
  j["intercept"] = num(fit.intercept);
  j["r_squared"] = num(fit.r_squared);
  j["floor"] = fit.floor;
  j["fit_sample_count"] = fit.fit_samples.size();
  j["rho"] = opt_num(fit.rho);
  j["theoretical_exponent"] = opt_num(fit.theoretical_exponent);
  j["certificate"] = fit.certified ? "certified" : "no certificate";
  j["prefactor"] = fit.prefactor;
  j["prefactor_sup"] = fit.prefactor_sup;
  j["bound_holds"] = fit.bound_holds;
  j["bound_sup_holds"] = fit.bound_sup_holds;
  j["slope_ok"] = fit.slope_ok;
  j["passed"] = fit.passed();
  j["periodic_iterations"] = fit.periodic_report.iterations;
  os << j.dump(2) << '\n';
}

void write_hypotheses_json(std::ostream& os, const HypothesisReport& rep, const OutputMeta& meta) {
  ordered j;
  j["config_hash"] = meta.config_hash;
  j["seed"] = meta.seed;
  j["lambda1"] = rep.lambda1;
  j["H1"] = condition_json(rep.h1);
  j["H2"] = condition_json(rep.h2);
  j["H3"] = condition_json(rep.h3);
  j["H2prime"] = condition_json(rep.h2prime);
  j["rho"] = opt_num(rep.rho);
  j["complete"] = rep.complete();
  j["warnings"] = rep.warnings;
  os << j.dump(2) << '\n';
}

}  // namespace efk
