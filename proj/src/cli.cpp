#include "efk/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

#include <json.hpp>

#include "efk/config.hpp"
#include "efk/delay_integrator.hpp"
#include "efk/errors.hpp"
#include "efk/hypotheses.hpp"
#include "efk/io.hpp"
#include "efk/periodic_solver.hpp"
#include "efk/stability.hpp"

namespace efk {

namespace {

namespace fs = std::filesystem;

struct Context {
  const CommandOptions& opt;
  RunConfig cfg;
  OutputMeta meta;
  std::ostream& out;
  std::ostream& err;

  std::ofstream open(const std::string& name) const {
    std::ofstream f(fs::path(opt.out_dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(opt.out_dir) / name).string());
    return f;
  }
  bool certificate() const { return opt.certificate || cfg.certificate; }
};

SpectralField leading(std::size_t modes, const std::vector<double>& coeffs) {
  SpectralField v(modes);
  for (std::size_t k = 0; k < coeffs.size(); ++k) v[k] = coeffs[k];
  return v;
}

PicardOptions picard_options(const Context& c) {
  PicardOptions p;
  p.certificate = c.certificate();
  p.anderson_depth = c.cfg.anderson_depth;
  p.workers = c.opt.jobs;
  p.seed = c.cfg.seed;
  p.lipschitz_samples = c.cfg.hypothesis_samples;
  return p;
}

// Builds κ; periodic_plus needs ū, which is computed here and returned.
InitialHistory build_history(const Context& c, std::optional<PeriodicTrajectory>& ubar) {
  const auto& h = c.cfg.experiment.history;
  const std::size_t n = c.cfg.problem.modes();
  switch (h.kind) {
    case HistoryConfig::Kind::Zero:
      return InitialHistory::zero(n);
    case HistoryConfig::Kind::Constant:
      return InitialHistory::constant(leading(n, h.coeffs));
    case HistoryConfig::Kind::PeriodicPlus:
      if (!ubar) ubar = picard_iterate(c.cfg.problem, picard_options(c)).trajectory;
      return periodic_plus(*ubar, leading(n, h.coeffs));
    case HistoryConfig::Kind::Table: {
      std::vector<SpectralField> rows;
      for (const auto& r : h.values) rows.push_back(leading(n, r));
      const double r = c.cfg.problem.delays.max_delay();
      if (h.times.front() > -r + 1e-12 * r || h.times.back() < 0.0) {
        throw ConfigError("field 'experiment.history.times': table must cover [-r, 0]");
      }
      return InitialHistory::from_table(h.times, rows);
    }
  }
  throw ConfigError("unsupported history type");
}

std::string fmt(double v) { return format_number(v); }

int cmd_check(Context& c) {
  HypothesisOptions ho;
  ho.box = c.cfg.hypothesis_box;
  ho.samples = c.cfg.hypothesis_samples;
  ho.seed = c.cfg.seed;
  const auto rep = check_hypotheses(c.cfg.problem, ho);
  {
    auto f = c.open("hypotheses.json");
    write_hypotheses_json(f, rep, c.meta);
  }
  c.out << "lambda1 " << fmt(rep.lambda1) << '\n';
  auto line = [&](const char* name, const ConditionResult& r) {
    c.out << name << ' ' << to_string(r.status);
    if (r.margin) c.out << " margin " << fmt(*r.margin);
    if (r.sampling) c.out << " samples " << r.sampling->samples << " violations " << r.sampling->violations;
    c.out << '\n';
  };
  line("H1", rep.h1);
  line("H2", rep.h2);
  line("H3", rep.h3);
  line("H2'", rep.h2prime);
  c.out << "rho " << (rep.rho ? fmt(*rep.rho) : std::string("unknown")) << '\n';
  for (const auto& w : rep.warnings) c.err << "warning: " << w << '\n';
  if (!rep.all_known_hold()) return kExitHypothesis;
  if (c.certificate() && !rep.complete()) {
    c.err << "certificate mode: every condition must be decided\n";
    return kExitHypothesis;
  }
  return kExitOk;
}

int cmd_solve_ivp(Context& c) {
  const auto& p = c.cfg.problem;
  IvpOptions io;
  io.certificate = c.certificate();
  if (io.certificate) {
    HypothesisOptions ho;
    ho.box = c.cfg.hypothesis_box;
    ho.samples = c.cfg.hypothesis_samples;
    ho.seed = c.cfg.seed;
    const auto rep = check_hypotheses(p, ho);
    if (!rep.h3.holds()) {
      c.err << "certificate mode: H3 is " << to_string(rep.h3.status) << '\n';
      return kExitHypothesis;
    }
  }
  std::optional<PeriodicTrajectory> ubar;
  const auto kappa = build_history(c, ubar);
  const auto res = solve_ivp(p, kappa, c.cfg.experiment.horizon, io);
  std::vector<double> residuals;
  double worst = 0.0;
  if (c.opt.residual_check) {
    MildResidualChecker checker(p, res.trajectory, res.step);
    residuals = checker.knot_residuals();
    for (double r : residuals) worst = std::max(worst, r);
  }
  {
    auto f = c.open("trajectory.csv");
    write_trajectory_csv(f, res.trajectory, c.cfg.leading_modes, c.meta, residuals);
  }
  {
    auto f = c.open("trajectory.ndjson");
    write_trajectory_ndjson(f, res.trajectory, c.meta);
  }
  const auto& sol = res.trajectory.solution();
  c.out << "steps " << res.steps << " h " << fmt(res.step) << " final_norm " << fmt(sol.value(sol.size() - 1).norm())
        << '\n';
  if (c.opt.residual_check) {
    c.out << "max_mild_residual " << fmt(worst) << '\n';
    if (!(worst < p.tolerances.residual_tol)) {
      c.err << "mild residual " << fmt(worst) << " exceeds " << fmt(p.tolerances.residual_tol) << '\n';
      return kExitInternal;
    }
  }
  return kExitOk;
}

int cmd_find_periodic(Context& c) {
  try {
    auto res = picard_iterate(c.cfg.problem, picard_options(c));
    {
      auto f = c.open("periodic.csv");
      write_periodic_csv(f, res.trajectory, c.cfg.leading_modes, c.meta);
    }
    {
      auto f = c.open("convergence.json");
      write_convergence_json(f, res.report, c.meta);
    }
    const auto& r = res.report;
    c.out << "iterations " << r.iterations << " last_residual " << fmt(r.residuals.back()) << " sup_norm "
          << fmt(res.trajectory.sup_norm()) << '\n';
    if (r.theoretical_factor) c.out << "theoretical_factor " << fmt(*r.theoretical_factor) << '\n';
    if (r.empirical_factor) c.out << "empirical_factor " << fmt(*r.empirical_factor) << '\n';
    if (r.certificate && !r.factor_consistent) {
      c.err << "certificate mode: empirical factor exceeds the theoretical factor + 0.05\n";
      return kExitHypothesis;
    }
    return kExitOk;
  } catch (const ConvergenceFailure& e) {
    auto f = c.open("convergence.json");
    write_convergence_json(f, e.report(), c.meta);
    c.err << e.what() << '\n';
    return kExitConvergence;
  }
}

int cmd_verify_stability(Context& c) {
  const auto& p = c.cfg.problem;
  if (c.certificate()) {
    const auto& b = p.nonlinearity.lipschitz_betas();
    if (!b) {
      c.err << "certificate mode: betas are required\n";
      return kExitHypothesis;
    }
    const double rho = decay_exponent(p);
    if (!(rho > 0.0)) {
      c.err << "certificate mode: H2' fails (rho = " << fmt(rho) << ")\n";
      return kExitHypothesis;
    }
  }
  std::optional<PeriodicTrajectory> ubar;
  ConvergenceReport periodic_report;
  try {
    auto res = picard_iterate(p, picard_options(c));
    ubar = std::move(res.trajectory);
    periodic_report = res.report;
  } catch (const ConvergenceFailure& e) {
    c.err << e.what() << '\n';
    return kExitConvergence;
  }
  const auto kappa = build_history(c, ubar);
  AttractionOptions ao;
  ao.horizon = c.cfg.experiment.horizon;
  ao.fit_window = c.cfg.experiment.fit_window;
  ao.periodic = ubar;
  ao.certificate = c.certificate();
  ao.throw_on_violation = false;
  ao.workers = c.opt.jobs;
  ao.seed = c.cfg.seed;
  ao.lipschitz_samples = c.cfg.hypothesis_samples;
  auto fit = attraction_experiment(p, kappa, ao);
  fit.periodic_report = periodic_report;
  {
    auto f = c.open("decay.csv");
    write_decay_csv(f, fit, c.meta);
  }
  {
    auto f = c.open("decay.json");
    write_decay_json(f, fit, c.meta);
  }
  c.out << "status " << (fit.status == FitStatus::Fitted ? "fitted" : "at floor");
  if (fit.status == FitStatus::Fitted) c.out << " slope " << fmt(fit.slope) << " r_squared " << fmt(fit.r_squared);
  c.out << '\n';
  c.out << "rho " << (fit.rho ? fmt(*fit.rho) : std::string("unknown")) << ' '
        << (fit.certified ? "certified" : "no certificate") << '\n';
  c.out << "bound " << (fit.bound_holds ? "holds" : "violated") << " fallback_bound "
        << (fit.bound_sup_holds ? "holds" : "violated") << '\n';
  if (!fit.passed()) {
    c.err << (fit.slope_ok ? "distance exceeded both envelopes\n" : "fitted slope above -rho(1 - slack)\n");
    return kExitHypothesis;
  }
  return kExitOk;
}

int cmd_selftest(Context& c, std::uint64_t seed) {
  const auto results = run_selftest(c.opt.inject_fault, seed);
  bool ok = true;
  nlohmann::ordered_json j;
  j["config_hash"] = c.meta.config_hash;
  j["seed"] = c.meta.seed;
  j["fault"] = c.opt.inject_fault ? nlohmann::ordered_json(*c.opt.inject_fault) : nlohmann::ordered_json(nullptr);
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    c.out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    j["checks"].push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    ok = ok && r.passed;
  }
  j["passed"] = ok;
  auto f = c.open("selftest.json");
  f << j.dump(2) << '\n';
  return ok ? kExitOk : kExitInternal;
}

}  // namespace

int run_command(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> commands{"check", "solve-ivp", "find-periodic", "verify-stability",
                                                 "selftest"};
  if (std::find(commands.begin(), commands.end(), opt.command) == commands.end()) {
    err << "unknown command '" << opt.command << "'\n";
    return kExitConfig;
  }
  if (opt.jobs == 0) {
    err << "--jobs must be at least 1\n";
    return kExitConfig;
  }
  if (opt.inject_fault && (opt.command != "selftest" ||
                           (*opt.inject_fault != "g2-typo" && *opt.inject_fault != "step-overrun"))) {
    err << "--inject-fault takes g2-typo or step-overrun and applies to selftest only\n";
    return kExitConfig;
  }
  try {
    std::optional<RunConfig> cfg;
    if (opt.config_path) {
      cfg = load_config(*opt.config_path);
    } else if (opt.command != "selftest") {
      err << "--config is required for " << opt.command << '\n';
      return kExitConfig;
    }
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) {
      err << "cannot create output directory '" << opt.out_dir << "': " << ec.message() << '\n';
      return kExitConfig;
    }
    if (!cfg) {
      // Selftest without a config: fixed placeholder problem for the metadata only.
      cfg = parse_config(R"({"gamma": 1, "omega": 1, "delays": [0.01]})");
    }
    Context c{opt, std::move(*cfg), {}, out, err};
    c.meta = OutputMeta{c.cfg.hash, c.cfg.seed};
    if (opt.command == "check") return cmd_check(c);
    if (opt.command == "solve-ivp") return cmd_solve_ivp(c);
    if (opt.command == "find-periodic") return cmd_find_periodic(c);
    if (opt.command == "verify-stability") return cmd_verify_stability(c);
    return cmd_selftest(c, c.cfg.seed);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CertificateRefused& e) {
    err << "certificate refused: " << e.what() << '\n';
    return kExitHypothesis;
  } catch (const ConvergenceFailure& e) {
    err << e.what() << '\n';
    return kExitConvergence;
  } catch (const DivergenceError& e) {
    err << "divergence at t=" << format_number(e.time()) << " (max |a_k| = " << format_number(e.max_coefficient())
        << ")\n";
    return kExitConvergence;
  } catch (const HistoryUnderrun& e) {
    err << "history underrun: query " << format_number(e.query()) << " outside [" << format_number(e.window_lo())
        << ", " << format_number(e.window_hi()) << "]\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace efk
