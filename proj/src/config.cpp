#include "efk/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "efk/errors.hpp"

namespace efk {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("field '" + field + "': " + what);
}

void reject_unknown(const json& obj, const std::string& where, std::set<std::string> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "must be finite");
  return v;
}

double positive(const json& j, const std::string& field) {
  const double v = number(j, field);
  if (!(v > 0.0)) fail(field, "must be positive");
  return v;
}

std::size_t count(const json& j, const std::string& field, bool allow_zero = false) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(field, "expected an integer");
  const auto v = j.get<long long>();
  if (v < 0 || (!allow_zero && v == 0)) fail(field, allow_zero ? "must be >= 0" : "must be >= 1");
  return static_cast<std::size_t>(v);
}

std::vector<double> numbers(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

ForcingSpec parse_forcing(const json& j, double omega) {
  if (j.is_array()) {
    std::vector<PeriodicTerm> terms;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string f = "forcing[" + std::to_string(i) + "]";
      const auto& t = j[i];
      if (!t.is_object()) fail(f, "expected an object");
      reject_unknown(t, f, {"c", "fn", "m", "phase", "j"});
      PeriodicTerm term;
      if (!find(t, "c")) fail(f + ".c", "required");
      term.amplitude = number(t["c"], f + ".c");
      const std::string fn = t.value("fn", "cos");
      if (fn == "cos") {
        term.shape = Temporal::Cos;
      } else if (fn == "sin") {
        term.shape = Temporal::Sin;
      } else {
        fail(f + ".fn", "expected \"cos\" or \"sin\"");
      }
      term.harmonic = find(t, "m") ? count(t["m"], f + ".m", true) : 0;
      term.phase = find(t, "phase") ? number(t["phase"], f + ".phase") : 0.0;
      term.mode = find(t, "j") ? count(t["j"], f + ".j") : 1;
      terms.push_back(term);
    }
    return ForcingSpec::periodic(omega, terms);
  }
  if (j.is_object()) {
    reject_unknown(j, "forcing", {"table"});
    const json* tj = find(j, "table");
    if (!tj || !tj->is_object()) fail("forcing.table", "expected an object");
    reject_unknown(*tj, "forcing.table", {"dt", "samples"});
    ForcingTable tab;
    if (!find(*tj, "dt")) fail("forcing.table.dt", "required");
    tab.dt = positive((*tj)["dt"], "forcing.table.dt");
    tab.periodic = true;
    const json* rows = find(*tj, "samples");
    if (!rows || !rows->is_array() || rows->empty()) fail("forcing.table.samples", "expected a non-empty array");
    for (std::size_t i = 0; i < rows->size(); ++i) {
      tab.samples.push_back(numbers((*rows)[i], "forcing.table.samples[" + std::to_string(i) + "]"));
    }
    const double period = tab.dt * static_cast<double>(tab.samples.size());
    if (std::abs(period - omega) > 1e-9 * omega) fail("forcing.table", "rows * dt must equal omega");
    try {
      return ForcingSpec::tabulated(std::move(tab));
    } catch (const ConfigError& e) {
      fail("forcing.table", e.what());
    }
  }
  fail("forcing", "expected an array of terms or a table object");
}

HistoryConfig parse_history(const json& j) {
  HistoryConfig h;
  if (!j.is_object()) fail("experiment.history", "expected an object");
  reject_unknown(j, "experiment.history", {"type", "coeffs", "times", "values"});
  const std::string type = j.value("type", "zero");
  if (type == "zero") {
    h.kind = HistoryConfig::Kind::Zero;
  } else if (type == "constant" || type == "periodic_plus") {
    h.kind = type == "constant" ? HistoryConfig::Kind::Constant : HistoryConfig::Kind::PeriodicPlus;
    const json* c = find(j, "coeffs");
    h.coeffs = c ? numbers(*c, "experiment.history.coeffs") : std::vector<double>{};
  } else if (type == "table") {
    h.kind = HistoryConfig::Kind::Table;
    const json* t = find(j, "times");
    const json* v = find(j, "values");
    if (!t || !v) fail("experiment.history", "table needs times and values");
    h.times = numbers(*t, "experiment.history.times");
    if (!v->is_array() || v->size() != h.times.size()) {
      fail("experiment.history.values", "one row per time expected");
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      h.values.push_back(numbers((*v)[i], "experiment.history.values[" + std::to_string(i) + "]"));
    }
  } else {
    fail("experiment.history.type", "expected zero, constant, periodic_plus or table");
  }
  return h;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(j, "", {"gamma", "omega", "delays", "betas", "K", "nonlinearity", "forcing", "discretization",
                         "tolerances", "experiment", "seed", "certificate_mode", "leading_modes", "acceleration",
                         "hypotheses", "verbosity", "description"});

  for (const char* key : {"gamma", "omega", "delays"}) {
    if (!find(j, key)) fail(key, "required");
  }
  const double gamma = positive(j["gamma"], "gamma");
  const double omega = positive(j["omega"], "omega");
  std::vector<double> taus = numbers(j["delays"], "delays");
  if (taus.empty()) fail("delays", "at least one delay is required");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] > 0.0)) fail("delays[" + std::to_string(i) + "]", "must be positive");
  }
  const std::size_t n = taus.size();

  std::string expr = "zero";
  if (const json* nl = find(j, "nonlinearity")) {
    if (!nl->is_string()) fail("nonlinearity", "expected a string expression");
    expr = nl->get<std::string>();
  }
  std::optional<NonlinearitySpec> nls;
  try {
    nls = NonlinearitySpec::parse(expr, n);
  } catch (const ConfigError& e) {
    fail("nonlinearity", e.what());
  }
  if (const json* b = find(j, "betas")) {
    auto betas = numbers(*b, "betas");
    if (betas.size() != n) fail("betas", "expected one value per delay");
    for (double v : betas)
      if (v < 0.0) fail("betas", "values must be >= 0");
    nls->set_lipschitz_betas(betas);
    if (const json* k = find(j, "K")) {
      const double K = number(*k, "K");
      if (K < 0.0) fail("K", "must be >= 0");
      nls->set_affine_bound({betas, K});
    }
  } else if (find(j, "K")) {
    fail("K", "requires betas");
  }

  ForcingSpec forcing = ForcingSpec::none();
  if (const json* f = find(j, "forcing")) forcing = parse_forcing(*f, omega);

  Discretization disc;
  if (const json* d = find(j, "discretization")) {
    if (!d->is_object()) fail("discretization", "expected an object");
    reject_unknown(*d, "discretization", {"N", "M", "h"});
    if (const json* v = find(*d, "N")) disc.modes = count(*v, "discretization.N");
    if (const json* v = find(*d, "M")) disc.nodes = count(*v, "discretization.M");
    if (const json* v = find(*d, "h")) disc.step = positive(*v, "discretization.h");
  }
  Tolerances tol;
  if (const json* t = find(j, "tolerances")) {
    if (!t->is_object()) fail("tolerances", "expected an object");
    reject_unknown(*t, "tolerances", {"picard_tol", "max_iters", "residual_tol", "slope_slack", "bound_slack"});
    if (const json* v = find(*t, "picard_tol")) tol.picard_tol = positive(*v, "tolerances.picard_tol");
    if (const json* v = find(*t, "max_iters")) tol.max_iters = count(*v, "tolerances.max_iters");
    if (const json* v = find(*t, "residual_tol")) tol.residual_tol = positive(*v, "tolerances.residual_tol");
    if (const json* v = find(*t, "slope_slack")) tol.slope_slack = number(*v, "tolerances.slope_slack");
    if (const json* v = find(*t, "bound_slack")) tol.bound_slack = number(*v, "tolerances.bound_slack");
  }

  RunConfig cfg{.problem = ProblemSpec{gamma, omega, DelaySpec(taus), std::move(*nls), std::move(forcing), disc, tol}};
  if (disc.nodes != 0 && disc.nodes < disc.modes) fail("discretization.M", "must be >= N");
  try {
    cfg.problem.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("invalid problem: ") + e.what());
  }

  if (const json* e = find(j, "experiment")) {
    if (!e->is_object()) fail("experiment", "expected an object");
    reject_unknown(*e, "experiment", {"horizon", "history", "fit_window"});
    if (const json* v = find(*e, "horizon")) cfg.experiment.horizon = positive(*v, "experiment.horizon");
    if (const json* v = find(*e, "history")) cfg.experiment.history = parse_history(*v);
    if (const json* v = find(*e, "fit_window")) {
      auto w = numbers(*v, "experiment.fit_window");
      if (w.size() != 2 || !(w[1] > w[0]) || w[0] < 0.0) fail("experiment.fit_window", "expected [lo, hi], 0 <= lo < hi");
      cfg.experiment.fit_window = std::make_pair(w[0], w[1]);
    }
  }
  const std::size_t modes = cfg.problem.modes();
  if (cfg.experiment.history.coeffs.size() > modes) fail("experiment.history.coeffs", "more entries than N");
  for (const auto& row : cfg.experiment.history.values) {
    if (row.size() > modes) fail("experiment.history.values", "more entries than N");
  }

  if (const json* s = find(j, "seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0)) {
      fail("seed", "expected a nonnegative integer");
    }
    cfg.seed = s->get<std::uint64_t>();
  }
  if (const json* c = find(j, "certificate_mode")) {
    if (!c->is_boolean()) fail("certificate_mode", "expected true or false");
    cfg.certificate = c->get<bool>();
  }
  if (const json* l = find(j, "leading_modes")) cfg.leading_modes = count(*l, "leading_modes");
  if (const json* a = find(j, "acceleration")) {
    if (!a->is_object()) fail("acceleration", "expected an object");
    reject_unknown(*a, "acceleration", {"anderson_depth"});
    if (const json* d = find(*a, "anderson_depth")) cfg.anderson_depth = count(*d, "acceleration.anderson_depth", true);
  }
  if (const json* h = find(j, "hypotheses")) {
    if (!h->is_object()) fail("hypotheses", "expected an object");
    reject_unknown(*h, "hypotheses", {"box", "samples"});
    if (const json* v = find(*h, "box")) cfg.hypothesis_box = positive(*v, "hypotheses.box");
    if (const json* v = find(*h, "samples")) cfg.hypothesis_samples = count(*v, "hypotheses.samples");
  }
  if (const json* v = find(j, "verbosity")) cfg.verbosity = static_cast<int>(count(*v, "verbosity", true));
  if (const json* d = find(j, "description"); d && !d->is_string()) fail("description", "expected a string");

  cfg.hash = fnv1a_hex(j.dump());
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace efk
