#include "efk/history.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "efk/errors.hpp"

namespace efk {

void HermiteSeries::push(double t, SpectralField value, SpectralField derivative) {
  if (!std::isfinite(t)) throw ConfigError("HermiteSeries: non-finite knot time");
  if (!times_.empty() && !(t > times_.back())) {
    throw ConfigError("HermiteSeries: knots must be strictly increasing");
  }
  if (!values_.empty()) require_same_modes(values_.front(), value, "HermiteSeries::push");
  require_same_modes(value, derivative, "HermiteSeries::push");
  times_.push_back(t);
  values_.push_back(std::move(value));
  derivs_.push_back(std::move(derivative));
}

SpectralField HermiteSeries::evaluate(double t, double slack) const {
  SpectralField out;
  evaluate_into(t, out, slack);
  return out;
}

void HermiteSeries::evaluate_into(double t, SpectralField& out, double slack) const {
  if (times_.empty()) throw HistoryUnderrun(t, 0.0, 0.0);
  const double lo = times_.front();
  const double hi = times_.back();
  if (t < lo - slack || t > hi + slack || std::isnan(t)) throw HistoryUnderrun(t, lo, hi);
  t = std::clamp(t, lo, hi);

  // First knot strictly greater than t; the interval is [i, i+1].
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i1 = static_cast<std::size_t>(it - times_.begin());
  if (i1 == 0) i1 = 1;
  if (i1 >= times_.size()) {
    out = values_.back();
    return;
  }
  const std::size_t i0 = i1 - 1;
  if (t == times_[i0]) {
    out = values_[i0];
    return;
  }
  const double h = times_[i1] - times_[i0];
  const double s = (t - times_[i0]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = (s3 - 2.0 * s2 + s) * h;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = (s3 - s2) * h;

  const auto& y0 = values_[i0];
  const auto& y1 = values_[i1];
  const auto& d0 = derivs_[i0];
  const auto& d1 = derivs_[i1];
  const std::size_t n = y0.modes();
  if (out.modes() != n) out = SpectralField(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = h00 * y0[k] + h10 * d0[k] + h01 * y1[k] + h11 * d1[k];
  }
}

InitialHistory InitialHistory::zero(std::size_t modes) { return constant(SpectralField(modes)); }

InitialHistory InitialHistory::constant(SpectralField value) {
  const std::size_t n = value.modes();
  if (n == 0) throw ConfigError("InitialHistory: empty field");
  return InitialHistory(n, [v = std::move(value)](double) { return v; });
}

InitialHistory InitialHistory::from_function(std::size_t modes, Function f) {
  if (modes == 0 || !f) throw ConfigError("InitialHistory: empty function or mode count");
  return InitialHistory(modes, [modes, f = std::move(f)](double t) {
    SpectralField v = f(t);
    if (v.modes() != modes) throw ShapeError("InitialHistory: function returned wrong mode count");
    return v;
  });
}

InitialHistory InitialHistory::from_mode_functions(std::vector<std::function<double(double)>> per_mode) {
  const std::size_t n = per_mode.size();
  if (n == 0) throw ConfigError("InitialHistory: no mode functions");
  return InitialHistory(n, [fs = std::move(per_mode)](double t) {
    SpectralField v(fs.size());
    for (std::size_t k = 0; k < fs.size(); ++k) v[k] = fs[k] ? fs[k](t) : 0.0;
    return v;
  });
}

InitialHistory InitialHistory::from_table(std::vector<double> times, std::vector<SpectralField> values) {
  if (times.size() != values.size() || times.size() < 2) {
    throw ConfigError("InitialHistory: table needs at least two (time, field) rows");
  }
  const std::size_t n = values.front().modes();
  const std::size_t m = times.size();
  std::vector<SpectralField> derivs(m, SpectralField(n));
  for (std::size_t i = 0; i < m; ++i) require_same_modes(values.front(), values[i], "InitialHistory::from_table");

  // Three-point derivative through (i−1, i, i+1) on a nonuniform grid,
  // evaluated at the requested node.
  auto three_point = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t at, SpectralField& d) {
    const double ta = times[a], tb = times[b], tc = times[c], t = times[at];
    const double wa = ((t - tb) + (t - tc)) / ((ta - tb) * (ta - tc));
    const double wb = ((t - ta) + (t - tc)) / ((tb - ta) * (tb - tc));
    const double wc = ((t - ta) + (t - tb)) / ((tc - ta) * (tc - tb));
    for (std::size_t k = 0; k < n; ++k) d[k] = wa * values[a][k] + wb * values[b][k] + wc * values[c][k];
  };
  if (m == 2) {
    const double dt = times[1] - times[0];
    for (std::size_t k = 0; k < n; ++k) derivs[0][k] = derivs[1][k] = (values[1][k] - values[0][k]) / dt;
  } else {
    three_point(0, 1, 2, 0, derivs[0]);
    for (std::size_t i = 1; i + 1 < m; ++i) three_point(i - 1, i, i + 1, i, derivs[i]);
    three_point(m - 3, m - 2, m - 1, m - 1, derivs[m - 1]);
  }
  auto series = std::make_shared<HermiteSeries>();
  for (std::size_t i = 0; i < m; ++i) series->push(times[i], std::move(values[i]), std::move(derivs[i]));
  return InitialHistory(n, [series](double t) { return series->evaluate(t); });
}

Trajectory::Trajectory(InitialHistory kappa, double max_delay, HermiteSeries solution)
    : kappa_(std::move(kappa)), r_(max_delay), solution_(std::move(solution)) {}

SpectralField Trajectory::at(double t) const {
  const double hi = solution_.empty() ? 0.0 : solution_.back_time();
  const double tol = 1e-12 * std::max(1.0, std::abs(hi));
  if (t < -r_ - tol || t > hi + tol || std::isnan(t)) throw HistoryUnderrun(t, -r_, hi);
  if (t < 0.0 || solution_.empty()) return kappa_(std::max(t, -r_));
  return solution_.evaluate(t, tol);
}

HistoryBuffer::HistoryBuffer(InitialHistory kappa, double max_delay)
    : kappa_(std::move(kappa)), r_(max_delay) {
  if (!(max_delay > 0.0)) throw ConfigError("HistoryBuffer: max delay must be positive");
}

void HistoryBuffer::push(double t, SpectralField value, SpectralField derivative) {
  if (value.modes() != kappa_.modes()) throw ShapeError("HistoryBuffer::push: mode count mismatch");
  solution_.push(t, std::move(value), std::move(derivative));
}

double HistoryBuffer::tolerance() const noexcept { return 1e-12 * std::max(1.0, std::abs(now())); }

SpectralField HistoryBuffer::lookup(double t) const {
  const double tol = tolerance();
  const double hi = now();
  const double lo = hi - r_;
  if (t < lo - tol || t > hi + tol || std::isnan(t)) throw HistoryUnderrun(t, lo, hi);
  if (t < 0.0 || solution_.empty()) return kappa_(std::max(t, -r_));
  return solution_.evaluate(t, tol);
}

Trajectory HistoryBuffer::release() && {
  return Trajectory(std::move(kappa_), r_, std::move(solution_));
}

}  // namespace efk
