#include "efk/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "efk/errors.hpp"

namespace efk {

ForcingSpec ForcingSpec::periodic(double period, std::vector<PeriodicTerm> terms) {
  if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("forcing period must be positive");
  ForcingSpec g;
  g.period_ = period;
  for (const auto& t : terms) {
    if (t.mode < 1) throw ConfigError("forcing term: spatial mode must be >= 1");
    if (!std::isfinite(t.amplitude) || !std::isfinite(t.phase)) throw ConfigError("forcing term: non-finite value");
    g.terms_.push_back({t.amplitude, t.shape,
                        2.0 * std::numbers::pi * static_cast<double>(t.harmonic) / period, t.phase,
                        t.mode});
  }
  return g;
}

ForcingSpec ForcingSpec::aperiodic(std::vector<ForcingTerm> terms) {
  for (const auto& t : terms) {
    if (t.mode < 1) throw ConfigError("forcing term: spatial mode must be >= 1");
  }
  ForcingSpec g;
  g.terms_ = std::move(terms);
  return g;
}

ForcingSpec ForcingSpec::tabulated(ForcingTable table) {
  if (table.samples.empty() || !(table.dt > 0.0)) throw ConfigError("forcing table: empty or bad dt");
  const std::size_t width = table.samples.front().size();
  for (const auto& row : table.samples) {
    if (row.size() != width) throw ConfigError("forcing table: ragged rows");
  }
  ForcingSpec g;
  if (table.periodic) g.period_ = table.dt * static_cast<double>(table.samples.size());
  g.table_ = std::move(table);
  return g;
}

bool ForcingSpec::is_zero() const noexcept {
  if (table_) {
    for (const auto& row : table_->samples)
      for (double v : row)
        if (v != 0.0) return false;
    return true;
  }
  return std::all_of(terms_.begin(), terms_.end(), [](const ForcingTerm& t) { return t.amplitude == 0.0; });
}

double ForcingSpec::temporal(std::size_t i, double t) const {
  const auto& term = terms_[i];
  const double arg = term.angular_frequency * t + term.phase;
  return term.amplitude * (term.shape == Temporal::Cos ? std::cos(arg) : std::sin(arg));
}

void ForcingSpec::table_row(double t, std::vector<double>& out) const {
  const auto& tb = *table_;
  const std::size_t count = tb.samples.size();
  double s = (t - tb.start) / tb.dt;
  if (tb.periodic) {
    s = std::fmod(s, static_cast<double>(count));
    if (s < 0.0) s += static_cast<double>(count);
  } else {
    s = std::clamp(s, 0.0, static_cast<double>(count - 1));
  }
  auto i0 = static_cast<std::size_t>(std::floor(s));
  if (i0 >= count) i0 = count - 1;
  const double frac = s - static_cast<double>(i0);
  const std::size_t i1 = tb.periodic ? (i0 + 1) % count : std::min(i0 + 1, count - 1);
  const auto& a = tb.samples[i0];
  const auto& b = tb.samples[i1];
  out.resize(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = (1.0 - frac) * a[j] + frac * b[j];
}

double ForcingSpec::value(double t, double x) const {
  if (table_) {
    std::vector<double> row;
    table_row(t, row);
    // Nodes j/(M+1); boundary values are zero.
    const double m1 = static_cast<double>(row.size() + 1);
    const double pos = std::clamp(x, 0.0, 1.0) * m1;
    const auto j = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(j);
    auto at = [&](std::size_t idx) { return (idx == 0 || idx > row.size()) ? 0.0 : row[idx - 1]; };
    return (1.0 - frac) * at(j) + frac * at(j + 1);
  }
  double g = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    g += temporal(i, t) * std::sin(std::numbers::pi * static_cast<double>(terms_[i].mode) * x);
  }
  return g;
}

void ForcingSpec::sample(double t, std::span<const double> nodes, std::span<double> out) const {
  if (out.size() != nodes.size()) throw ShapeError("ForcingSpec::sample: buffer size mismatch");
  if (table_) {
    std::vector<double> row;
    table_row(t, row);
    if (row.size() != nodes.size()) {
      throw ShapeError("ForcingSpec::sample: table width does not match collocation nodes");
    }
    std::copy(row.begin(), row.end(), out.begin());
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const double c = temporal(i, t);
    if (c == 0.0) continue;
    const double kpi = std::numbers::pi * static_cast<double>(terms_[i].mode);
    for (std::size_t j = 0; j < nodes.size(); ++j) out[j] += c * std::sin(kpi * nodes[j]);
  }
}

double ForcingSpec::sup_bound() const {
  if (table_) {
    double m = 0.0;
    for (const auto& row : table_->samples)
      for (double v : row) m = std::max(m, std::abs(v));
    return m;
  }
  double m = 0.0;
  for (const auto& t : terms_) m += std::abs(t.amplitude);
  return m;
}

}  // namespace efk
