#include "efk/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "efk/errors.hpp"

namespace efk {

namespace {

// Lagrange basis ℓ_j(ξ) on `nodes`, evaluated directly (q is small).
double lagrange(std::span<const double> nodes, std::size_t j, double xi) {
  double v = 1.0;
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    if (m == j) continue;
    v *= (xi - nodes[m]) / (nodes[j] - nodes[m]);
  }
  return v;
}

}  // namespace

GaussLegendreRule gauss_legendre(std::size_t order) {
  if (order == 0) throw ConfigError("gauss_legendre: order must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const auto n = static_cast<double>(order);
  for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const auto kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

PanelGrid::PanelGrid(std::size_t panels, std::size_t order, double a, double b)
    : panels_(panels), order_(order), width_(0.0), rule_() {
  if (panels == 0 || order < 2) throw ConfigError("PanelGrid: need at least one panel of order >= 2");
  if (!(b > a)) throw ConfigError("PanelGrid: empty interval");
  rule_ = gauss_legendre(order);
  width_ = (b - a) / static_cast<double>(panels);
  x_.resize(panels * order);
  w_.resize(panels * order);
  for (std::size_t p = 0; p < panels; ++p) {
    const double left = a + width_ * static_cast<double>(p);
    for (std::size_t i = 0; i < order; ++i) {
      x_[p * order + i] = left + 0.5 * width_ * (rule_.nodes[i] + 1.0);
      w_[p * order + i] = 0.5 * width_ * rule_.weights[i];
    }
  }

  // Q(i,j) = ∫_{−1}^{ξ_i} ℓ_j, integrated with the same q-point rule mapped
  // to [−1, ξ_i] (exact for degree q−1).
  partial_.assign(order * order, 0.0);
  for (std::size_t i = 0; i < order; ++i) {
    const double half = 0.5 * (rule_.nodes[i] + 1.0);
    for (std::size_t j = 0; j < order; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < order; ++m) {
        const double xi = -1.0 + half * (rule_.nodes[m] + 1.0);
        s += rule_.weights[m] * lagrange(rule_.nodes, j, xi);
      }
      partial_[i * order + j] = half * s;
    }
  }
}

}  // namespace efk
