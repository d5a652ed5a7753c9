// quadrature.hpp
// Gauss–Legendre rules and a composite panel grid on [0,1].

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace efk {

/// q-point Gauss–Legendre rule on [−1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(std::size_t order);

/// Uniform panels on [a, b], each carrying a q-point Gauss–Legendre rule.
///
/// Besides the usual weights the grid exposes the partial-panel integration
/// matrix Q with Q(i, j) = ∫_{−1}^{ξ_i} ℓ_j(ξ) dξ for the Lagrange basis ℓ_j
/// on the reference nodes. Integrals from a panel's left edge up to one of
/// its own nodes are then exact for degree q−1 interpolants.
class PanelGrid {
 public:
  PanelGrid(std::size_t panels, std::size_t order, double a = 0.0, double b = 1.0);

  std::size_t panels() const noexcept { return panels_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t size() const noexcept { return x_.size(); }
  double panel_width() const noexcept { return width_; }

  std::span<const double> nodes() const noexcept { return x_; }
  std::span<const double> weights() const noexcept { return w_; }

  /// Reference rule weights (on [−1,1]).
  std::span<const double> reference_weights() const noexcept { return rule_.weights; }

  /// Row i of Q, reference scale (multiply by width/2 for physical panels).
  std::span<const double> partial_row(std::size_t i) const noexcept {
    return {&partial_[i * order_], order_};
  }

 private:
  std::size_t panels_;
  std::size_t order_;
  double width_;
  GaussLegendreRule rule_;
  std::vector<double> x_;
  std::vector<double> w_;
  std::vector<double> partial_;
};

}  // namespace efk
