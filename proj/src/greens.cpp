#include "efk/greens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "efk/errors.hpp"
#include "efk/spectrum.hpp"

namespace efk {

namespace {

// Separable Green's function G(x,y) = L(min) R(max) / c with R(x) = L(1−x).
// Tables hold L and R at the grid nodes.
struct KernelTable {
  std::vector<double> left;
  std::vector<double> right;
  double inv_c = 0.0;
};

KernelTable tabulate(const PanelGrid& grid, double s, double c, bool hyperbolic) {
  KernelTable t;
  auto x = grid.nodes();
  t.left.resize(x.size());
  t.right.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    t.left[j] = hyperbolic ? std::sinh(s * x[j]) : std::sin(s * x[j]);
    t.right[j] = hyperbolic ? std::sinh(s * (1.0 - x[j])) : std::sin(s * (1.0 - x[j]));
  }
  t.inv_c = 1.0 / c;
  return t;
}

// out_i = ∫₀¹ G(x_i, z) f(z) dz at every grid node x_i.
//
// Off-panel contributions use the regular weights. Within the node's own
// panel the integral splits at z = x_i into a left piece (z ≤ x_i, kernel
// branch L(z)R(x_i)) and a right piece (z ≥ x_i, branch L(x_i)R(z)); each
// branch is smooth across the whole panel, so interpolating it on the
// panel nodes and integrating with the partial matrix is spectrally exact.
void integrate_kernel(const PanelGrid& grid, const KernelTable& k, std::span<const double> f,
                      std::span<double> out) {
  const std::size_t n = grid.size();
  const std::size_t q = grid.order();
  auto w = grid.weights();
  auto ref_w = grid.reference_weights();
  const double half = 0.5 * grid.panel_width();

  // Off-diagonal panels only need prefix/suffix sums of L f and R f.
  std::vector<double> lf(n), rf(n);
  for (std::size_t j = 0; j < n; ++j) {
    lf[j] = w[j] * k.left[j] * f[j];
    rf[j] = w[j] * k.right[j] * f[j];
  }
  const std::size_t panels = grid.panels();
  std::vector<double> left_before(panels + 1, 0.0);   // Σ over panels < p of L f
  std::vector<double> right_after(panels + 1, 0.0);   // Σ over panels ≥ p of R f
  for (std::size_t p = 0; p < panels; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < q; ++i) s += lf[p * q + i];
    left_before[p + 1] = left_before[p] + s;
  }
  for (std::size_t p = panels; p-- > 0;) {
    double s = 0.0;
    for (std::size_t i = 0; i < q; ++i) s += rf[p * q + i];
    right_after[p] = right_after[p + 1] + s;
  }

  for (std::size_t p = 0; p < panels; ++p) {
    const std::size_t base = p * q;
    for (std::size_t i = 0; i < q; ++i) {
      const std::size_t xi = base + i;
      auto row = grid.partial_row(i);
      double left_part = 0.0;   // ∫_{panel start}^{x_i} L(z) f(z) dz
      double right_part = 0.0;  // ∫_{x_i}^{panel end} R(z) f(z) dz
      for (std::size_t j = 0; j < q; ++j) {
        const std::size_t zj = base + j;
        left_part += row[j] * k.left[zj] * f[zj];
        right_part += (ref_w[j] - row[j]) * k.right[zj] * f[zj];
      }
      left_part *= half;
      right_part *= half;
      const double below = left_before[p] + left_part;       // ∫₀^{x_i} L f
      const double above = right_after[p + 1] + right_part;  // ∫_{x_i}^1 R f
      out[xi] = k.inv_c * (k.right[xi] * below + k.left[xi] * above);
    }
  }
}

}  // namespace

GreensKernelPair GreensKernelPair::for_gamma(double gamma) {
  const auto roots = factorization_roots(gamma);
  return GreensKernelPair(roots.mu1, roots.mu2);
}

GreensKernelPair::GreensKernelPair(double hyperbolic_root, double trig_root)
    : mu1_(hyperbolic_root), mu2_(trig_root) {
  if (!(hyperbolic_root > 0.0) || !std::isfinite(hyperbolic_root)) {
    throw DomainError("GreensKernelPair: hyperbolic root must be positive");
  }
  const double pi2 = std::numbers::pi * std::numbers::pi;
  if (!(std::abs(trig_root) > 0.0) || !(std::abs(trig_root) < pi2)) {
    throw DomainError("GreensKernelPair: |trigonometric root| must lie in (0, pi^2)");
  }
  s1_ = std::sqrt(mu1_);
  s2_ = std::sqrt(std::abs(mu2_));
  c1_ = s1_ * std::sinh(s1_);
  c2_ = s2_ * std::sin(s2_);
}

double GreensKernelPair::g1(double x, double y) const noexcept {
  const double lo = std::min(x, y);
  const double hi = std::max(x, y);
  return std::sinh(s1_ * lo) * std::sinh(s1_ * (1.0 - hi)) / c1_;
}

double GreensKernelPair::g2(double x, double y) const noexcept {
  const double lo = std::min(x, y);
  const double hi = std::max(x, y);
  return std::sin(s2_ * lo) * std::sin(s2_ * (1.0 - hi)) / c2_;
}

std::size_t greens_minimum_nodes(std::size_t modes) { return std::max<std::size_t>(64, 2 * modes); }

std::vector<double> greens_apply(const GreensKernelPair& pair, double gamma, const PanelGrid& grid,
                                 std::span<const double> phi_samples) {
  if (!(gamma > 0.0)) throw DomainError("greens_apply: gamma must be positive");
  if (phi_samples.size() != grid.size()) {
    throw ShapeError("greens_apply: expected " + std::to_string(grid.size()) + " samples, got " +
                     std::to_string(phi_samples.size()));
  }
  const double s1 = std::sqrt(pair.mu1());
  const double s2 = std::sqrt(std::abs(pair.mu2()));
  const auto k1 = tabulate(grid, s1, s1 * std::sinh(s1), true);
  const auto k2 = tabulate(grid, s2, s2 * std::sin(s2), false);

  // Inner pass: w = G₂ φ. Outer pass: u = γ⁻¹ G₁ w.
  std::vector<double> w(grid.size());
  std::vector<double> u(grid.size());
  integrate_kernel(grid, k2, phi_samples, w);
  integrate_kernel(grid, k1, w, u);
  for (double& v : u) v /= gamma;
  return u;
}

SpectralField project_to_sine(const PanelGrid& grid, std::span<const double> values,
                              std::size_t modes) {
  if (values.size() != grid.size()) throw ShapeError("project_to_sine: sample count mismatch");
  auto x = grid.nodes();
  auto w = grid.weights();
  SpectralField out(modes);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double wv = std::numbers::sqrt2 * w[j] * values[j];
    if (wv == 0.0) continue;
    // sin(kπx) by the Chebyshev-style recurrence sin((k+1)θ) = 2cosθ sin(kθ) − sin((k−1)θ).
    const double theta = std::numbers::pi * x[j];
    const double two_cos = 2.0 * std::cos(theta);
    double s_prev = 0.0;
    double s_cur = std::sin(theta);
    for (std::size_t k = 0; k < modes; ++k) {
      out[k] += wv * s_cur;
      const double s_next = two_cos * s_cur - s_prev;
      s_prev = s_cur;
      s_cur = s_next;
    }
  }
  return out;
}

SpectralField greens_solve(const GreensKernelPair& pair, double gamma, const PanelGrid& grid,
                           std::span<const double> phi_samples, std::size_t modes) {
  if (modes == 0) throw ConfigError("greens_solve: mode count must be positive");
  const std::size_t minimum = greens_minimum_nodes(modes);
  if (grid.size() < minimum) {
    throw ConfigError("greens_solve: quadrature resolution " + std::to_string(grid.size()) +
                      " below minimum " + std::to_string(minimum));
  }
  const auto u = greens_apply(pair, gamma, grid, phi_samples);
  return project_to_sine(grid, u, modes);
}

SpectralField greens_solve(const GreensKernelPair& pair, double gamma,
                           const std::function<double(double)>& phi, std::size_t modes,
                           GreensQuadrature quad) {
  if (quad.panels == 0 || quad.order < 2 || quad.nodes() < greens_minimum_nodes(modes)) {
    throw ConfigError("greens_solve: quadrature resolution " + std::to_string(quad.nodes()) +
                      " below minimum " + std::to_string(greens_minimum_nodes(modes)));
  }
  const PanelGrid grid(quad.panels, quad.order);
  std::vector<double> samples(grid.size());
  auto x = grid.nodes();
  for (std::size_t j = 0; j < x.size(); ++j) samples[j] = phi(x[j]);
  return greens_solve(pair, gamma, grid, samples, modes);
}

}  // namespace efk
