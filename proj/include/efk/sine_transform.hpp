// sine_transform.hpp
// Discrete sine transform between collocation samples and SpectralField.
//
// Nodes are x_j = j/(M+1), j = 1..M. For 1 ≤ k,l ≤ M the sampled sines
// satisfy Σ_j sin(kπx_j) sin(lπx_j) = (M+1)/2 · δ_kl, which makes
//
//     a_k = √2/(M+1) · Σ_j u_j sin(kπx_j)
//
// an exact inverse of u_j = √2 Σ_k a_k sin(kπx_j) whenever N ≤ M.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "efk/spectral_field.hpp"

namespace efk {

class SineTransform {
 public:
  /// ConfigError when M < N or either is zero.
  SineTransform(std::size_t modes, std::size_t nodes);

  std::size_t modes() const noexcept { return modes_; }
  std::size_t nodes() const noexcept { return nodes_; }
  std::span<const double> node_positions() const noexcept { return x_; }

  SpectralField forward(std::span<const double> samples) const;
  void inverse(const SpectralField& field, std::span<double> samples) const;
  std::vector<double> inverse(const SpectralField& field) const;

  /// Discrete quadrature norm (1/(M+1) Σ u_j²)^{1/2}; equals ‖a‖₂ for
  /// samples produced by inverse().
  double sample_norm(std::span<const double> samples) const;

 private:
  std::size_t modes_;
  std::size_t nodes_;
  std::vector<double> x_;
  std::vector<double> table_;  // table_[(k-1)*M + (j-1)] = sin(kπx_j)
};

}  // namespace efk
