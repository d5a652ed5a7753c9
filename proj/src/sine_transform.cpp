#include "efk/sine_transform.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "efk/errors.hpp"

namespace efk {

SineTransform::SineTransform(std::size_t modes, std::size_t nodes) : modes_(modes), nodes_(nodes) {
  if (modes == 0 || nodes == 0) throw ConfigError("SineTransform: empty transform");
  if (nodes < modes) {
    throw ConfigError("SineTransform: underresolved, M=" + std::to_string(nodes) + " < N=" +
                      std::to_string(modes));
  }
  const std::size_t m1 = nodes + 1;
  x_.resize(nodes);
  for (std::size_t j = 1; j <= nodes; ++j) x_[j - 1] = static_cast<double>(j) / static_cast<double>(m1);

  // Reduce k·j modulo 2(M+1) so the sine argument stays in [0, 2π).
  table_.resize(modes * nodes);
  for (std::size_t k = 1; k <= modes; ++k) {
    for (std::size_t j = 1; j <= nodes; ++j) {
      const std::size_t r = (k * j) % (2 * m1);
      table_[(k - 1) * nodes + (j - 1)] =
          std::sin(std::numbers::pi * static_cast<double>(r) / static_cast<double>(m1));
    }
  }
}

SpectralField SineTransform::forward(std::span<const double> samples) const {
  if (samples.size() != nodes_) {
    throw ShapeError("SineTransform::forward: expected " + std::to_string(nodes_) + " samples, got " +
                     std::to_string(samples.size()));
  }
  SpectralField out(modes_);
  const double scale = std::numbers::sqrt2 / static_cast<double>(nodes_ + 1);
  for (std::size_t k = 0; k < modes_; ++k) {
    const double* row = &table_[k * nodes_];
    double sum = 0.0;
    for (std::size_t j = 0; j < nodes_; ++j) sum += row[j] * samples[j];
    out[k] = scale * sum;
  }
  return out;
}

void SineTransform::inverse(const SpectralField& field, std::span<double> samples) const {
  if (field.modes() != modes_) {
    throw ShapeError("SineTransform::inverse: field has " + std::to_string(field.modes()) +
                     " modes, transform has " + std::to_string(modes_));
  }
  if (samples.size() != nodes_) throw ShapeError("SineTransform::inverse: sample buffer size");
  for (std::size_t j = 0; j < nodes_; ++j) samples[j] = 0.0;
  for (std::size_t k = 0; k < modes_; ++k) {
    const double a = std::numbers::sqrt2 * field[k];
    if (a == 0.0) continue;
    const double* row = &table_[k * nodes_];
    for (std::size_t j = 0; j < nodes_; ++j) samples[j] += a * row[j];
  }
}

std::vector<double> SineTransform::inverse(const SpectralField& field) const {
  std::vector<double> out(nodes_);
  inverse(field, out);
  return out;
}

double SineTransform::sample_norm(std::span<const double> samples) const {
  double sum = 0.0;
  for (double u : samples) sum += u * u;
  return std::sqrt(sum / static_cast<double>(nodes_ + 1));
}

}  // namespace efk
