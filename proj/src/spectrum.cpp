#include "ffgrad/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ffgrad {

FrequencyGrid::FrequencyGrid(std::vector<double> omega) : omega_(std::move(omega)) {
  if (omega_.size() < 2) throw std::invalid_argument("frequency grid needs at least 2 samples");
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    if (!(omega_[i] > 0.0) || !std::isfinite(omega_[i]))
      throw std::invalid_argument("frequency grid values must be positive and finite (index " +
                                  std::to_string(i) + ")");
    if (i > 0 && !(omega_[i] > omega_[i - 1]))
      throw std::invalid_argument("frequency grid must be strictly increasing (index " +
                                  std::to_string(i) + ")");
  }
  weights_.assign(omega_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < omega_.size(); ++i) {
    const double half = 0.5 * (omega_[i + 1] - omega_[i]);
    weights_[i] += half;
    weights_[i + 1] += half;
  }
}

FrequencyGrid FrequencyGrid::linear(double lo, double hi, std::size_t n) {
  if (n < 2) throw std::invalid_argument("frequency grid needs at least 2 samples");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return FrequencyGrid(std::move(w));
}

FrequencyGrid FrequencyGrid::logarithmic(double lo, double hi, std::size_t n) {
  if (n < 2) throw std::invalid_argument("frequency grid needs at least 2 samples");
  if (!(lo > 0.0)) throw std::invalid_argument("logarithmic grid needs lo > 0");
  std::vector<double> w(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  w.front() = lo;
  w.back() = hi;
  return FrequencyGrid(std::move(w));
}

SpectralDensity::SpectralDensity(FrequencyGrid grid, RealRowMatrix values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.cols() != static_cast<Eigen::Index>(grid_.size()))
    throw std::invalid_argument("spectral density length does not match frequency grid");
  if (values_.rows() < 1) throw std::invalid_argument("spectral density needs one row per noise");
  for (Eigen::Index a = 0; a < values_.rows(); ++a)
    for (Eigen::Index i = 0; i < values_.cols(); ++i)
      if (!(values_(a, i) >= 0.0) || !std::isfinite(values_(a, i)))
        throw std::invalid_argument("spectral density must be finite and nonnegative (S[" +
                                    std::to_string(a) + "][" + std::to_string(i) + "])");
}

SpectralDensity SpectralDensity::pink(FrequencyGrid grid, const std::vector<double>& s0) {
  RealRowMatrix v(static_cast<Eigen::Index>(s0.size()), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t a = 0; a < s0.size(); ++a)
    for (std::size_t i = 0; i < grid.size(); ++i)
      v(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) =
          2.0 * std::numbers::pi * s0[a] / grid[i];
  return SpectralDensity(std::move(grid), std::move(v));
}

SpectralDensity SpectralDensity::white(FrequencyGrid grid, const std::vector<double>& s0) {
  RealRowMatrix v(static_cast<Eigen::Index>(s0.size()), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t a = 0; a < s0.size(); ++a) v.row(static_cast<Eigen::Index>(a)).setConstant(s0[a]);
  return SpectralDensity(std::move(grid), std::move(v));
}

SpectralDensity SpectralDensity::scaled(double factor) const {
  return SpectralDensity(grid_, values_ * factor);
}

}  // namespace ffgrad
