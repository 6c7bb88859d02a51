#pragma once

#include <cstddef>
#include <vector>

#include "ffgrad/operator_algebra.hpp"

namespace ffgrad {

/// Strictly increasing, positive angular frequencies (at least two samples).
class FrequencyGrid {
 public:
  explicit FrequencyGrid(std::vector<double> omega);

  static FrequencyGrid linear(double lo, double hi, std::size_t n);
  static FrequencyGrid logarithmic(double lo, double hi, std::size_t n);

  std::size_t size() const { return omega_.size(); }
  double operator[](std::size_t i) const { return omega_[i]; }
  const std::vector<double>& values() const { return omega_; }

  /// Trapezoid weights w_i so that sum_i w_i f_i approximates the integral over the grid.
  const std::vector<double>& trapezoid_weights() const { return weights_; }

  bool operator==(const FrequencyGrid& other) const { return omega_ == other.omega_; }

 private:
  std::vector<double> omega_;
  std::vector<double> weights_;
};

/// Two-sided symmetric spectral densities S_a(omega), one row per noise source,
/// sampled on the positive half of the frequency axis.
class SpectralDensity {
 public:
  SpectralDensity(FrequencyGrid grid, RealRowMatrix values);

  /// S(omega) = 2 pi S0 / omega, i.e. S(f) = S0 / f with omega = 2 pi f.
  static SpectralDensity pink(FrequencyGrid grid, const std::vector<double>& s0);
  static SpectralDensity white(FrequencyGrid grid, const std::vector<double>& s0);

  const FrequencyGrid& grid() const { return grid_; }
  std::size_t n_noises() const { return static_cast<std::size_t>(values_.rows()); }
  const RealRowMatrix& values() const { return values_; }

  SpectralDensity scaled(double factor) const;

 private:
  FrequencyGrid grid_;
  RealRowMatrix values_;
};

}  // namespace ffgrad
