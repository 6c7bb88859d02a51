#pragma once

#include <random>

#include "ffgrad/pulse.hpp"

namespace support {

using namespace ffgrad;

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t d, double scale = 1.0) {
  std::normal_distribution<double> normal;
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(normal(rng), normal(rng));
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  return scale * h / h.norm();
}

/// Random pulse with durations in [0.5, 1.5], amplitudes in [-1, 1], sensitivities in [0.5, 1.5].
inline PulseSequence random_pulse(std::uint64_t seed, std::size_t d, std::size_t n_seg,
                                  std::size_t n_c, std::size_t n_a, double drift_scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0), pos(0.5, 1.5);
  const ComplexMatrix drift = random_hermitian(rng, d, drift_scale);
  std::vector<ControlTerm> controls;
  for (std::size_t h = 0; h < n_c; ++h) {
    RealVector u(static_cast<Eigen::Index>(n_seg));
    for (auto& x : u) x = amp(rng);
    controls.push_back({random_hermitian(rng, d), u});
  }
  std::vector<NoiseTerm> noises;
  for (std::size_t a = 0; a < n_a; ++a) {
    RealVector s(static_cast<Eigen::Index>(n_seg));
    for (auto& x : s) x = pos(rng);
    noises.push_back({random_hermitian(rng, d), s});
  }
  RealVector dt(static_cast<Eigen::Index>(n_seg));
  for (auto& x : dt) x = pos(rng);
  return PulseSequence(drift, controls, noises, dt);
}

}  // namespace support
