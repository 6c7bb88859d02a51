#pragma once

#include <vector>

#include "ffgrad/pulse.hpp"
#include "ffgrad/spectrum.hpp"

namespace ffgrad {

/// Frequency-domain control matrices of a pulse on one grid.
struct ControlMatrixSet {
  FrequencyGrid grid;
  /// segments[g][a]: R^{(g)}_a(omega), n_omega x d^2.
  std::vector<std::vector<ComplexRowMatrix>> segments;
  /// phases(g, i) = exp(i omega_i t_g).
  ComplexRowMatrix phases;
  /// total[a]: R_a(omega) = sum_g exp(i omega t_g) R^{(g)}_a(omega) L^{(g)}.
  std::vector<ComplexRowMatrix> total;
};

struct FilterFunction {
  FrequencyGrid grid;
  RealRowMatrix values;  // n_noises x n_omega
};

struct Infidelity {
  RealVector per_noise;
  double total = 0.0;
};

/// O_ik(omega) = int_0^{dt_g} exp(i (omega + w_i - w_k) t) dt in the eigenbasis of segment g.
ComplexMatrix phase_integral(const PulseSequence& pulse, std::size_t g, double omega);

/// R^{(g)}_a(omega) for every noise source (delegates to the parallel kernel).
std::vector<ComplexRowMatrix> segment_control_matrix(const PulseSequence& pulse, std::size_t g,
                                                     const FrequencyGrid& grid);

ControlMatrixSet total_control_matrix(const PulseSequence& pulse, const FrequencyGrid& grid);
ControlMatrixSet total_control_matrix(const PulseSequence& pulse, const FrequencyGrid& grid,
                                      const Propagators& props);

/// F_a(omega) = sum_k |R_ak(omega)|^2.
FilterFunction filter_function(const ControlMatrixSet& cms);

/// I_a = 1/(d pi) * trapezoid of F_a S_a over the positive grid.
Infidelity infidelity(const FilterFunction& ff, const SpectralDensity& spectrum, std::size_t dim);

/// Convenience: control matrix, filter function and infidelity in one call.
Infidelity infidelity(const PulseSequence& pulse, const SpectralDensity& spectrum);

}  // namespace ffgrad
