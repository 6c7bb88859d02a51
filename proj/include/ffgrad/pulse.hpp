#pragma once

#include <memory>
#include <vector>

#include "ffgrad/operator_algebra.hpp"

namespace ffgrad {

struct ControlTerm {
  ComplexMatrix op;
  RealVector amplitudes;  // one per segment
};

struct NoiseTerm {
  ComplexMatrix op;
  RealVector sensitivities;  // one per segment
};

/// Eigenbasis data of one piecewise-constant segment H_c = V diag(w) V^dagger.
struct SegmentDiagonalization {
  EigenDecomposition eig;
  /// Eigenvalues with runs closer than `degeneracy_tol` replaced by their mean, so
  /// that degenerate gaps are exactly zero and gaps stay additive.
  RealVector levels;
  /// levels_i - levels_k.
  RealMatrix level_gaps;
  double degeneracy_tol = 0.0;
  std::vector<ComplexMatrix> noise_ops;    // V^dagger B_a V
  std::vector<ComplexMatrix> control_ops;  // V^dagger A_h V
  std::vector<ComplexMatrix> basis_ops;    // V^dagger C_j V
  ComplexMatrix propagator;                // exp(-i H_c dt)
};

/// A piecewise-constant control problem. Segments are indexed 0..n_segments()-1;
/// segment g spans [t_g, t_{g+1}] with t_0 = 0. Immutable after construction and
/// the diagonalization of every segment is computed eagerly.
class PulseSequence {
 public:
  PulseSequence(ComplexMatrix drift, std::vector<ControlTerm> controls,
                std::vector<NoiseTerm> noises, RealVector durations,
                std::shared_ptr<const OperatorBasis> basis = nullptr);

  std::size_t dim() const { return dim_; }
  std::size_t n_segments() const { return static_cast<std::size_t>(durations_.size()); }
  std::size_t n_controls() const { return controls_.size(); }
  std::size_t n_noises() const { return noises_.size(); }

  const ComplexMatrix& drift() const { return drift_; }
  const std::vector<ControlTerm>& controls() const { return controls_; }
  const std::vector<NoiseTerm>& noises() const { return noises_; }
  const RealVector& durations() const { return durations_; }
  const OperatorBasis& basis() const { return *basis_; }
  const std::shared_ptr<const OperatorBasis>& basis_ptr() const { return basis_; }

  /// Start time t_g of segment g; segment_start(n_segments()) is the total duration.
  double segment_start(std::size_t g) const { return starts_[g]; }
  double total_duration() const { return starts_.back(); }

  const SegmentDiagonalization& segment(std::size_t g) const { return segments_.at(g); }

  /// Amplitudes flattened in (control, segment) order: x[h * n_segments + g].
  RealVector amplitude_vector() const;
  PulseSequence with_amplitudes(const RealVector& flat) const;

 private:
  std::size_t dim_;
  ComplexMatrix drift_;
  std::vector<ControlTerm> controls_;
  std::vector<NoiseTerm> noises_;
  RealVector durations_;
  std::shared_ptr<const OperatorBasis> basis_;
  std::vector<double> starts_;
  std::vector<SegmentDiagonalization> segments_;
};

/// Cumulative propagators Q_k = U_{k-1} ... U_0 for k = 0..n (Q_0 = 1) and their
/// real Liouville representations.
struct Propagators {
  std::vector<ComplexMatrix> cumulative;
  std::vector<RealMatrix> liouville;
  double liouville_imag_residue = 0.0;
};

/// H_0 + sum_h u_{h,g} A_h.
ComplexMatrix segment_hamiltonian(const PulseSequence& pulse, std::size_t g);

/// exp(-i H_c^{(g)} dt_g).
const ComplexMatrix& segment_propagator(const PulseSequence& pulse, std::size_t g);

Propagators cumulative_propagators(const PulseSequence& pulse);

}  // namespace ffgrad
