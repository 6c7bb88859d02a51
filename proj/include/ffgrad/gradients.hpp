#pragma once

#include <functional>
#include <vector>

#include "ffgrad/control_matrix.hpp"

// Analytic derivatives with respect to piecewise-constant control amplitudes
// u_h(g'). Segment indices are zero-based; cumulative propagators are indexed by
// the number of segments they contain, so Q_k depends on u(g') iff g' < k.
namespace ffgrad {

/// M_pq(t) = t for degenerate levels, else (exp(i (w_p - w_q) t) - 1) / (i (w_p - w_q)).
ComplexMatrix m_matrix(const PulseSequence& pulse, std::size_t g, double t);

/// dU^{(g)}/du_h(g) = -i U^{(g)} V (M(dt_g) o A_h-bar) V^dagger.
ComplexMatrix propagator_derivative(const PulseSequence& pulse, std::size_t g, std::size_t h);

/// dQ_k/du_h(g') = U(t_k, t_{g'+1}) dU^{(g')}/du_h Q_{g'} for g' < k, exactly zero otherwise.
ComplexMatrix cumulative_propagator_derivative(const PulseSequence& pulse, const Propagators& props,
                                               std::size_t k, std::size_t h, std::size_t g_prime);

/// Derivative of L^{(k)}_{jl} = tr(Q_k^dagger C_j Q_k C_l); exactly zero for g' >= k.
RealMatrix liouville_derivative(const PulseSequence& pulse, const Propagators& props,
                                std::size_t k, std::size_t h, std::size_t g_prime);

/// K^{mn}_{pq}(omega) = int_0^{dt_g} exp(i (omega + w_n - w_m) t) M_pq(t) dt.
ComplexMatrix k_integral(const PulseSequence& pulse, std::size_t g, double omega, std::size_t m,
                         std::size_t n);

/// dR^{(g)}_a(omega)/du_h(g'); blocks [h * n_noises + a]. All zero unless g == g'.
std::vector<ComplexRowMatrix> segment_control_matrix_derivative(const PulseSequence& pulse,
                                                                std::size_t g, std::size_t g_prime,
                                                                const FrequencyGrid& grid);

/// dR_{aj}(omega)/du_h(g') stored as one n_omega x d^2 block per (g', h, a),
/// ordered with g' outermost.
class GradientTensor {
 public:
  GradientTensor(std::size_t n_segments, std::size_t n_controls, std::size_t n_noises,
                 std::size_t n_omega, std::size_t n_basis);

  std::size_t n_segments() const { return n_segments_; }
  std::size_t n_controls() const { return n_controls_; }
  std::size_t n_noises() const { return n_noises_; }

  ComplexRowMatrix& block(std::size_t g_prime, std::size_t h, std::size_t a) {
    return blocks_[index(g_prime, h, a)];
  }
  const ComplexRowMatrix& block(std::size_t g_prime, std::size_t h, std::size_t a) const {
    return blocks_[index(g_prime, h, a)];
  }

 private:
  std::size_t index(std::size_t g_prime, std::size_t h, std::size_t a) const {
    return (g_prime * n_controls_ + h) * n_noises_ + a;
  }
  std::size_t n_segments_, n_controls_, n_noises_;
  std::vector<ComplexRowMatrix> blocks_;
};

/// dF_a(omega)/du_h(g'): one n_noises x n_omega block per (g', h).
struct FilterFunctionGradient {
  std::size_t n_segments = 0;
  std::size_t n_controls = 0;
  std::vector<RealRowMatrix> blocks;

  const RealRowMatrix& block(std::size_t g_prime, std::size_t h) const {
    return blocks[g_prime * n_controls + h];
  }
};

/// dI_a/du: n_noises x (n_controls * n_segments), columns in amplitude order h * n + g'.
using InfidelityGradient = RealRowMatrix;

GradientTensor total_control_matrix_derivative(const PulseSequence& pulse,
                                               const FrequencyGrid& grid);
GradientTensor total_control_matrix_derivative(const PulseSequence& pulse,
                                               const ControlMatrixSet& cms,
                                               const Propagators& props);

/// dF = 2 Re(sum_k conj(R_k) dR_k).
FilterFunctionGradient filter_function_derivative(const ControlMatrixSet& cms,
                                                  const GradientTensor& grad);

InfidelityGradient infidelity_derivative(const FilterFunctionGradient& dff,
                                         const SpectralDensity& spectrum, std::size_t dim);

/// End to end: control matrix, its derivative, and the infidelity gradient.
InfidelityGradient infidelity_derivative(const PulseSequence& pulse,
                                         const SpectralDensity& spectrum);

/// Central difference of f with respect to u_h(g'), each side on a fresh pulse.
/// With `richardson`, combines steps h and h/2 to cancel the O(h^2) term.
template <typename F>
auto finite_difference_gradient(F&& f, const PulseSequence& pulse, std::size_t h,
                                std::size_t g_prime, double step = 1e-6, bool richardson = false) {
  if (!(step > 0.0)) throw std::invalid_argument("finite difference step must be > 0");
  const RealVector x = pulse.amplitude_vector();
  const auto idx = static_cast<Eigen::Index>(h * pulse.n_segments() + g_prime);
  auto central = [&](double s) {
    RealVector plus = x, minus = x;
    plus[idx] += s;
    minus[idx] -= s;
    auto hi = f(pulse.with_amplitudes(plus));
    auto lo = f(pulse.with_amplitudes(minus));
    return decltype(hi)((hi - lo) / (2.0 * s));
  };
  auto coarse = central(step);
  if (!richardson) return coarse;
  auto fine = central(0.5 * step);
  return decltype(coarse)((4.0 * fine - coarse) / 3.0);
}

}  // namespace ffgrad
