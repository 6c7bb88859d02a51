#include "ffgrad/gradients.hpp"

#include <numbers>
#include <stdexcept>

#include "ffgrad/integrals.hpp"
#include "ffgrad/kernels.hpp"

namespace ffgrad {

namespace {

constexpr Complex kI(0.0, 1.0);

void check_segment(const PulseSequence& pulse, std::size_t g) {
  if (g >= pulse.n_segments())
    throw std::out_of_range("segment index " + std::to_string(g) + " out of range");
}

void check_control(const PulseSequence& pulse, std::size_t h) {
  if (h >= pulse.n_controls())
    throw std::out_of_range("control index " + std::to_string(h) + " out of range");
}

}  // namespace

ComplexMatrix m_matrix(const PulseSequence& pulse, std::size_t g, double t) {
  check_segment(pulse, g);
  const RealMatrix& gap = pulse.segment(g).level_gaps;
  ComplexMatrix m(gap.rows(), gap.cols());
  for (Eigen::Index p = 0; p < gap.rows(); ++p)
    for (Eigen::Index q = 0; q < gap.cols(); ++q)
      m(p, q) = gap(p, q) == 0.0 ? Complex(t, 0.0) : integrals::phase(gap(p, q), t);
  return m;
}

ComplexMatrix propagator_derivative(const PulseSequence& pulse, std::size_t g, std::size_t h) {
  check_segment(pulse, g);
  check_control(pulse, h);
  const auto& seg = pulse.segment(g);
  const double dt = pulse.durations()[static_cast<Eigen::Index>(g)];
  const ComplexMatrix& v = seg.eig.eigenvectors;
  const ComplexMatrix generator =
      v * m_matrix(pulse, g, dt).cwiseProduct(seg.control_ops[h]) * v.adjoint();
  return -kI * seg.propagator * generator;
}

ComplexMatrix cumulative_propagator_derivative(const PulseSequence& pulse, const Propagators& props,
                                               std::size_t k, std::size_t h,
                                               std::size_t g_prime) {
  check_segment(pulse, g_prime);
  if (k > pulse.n_segments()) throw std::out_of_range("cumulative index out of range");
  const auto d = static_cast<Eigen::Index>(pulse.dim());
  if (g_prime >= k) return ComplexMatrix::Zero(d, d);
  // U(t_k, t_{g'+1}) = Q_k Q_{g'+1}^dagger
  const ComplexMatrix later = props.cumulative[k] * props.cumulative[g_prime + 1].adjoint();
  return later * propagator_derivative(pulse, g_prime, h) * props.cumulative[g_prime];
}

RealMatrix liouville_derivative(const PulseSequence& pulse, const Propagators& props,
                                std::size_t k, std::size_t h, std::size_t g_prime) {
  const auto d = static_cast<Eigen::Index>(pulse.dim());
  const auto n_b = static_cast<Eigen::Index>(pulse.basis().size());
  if (g_prime >= k) {
    check_segment(pulse, g_prime);
    return RealMatrix::Zero(n_b, n_b);
  }
  const ComplexMatrix dq = cumulative_propagator_derivative(pulse, props, k, h, g_prime);
  const ComplexMatrix q_adj = props.cumulative[k].adjoint();
  // tr(dQ^dagger C_j Q C_l) is the conjugate of tr(Q^dagger C_j dQ C_l).
  ComplexMatrix stacked(n_b, d * d);
  for (Eigen::Index j = 0; j < n_b; ++j) {
    const ComplexMatrix y = q_adj * pulse.basis()[static_cast<std::size_t>(j)] * dq;
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) stacked(j, a * d + b) = y(a, b);
  }
  return 2.0 * (stacked * pulse.basis().trace_projector()).real();
}

ComplexMatrix k_integral(const PulseSequence& pulse, std::size_t g, double omega, std::size_t m,
                         std::size_t n) {
  check_segment(pulse, g);
  return kernels::k_matrix(pulse.segment(g), pulse.durations()[static_cast<Eigen::Index>(g)], omega,
                           m, n);
}

std::vector<ComplexRowMatrix> segment_control_matrix_derivative(const PulseSequence& pulse,
                                                                std::size_t g, std::size_t g_prime,
                                                                const FrequencyGrid& grid) {
  check_segment(pulse, g);
  check_segment(pulse, g_prime);
  if (g != g_prime) {
    return std::vector<ComplexRowMatrix>(
        pulse.n_controls() * pulse.n_noises(),
        ComplexRowMatrix::Zero(static_cast<Eigen::Index>(grid.size()),
                               static_cast<Eigen::Index>(pulse.basis().size())));
  }
  return kernels::segment_control_matrix_derivative(pulse, g, grid);
}

GradientTensor::GradientTensor(std::size_t n_segments, std::size_t n_controls,
                               std::size_t n_noises, std::size_t n_omega, std::size_t n_basis)
    : n_segments_(n_segments),
      n_controls_(n_controls),
      n_noises_(n_noises),
      blocks_(n_segments * n_controls * n_noises,
              ComplexRowMatrix::Zero(static_cast<Eigen::Index>(n_omega),
                                     static_cast<Eigen::Index>(n_basis))) {}

GradientTensor total_control_matrix_derivative(const PulseSequence& pulse,
                                               const FrequencyGrid& grid) {
  const Propagators props = cumulative_propagators(pulse);
  return total_control_matrix_derivative(pulse, total_control_matrix(pulse, grid, props), props);
}

GradientTensor total_control_matrix_derivative(const PulseSequence& pulse,
                                               const ControlMatrixSet& cms,
                                               const Propagators& props) {
  const std::size_t n = pulse.n_segments();
  const std::size_t n_c = pulse.n_controls();
  const std::size_t n_a = pulse.n_noises();
  GradientTensor out(n, n_c, n_a, cms.grid.size(), pulse.basis().size());

  for (std::size_t gp = 0; gp < n; ++gp) {
    // Direct term: the segment's own control matrix depends on its amplitude.
    const auto dseg = kernels::segment_control_matrix_derivative(pulse, gp, cms.grid);
    const ComplexMatrix liou = props.liouville[gp].cast<Complex>();
    const auto phase_gp = cms.phases.row(static_cast<Eigen::Index>(gp)).transpose();
    for (std::size_t h = 0; h < n_c; ++h)
      for (std::size_t a = 0; a < n_a; ++a)
        out.block(gp, h, a).noalias() = phase_gp.asDiagonal() * (dseg[h * n_a + a] * liou);

    // Every later segment sees u(g') through its cumulative propagator.
    for (std::size_t k = gp + 1; k < n; ++k) {
      const auto phase_k = cms.phases.row(static_cast<Eigen::Index>(k)).transpose();
      for (std::size_t h = 0; h < n_c; ++h) {
        const ComplexMatrix dliou = liouville_derivative(pulse, props, k, h, gp).cast<Complex>();
        for (std::size_t a = 0; a < n_a; ++a)
          out.block(gp, h, a).noalias() += phase_k.asDiagonal() * (cms.segments[k][a] * dliou);
      }
    }
  }
  return out;
}

FilterFunctionGradient filter_function_derivative(const ControlMatrixSet& cms,
                                                  const GradientTensor& grad) {
  const std::size_t n_a = cms.total.size();
  if (grad.n_noises() != n_a)
    throw std::invalid_argument("gradient tensor and control matrix disagree on noise count");
  const auto n_w = static_cast<Eigen::Index>(cms.grid.size());
  FilterFunctionGradient out;
  out.n_segments = grad.n_segments();
  out.n_controls = grad.n_controls();
  out.blocks.reserve(grad.n_segments() * grad.n_controls());
  for (std::size_t gp = 0; gp < grad.n_segments(); ++gp)
    for (std::size_t h = 0; h < grad.n_controls(); ++h) {
      RealRowMatrix block(static_cast<Eigen::Index>(n_a), n_w);
      for (std::size_t a = 0; a < n_a; ++a) {
        const ComplexRowMatrix& r = cms.total[a];
        const ComplexRowMatrix& dr = grad.block(gp, h, a);
        block.row(static_cast<Eigen::Index>(a)) =
            2.0 * (r.conjugate().cwiseProduct(dr)).real().rowwise().sum().transpose();
      }
      out.blocks.push_back(std::move(block));
    }
  return out;
}

InfidelityGradient infidelity_derivative(const FilterFunctionGradient& dff,
                                         const SpectralDensity& spectrum, std::size_t dim) {
  const auto& w = spectrum.grid().trapezoid_weights();
  const double prefactor = 1.0 / (static_cast<double>(dim) * std::numbers::pi);
  const auto n_a = static_cast<Eigen::Index>(spectrum.n_noises());
  InfidelityGradient out =
      InfidelityGradient::Zero(n_a, static_cast<Eigen::Index>(dff.n_controls * dff.n_segments));
  for (std::size_t gp = 0; gp < dff.n_segments; ++gp)
    for (std::size_t h = 0; h < dff.n_controls; ++h) {
      const RealRowMatrix& block = dff.block(gp, h);
      if (block.rows() != n_a || block.cols() != static_cast<Eigen::Index>(w.size()))
        throw std::invalid_argument("filter function gradient and spectrum grids do not match");
      const auto col = static_cast<Eigen::Index>(h * dff.n_segments + gp);
      for (Eigen::Index a = 0; a < n_a; ++a) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < block.cols(); ++i)
          acc += w[static_cast<std::size_t>(i)] * block(a, i) * spectrum.values()(a, i);
        out(a, col) = prefactor * acc;
      }
    }
  return out;
}

InfidelityGradient infidelity_derivative(const PulseSequence& pulse,
                                         const SpectralDensity& spectrum) {
  if (spectrum.n_noises() != pulse.n_noises())
    throw std::invalid_argument("spectrum must have one row per noise source");
  const Propagators props = cumulative_propagators(pulse);
  const ControlMatrixSet cms = total_control_matrix(pulse, spectrum.grid(), props);
  const GradientTensor grad = total_control_matrix_derivative(pulse, cms, props);
  return infidelity_derivative(filter_function_derivative(cms, grad), spectrum, pulse.dim());
}

}  // namespace ffgrad
