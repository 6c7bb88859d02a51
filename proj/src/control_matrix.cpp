#include "ffgrad/control_matrix.hpp"

#include <numbers>
#include <stdexcept>

#include "ffgrad/integrals.hpp"
#include "ffgrad/kernels.hpp"

namespace ffgrad {

ComplexMatrix phase_integral(const PulseSequence& pulse, std::size_t g, double omega) {
  const auto& seg = pulse.segment(g);
  const double dt = pulse.durations()[static_cast<Eigen::Index>(g)];
  const Eigen::Index d = seg.level_gaps.rows();
  ComplexMatrix o(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index k = 0; k < d; ++k) o(i, k) = integrals::phase(omega + seg.level_gaps(i, k), dt);
  return o;
}

std::vector<ComplexRowMatrix> segment_control_matrix(const PulseSequence& pulse, std::size_t g,
                                                     const FrequencyGrid& grid) {
  return kernels::segment_control_matrix(pulse, g, grid);
}

ControlMatrixSet total_control_matrix(const PulseSequence& pulse, const FrequencyGrid& grid) {
  return total_control_matrix(pulse, grid, cumulative_propagators(pulse));
}

ControlMatrixSet total_control_matrix(const PulseSequence& pulse, const FrequencyGrid& grid,
                                      const Propagators& props) {
  const std::size_t n = pulse.n_segments();
  const auto n_w = static_cast<Eigen::Index>(grid.size());
  const auto n_b = static_cast<Eigen::Index>(pulse.basis().size());
  ControlMatrixSet out{grid, {}, ComplexRowMatrix(static_cast<Eigen::Index>(n), n_w), {}};
  out.total.assign(pulse.n_noises(), ComplexRowMatrix::Zero(n_w, n_b));
  out.segments.reserve(n);
  for (std::size_t g = 0; g < n; ++g) {
    const double t = pulse.segment_start(g);
    for (Eigen::Index i = 0; i < n_w; ++i)
      out.phases(static_cast<Eigen::Index>(g), i) = std::polar(1.0, grid[static_cast<std::size_t>(i)] * t);
    out.segments.push_back(kernels::segment_control_matrix(pulse, g, grid));
    const ComplexMatrix liou = props.liouville[g].cast<Complex>();
    const auto phase = out.phases.row(static_cast<Eigen::Index>(g)).transpose();
    for (std::size_t a = 0; a < pulse.n_noises(); ++a)
      out.total[a].noalias() += phase.asDiagonal() * (out.segments.back()[a] * liou);
  }
  return out;
}

FilterFunction filter_function(const ControlMatrixSet& cms) {
  const auto n_a = static_cast<Eigen::Index>(cms.total.size());
  const auto n_w = static_cast<Eigen::Index>(cms.grid.size());
  RealRowMatrix f(n_a, n_w);
  for (Eigen::Index a = 0; a < n_a; ++a)
    f.row(a) = cms.total[static_cast<std::size_t>(a)].rowwise().squaredNorm().transpose();
  return {cms.grid, std::move(f)};
}

Infidelity infidelity(const FilterFunction& ff, const SpectralDensity& spectrum, std::size_t dim) {
  if (!(ff.grid == spectrum.grid()))
    throw std::invalid_argument("filter function and spectrum are sampled on different grids");
  if (static_cast<std::size_t>(ff.values.rows()) != spectrum.n_noises())
    throw std::invalid_argument("spectrum must have one row per noise source");
  const auto& w = ff.grid.trapezoid_weights();
  const double prefactor = 1.0 / (static_cast<double>(dim) * std::numbers::pi);
  Infidelity out;
  out.per_noise.resize(ff.values.rows());
  for (Eigen::Index a = 0; a < ff.values.rows(); ++a) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < ff.values.cols(); ++i)
      acc += w[static_cast<std::size_t>(i)] * ff.values(a, i) * spectrum.values()(a, i);
    out.per_noise[a] = prefactor * acc;
  }
  out.total = 0.0;
  for (Eigen::Index a = 0; a < out.per_noise.size(); ++a) out.total += out.per_noise[a];
  return out;
}

Infidelity infidelity(const PulseSequence& pulse, const SpectralDensity& spectrum) {
  return infidelity(filter_function(total_control_matrix(pulse, spectrum.grid())), spectrum,
                    pulse.dim());
}

}  // namespace ffgrad
