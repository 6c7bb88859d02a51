#include "ffgrad/pulse.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ffgrad {

namespace {

void check_operator(const ComplexMatrix& op, std::size_t dim, const std::string& what) {
  if (op.rows() != static_cast<Eigen::Index>(dim) || op.cols() != static_cast<Eigen::Index>(dim))
    throw std::invalid_argument(what + ": operator dimension does not match drift");
  try {
    require_hermitian(op);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(what + ": " + e.what());
  }
}

ComplexMatrix to_eigenbasis(const ComplexMatrix& v, const ComplexMatrix& op) {
  return v.adjoint() * op * v;
}

// Ascending input; consecutive values within tol form one cluster.
RealVector cluster_levels(const RealVector& w, double tol) {
  RealVector out = w;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= w.size(); ++i) {
    if (i == w.size() || w[i] - w[i - 1] >= tol) {
      if (i - start > 1) out.segment(start, i - start).setConstant(w.segment(start, i - start).mean());
      start = i;
    }
  }
  return out;
}

}  // namespace

PulseSequence::PulseSequence(ComplexMatrix drift, std::vector<ControlTerm> controls,
                             std::vector<NoiseTerm> noises, RealVector durations,
                             std::shared_ptr<const OperatorBasis> basis)
    : dim_(static_cast<std::size_t>(drift.rows())),
      drift_(std::move(drift)),
      controls_(std::move(controls)),
      noises_(std::move(noises)),
      durations_(std::move(durations)),
      basis_(std::move(basis)) {
  if (dim_ < 2) throw std::invalid_argument("pulse dimension must be >= 2");
  check_operator(drift_, dim_, "drift");
  const auto n = static_cast<Eigen::Index>(durations_.size());
  if (n < 1) throw std::invalid_argument("pulse needs at least one segment");
  for (Eigen::Index g = 0; g < n; ++g)
    if (!(durations_[g] > 0.0) || !std::isfinite(durations_[g]))
      throw std::invalid_argument("segment duration dt[" + std::to_string(g) + "] must be > 0");
  for (std::size_t h = 0; h < controls_.size(); ++h) {
    check_operator(controls_[h].op, dim_, "controls[" + std::to_string(h) + "]");
    if (controls_[h].amplitudes.size() != n)
      throw std::invalid_argument("controls[" + std::to_string(h) +
                                  "]: amplitude count does not match segment count");
    if (!controls_[h].amplitudes.allFinite())
      throw std::invalid_argument("controls[" + std::to_string(h) + "]: non-finite amplitude");
  }
  for (std::size_t a = 0; a < noises_.size(); ++a) {
    check_operator(noises_[a].op, dim_, "noises[" + std::to_string(a) + "]");
    if (noises_[a].sensitivities.size() != n)
      throw std::invalid_argument("noises[" + std::to_string(a) +
                                  "]: sensitivity count does not match segment count");
  }
  if (!basis_) basis_ = std::make_shared<const OperatorBasis>(default_basis(dim_));
  if (basis_->dim() != dim_) throw std::invalid_argument("basis dimension does not match pulse");

  starts_.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index g = 0; g < n; ++g)
    starts_[static_cast<std::size_t>(g) + 1] = starts_[static_cast<std::size_t>(g)] + durations_[g];

  segments_.reserve(static_cast<std::size_t>(n));
  for (std::size_t g = 0; g < static_cast<std::size_t>(n); ++g) {
    SegmentDiagonalization seg;
    seg.eig = eig_hermitian(segment_hamiltonian(*this, g));
    const RealVector& w = seg.eig.eigenvalues;
    const double radius = w.cwiseAbs().maxCoeff();
    seg.degeneracy_tol = 1e-8 * std::max(1.0, radius);
    const auto d = static_cast<Eigen::Index>(dim_);
    seg.levels = cluster_levels(w, seg.degeneracy_tol);
    seg.level_gaps.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index k = 0; k < d; ++k) seg.level_gaps(i, k) = seg.levels[i] - seg.levels[k];
    const ComplexMatrix& v = seg.eig.eigenvectors;
    for (const auto& noise : noises_) seg.noise_ops.push_back(to_eigenbasis(v, noise.op));
    for (const auto& ctrl : controls_) seg.control_ops.push_back(to_eigenbasis(v, ctrl.op));
    seg.basis_ops.reserve(basis_->size());
    for (const auto& c : basis_->elements()) seg.basis_ops.push_back(to_eigenbasis(v, c));
    seg.propagator = unitary_from_eig(seg.eig, durations_[static_cast<Eigen::Index>(g)]);
    segments_.push_back(std::move(seg));
  }
}

RealVector PulseSequence::amplitude_vector() const {
  const std::size_t n = n_segments();
  RealVector flat(static_cast<Eigen::Index>(controls_.size() * n));
  for (std::size_t h = 0; h < controls_.size(); ++h)
    flat.segment(static_cast<Eigen::Index>(h * n), static_cast<Eigen::Index>(n)) =
        controls_[h].amplitudes;
  return flat;
}

PulseSequence PulseSequence::with_amplitudes(const RealVector& flat) const {
  const std::size_t n = n_segments();
  if (static_cast<std::size_t>(flat.size()) != controls_.size() * n)
    throw std::invalid_argument("amplitude vector has wrong length");
  std::vector<ControlTerm> controls = controls_;
  for (std::size_t h = 0; h < controls.size(); ++h)
    controls[h].amplitudes =
        flat.segment(static_cast<Eigen::Index>(h * n), static_cast<Eigen::Index>(n));
  return PulseSequence(drift_, std::move(controls), noises_, durations_, basis_);
}

ComplexMatrix segment_hamiltonian(const PulseSequence& pulse, std::size_t g) {
  if (g >= pulse.n_segments())
    throw std::out_of_range("segment index " + std::to_string(g) + " out of range");
  ComplexMatrix h = pulse.drift();
  for (const auto& ctrl : pulse.controls())
    h += ctrl.amplitudes[static_cast<Eigen::Index>(g)] * ctrl.op;
  return h;
}

const ComplexMatrix& segment_propagator(const PulseSequence& pulse, std::size_t g) {
  return pulse.segment(g).propagator;
}

Propagators cumulative_propagators(const PulseSequence& pulse) {
  const std::size_t n = pulse.n_segments();
  const auto d = static_cast<Eigen::Index>(pulse.dim());
  Propagators out;
  out.cumulative.reserve(n + 1);
  out.liouville.reserve(n + 1);
  out.cumulative.push_back(ComplexMatrix::Identity(d, d));
  for (std::size_t g = 0; g < n; ++g)
    out.cumulative.push_back(pulse.segment(g).propagator * out.cumulative.back());
  for (const auto& q : out.cumulative) {
    double residue = 0.0;
    out.liouville.push_back(liouville(q, pulse.basis(), &residue));
    out.liouville_imag_residue = std::max(out.liouville_imag_residue, residue);
  }
  return out;
}

}  // namespace ffgrad
