#include "ffgrad/operator_algebra.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ffgrad {

namespace {

ComplexMatrix build_projector(std::size_t dim, const std::vector<ComplexMatrix>& elements) {
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix p(d * d, static_cast<Eigen::Index>(elements.size()));
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) p(a * d + b, col) = elements[k](b, a);
  }
  return p;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

OperatorBasis::OperatorBasis(std::size_t dim, std::vector<ComplexMatrix> elements)
    : dim_(dim), elements_(std::move(elements)) {
  if (elements_.size() != dim_ * dim_)
    throw std::invalid_argument("operator basis needs d^2 elements");
  for (const auto& c : elements_) {
    if (c.rows() != static_cast<Eigen::Index>(dim_) || c.cols() != static_cast<Eigen::Index>(dim_))
      throw std::invalid_argument("operator basis element has wrong dimension");
  }
  projector_ = build_projector(dim_, elements_);
}

Eigen::VectorXcd OperatorBasis::expand(const ComplexMatrix& x) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  Eigen::Matrix<Complex, 1, Eigen::Dynamic> flat(d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) flat(a * d + b) = x(a, b);
  return (flat * projector_).transpose();
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("hs_inner: operands must be square and of equal dimension");
  return (a.adjoint().cwiseProduct(b.transpose())).sum();
}

ComplexMatrix pauli(char label) {
  ComplexMatrix m(2, 2);
  const Complex i(0.0, 1.0);
  switch (label) {
    case 'I': case '0': m << 1, 0, 0, 1; break;
    case 'X': case 'x': m << 0, 1, 1, 0; break;
    case 'Y': case 'y': m << 0, -i, i, 0; break;
    case 'Z': case 'z': m << 1, 0, 0, -1; break;
    default:
      throw std::invalid_argument(std::string("unknown Pauli label '") + label + "'");
  }
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix pauli_string(std::string_view labels) {
  if (labels.empty()) throw std::invalid_argument("empty Pauli string");
  ComplexMatrix out = pauli(labels.front());
  for (std::size_t k = 1; k < labels.size(); ++k) out = kron(out, pauli(labels[k]));
  return out;
}

OperatorBasis pauli_basis(std::size_t n_qubits) {
  if (n_qubits == 0) throw std::invalid_argument("pauli_basis: n_qubits must be >= 1");
  if (n_qubits > 5) throw std::invalid_argument("pauli_basis: more than 5 qubits is unsupported");
  static constexpr char kLabels[4] = {'I', 'X', 'Y', 'Z'};
  const std::size_t dim = std::size_t{1} << n_qubits;
  const double norm = std::pow(0.5, 0.5 * static_cast<double>(n_qubits));
  std::vector<ComplexMatrix> elements;
  elements.reserve(dim * dim);
  std::string word(n_qubits, 'I');
  for (std::size_t idx = 0; idx < dim * dim; ++idx) {
    std::size_t rest = idx;
    for (std::size_t q = n_qubits; q-- > 0;) {
      word[q] = kLabels[rest % 4];
      rest /= 4;
    }
    elements.push_back(norm * pauli_string(word));
  }
  return OperatorBasis(dim, std::move(elements));
}

OperatorBasis ggm_basis(std::size_t dim) {
  if (dim < 2) throw std::invalid_argument("ggm_basis: dimension must be >= 2");
  const auto d = static_cast<Eigen::Index>(dim);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  std::vector<ComplexMatrix> elements;
  elements.reserve(dim * dim);
  elements.push_back(ComplexMatrix::Identity(d, d) / std::sqrt(static_cast<double>(dim)));
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = j + 1; k < d; ++k) {
      ComplexMatrix m = ComplexMatrix::Zero(d, d);
      m(j, k) = inv_sqrt2;
      m(k, j) = inv_sqrt2;
      elements.push_back(std::move(m));
    }
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = j + 1; k < d; ++k) {
      ComplexMatrix m = ComplexMatrix::Zero(d, d);
      m(j, k) = -i * inv_sqrt2;
      m(k, j) = i * inv_sqrt2;
      elements.push_back(std::move(m));
    }
  for (Eigen::Index l = 1; l < d; ++l) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (Eigen::Index j = 0; j < l; ++j) m(j, j) = scale;
    m(l, l) = -static_cast<double>(l) * scale;
    elements.push_back(std::move(m));
  }
  return OperatorBasis(dim, std::move(elements));
}

OperatorBasis default_basis(std::size_t dim) {
  if (is_power_of_two(dim) && dim >= 2 && dim <= 32) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    return pauli_basis(n);
  }
  return ggm_basis(dim);
}

double hermiticity_defect(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

void require_hermitian(const ComplexMatrix& h, double tol) {
  if (h.rows() != h.cols()) throw std::invalid_argument("matrix is not square");
  for (Eigen::Index p = 0; p < h.rows(); ++p)
    for (Eigen::Index q = p; q < h.cols(); ++q) {
      const double defect = std::abs(h(p, q) - std::conj(h(q, p)));
      if (defect > tol) {
        std::ostringstream msg;
        msg << "matrix is not Hermitian: entry (" << p << "," << q << ") differs from the "
            << "conjugate of (" << q << "," << p << ") by " << defect;
        throw std::invalid_argument(msg.str());
      }
    }
}

EigenDecomposition eig_hermitian(const ComplexMatrix& h) {
  require_hermitian(h);
  // Symmetrize so the solver sees an exactly Hermitian input.
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix unitary_from_eig(const EigenDecomposition& eig, double t) {
  const Eigen::VectorXcd phases =
      (eig.eigenvalues * (-t)).unaryExpr([](double x) { return std::polar(1.0, x); });
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

RealMatrix liouville(const ComplexMatrix& u, const OperatorBasis& basis, double* imag_residue) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  const auto n = static_cast<Eigen::Index>(basis.size());
  // Row j holds U^dagger C_j U flattened row-major.
  ComplexMatrix stacked(n, d * d);
  const ComplexMatrix u_adj = u.adjoint();
  for (Eigen::Index j = 0; j < n; ++j) {
    const ComplexMatrix conj = u_adj * basis[static_cast<std::size_t>(j)] * u;
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) stacked(j, a * d + b) = conj(a, b);
  }
  const ComplexMatrix full = stacked * basis.trace_projector();
  if (imag_residue) *imag_residue = full.imag().cwiseAbs().maxCoeff();
  return full.real();
}

}  // namespace ffgrad
