#pragma once

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ffgrad {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Row-major complex block; rows are frequency samples, columns basis indices.
using ComplexRowMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealRowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kHermitianTolerance = 1e-10;

/// Orthonormal Hermitian operator basis {C_0, ..., C_{d^2-1}} under tr(A^dagger B).
/// C_0 is always the normalized identity.
class OperatorBasis {
 public:
  OperatorBasis(std::size_t dim, std::vector<ComplexMatrix> elements);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return elements_.size(); }
  const ComplexMatrix& operator[](std::size_t j) const { return elements_[j]; }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }

  /// d^2 x d^2 matrix P with P(a*d + b, k) = C_k(b, a).
  /// For X flattened row-major into x, (x^T P)_k = tr(X C_k).
  const ComplexMatrix& trace_projector() const { return projector_; }

  /// Expansion coefficients tr(C_k X) of a single operator.
  Eigen::VectorXcd expand(const ComplexMatrix& x) const;

 private:
  std::size_t dim_;
  std::vector<ComplexMatrix> elements_;
  ComplexMatrix projector_;
};

struct EigenDecomposition {
  RealVector eigenvalues;  // ascending
  ComplexMatrix eigenvectors;  // column i belongs to eigenvalue i
};

/// tr(A^dagger B).
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

/// Normalized n-fold tensor products of {1, X, Y, Z}, lexicographic, identity first.
OperatorBasis pauli_basis(std::size_t n_qubits);

/// Normalized identity followed by the generalized Gell-Mann matrices
/// (symmetric, antisymmetric, diagonal families).
OperatorBasis ggm_basis(std::size_t dim);

/// Pauli basis when dim is a power of two, Gell-Mann otherwise.
OperatorBasis default_basis(std::size_t dim);

EigenDecomposition eig_hermitian(const ComplexMatrix& h);

/// Largest |H(p,q) - conj(H(q,p))|.
double hermiticity_defect(const ComplexMatrix& h);

/// Throws std::invalid_argument naming the first entry violating Hermiticity.
void require_hermitian(const ComplexMatrix& h, double tol = kHermitianTolerance);

/// exp(-i H t) from an existing decomposition of H.
ComplexMatrix unitary_from_eig(const EigenDecomposition& eig, double t);

/// Real Liouville representation L_jk = tr(U^dagger C_j U C_k).
/// `imag_residue`, when given, receives the largest discarded imaginary part.
RealMatrix liouville(const ComplexMatrix& u, const OperatorBasis& basis,
                     double* imag_residue = nullptr);

/// Single-qubit Pauli matrices (unnormalized).
ComplexMatrix pauli(char label);

/// Kronecker product of Pauli factors, e.g. "XZ" -> sigma_x (x) sigma_z.
ComplexMatrix pauli_string(std::string_view labels);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace ffgrad
