#pragma once

#include <vector>

#include "ffgrad/pulse.hpp"
#include "ffgrad/spectrum.hpp"

// Per-segment frequency kernels. Every frequency sample is independent; the
// default kernels split the grid across OpenMP threads and write disjoint rows,
// so results do not depend on the thread count. The `reference` namespace keeps
// serial, formula-literal versions for testing and benchmarking.
namespace ffgrad::kernels {

/// R^{(g)}_{aj}(omega) = s_a tr((B_a-bar o O(omega)) C_j-bar).
/// One n_omega x d^2 block per noise source.
std::vector<ComplexRowMatrix> segment_control_matrix(const PulseSequence& pulse, std::size_t g,
                                                     const FrequencyGrid& grid);

/// dR^{(g)}_{aj}(omega)/du_h(g). Blocks are indexed [h * n_noises + a].
std::vector<ComplexRowMatrix> segment_control_matrix_derivative(const PulseSequence& pulse,
                                                                std::size_t g,
                                                                const FrequencyGrid& grid);

namespace reference {

std::vector<ComplexRowMatrix> segment_control_matrix(const PulseSequence& pulse, std::size_t g,
                                                     const FrequencyGrid& grid);

/// Evaluates tr(B_a-bar N) with N_mn = [C_j-bar, K^{mn} o A_h-bar]_mn entry by entry.
std::vector<ComplexRowMatrix> segment_control_matrix_derivative(const PulseSequence& pulse,
                                                                std::size_t g,
                                                                const FrequencyGrid& grid);

}  // namespace reference

/// K^{mn}_{pq}(omega) for one segment; see gradients.hpp.
ComplexMatrix k_matrix(const SegmentDiagonalization& seg, double dt, double omega, std::size_t m,
                       std::size_t n);

/// Scoped override of the OpenMP thread count.
class ThreadLimit {
 public:
  explicit ThreadLimit(int n_threads);
  ~ThreadLimit();
  ThreadLimit(const ThreadLimit&) = delete;
  ThreadLimit& operator=(const ThreadLimit&) = delete;

 private:
  int previous_;
};

}  // namespace ffgrad::kernels
