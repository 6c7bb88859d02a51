#include "ffgrad/kernels.hpp"

#include <omp.h>

#include "ffgrad/integrals.hpp"

namespace ffgrad::kernels {

namespace {

using integrals::GapBranch;

constexpr Complex kI(0.0, 1.0);

void write_flat(const ComplexMatrix& m, ComplexRowMatrix& dest, Eigen::Index row) {
  const Eigen::Index d = m.rows();
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) dest(row, a * d + b) = m(a, b);
}

double sensitivity(const PulseSequence& pulse, std::size_t a, std::size_t g) {
  return pulse.noises()[a].sensitivities[static_cast<Eigen::Index>(g)];
}

void fill_phase_table(const SegmentDiagonalization& seg, double dt, double omega, ComplexMatrix& o) {
  const Eigen::Index d = seg.level_gaps.rows();
  o.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index k = 0; k < d; ++k) o(i, k) = integrals::phase(omega + seg.level_gaps(i, k), dt);
}

ComplexMatrix phase_table(const SegmentDiagonalization& seg, double dt, double omega) {
  ComplexMatrix o;
  fill_phase_table(seg, dt, omega, o);
  return o;
}

}  // namespace

ThreadLimit::ThreadLimit(int n_threads) : previous_(omp_get_max_threads()) {
  omp_set_num_threads(n_threads);
}

ThreadLimit::~ThreadLimit() { omp_set_num_threads(previous_); }

ComplexMatrix k_matrix(const SegmentDiagonalization& seg, double dt, double omega, std::size_t m,
                       std::size_t n) {
  const Eigen::Index d = seg.level_gaps.rows();
  const double x = omega + seg.level_gaps(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  ComplexMatrix k(d, d);
  for (Eigen::Index p = 0; p < d; ++p)
    for (Eigen::Index q = 0; q < d; ++q) k(p, q) = integrals::gap_kernel(x, seg.level_gaps(p, q), dt);
  return k;
}

std::vector<ComplexRowMatrix> segment_control_matrix(const PulseSequence& pulse, std::size_t g,
                                                     const FrequencyGrid& grid) {
  const auto& seg = pulse.segment(g);
  const double dt = pulse.durations()[static_cast<Eigen::Index>(g)];
  const auto d = static_cast<Eigen::Index>(pulse.dim());
  const auto n_w = static_cast<Eigen::Index>(grid.size());
  const std::size_t n_a = pulse.n_noises();
  const ComplexMatrix& v = seg.eig.eigenvectors;
  const ComplexMatrix v_adj = v.adjoint();

  std::vector<ComplexRowMatrix> staging(n_a, ComplexRowMatrix(n_w, d * d));
#pragma omp parallel
  {
    ComplexMatrix o(d, d), tmp(d, d), rotated(d, d);
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n_w; ++i) {
      fill_phase_table(seg, dt, grid[static_cast<std::size_t>(i)], o);
      for (std::size_t a = 0; a < n_a; ++a) {
        const double s = sensitivity(pulse, a, g);
        if (s == 0.0) {
          staging[a].row(i).setZero();
          continue;
        }
        tmp.noalias() = v * seg.noise_ops[a].cwiseProduct(o);
        rotated.noalias() = tmp * v_adj;
        rotated *= s;
        write_flat(rotated, staging[a], i);
      }
    }
  }
  std::vector<ComplexRowMatrix> out;
  out.reserve(n_a);
  for (auto& block : staging) out.emplace_back(block * pulse.basis().trace_projector());
  return out;
}

std::vector<ComplexRowMatrix> segment_control_matrix_derivative(const PulseSequence& pulse,
                                                                std::size_t g,
                                                                const FrequencyGrid& grid) {
  const auto& seg = pulse.segment(g);
  const double dt = pulse.durations()[static_cast<Eigen::Index>(g)];
  const auto d = static_cast<Eigen::Index>(pulse.dim());
  const auto n_w = static_cast<Eigen::Index>(grid.size());
  const std::size_t n_a = pulse.n_noises();
  const std::size_t n_c = pulse.n_controls();
  const ComplexMatrix& v = seg.eig.eigenvectors;
  const ComplexMatrix v_adj = v.adjoint();
  const RealMatrix& gap = seg.level_gaps;

  std::vector<std::vector<GapBranch>> branch(static_cast<std::size_t>(d),
                                             std::vector<GapBranch>(static_cast<std::size_t>(d)));
  for (Eigen::Index p = 0; p < d; ++p)
    for (Eigen::Index q = 0; q < d; ++q)
      branch[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] =
          integrals::gap_branch(gap(p, q), dt);
  auto br = [&](Eigen::Index p, Eigen::Index q) {
    return branch[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
  };
  // 1 / (i y) for quotient-branch gaps
  ComplexMatrix inv_gap = ComplexMatrix::Zero(d, d);
  for (Eigen::Index p = 0; p < d; ++p)
    for (Eigen::Index q = 0; q < d; ++q)
      if (br(p, q) == GapBranch::Quotient) inv_gap(p, q) = 1.0 / (kI * gap(p, q));

  std::vector<ComplexRowMatrix> staging(n_c * n_a, ComplexRowMatrix(n_w, d * d));
#pragma omp parallel
  {
    const auto d3 = static_cast<std::size_t>(d * d * d);
    std::vector<Complex> kap1(d3), kap2(d3);
    ComplexMatrix j1(d, d), e(d, d), o(d, d), tmp(d, d), rotated(d, d);
    auto idx = [d](Eigen::Index a, Eigen::Index b, Eigen::Index c) {
      return static_cast<std::size_t>((a * d + b) * d + c);
    };
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n_w; ++i) {
      const double omega = grid[static_cast<std::size_t>(i)];
      fill_phase_table(seg, dt, omega, o);
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
          j1(a, b) = integrals::first_moment(omega + gap(a, b), dt);

      // kap1(m, r, n) = K^{mn}_{rn}, kap2(r, n, m) = K^{mn}_{mr}
      for (Eigen::Index m = 0; m < d; ++m)
        for (Eigen::Index n = 0; n < d; ++n) {
          const double x = omega + gap(n, m);
          for (Eigen::Index r = 0; r < d; ++r) {
            Complex k1;
            switch (br(r, n)) {
              case GapBranch::Degenerate: k1 = j1(n, m); break;
              case GapBranch::Series:
                k1 = integrals::gap_kernel(x, gap(r, n), dt, GapBranch::Series);
                break;
              default: k1 = (o(r, m) - o(n, m)) * inv_gap(r, n); break;
            }
            kap1[idx(m, r, n)] = k1;
            Complex k2;
            switch (br(m, r)) {
              case GapBranch::Degenerate: k2 = j1(n, m); break;
              case GapBranch::Series:
                k2 = integrals::gap_kernel(x, gap(m, r), dt, GapBranch::Series);
                break;
              default: k2 = (o(n, r) - o(n, m)) * inv_gap(m, r); break;
            }
            kap2[idx(r, n, m)] = k2;
          }
        }

      for (std::size_t h = 0; h < n_c; ++h) {
        const ComplexMatrix& ctrl = seg.control_ops[h];
        for (std::size_t a = 0; a < n_a; ++a) {
          ComplexRowMatrix& dest = staging[h * n_a + a];
          const double s = sensitivity(pulse, a, g);
          if (s == 0.0) {
            dest.row(i).setZero();
            continue;
          }
          const ComplexMatrix& noise = seg.noise_ops[a];
          for (Eigen::Index m = 0; m < d; ++m)
            for (Eigen::Index r = 0; r < d; ++r) {
              Complex first = 0.0, second = 0.0;
              for (Eigen::Index n = 0; n < d; ++n) first += noise(n, m) * kap1[idx(m, r, n)] * ctrl(r, n);
              // second term indexed at (m, r) by renaming (r, n) -> (m, r) and m -> n
              for (Eigen::Index n = 0; n < d; ++n) second += noise(r, n) * kap2[idx(m, r, n)] * ctrl(n, m);
              e(m, r) = first - second;
            }
          tmp.noalias() = v * e.transpose();
          rotated.noalias() = tmp * v_adj;
          rotated *= kI * s;
          write_flat(rotated, dest, i);
        }
      }
    }
  }
  std::vector<ComplexRowMatrix> out;
  out.reserve(staging.size());
  for (auto& block : staging) out.emplace_back(block * pulse.basis().trace_projector());
  return out;
}

namespace reference {

std::vector<ComplexRowMatrix> segment_control_matrix(const PulseSequence& pulse, std::size_t g,
                                                     const FrequencyGrid& grid) {
  const auto& seg = pulse.segment(g);
  const double dt = pulse.durations()[static_cast<Eigen::Index>(g)];
  const auto d = static_cast<Eigen::Index>(pulse.dim());
  const auto n_b = static_cast<Eigen::Index>(pulse.basis().size());
  const auto n_w = static_cast<Eigen::Index>(grid.size());
  std::vector<ComplexRowMatrix> out(pulse.n_noises(), ComplexRowMatrix::Zero(n_w, n_b));
  for (Eigen::Index w = 0; w < n_w; ++w) {
    const ComplexMatrix o = phase_table(seg, dt, grid[static_cast<std::size_t>(w)]);
    for (std::size_t a = 0; a < pulse.n_noises(); ++a) {
      const double s = sensitivity(pulse, a, g);
      const ComplexMatrix& b = seg.noise_ops[a];
      for (Eigen::Index j = 0; j < n_b; ++j) {
        const ComplexMatrix& c = seg.basis_ops[static_cast<std::size_t>(j)];
        Complex acc = 0.0;
        for (Eigen::Index i = 0; i < d; ++i)
          for (Eigen::Index k = 0; k < d; ++k) acc += b(i, k) * c(k, i) * o(i, k);
        out[a](w, j) = s * acc;
      }
    }
  }
  return out;
}

std::vector<ComplexRowMatrix> segment_control_matrix_derivative(const PulseSequence& pulse,
                                                                std::size_t g,
                                                                const FrequencyGrid& grid) {
  const auto& seg = pulse.segment(g);
  const double dt = pulse.durations()[static_cast<Eigen::Index>(g)];
  const auto d = static_cast<Eigen::Index>(pulse.dim());
  const auto n_b = static_cast<Eigen::Index>(pulse.basis().size());
  const auto n_w = static_cast<Eigen::Index>(grid.size());
  const std::size_t n_a = pulse.n_noises();
  const std::size_t n_c = pulse.n_controls();
  std::vector<ComplexRowMatrix> out(n_c * n_a, ComplexRowMatrix::Zero(n_w, n_b));

  std::vector<ComplexMatrix> k(static_cast<std::size_t>(d * d));
  for (Eigen::Index w = 0; w < n_w; ++w) {
    const double omega = grid[static_cast<std::size_t>(w)];
    for (Eigen::Index m = 0; m < d; ++m)
      for (Eigen::Index n = 0; n < d; ++n)
        k[static_cast<std::size_t>(m * d + n)] =
            k_matrix(seg, dt, omega, static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    for (std::size_t h = 0; h < n_c; ++h) {
      const ComplexMatrix& ctrl = seg.control_ops[h];
      for (Eigen::Index j = 0; j < n_b; ++j) {
        const ComplexMatrix& c = seg.basis_ops[static_cast<std::size_t>(j)];
        ComplexMatrix nmat(d, d);
        for (Eigen::Index m = 0; m < d; ++m)
          for (Eigen::Index n = 0; n < d; ++n) {
            const ComplexMatrix& kmn = k[static_cast<std::size_t>(m * d + n)];
            Complex acc = 0.0;
            for (Eigen::Index r = 0; r < d; ++r)
              acc += c(m, r) * kmn(r, n) * ctrl(r, n) - kmn(m, r) * ctrl(m, r) * c(r, n);
            nmat(m, n) = acc;
          }
        for (std::size_t a = 0; a < n_a; ++a) {
          const double s = sensitivity(pulse, a, g);
          out[h * n_a + a](w, j) = kI * s * (seg.noise_ops[a] * nmat).trace();
        }
      }
    }
  }
  return out;
}

}  // namespace reference

}  // namespace ffgrad::kernels
