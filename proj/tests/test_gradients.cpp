#include <cmath>
#include <random>

#include "doctest.h"
#include "ffgrad/gradients.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace ffgrad;

namespace {

template <typename A, typename B>
double relative(const A& got, const B& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-12);
}

PulseSequence commuting_qubit(double u) {
  return PulseSequence(ComplexMatrix::Zero(2, 2), {{pauli('Z') / 2.0, RealVector::Constant(1, u)}},
                       {{pauli('Z') / std::sqrt(2.0), RealVector::Ones(1)}}, RealVector::Ones(1));
}

}  // namespace

TEST_CASE("M matrix") {
  const auto p = support::random_pulse(3, 3, 1, 1, 1, 2.0);
  for (double t : {0.0, 0.4, 1.7}) {
    const ComplexMatrix m = m_matrix(p, 0, t);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(std::abs(m(i, i) - t) < 1e-15);
  }
  const auto& seg = p.segment(0);
  const double t = 0.9;
  const ComplexMatrix m = m_matrix(p, 0, t);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index k = 0; k < 3; ++k) {
      if (i == k) continue;
      const double y = seg.level_gaps(i, k);
      const Complex ref = oracle::adaptive([&](double s) { return std::polar(1.0, y * s); }, 0.0, t);
      CHECK(std::abs(m(i, k) - ref) < 1e-12);
    }
}

TEST_CASE("propagator derivative") {
  SUBCASE("commuting generator") {
    const double u = 0.8;
    const auto p = commuting_qubit(u);
    const ComplexMatrix du = propagator_derivative(p, 0, 0);
    const ComplexMatrix want = Complex(0.0, -1.0) * (pauli('Z') / 2.0) * segment_propagator(p, 0);
    CHECK((du - want).norm() < 1e-14);
  }
  SUBCASE("finite differences on random segments") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto p = support::random_pulse(seed, 2 + seed % 3, 1, 2, 1, 2.0);
      for (std::size_t h = 0; h < 2; ++h) {
        const ComplexMatrix fd = finite_difference_gradient(
            [](const PulseSequence& q) { return ComplexMatrix(segment_propagator(q, 0)); }, p, h, 0);
        CHECK(relative(propagator_derivative(p, 0, h), fd) < 1e-6);
      }
    }
  }
}

TEST_CASE("cumulative propagator derivative") {
  const auto p = support::random_pulse(9, 2, 3, 1, 1, 1.5);
  const auto props = cumulative_propagators(p);
  SUBCASE("later controls do not affect earlier propagators") {
    for (std::size_t k = 0; k <= 3; ++k)
      for (std::size_t g = k; g < 3; ++g)
        CHECK(cumulative_propagator_derivative(p, props, k, 0, g).norm() == 0.0);
  }
  SUBCASE("the last cumulative propagator equals dU Q for one segment") {
    const auto q = support::random_pulse(10, 2, 1, 1, 1);
    const auto pr = cumulative_propagators(q);
    CHECK((cumulative_propagator_derivative(q, pr, 1, 0, 0) - propagator_derivative(q, 0, 0)).norm() < 1e-15);
  }
  SUBCASE("finite differences for every pair") {
    for (std::size_t k = 1; k <= 3; ++k)
      for (std::size_t g = 0; g < k; ++g) {
        const ComplexMatrix fd = finite_difference_gradient(
            [k](const PulseSequence& q) { return cumulative_propagators(q).cumulative[k]; }, p, 0, g);
        CHECK(relative(cumulative_propagator_derivative(p, props, k, 0, g), fd) < 1e-6);
      }
  }
}

TEST_CASE("Liouville derivative") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = support::random_pulse(50 + seed, 2 + seed % 2, 3, 2, 1, 1.5);
    const auto props = cumulative_propagators(p);
    CHECK(liouville_derivative(p, props, 1, 0, 2).norm() == 0.0);
    for (std::size_t k = 1; k <= 3; ++k)
      for (std::size_t g = 0; g < k; ++g) {
        const RealMatrix fd = finite_difference_gradient(
            [k](const PulseSequence& q) { return cumulative_propagators(q).liouville[k]; }, p, 1, g);
        CHECK(relative(liouville_derivative(p, props, k, 1, g), fd) < 1e-6);
      }
  }
}

TEST_CASE("K integral against quadrature") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = support::random_pulse(70 + seed, 3, 1, 1, 1, 3.0);
    const auto& seg = p.segment(0);
    const double dt = p.durations()[0];
    std::mt19937_64 rng(seed);
    const double omega = std::uniform_real_distribution<double>(0.0, 10.0)(rng);
    const std::size_t m = seed % 3, n = (seed / 3) % 3;
    const ComplexMatrix k = k_integral(p, 0, omega, m, n);
    const double x = omega + seg.level_gaps(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (Eigen::Index r = 0; r < 3; ++r)
      for (Eigen::Index q = 0; q < 3; ++q) {
        const double y = seg.level_gaps(r, q);
        const Complex ref = oracle::adaptive(
            [&](double t) {
              const double h = std::sin(0.5 * y * t);
              const Complex mt = y == 0.0 ? Complex(t) : Complex(std::sin(y * t) / y, 2.0 * h * h / y);
              return std::polar(1.0, x * t) * mt;
            },
            0.0, dt);
        CHECK(std::abs(k(r, q) - ref) < 1e-8);
      }
  }
}

TEST_CASE("segment control matrix derivative") {
  const auto grid = FrequencyGrid::logarithmic(1e-2, 50.0, 15);
  SUBCASE("other segments give exact zeros") {
    const auto p = support::random_pulse(12, 2, 3, 2, 1);
    for (const auto& b : segment_control_matrix_derivative(p, 1, 0, grid)) CHECK(b.norm() == 0.0);
    for (const auto& b : segment_control_matrix_derivative(p, 0, 2, grid)) CHECK(b.norm() == 0.0);
  }
  SUBCASE("finite differences") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto p = support::random_pulse(80 + seed, 2, 1, 2, 2, 2.0);
      const auto blocks = segment_control_matrix_derivative(p, 0, 0, grid);
      for (std::size_t h = 0; h < 2; ++h)
        for (std::size_t a = 0; a < 2; ++a) {
          const ComplexRowMatrix fd = finite_difference_gradient(
              [&](const PulseSequence& q) { return segment_control_matrix(q, 0, grid)[a]; }, p, h, 0);
          CHECK(relative(blocks[h * 2 + a], fd) < 1e-6);
        }
    }
  }
}

TEST_CASE("total control matrix derivative against finite differences") {
  const auto p = support::random_pulse(90, 2, 4, 2, 2, 1.5);
  const auto grid = FrequencyGrid::logarithmic(1e-2, 50.0, 20);
  const auto grad = total_control_matrix_derivative(p, grid);
  for (std::size_t g = 0; g < 4; ++g)
    for (std::size_t h = 0; h < 2; ++h)
      for (std::size_t a = 0; a < 2; ++a) {
        const ComplexRowMatrix fd = finite_difference_gradient(
            [&](const PulseSequence& q) { return total_control_matrix(q, grid).total[a]; }, p, h, g);
        CHECK(relative(grad.block(g, h, a), fd) < 1e-6);
      }
}

TEST_CASE("filter function derivative") {
  const auto grid = FrequencyGrid::logarithmic(1e-2, 50.0, 25);
  SUBCASE("dephasing with a commuting control is control independent") {
    const auto p = commuting_qubit(0.6);
    const auto cms = total_control_matrix(p, grid);
    const auto dff = filter_function_derivative(cms, total_control_matrix_derivative(p, grid));
    CHECK(dff.block(0, 0).cwiseAbs().maxCoeff() < 1e-10);
    const RealRowMatrix fd = finite_difference_gradient(
        [&](const PulseSequence& q) { return filter_function(total_control_matrix(q, grid)).values; }, p, 0, 0);
    CHECK(fd.cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("finite differences on random pulses") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto p = support::random_pulse(100 + seed, 2 + seed % 2, 3, 2, 2, 1.5);
      const auto cms = total_control_matrix(p, grid);
      const auto dff = filter_function_derivative(cms, total_control_matrix_derivative(p, grid));
      for (std::size_t g = 0; g < 3; ++g)
        for (std::size_t h = 0; h < 2; ++h) {
          const RealRowMatrix fd = finite_difference_gradient(
              [&](const PulseSequence& q) { return filter_function(total_control_matrix(q, grid)).values; },
              p, h, g);
          CHECK(relative(dff.block(g, h), fd) < 1e-6);
        }
    }
  }
}

TEST_CASE("infidelity derivative") {
  const auto grid = FrequencyGrid::logarithmic(1e-2, 1e2, 80);
  SUBCASE("shape") {
    const auto p = support::random_pulse(1, 2, 3, 1, 1);
    const auto g = infidelity_derivative(p, SpectralDensity::pink(grid, {1e-3}));
    CHECK(g.rows() == 1);
    CHECK(g.cols() == 3);
  }
  SUBCASE("two-qubit pulse under pink noise") {
    const PulseSequence base = support::random_pulse(7, 4, 4, 2, 2, 1.0);
    const PulseSequence p(base.drift(), base.controls(), base.noises(), base.durations(),
                          std::make_shared<OperatorBasis>(pauli_basis(2)));
    const auto spectrum = SpectralDensity::pink(grid, {1e-3, 5e-4});
    const auto grad = infidelity_derivative(p, spectrum);
    for (std::size_t h = 0; h < 2; ++h)
      for (std::size_t g = 0; g < 4; ++g) {
        const RealVector fd = finite_difference_gradient(
            [&](const PulseSequence& q) { return infidelity(q, spectrum).per_noise; }, p, h, g);
        const RealVector got = grad.col(static_cast<Eigen::Index>(h * 4 + g));
        CHECK(relative(got, fd) < 1e-5);
      }
  }
}

TEST_CASE("infidelity gradient agrees with finite differences over 100 seeded pulses") {
  const auto grid = FrequencyGrid::logarithmic(1e-2, 1e2, 40);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t d = 2 + seed % 3, n_seg = 1 + seed % 4, n_c = 1 + seed % 2;
    const auto p = support::random_pulse(1000 + seed, d, n_seg, n_c, 1, 1.0);
    const auto spectrum = SpectralDensity::pink(grid, {1e-3});
    const auto grad = infidelity_derivative(p, spectrum);
    const std::size_t h = seed % n_c, g = (seed / 2) % n_seg;
    const RealVector fd = finite_difference_gradient(
        [&](const PulseSequence& q) { return infidelity(q, spectrum).per_noise; }, p, h, g, 1e-3, true);
    const RealVector got = grad.col(static_cast<Eigen::Index>(h * n_seg + g));
    CHECK(relative(got, fd) < 1e-6);
  }
}

TEST_CASE("propagator derivative preserves the norm") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto p = support::random_pulse(2000 + seed, 2 + seed % 4, 1, 1, 1, 3.0);
    const ComplexMatrix du = propagator_derivative(p, 0, 0);
    CHECK(std::abs((segment_propagator(p, 0).adjoint() * du).trace().real()) < 1e-10);
  }
}

TEST_CASE("causality is exact") {
  const auto p = support::random_pulse(5, 2, 5, 2, 2);
  const auto props = cumulative_propagators(p);
  const auto grid = FrequencyGrid::logarithmic(1e-2, 1e2, 10);
  for (std::size_t g = 0; g < 5; ++g)
    for (std::size_t gp = g + 1; gp < 5; ++gp)
      for (std::size_t h = 0; h < 2; ++h) {
        CHECK(cumulative_propagator_derivative(p, props, g + 1, h, gp).cwiseAbs().maxCoeff() == 0.0);
        CHECK(liouville_derivative(p, props, g + 1, h, gp).cwiseAbs().maxCoeff() == 0.0);
        for (const auto& b : segment_control_matrix_derivative(p, g, gp, grid))
          CHECK(b.cwiseAbs().maxCoeff() == 0.0);
      }
}

TEST_CASE("infidelity gradient oracle suite at step 1e-6") {
  // double-precision differences bottom out near 1e-10 * I, so the forward
  // model is re-evaluated in extended precision for this comparison
  const auto grid = FrequencyGrid::logarithmic(1e-2, 1e2, 50);
  const auto spectrum = SpectralDensity::pink(grid, {1e-3, 1e-3});
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = support::random_pulse(500 + seed, 2, 3, 2, 2);
    const auto grad = infidelity_derivative(p, spectrum);
    const oracle::ExtendedInfidelity model(p, spectrum);
    for (std::size_t k = 0; k < 6; ++k) {
      const auto fd = model.central_difference(k, 1e-6L);
      for (Eigen::Index a = 0; a < 2; ++a)
        worst = std::max(worst, oracle::rel_err(grad(a, static_cast<Eigen::Index>(k)), static_cast<double>(fd[a])));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("extended-precision model agrees with the double-precision forward model") {
  const auto grid = FrequencyGrid::logarithmic(1e-2, 1e2, 30);
  const auto spectrum = SpectralDensity::pink(grid, {1e-3});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = support::random_pulse(900 + seed, 2 + seed % 2, 2, 1, 1, 1.5);
    std::vector<long double> x;
    for (double v : p.amplitude_vector()) x.push_back(v);
    const auto ext = oracle::ExtendedInfidelity(p, spectrum)(x);
    CHECK(oracle::rel_err(static_cast<double>(ext[0]), infidelity(p, spectrum).total) < 1e-12);
  }
}
