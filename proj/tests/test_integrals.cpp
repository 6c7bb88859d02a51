#include <cmath>
#include <random>

#include "doctest.h"
#include "ffgrad/integrals.hpp"
#include "oracles.hpp"

using namespace ffgrad;
using namespace ffgrad::integrals;

namespace {

Complex direct_kernel(double x, double y, double T) {
  return oracle::adaptive(
      [&](double t) {
        const double h = std::sin(0.5 * y * t);
        const Complex m = y == 0.0 ? Complex(t) : Complex(std::sin(y * t) / y, 2.0 * h * h / y);
        return std::polar(1.0, x * t) * m;
      },
      0.0, T);
}

}  // namespace

TEST_CASE("phase integral") {
  CHECK(std::abs(phase(0.0, 1.0) - 1.0) < 1e-16);
  CHECK(std::abs(phase(0.0, 2.5) - 2.5) < 1e-16);
  CHECK(std::abs(phase(M_PI, 1.0) - Complex(0.0, 2.0 / M_PI)) < 1e-15);
  CHECK(std::abs(phase(1e-9, 1.0) - Complex(1.0, 0.5e-9)) < 1e-16);
}

TEST_CASE("phase branches agree at the threshold") {
  for (double x : {1e-6, 5e-7, -8e-7}) {
    const Complex s = phase(x, 1.0, Branch::Series);
    const Complex c = phase(x, 1.0, Branch::ClosedForm);
    CHECK(std::abs(s - c) < 1e-10);
  }
}

TEST_CASE("phase integral against quadrature") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> xs(-20.0, 20.0), ts(0.1, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double x = xs(rng), T = ts(rng);
    const Complex q = oracle::adaptive([&](double t) { return std::polar(1.0, x * t); }, 0.0, T);
    CHECK(std::abs(phase(x, T) - q) < 1e-10);
  }
}

TEST_CASE("moments against quadrature in both branches") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xs(-4.0, 4.0);
  for (int i = 0; i < 50; ++i) {
    const double x = xs(rng), T = 1.3;
    const auto m = moments<9>(x, T);
    for (std::size_t n = 0; n < 9; ++n) {
      const Complex q = oracle::adaptive(
          [&](double t) { return std::pow(t, static_cast<double>(n)) * std::polar(1.0, x * t); }, 0.0, T);
      CHECK(std::abs(m[n] - q) < 1e-10 * std::max(1.0, std::abs(q)));
    }
  }
}

TEST_CASE("moment branches are continuous at the switch") {
  for (double x : {0.999, 1.0, 1.001}) {
    const auto s = moments<9>(x, 1.0, Branch::Series);
    const auto c = moments<9>(x, 1.0, Branch::ClosedForm);
    for (std::size_t n = 0; n < 9; ++n) CHECK(std::abs(s[n] - c[n]) < 1e-11);
  }
}

TEST_CASE("gap kernel diagonal value") {
  // M_pp = t, so the kernel is the first moment
  for (double x : {0.0, 0.3, -2.0, 15.0})
    CHECK(std::abs(gap_kernel(x, 0.0, 1.0) - first_moment(x, 1.0)) == 0.0);
  CHECK(std::abs(gap_kernel(0.0, 0.0, 2.0) - 2.0) < 1e-15);
  CHECK(gap_branch(0.0, 1.0) == GapBranch::Degenerate);
  CHECK(gap_branch(1e-4, 1.0) == GapBranch::Series);
  CHECK(gap_branch(0.5, 1.0) == GapBranch::Quotient);
}

TEST_CASE("gap kernel off-diagonal branch tends to the diagonal branch") {
  for (double x : {0.0, 0.7, -3.0, 12.0}) {
    const Complex limit = gap_kernel(x, 0.0, 1.0, GapBranch::Degenerate);
    const Complex near = gap_kernel(x, 1e-7, 1.0, GapBranch::Series);
    // the two differ by the O(y) slope; the branch evaluated at the same y must agree to 1e-8
    CHECK(std::abs(gap_kernel(x, 1e-7, 1.0, GapBranch::Quotient) - near) < 1e-8);
    CHECK(std::abs(near - limit) <= 1e-7 / 6.0 + 1e-12);
  }
}

TEST_CASE("gap kernel branches agree near the series threshold") {
  for (double y : {9e-3, 1e-2, 1.1e-2})
    for (double x : {0.0, 0.4, -6.0}) {
      const Complex s = gap_kernel(x, y, 1.0, GapBranch::Series);
      const Complex q = gap_kernel(x, y, 1.0, GapBranch::Quotient);
      CHECK(std::abs(s - q) < 1e-12);
    }
}

TEST_CASE("gap kernel against quadrature over 100 seeded cases") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> xs(-10.0, 10.0), ts(0.2, 2.0);
  std::uniform_int_distribution<int> scale(-9, 1);
  for (int i = 0; i < 100; ++i) {
    const double x = xs(rng), T = ts(rng);
    const double y = (i % 10 == 0) ? 0.0 : xs(rng) * std::pow(10.0, scale(rng));
    const Complex q = direct_kernel(x, y, T);
    CHECK(std::abs(gap_kernel(x, y, T) - q) < 1e-8 * std::max(1.0, std::abs(q)));
  }
}
