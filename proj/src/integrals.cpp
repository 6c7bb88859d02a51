#include "ffgrad/integrals.hpp"

#include <cmath>

namespace ffgrad::integrals {

namespace {

constexpr Complex kI(0.0, 1.0);
constexpr std::size_t kMomentSeriesTerms = 24;
constexpr std::size_t kGapSeriesTerms = 8;

}  // namespace

Complex phase(double x, double T, Branch branch) {
  const double xt = x * T;
  const bool series = branch == Branch::Series ||
                      (branch == Branch::Automatic && std::abs(xt) < kPhaseSeriesThreshold);
  if (series) {
    const Complex z = kI * xt;
    return T * (1.0 + z * (1.0 / 2.0 + z * (1.0 / 6.0 + z * (1.0 / 24.0))));
  }
  return (std::polar(1.0, xt) - 1.0) / (kI * x);
}

template <std::size_t N>
std::array<Complex, N> moments(double x, double T, Branch branch) {
  std::array<Complex, N> out{};
  const double xt = x * T;
  const bool series = branch == Branch::Series ||
                      (branch == Branch::Automatic && std::abs(xt) <= kMomentSeriesThreshold);
  if (series) {
    // J_n = T^{n+1} sum_k (i x T)^k / (k! (n + k + 1))
    double tpow = T;
    for (std::size_t n = 0; n < N; ++n) {
      Complex acc = 0.0;
      Complex term = 1.0;
      for (std::size_t k = 0; k < kMomentSeriesTerms; ++k) {
        acc += term / static_cast<double>(n + k + 1);
        term *= kI * xt / static_cast<double>(k + 1);
      }
      out[n] = tpow * acc;
      tpow *= T;
    }
    return out;
  }
  const Complex e = std::polar(1.0, xt);
  out[0] = phase(x, T, Branch::ClosedForm);
  double tpow = 1.0;
  for (std::size_t n = 1; n < N; ++n) {
    tpow *= T;
    out[n] = (tpow * e - static_cast<double>(n) * out[n - 1]) / (kI * x);
  }
  return out;
}

template std::array<Complex, 2> moments<2>(double, double, Branch);
template std::array<Complex, kGapSeriesTerms + 1> moments<kGapSeriesTerms + 1>(double, double,
                                                                              Branch);

Complex first_moment(double x, double T, Branch branch) { return moments<2>(x, T, branch)[1]; }

GapBranch gap_branch(double y, double T) {
  if (y == 0.0) return GapBranch::Degenerate;
  if (std::abs(y * T) < kGapSeriesThreshold) return GapBranch::Series;
  return GapBranch::Quotient;
}

Complex gap_kernel(double x, double y, double T, GapBranch branch) {
  if (branch == GapBranch::Automatic) branch = gap_branch(y, T);
  switch (branch) {
    case GapBranch::Degenerate:
      return first_moment(x, T);
    case GapBranch::Series: {
      // m(t; y) = sum_{n>=1} (i y)^{n-1} t^n / n!
      const auto j = moments<kGapSeriesTerms + 1>(x, T);
      Complex acc = 0.0;
      Complex coeff = 1.0;
      for (std::size_t n = 1; n <= kGapSeriesTerms; ++n) {
        coeff /= static_cast<double>(n);
        acc += coeff * j[n];
        coeff *= kI * y;
      }
      return acc;
    }
    case GapBranch::Quotient:
    case GapBranch::Automatic:
      break;
  }
  return (phase(x + y, T) - phase(x, T)) / (kI * y);
}

}  // namespace ffgrad::integrals
