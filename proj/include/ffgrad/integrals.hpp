#pragma once

#include <array>

#include "ffgrad/operator_algebra.hpp"

// Closed-form time integrals over a single segment [0, T], with series
// replacements wherever a denominator vanishes.
namespace ffgrad::integrals {

/// |x T| below this uses the Taylor series of (e^{ixT} - 1)/(ix).
inline constexpr double kPhaseSeriesThreshold = 1e-6;
/// |x T| up to this evaluates moments by their power series, beyond by recurrence.
inline constexpr double kMomentSeriesThreshold = 1.0;
/// 0 < |y T| below this expands the gap-dependent kernel in powers of y.
inline constexpr double kGapSeriesThreshold = 1e-2;

enum class Branch { Automatic, Series, ClosedForm };

/// int_0^T e^{i x t} dt = (e^{i x T} - 1) / (i x).
Complex phase(double x, double T, Branch branch = Branch::Automatic);

/// int_0^T t^n e^{i x t} dt for n = 0..N-1.
template <std::size_t N>
std::array<Complex, N> moments(double x, double T, Branch branch = Branch::Automatic);

/// int_0^T t e^{i x t} dt.
Complex first_moment(double x, double T, Branch branch = Branch::Automatic);

enum class GapBranch { Automatic, Degenerate, Series, Quotient };

/// int_0^T e^{i x t} m(t; y) dt with m(t; y) = (e^{i y t} - 1)/(i y), m(t; 0) = t.
/// The caller is responsible for snapping y to exactly zero when degenerate.
Complex gap_kernel(double x, double y, double T, GapBranch branch = GapBranch::Automatic);

/// Branch `gap_kernel` takes for a given (nonzero or zero) y in Automatic mode.
GapBranch gap_branch(double y, double T);

}  // namespace ffgrad::integrals
