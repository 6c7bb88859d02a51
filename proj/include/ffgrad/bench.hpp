#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ffgrad/gradients.hpp"

namespace ffgrad::bench {

enum class SweepParam { NOmega, NControls, NNoises, NSegments, Dim };

/// Accepts the CLI spellings nw, nc, na, ndt, d.
SweepParam parse_param(std::string_view name);
std::string to_string(SweepParam p);

struct BenchSpec {
  SweepParam param = SweepParam::NSegments;
  std::vector<std::size_t> values;
  std::size_t n_omega = 200;
  std::size_t n_controls = 2;
  std::size_t n_noises = 2;
  std::size_t n_drifts = 1;
  std::size_t dim = 2;
  std::size_t n_segments = 3;
  std::size_t repeats = 10;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument for unsorted values, zero repeats or d > 20.
  void validate() const;
};

struct SweepPoint {
  std::size_t value = 0;
  double median_seconds = 0.0;
  std::size_t repeats = 0;
  bool skipped = false;  // allocation failure
};

struct FitResult {
  double exponent = 0.0;
  double amplitude = 0.0;
  double residual = 0.0;  // RMS in log space
  std::size_t points = 0;
};

/// Observers for sweep phases, e.g. to check that timed regions contain no setup work.
struct SweepHooks {
  std::function<void()> before_generate;
  std::function<void()> after_generate;
  std::function<void()> timer_start;
  std::function<void()> timer_stop;
};

/// Drift is the sum of `n_drifts` random operators; sensitivities 1, dt 1.
PulseSequence random_pulse(std::size_t d, std::size_t n_segments, std::size_t n_controls,
                           std::size_t n_noises, std::size_t n_drifts, std::uint64_t seed);

/// Unit-norm Gaussian Hermitian matrix.
ComplexMatrix random_hermitian(std::size_t d, std::uint64_t seed);

/// Pink spectrum on a log grid over [1e-2, 1e2].
SpectralDensity bench_spectrum(std::size_t n_omega, std::size_t n_noises);

/// Median seconds of infidelity_derivative per swept value, single-threaded.
std::vector<SweepPoint> scaling_sweep(const BenchSpec& spec, const SweepHooks& hooks = {});

FitResult fit_exponent(const std::vector<double>& values, const std::vector<double>& seconds);
/// Skipped points are left out.
FitResult fit_exponent(const std::vector<SweepPoint>& points);

void write_csv(const std::filesystem::path& path, const BenchSpec& spec,
               const std::vector<SweepPoint>& points);
void write_fit(const std::filesystem::path& path, const BenchSpec& spec, const FitResult& fit);
/// Matplotlib script reading the CSV and drawing the log-log plot with the fit.
void write_plot_script(const std::filesystem::path& path, const std::filesystem::path& csv);

/// Pins the calling thread to the core named by FFGRAD_BENCH_CPU, if set.
/// Returns false when the variable is unset or pinning is unavailable.
bool pin_from_environment();

}  // namespace ffgrad::bench
