#include "ffgrad/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <new>
#include <random>
#include <stdexcept>

#include "ffgrad/kernels.hpp"
#include "ffgrad/optimizer.hpp"

#if defined(__linux__)
#include <sched.h>
#endif

namespace ffgrad::bench {

namespace {

using Clock = std::chrono::steady_clock;

void call(const std::function<void()>& f) {
  if (f) f();
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct PointShape {
  std::size_t d, n_segments, n_controls, n_noises, n_omega;
};

PointShape shape_for(const BenchSpec& spec, std::size_t value) {
  PointShape s{spec.dim, spec.n_segments, spec.n_controls, spec.n_noises, spec.n_omega};
  switch (spec.param) {
    case SweepParam::NOmega: s.n_omega = value; break;
    case SweepParam::NControls: s.n_controls = value; break;
    case SweepParam::NNoises: s.n_noises = value; break;
    case SweepParam::NSegments: s.n_segments = value; break;
    case SweepParam::Dim: s.d = value; break;
  }
  return s;
}

}  // namespace

SweepParam parse_param(std::string_view name) {
  if (name == "nw") return SweepParam::NOmega;
  if (name == "nc") return SweepParam::NControls;
  if (name == "na") return SweepParam::NNoises;
  if (name == "ndt") return SweepParam::NSegments;
  if (name == "d") return SweepParam::Dim;
  throw std::invalid_argument("unknown sweep parameter '" + std::string(name) + "' (nw, nc, na, ndt, d)");
}

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::NOmega: return "nw";
    case SweepParam::NControls: return "nc";
    case SweepParam::NNoises: return "na";
    case SweepParam::NSegments: return "ndt";
    case SweepParam::Dim: return "d";
  }
  return "?";
}

void BenchSpec::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 1) throw std::invalid_argument("sweep values must be >= 1");
    if (i > 0 && values[i] <= values[i - 1]) throw std::invalid_argument("sweep values must be strictly increasing");
  }
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (n_omega < 2 || n_controls < 1 || n_noises < 1 || n_drifts < 1 || dim < 2 || n_segments < 1)
    throw std::invalid_argument("fixed parameters out of range");
  if (param == SweepParam::NOmega && values.front() < 2) throw std::invalid_argument("n_omega must be >= 2");
  if (param == SweepParam::Dim) {
    if (values.front() < 2) throw std::invalid_argument("d must be >= 2");
    if (values.back() > 20) throw std::invalid_argument("d sweep is capped at 20");
  }
}

ComplexMatrix random_hermitian(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(normal(rng), normal(rng));
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  return h / h.norm();
}

PulseSequence random_pulse(std::size_t d, std::size_t n_segments, std::size_t n_controls,
                           std::size_t n_noises, std::size_t n_drifts, std::uint64_t seed) {
  if (d < 2 || n_segments < 1 || n_controls < 1 || n_noises < 1 || n_drifts < 1)
    throw std::invalid_argument("random_pulse: counts must be >= 1 and d >= 2");
  std::mt19937_64 rng(seed);
  auto next_seed = [&rng] { return rng(); };
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix drift = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < n_drifts; ++k) drift += random_hermitian(d, next_seed());
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::vector<ControlTerm> controls;
  for (std::size_t h = 0; h < n_controls; ++h) {
    ComplexMatrix op = random_hermitian(d, next_seed());
    RealVector u(static_cast<Eigen::Index>(n_segments));
    for (auto& x : u) x = amp(rng);
    controls.push_back({std::move(op), std::move(u)});
  }
  std::vector<NoiseTerm> noises;
  for (std::size_t a = 0; a < n_noises; ++a)
    noises.push_back({random_hermitian(d, next_seed()), RealVector::Ones(static_cast<Eigen::Index>(n_segments))});
  return PulseSequence(drift, std::move(controls), std::move(noises),
                       RealVector::Ones(static_cast<Eigen::Index>(n_segments)));
}

SpectralDensity bench_spectrum(std::size_t n_omega, std::size_t n_noises) {
  return SpectralDensity::pink(FrequencyGrid::logarithmic(1e-2, 1e2, n_omega), std::vector<double>(n_noises, 1e-3));
}

std::vector<SweepPoint> scaling_sweep(const BenchSpec& spec, const SweepHooks& hooks) {
  spec.validate();
  kernels::ThreadLimit single(1);
  std::vector<SweepPoint> out;
  for (std::size_t value : spec.values) {
    const PointShape s = shape_for(spec, value);
    SweepPoint point;
    point.value = value;
    point.repeats = spec.repeats;
    try {
      const SpectralDensity spectrum = bench_spectrum(s.n_omega, s.n_noises);
      std::vector<double> samples;
      for (std::size_t r = 0; r < spec.repeats; ++r) {
        call(hooks.before_generate);
        const PulseSequence pulse =
            random_pulse(s.d, s.n_segments, s.n_controls, s.n_noises, spec.n_drifts, spec.seed + r);
        call(hooks.after_generate);
        if (r == 0) {
          auto warm = infidelity_derivative(pulse, spectrum);
          (void)warm;
        }
        call(hooks.timer_start);
        auto start = Clock::now();
        auto grad = infidelity_derivative(pulse, spectrum);
        double elapsed = seconds_since(start);
        if (elapsed < 1e-3) {
          constexpr int kLoop = 100;
          start = Clock::now();
          for (int i = 0; i < kLoop; ++i) grad = infidelity_derivative(pulse, spectrum);
          elapsed = seconds_since(start) / kLoop;
        }
        call(hooks.timer_stop);
        samples.push_back(elapsed);
      }
      point.median_seconds = median(samples);
    } catch (const std::bad_alloc&) {
      point.skipped = true;
      point.median_seconds = std::nan("");
    }
    out.push_back(point);
  }
  return out;
}

FitResult fit_exponent(const std::vector<double>& values, const std::vector<double>& seconds) {
  if (values.size() != seconds.size()) throw std::invalid_argument("fit_exponent: size mismatch");
  if (values.size() < 3) throw std::invalid_argument("fit_exponent: need at least 3 points");
  const auto n = static_cast<Eigen::Index>(values.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = values[static_cast<std::size_t>(i)], t = seconds[static_cast<std::size_t>(i)];
    if (!(v > 0.0)) throw std::invalid_argument("fit_exponent: values must be > 0");
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("fit_exponent: times must be positive and finite");
    a(i, 0) = std::log(v);
    a(i, 1) = 1.0;
    y[i] = std::log(t);
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(y);
  FitResult fit;
  fit.exponent = coef[0];
  fit.amplitude = std::exp(coef[1]);
  fit.residual = std::sqrt((a * coef - y).squaredNorm() / static_cast<double>(n));
  fit.points = values.size();
  return fit;
}

FitResult fit_exponent(const std::vector<SweepPoint>& points) {
  std::vector<double> v, t;
  for (const auto& p : points) {
    if (p.skipped) continue;
    v.push_back(static_cast<double>(p.value));
    t.push_back(p.median_seconds);
  }
  return fit_exponent(v, t);
}

void write_csv(const std::filesystem::path& path, const BenchSpec& spec, const std::vector<SweepPoint>& points) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "param,value,median_seconds,repeats\n";
  for (const auto& p : points) {
    out << to_string(spec.param) << ',' << p.value << ',';
    if (p.skipped)
      out << "skipped";
    else
      out << p.median_seconds;
    out << ',' << p.repeats << '\n';
  }
}

void write_fit(const std::filesystem::path& path, const BenchSpec& spec, const FitResult& fit) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "param=" << to_string(spec.param) << '\n'
      << "exponent=" << fit.exponent << '\n'
      << "amplitude=" << fit.amplitude << '\n'
      << "residual=" << fit.residual << '\n'
      << "points=" << fit.points << '\n';
}

void write_plot_script(const std::filesystem::path& path, const std::filesystem::path& csv) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << R"(import csv
import sys

import matplotlib.pyplot as plt
import numpy as np

path = sys.argv[1] if len(sys.argv) > 1 else ")"
      << csv.filename().string() << R"("
rows = [r for r in csv.DictReader(open(path)) if r["median_seconds"] != "skipped"]
x = np.array([float(r["value"]) for r in rows])
t = np.array([float(r["median_seconds"]) for r in rows])
b, log_c = np.polyfit(np.log(x), np.log(t), 1)
plt.loglog(x, t, "o", label="median run time")
plt.loglog(x, np.exp(log_c) * x**b, "-", label=f"fit, exponent {b:.2f}")
plt.xlabel(rows[0]["param"])
plt.ylabel("seconds")
plt.legend()
plt.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
)";
}

bool pin_from_environment() {
  const char* env = std::getenv("FFGRAD_BENCH_CPU");
  if (!env || !*env) return false;
#if defined(__linux__)
  char* end = nullptr;
  const long cpu = std::strtol(env, &end, 10);
  if (*end != '\0' || cpu < 0 || cpu >= CPU_SETSIZE) return false;
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(static_cast<int>(cpu), &set);
  return sched_setaffinity(0, sizeof(set), &set) == 0;
#else
  return false;
#endif
}

}  // namespace ffgrad::bench
