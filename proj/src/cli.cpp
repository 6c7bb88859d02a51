#include "ffgrad/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ffgrad/bench.hpp"
#include "ffgrad/kernels.hpp"
#include "ffgrad/pulse_io.hpp"

namespace ffgrad {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  return out;
}

fs::path sibling(const fs::path& path, const std::string& suffix, const std::string& extension) {
  fs::path out = path;
  out.replace_filename(path.stem().string() + suffix + extension);
  return out;
}

struct FilterfnArgs {
  std::string pulse, spectrum, out, infidelity_out;
};

void run_filterfn(const FilterfnArgs& args) {
  const PulseSequence pulse = io::load_pulse(args.pulse);
  const SpectralDensity spectrum = io::load_spectrum(args.spectrum, pulse.n_noises());
  const ControlMatrixSet cms = total_control_matrix(pulse, spectrum.grid());
  const FilterFunction ff = filter_function(cms);
  const Infidelity inf = infidelity(ff, spectrum, pulse.dim());

  std::ofstream out = open_output(args.out);
  out << "omega";
  for (std::size_t a = 0; a < pulse.n_noises(); ++a) out << ",F_" << a;
  out << '\n';
  for (std::size_t i = 0; i < ff.grid.size(); ++i) {
    out << ff.grid[i];
    for (Eigen::Index a = 0; a < ff.values.rows(); ++a) out << ',' << ff.values(a, static_cast<Eigen::Index>(i));
    out << '\n';
  }
  const fs::path inf_path = args.infidelity_out.empty() ? sibling(args.out, "_infidelity", ".csv")
                                                        : fs::path(args.infidelity_out);
  std::ofstream inf_out = open_output(inf_path);
  inf_out << "alpha,infidelity\n";
  for (Eigen::Index a = 0; a < inf.per_noise.size(); ++a) inf_out << a << ',' << inf.per_noise[a] << '\n';
}

struct GradientArgs {
  std::string pulse, spectrum, out;
  bool check_fd = false;
  double fd_step = 1e-6;
};

void run_gradient(const GradientArgs& args) {
  const PulseSequence pulse = io::load_pulse(args.pulse);
  const SpectralDensity spectrum = io::load_spectrum(args.spectrum, pulse.n_noises());
  const InfidelityGradient grad = infidelity_derivative(pulse, spectrum);
  const std::size_t n = pulse.n_segments();

  std::vector<RealVector> fd;
  if (args.check_fd) {
    auto model = [&spectrum](const PulseSequence& p) { return infidelity(p, spectrum).per_noise; };
    for (std::size_t h = 0; h < pulse.n_controls(); ++h)
      for (std::size_t g = 0; g < n; ++g) fd.push_back(finite_difference_gradient(model, pulse, h, g, args.fd_step));
  }

  std::ofstream out = open_output(args.out);
  out << "alpha,h,g,value";
  if (args.check_fd) out << ",fd_value,rel_err";
  out << '\n';
  double worst = 0.0;
  for (Eigen::Index a = 0; a < grad.rows(); ++a)
    for (std::size_t h = 0; h < pulse.n_controls(); ++h)
      for (std::size_t g = 0; g < n; ++g) {
        const auto col = static_cast<Eigen::Index>(h * n + g);
        const double value = grad(a, col);
        out << a << ',' << h << ',' << g << ',' << value;
        if (args.check_fd) {
          const double ref = fd[static_cast<std::size_t>(col)][a];
          const double scale = std::max(std::abs(ref), std::abs(value));
          const double rel = scale > 0.0 ? std::abs(value - ref) / scale : 0.0;
          worst = std::max(worst, rel);
          out << ',' << ref << ',' << rel;
        }
        out << '\n';
      }
  if (args.check_fd) std::cout << "max_rel_err=" << worst << '\n';
}

struct OptimizeArgs {
  std::string problem, algo = "both", out, restart_out;
  std::size_t runs = 1;
  std::uint64_t seed = 0;
};

void run_optimize(const OptimizeArgs& args) {
  const OptimizationProblem prob = io::load_problem(args.problem);
  CompareOptions opts;
  opts.run_lbfgsb = args.algo != "neldermead";
  opts.run_nelder_mead = args.algo != "lbfgsb";
  const ComparisonReport report = compare_runs(prob, args.runs, args.seed, opts);

  std::ofstream out = open_output(args.out);
  out << "algo,seed,iterations,cost_evals,grad_evals,wall_seconds,final_infidelity,termination\n";
  auto rows = [&](const std::vector<RunRecord>& runs) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const RunRecord& rec = runs[r];
      out << rec.algorithm << ',' << report.seeds[r] << ',' << rec.iterations << ',' << rec.cost_evals << ','
          << rec.grad_evals << ',' << rec.wall_seconds << ',' << rec.final_cost << ',' << to_string(rec.reason)
          << '\n';
    }
  };
  rows(report.lbfgsb);
  rows(report.nelder_mead);

  if (!args.restart_out.empty()) {
    std::ofstream curve = open_output(args.restart_out);
    curve << "n_restarts";
    if (opts.run_lbfgsb) curve << ",lbfgsb";
    if (opts.run_nelder_mead) curve << ",neldermead";
    curve << '\n';
    for (std::size_t k = 0; k < args.runs; ++k) {
      curve << k + 1;
      if (opts.run_lbfgsb) curve << ',' << report.lbfgsb_restart[k];
      if (opts.run_nelder_mead) curve << ',' << report.nelder_mead_restart[k];
      curve << '\n';
    }
  }
}

struct BenchArgs {
  std::string param, values, out;
  std::size_t repeats = 10;
  std::uint64_t seed = 1;
  std::size_t n_omega = 200, n_controls = 2, n_noises = 2, dim = 2, n_segments = 3, n_drifts = 1;
};

std::vector<std::size_t> parse_values(const std::string& text) {
  std::vector<std::size_t> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw CLI::ValidationError("--values", "'" + item + "' is not a positive integer");
    values.push_back(v);
  }
  return values;
}

bench::BenchSpec bench_spec(const BenchArgs& args, const std::vector<std::size_t>& values) {
  bench::BenchSpec spec;
  spec.param = bench::parse_param(args.param);
  spec.values = values;
  spec.repeats = args.repeats;
  spec.seed = args.seed;
  spec.n_omega = args.n_omega;
  spec.n_controls = args.n_controls;
  spec.n_noises = args.n_noises;
  spec.dim = args.dim;
  spec.n_segments = args.n_segments;
  spec.n_drifts = args.n_drifts;
  spec.validate();
  return spec;
}

void run_bench(const BenchArgs& args, const bench::BenchSpec& spec) {
  if (bench::pin_from_environment()) std::cerr << "pinned to CPU " << std::getenv("FFGRAD_BENCH_CPU") << '\n';
  const auto points = bench::scaling_sweep(spec);
  const fs::path out(args.out);
  bench::write_csv(out, spec, points);
  bench::write_plot_script(sibling(out, "_plot", ".py"), out);
  for (const auto& p : points)
    if (p.skipped) std::cerr << "warning: " << bench::to_string(spec.param) << '=' << p.value << " skipped (out of memory)\n";
  std::size_t usable = 0;
  for (const auto& p : points) usable += p.skipped ? 0 : 1;
  if (usable >= 3) {
    const bench::FitResult fit = bench::fit_exponent(points);
    bench::write_fit(sibling(out, "", ".fit"), spec, fit);
    std::cout << "exponent=" << fit.exponent << " residual=" << fit.residual << '\n';
  } else {
    std::cerr << "warning: fewer than 3 timed points, no fit written\n";
  }
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Filter-function infidelities, analytic gradients and pulse optimization"};
  app.set_version_flag("--version", std::string("ffgrad ") + kVersion);
  app.require_subcommand(1);

  FilterfnArgs ff;
  auto* filterfn = app.add_subcommand("filterfn", "Filter functions and infidelities of a pulse");
  filterfn->add_option("--pulse", ff.pulse, "Pulse JSON file")->required()->check(CLI::ExistingFile);
  filterfn->add_option("--spectrum", ff.spectrum, "Spectrum JSON file")->required()->check(CLI::ExistingFile);
  filterfn->add_option("--out", ff.out, "Filter-function CSV")->required();
  filterfn->add_option("--infidelity-out", ff.infidelity_out, "Per-noise infidelity CSV (default <out>_infidelity.csv)");

  GradientArgs gr;
  auto* gradient = app.add_subcommand("gradient", "Infidelity gradient with respect to the control amplitudes");
  gradient->add_option("--pulse", gr.pulse, "Pulse JSON file")->required()->check(CLI::ExistingFile);
  gradient->add_option("--spectrum", gr.spectrum, "Spectrum JSON file")->required()->check(CLI::ExistingFile);
  gradient->add_option("--out", gr.out, "Gradient CSV")->required();
  gradient->add_flag("--check-fd", gr.check_fd, "Append central finite differences and relative errors");
  gradient->add_option("--fd-step", gr.fd_step, "Finite-difference step")->check(CLI::PositiveNumber);

  OptimizeArgs op;
  auto* optimize = app.add_subcommand("optimize", "Bound-constrained pulse optimization from random starts");
  optimize->add_option("--problem", op.problem, "Problem JSON file")->required()->check(CLI::ExistingFile);
  optimize->add_option("--algo", op.algo, "lbfgsb, neldermead or both")
      ->check(CLI::IsMember({"lbfgsb", "neldermead", "both"}));
  optimize->add_option("--runs", op.runs, "Number of runs per algorithm")->check(CLI::PositiveNumber);
  optimize->add_option("--seed", op.seed, "Seed of the first start");
  optimize->add_option("--out", op.out, "Run CSV")->required();
  optimize->add_option("--restart-out", op.restart_out, "Expected-minimum restart curve CSV");

  BenchArgs be;
  auto* benchcmd = app.add_subcommand("bench", "Run-time scaling sweep of the gradient");
  benchcmd->add_option("--param", be.param, "Swept parameter")->required()->check(CLI::IsMember({"nw", "nc", "na", "ndt", "d"}));
  benchcmd->add_option("--values", be.values, "Comma-separated increasing values")->required();
  benchcmd->add_option("--repeats", be.repeats, "Pulses per point")->check(CLI::PositiveNumber);
  benchcmd->add_option("--seed", be.seed, "Seed of the first pulse");
  benchcmd->add_option("--out", be.out, "Timing CSV")->required();
  benchcmd->add_option("--nw", be.n_omega, "Fixed number of frequency samples");
  benchcmd->add_option("--nc", be.n_controls, "Fixed number of controls");
  benchcmd->add_option("--na", be.n_noises, "Fixed number of noise sources");
  benchcmd->add_option("--ndt", be.n_segments, "Fixed number of segments");
  benchcmd->add_option("--d", be.dim, "Fixed dimension");
  benchcmd->add_option("--nd", be.n_drifts, "Number of drift operators");

  bench::BenchSpec spec;
  try {
    app.parse(argc, argv);
    if (benchcmd->parsed()) spec = bench_spec(be, parse_values(be.values));
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for more information.\n";
    return 1;
  }

  try {
    if (filterfn->parsed()) run_filterfn(ff);
    if (gradient->parsed()) run_gradient(gr);
    if (optimize->parsed()) run_optimize(op);
    if (benchcmd->parsed()) run_bench(be, spec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace ffgrad
