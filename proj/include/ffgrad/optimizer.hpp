#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffgrad/gradients.hpp"

namespace ffgrad {

/// Pulse optimization task: minimize systematic plus noise infidelity over the
/// amplitudes of `pulse`, flattened in (control, segment) order.
struct OptimizationProblem {
  OptimizationProblem(PulseSequence pulse, ComplexMatrix target, SpectralDensity spectrum,
                      RealVector lower, RealVector upper, double epsilon = 1e-7,
                      std::size_t max_iter = 10000);

  PulseSequence pulse;
  ComplexMatrix target;
  SpectralDensity spectrum;
  RealVector lower;
  RealVector upper;
  double epsilon;
  std::size_t max_iter;

  std::size_t n_parameters() const { return static_cast<std::size_t>(lower.size()); }
};

enum class Termination {
  Converged,          // cost improvement below epsilon
  MaxIterations,
  ProjectedGradient,  // first-order optimality reached exactly
  LineSearchFailure,
  DegenerateSimplex,
};

std::string to_string(Termination t);

struct RunRecord {
  std::string algorithm;
  std::vector<double> cost_trace;  // best cost after each iteration, starting value first
  double wall_seconds = 0.0;
  std::size_t iterations = 0;
  std::size_t cost_evals = 0;
  std::size_t grad_evals = 0;
  RealVector x;
  double final_cost = 0.0;
  Termination reason = Termination::MaxIterations;
};

/// Thrown when the cost is not finite; carries the offending iterate.
class NonFiniteCost : public std::runtime_error {
 public:
  explicit NonFiniteCost(RealVector x);
  const RealVector& iterate() const { return x_; }

 private:
  RealVector x_;
};

/// 1 - |tr(U_target^dagger Q)|^2 / d^2.
double systematic_infidelity(const ComplexMatrix& q_final, const ComplexMatrix& target);

/// Gradient of systematic_infidelity(Q_n, target) in amplitude order h * n + g'.
RealVector systematic_infidelity_gradient(const PulseSequence& pulse, const Propagators& props,
                                          const ComplexMatrix& target);

/// Systematic plus summed noise infidelity; amplitudes outside the bounds are clamped.
double total_cost(const RealVector& x, const OptimizationProblem& prob);
RealVector total_cost_gradient(const RealVector& x, const OptimizationProblem& prob);
/// Cost and gradient sharing one set of propagators and control matrices.
double total_cost_and_gradient(const RealVector& x, const OptimizationProblem& prob,
                               RealVector& gradient);

using Objective = std::function<double(const RealVector&)>;
using ObjectiveWithGradient = std::function<double(const RealVector&, RealVector&)>;

struct MinimizeOptions {
  RealVector lower;
  RealVector upper;
  double epsilon = 1e-7;
  std::size_t max_iter = 10000;
  std::size_t memory = 10;  // L-BFGS-B only
};

/// Limited-memory BFGS with gradient projection onto the box (generalized
/// Cauchy point, subspace minimization, strong-Wolfe line search).
RunRecord lbfgsb_minimize(const ObjectiveWithGradient& f, RealVector x0, const MinimizeOptions& opts);

/// Nelder-Mead simplex with trial points clipped to the box. Stops when the
/// spread of cost values over the simplex falls below epsilon.
RunRecord nelder_mead_minimize(const Objective& f, RealVector x0, const MinimizeOptions& opts);

RunRecord lbfgsb_minimize(const OptimizationProblem& prob, const RealVector& x0);
RunRecord nelder_mead_minimize(const OptimizationProblem& prob, const RealVector& x0);

/// Uniform draw from the central half of the box.
RealVector random_start(const OptimizationProblem& prob, std::uint64_t seed);

/// Expected minimum of n_R draws with replacement from `finals`, n_R = 1..max_restarts.
std::vector<double> restart_curve(std::vector<double> finals, std::size_t max_restarts);

struct ComparisonReport {
  std::vector<std::uint64_t> seeds;
  std::vector<RunRecord> lbfgsb;
  std::vector<RunRecord> nelder_mead;
  std::vector<double> lbfgsb_restart;
  std::vector<double> nelder_mead_restart;
};

struct CompareOptions {
  bool run_lbfgsb = true;
  bool run_nelder_mead = true;
};

/// Runs the selected algorithms single-threaded from shared starts seeded seed, seed + 1, ...
ComparisonReport compare_runs(const OptimizationProblem& prob, std::size_t n_runs,
                              std::uint64_t seed, const CompareOptions& opts = {});

double median(std::vector<double> values);

}  // namespace ffgrad
