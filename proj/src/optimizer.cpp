#include "ffgrad/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "ffgrad/kernels.hpp"

namespace ffgrad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_box(const RealVector& x0, const RealVector& lower, const RealVector& upper) {
  if (lower.size() != x0.size() || upper.size() != x0.size())
    throw std::invalid_argument("bounds must have one entry per parameter");
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    if (!(lower[i] <= upper[i]))
      throw std::invalid_argument("lower bound exceeds upper bound at index " + std::to_string(i));
    if (!(x0[i] >= lower[i] && x0[i] <= upper[i]))
      throw std::invalid_argument("starting point outside the bounds at index " + std::to_string(i));
  }
}

RealVector clip(const RealVector& x, const RealVector& lower, const RealVector& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

// ---------------------------------------------------------------------------
// L-BFGS-B

struct LimitedMemory {
  std::size_t capacity;
  std::vector<RealVector> s, y;
  double theta = 1.0;

  bool empty() const { return s.empty(); }
  void clear() {
    s.clear();
    y.clear();
    theta = 1.0;
  }
  void push(const RealVector& sk, const RealVector& yk) {
    const double sy = sk.dot(yk), yy = yk.squaredNorm();
    if (!(sy > std::numeric_limits<double>::epsilon() * yy)) return;
    s.push_back(sk);
    y.push_back(yk);
    if (s.size() > capacity) {
      s.erase(s.begin());
      y.erase(y.begin());
    }
    theta = yy / sy;
  }

  /// Dense B = theta I - W M W^T with W = [Y, theta S].
  RealMatrix hessian(Eigen::Index n) const {
    RealMatrix b = theta * RealMatrix::Identity(n, n);
    if (s.empty()) return b;
    const auto k = static_cast<Eigen::Index>(s.size());
    RealMatrix sm(n, k), ym(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      sm.col(j) = s[static_cast<std::size_t>(j)];
      ym.col(j) = y[static_cast<std::size_t>(j)];
    }
    const RealMatrix sy = sm.transpose() * ym;
    RealMatrix middle = RealMatrix::Zero(2 * k, 2 * k);
    for (Eigen::Index i = 0; i < k; ++i) {
      middle(i, i) = -sy(i, i);
      for (Eigen::Index j = 0; j < i; ++j) {
        middle(k + i, j) = sy(i, j);
        middle(j, k + i) = sy(i, j);
      }
    }
    middle.bottomRightCorner(k, k) = theta * sm.transpose() * sm;
    RealMatrix w(n, 2 * k);
    w << ym, theta * sm;
    const RealMatrix mw = middle.partialPivLu().solve(w.transpose());
    b -= w * mw;
    return 0.5 * (b + b.transpose());
  }
};

/// Generalized Cauchy point along the projected steepest-descent path.
RealVector cauchy_point(const RealVector& x, const RealVector& g, const RealVector& lower,
                        const RealVector& upper, const RealMatrix& b) {
  const Eigen::Index n = x.size();
  RealVector t(n), d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (g[i] < 0.0)
      t[i] = upper[i] == kInf ? kInf : (x[i] - upper[i]) / g[i];
    else if (g[i] > 0.0)
      t[i] = lower[i] == -kInf ? kInf : (x[i] - lower[i]) / g[i];
    else
      t[i] = kInf;
    d[i] = t[i] > 0.0 ? -g[i] : 0.0;
  }
  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < n; ++i)
    if (t[i] > 0.0 && t[i] < kInf) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index c) { return t[a] < t[c]; });

  RealVector z = RealVector::Zero(n);
  RealVector bd = b * d;
  double fp = g.dot(d);
  double fpp = d.dot(bd);
  double t_prev = 0.0;
  std::size_t next = 0;
  while (true) {
    if (fp >= 0.0) break;
    const double t_next = next < order.size() ? t[order[next]] : kInf;
    const double step = fpp > 0.0 ? -fp / fpp : kInf;
    if (t_prev + step < t_next) {
      z += step * d;
      break;
    }
    if (t_next == kInf) break;
    z += (t_next - t_prev) * d;
    t_prev = t_next;
    while (next < order.size() && t[order[next]] == t_next) {
      const Eigen::Index j = order[next++];
      z[j] = (d[j] > 0.0 ? upper[j] : lower[j]) - x[j];
      bd -= b.col(j) * d[j];
      d[j] = 0.0;
    }
    fp = g.dot(d) + z.dot(bd);
    fpp = d.dot(bd);
  }
  return clip(x + z, lower, upper);
}

/// Minimizes the quadratic model over the variables free at the Cauchy point.
RealVector subspace_minimum(const RealVector& x, const RealVector& g, const RealVector& xc,
                            const RealVector& lower, const RealVector& upper, const RealMatrix& b,
                            double theta) {
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (xc[i] > lower[i] && xc[i] < upper[i]) free.push_back(i);
  if (free.empty()) return xc;
  const auto nf = static_cast<Eigen::Index>(free.size());
  const RealVector r = g + b * (xc - x);
  RealMatrix bff(nf, nf);
  RealVector rf(nf);
  for (Eigen::Index i = 0; i < nf; ++i) {
    rf[i] = r[free[static_cast<std::size_t>(i)]];
    for (Eigen::Index j = 0; j < nf; ++j)
      bff(i, j) = b(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]);
  }
  Eigen::LDLT<RealMatrix> ldlt(bff);
  RealVector delta;
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) delta = ldlt.solve(-rf);
  if (delta.size() != nf || !delta.allFinite()) delta = -rf / theta;

  RealVector projected = xc;
  for (Eigen::Index i = 0; i < nf; ++i) projected[free[static_cast<std::size_t>(i)]] += delta[i];
  projected = clip(projected, lower, upper);
  if ((projected - x).dot(g) < 0.0) return projected;

  double alpha = 1.0;
  for (Eigen::Index i = 0; i < nf; ++i) {
    const Eigen::Index j = free[static_cast<std::size_t>(i)];
    if (delta[i] > 0.0) alpha = std::min(alpha, (upper[j] - xc[j]) / delta[i]);
    if (delta[i] < 0.0) alpha = std::min(alpha, (lower[j] - xc[j]) / delta[i]);
  }
  RealVector out = xc;
  for (Eigen::Index i = 0; i < nf; ++i) out[free[static_cast<std::size_t>(i)]] += alpha * delta[i];
  return clip(out, lower, upper);
}

struct LinePoint {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;
  RealVector g;
};

double cubic_minimizer(const LinePoint& a, const LinePoint& b) {
  const double d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
  const double disc = d1 * d1 - a.slope * b.slope;
  const double lo = std::min(a.alpha, b.alpha), hi = std::max(a.alpha, b.alpha);
  const double mid = 0.5 * (lo + hi);
  if (!(disc >= 0.0)) return mid;
  const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
  const double denom = b.slope - a.slope + 2.0 * d2;
  if (denom == 0.0) return mid;
  const double c = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / denom;
  const double margin = 0.1 * (hi - lo);
  if (!std::isfinite(c) || c < lo + margin || c > hi - margin) return mid;
  return c;
}

/// Strong-Wolfe search on [0, alpha_max]; nullopt-like `ok = false` on failure.
struct LineSearchResult {
  bool ok = false;
  LinePoint point;
};

LineSearchResult strong_wolfe(const std::function<LinePoint(double)>& phi, const LinePoint& origin,
                              double alpha0, double alpha_max) {
  constexpr double c1 = 1e-4, c2 = 0.9;
  constexpr int max_evals = 30;
  int evals = 0;
  LinePoint best = origin;
  auto sufficient = [&](const LinePoint& p) { return p.f <= origin.f + c1 * p.alpha * origin.slope; };
  auto curvature = [&](const LinePoint& p) { return std::abs(p.slope) <= -c2 * origin.slope; };
  auto remember = [&](const LinePoint& p) {
    if (sufficient(p) && p.f < best.f) best = p;
  };
  auto fallback = [&]() {
    LineSearchResult r;
    r.ok = best.alpha > 0.0;
    r.point = best;
    return r;
  };

  auto zoom = [&](LinePoint lo, LinePoint hi) -> LineSearchResult {
    while (evals < max_evals) {
      const double alpha = cubic_minimizer(lo, hi);
      if (alpha == lo.alpha || alpha == hi.alpha) break;
      const LinePoint p = phi(alpha);
      ++evals;
      remember(p);
      if (!sufficient(p) || p.f >= lo.f) {
        hi = p;
      } else {
        if (curvature(p)) return {true, p};
        if (p.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = p;
      }
    }
    return fallback();
  };

  LinePoint prev = origin;
  double alpha = std::min(alpha0, alpha_max);
  while (evals < max_evals) {
    const LinePoint p = phi(alpha);
    ++evals;
    remember(p);
    if (!sufficient(p) || (prev.alpha > 0.0 && p.f >= prev.f)) return zoom(prev, p);
    if (curvature(p)) return {true, p};
    if (p.slope >= 0.0) return zoom(p, prev);
    if (alpha >= alpha_max) return {true, p};
    prev = p;
    alpha = std::min(2.0 * alpha, alpha_max);
  }
  return fallback();
}

double max_feasible_step(const RealVector& x, const RealVector& d, const RealVector& lower,
                         const RealVector& upper) {
  double step = kInf;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (d[i] > 0.0) step = std::min(step, (upper[i] - x[i]) / d[i]);
    if (d[i] < 0.0) step = std::min(step, (lower[i] - x[i]) / d[i]);
  }
  return step;
}

double projected_gradient_norm(const RealVector& x, const RealVector& g, const RealVector& lower,
                               const RealVector& upper) {
  return (clip(x - g, lower, upper) - x).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Nelder-Mead

struct Simplex {
  std::vector<RealVector> vertices;
  std::vector<double> values;
};

}  // namespace

OptimizationProblem::OptimizationProblem(PulseSequence pulse_, ComplexMatrix target_,
                                         SpectralDensity spectrum_, RealVector lower_,
                                         RealVector upper_, double epsilon_, std::size_t max_iter_)
    : pulse(std::move(pulse_)),
      target(std::move(target_)),
      spectrum(std::move(spectrum_)),
      lower(std::move(lower_)),
      upper(std::move(upper_)),
      epsilon(epsilon_),
      max_iter(max_iter_) {
  const auto n = static_cast<Eigen::Index>(pulse.n_controls() * pulse.n_segments());
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("bounds need one entry per amplitude (" + std::to_string(n) + ")");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i])
      throw std::invalid_argument("invalid bounds at amplitude " + std::to_string(i));
  const auto d = static_cast<Eigen::Index>(pulse.dim());
  if (target.rows() != d || target.cols() != d)
    throw std::invalid_argument("target dimension does not match pulse");
  if ((target.adjoint() * target - ComplexMatrix::Identity(d, d)).norm() > 1e-10)
    throw std::invalid_argument("target is not unitary");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (spectrum.n_noises() != pulse.n_noises())
    throw std::invalid_argument("spectrum rows do not match the number of noise sources");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::ProjectedGradient: return "projected_gradient";
    case Termination::LineSearchFailure: return "line_search_failure";
    case Termination::DegenerateSimplex: return "degenerate_simplex";
  }
  return "unknown";
}

NonFiniteCost::NonFiniteCost(RealVector x)
    : std::runtime_error("cost is not finite at the current iterate"), x_(std::move(x)) {}

double systematic_infidelity(const ComplexMatrix& q_final, const ComplexMatrix& target) {
  const double d = static_cast<double>(q_final.rows());
  const Complex z = (target.adjoint() * q_final).trace();
  return std::clamp(1.0 - std::norm(z) / (d * d), 0.0, 1.0);
}

RealVector systematic_infidelity_gradient(const PulseSequence& pulse, const Propagators& props,
                                          const ComplexMatrix& target) {
  const std::size_t n = pulse.n_segments();
  const double d = static_cast<double>(pulse.dim());
  const ComplexMatrix tq = target.adjoint();
  const Complex z = (tq * props.cumulative[n]).trace();
  RealVector grad(static_cast<Eigen::Index>(pulse.n_controls() * n));
  for (std::size_t h = 0; h < pulse.n_controls(); ++h)
    for (std::size_t g = 0; g < n; ++g) {
      const ComplexMatrix dq = cumulative_propagator_derivative(pulse, props, n, h, g);
      const Complex dz = (tq * dq).trace();
      grad[static_cast<Eigen::Index>(h * n + g)] = -2.0 / (d * d) * (std::conj(z) * dz).real();
    }
  return grad;
}

namespace {

double evaluate_cost(const RealVector& x, const OptimizationProblem& prob, RealVector* gradient) {
  const RealVector xc = clip(x, prob.lower, prob.upper);
  const PulseSequence pulse = prob.pulse.with_amplitudes(xc);
  const Propagators props = cumulative_propagators(pulse);
  const ControlMatrixSet cms = total_control_matrix(pulse, prob.spectrum.grid(), props);
  const Infidelity noise = infidelity(filter_function(cms), prob.spectrum, pulse.dim());
  const double cost = systematic_infidelity(props.cumulative.back(), prob.target) + noise.total;
  if (!std::isfinite(cost)) throw NonFiniteCost(x);
  if (gradient) {
    const GradientTensor tensor = total_control_matrix_derivative(pulse, cms, props);
    const InfidelityGradient di =
        infidelity_derivative(filter_function_derivative(cms, tensor), prob.spectrum, pulse.dim());
    *gradient = di.colwise().sum().transpose() + systematic_infidelity_gradient(pulse, props, prob.target);
    if (!gradient->allFinite()) throw NonFiniteCost(x);
  }
  return cost;
}

MinimizeOptions options_of(const OptimizationProblem& prob) {
  MinimizeOptions opts;
  opts.lower = prob.lower;
  opts.upper = prob.upper;
  opts.epsilon = prob.epsilon;
  opts.max_iter = prob.max_iter;
  return opts;
}

void require_feasible(const RealVector& x, const OptimizationProblem& prob) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(x[i] >= prob.lower[i] && x[i] <= prob.upper[i]))
      throw std::logic_error("optimizer evaluated an infeasible iterate at index " + std::to_string(i));
}

}  // namespace

double total_cost(const RealVector& x, const OptimizationProblem& prob) {
  return evaluate_cost(x, prob, nullptr);
}

RealVector total_cost_gradient(const RealVector& x, const OptimizationProblem& prob) {
  RealVector g;
  evaluate_cost(x, prob, &g);
  return g;
}

double total_cost_and_gradient(const RealVector& x, const OptimizationProblem& prob,
                               RealVector& gradient) {
  return evaluate_cost(x, prob, &gradient);
}

RunRecord lbfgsb_minimize(const ObjectiveWithGradient& f, RealVector x0, const MinimizeOptions& opts) {
  check_box(x0, opts.lower, opts.upper);
  if (opts.memory < 1) throw std::invalid_argument("L-BFGS-B memory must be >= 1");
  const auto start = Clock::now();
  const Eigen::Index n = x0.size();
  RunRecord rec;
  rec.algorithm = "lbfgsb";

  auto evaluate = [&](const RealVector& x, RealVector& g) {
    ++rec.cost_evals;
    ++rec.grad_evals;
    const double v = f(x, g);
    if (!std::isfinite(v) || g.size() != n || !g.allFinite()) throw NonFiniteCost(x);
    return v;
  };

  RealVector x = std::move(x0), g;
  double fx = evaluate(x, g);
  rec.cost_trace.push_back(fx);
  LimitedMemory memory{opts.memory, {}, {}, 1.0};
  bool restarted = false;
  rec.reason = Termination::MaxIterations;

  while (rec.iterations < opts.max_iter) {
    if (projected_gradient_norm(x, g, opts.lower, opts.upper) == 0.0) {
      rec.reason = Termination::ProjectedGradient;
      break;
    }
    const RealMatrix b = memory.hessian(n);
    const RealVector xc = cauchy_point(x, g, opts.lower, opts.upper, b);
    const RealVector xbar = subspace_minimum(x, g, xc, opts.lower, opts.upper, b, memory.theta);
    const RealVector d = xbar - x;
    const LinePoint origin{0.0, fx, g.dot(d), g};
    if (!(origin.slope < 0.0)) {
      if (!memory.empty() && !restarted) {
        memory.clear();
        restarted = true;
        continue;
      }
      rec.reason = Termination::ProjectedGradient;
      break;
    }
    const double alpha_max = std::max(1.0, max_feasible_step(x, d, opts.lower, opts.upper));
    const double alpha0 = rec.iterations == 0 ? std::min(1.0 / d.norm(), alpha_max) : 1.0;
    auto phi = [&](double alpha) {
      LinePoint p;
      p.alpha = alpha;
      p.f = evaluate(clip(x + alpha * d, opts.lower, opts.upper), p.g);
      p.slope = p.g.dot(d);
      return p;
    };
    const LineSearchResult ls = strong_wolfe(phi, origin, alpha0, alpha_max);
    if (!ls.ok) {
      if (!memory.empty() && !restarted) {
        memory.clear();
        restarted = true;
        continue;
      }
      rec.reason = Termination::LineSearchFailure;
      break;
    }
    restarted = false;
    const RealVector x_new = clip(x + ls.point.alpha * d, opts.lower, opts.upper);
    const double improvement = fx - ls.point.f;
    memory.push(x_new - x, ls.point.g - g);
    x = x_new;
    g = ls.point.g;
    fx = ls.point.f;
    ++rec.iterations;
    rec.cost_trace.push_back(fx);
    if (improvement < opts.epsilon) {
      rec.reason = Termination::Converged;
      break;
    }
  }
  rec.x = x;
  rec.final_cost = fx;
  rec.wall_seconds = seconds_since(start);
  return rec;
}

RunRecord nelder_mead_minimize(const Objective& f, RealVector x0, const MinimizeOptions& opts) {
  check_box(x0, opts.lower, opts.upper);
  const auto start = Clock::now();
  const RealVector& lower = opts.lower;
  const RealVector& upper = opts.upper;
  RunRecord rec;
  rec.algorithm = "neldermead";

  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < x0.size(); ++i)
    if (upper[i] > lower[i]) free.push_back(i);

  auto evaluate = [&](const RealVector& x) {
    ++rec.cost_evals;
    const double v = f(x);
    if (!std::isfinite(v)) throw NonFiniteCost(x);
    return v;
  };
  auto build = [&](const RealVector& base, double base_value) {
    Simplex s;
    s.vertices.push_back(base);
    s.values.push_back(base_value);
    for (Eigen::Index i : free) {
      RealVector v = base;
      const double step = 0.05 * (upper[i] - lower[i]);
      v[i] += base[i] + step <= upper[i] ? step : -step;
      s.vertices.push_back(v);
      s.values.push_back(evaluate(v));
    }
    return s;
  };
  auto degenerate = [&](const Simplex& s) {
    for (Eigen::Index i : free) {
      double lo = kInf, hi = -kInf;
      for (const auto& v : s.vertices) {
        lo = std::min(lo, v[i]);
        hi = std::max(hi, v[i]);
      }
      if (hi - lo <= 1e-12 * (upper[i] - lower[i])) return true;
    }
    return false;
  };

  const double f0 = evaluate(x0);
  rec.cost_trace.push_back(f0);
  Simplex s = build(x0, f0);
  const std::size_t m = s.vertices.size();
  std::vector<std::size_t> order(m);
  bool reinitialized = false;
  rec.reason = Termination::MaxIterations;

  auto sort_simplex = [&]() {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
  };

  while (true) {
    sort_simplex();
    const double best = s.values[order.front()];
    if (m == 1) {
      rec.reason = Termination::Converged;
      break;
    }
    if (s.values[order.back()] - best < opts.epsilon) {
      rec.reason = Termination::Converged;
      break;
    }
    if (rec.iterations >= opts.max_iter) break;
    if (degenerate(s)) {
      if (reinitialized) {
        rec.reason = Termination::DegenerateSimplex;
        break;
      }
      reinitialized = true;
      const std::size_t b = order.front();
      s = build(s.vertices[b], s.values[b]);
      continue;
    }

    const std::size_t worst = order.back();
    const std::size_t second = order[m - 2];
    RealVector centroid = RealVector::Zero(x0.size());
    for (std::size_t k = 0; k + 1 < m; ++k) centroid += s.vertices[order[k]];
    centroid /= static_cast<double>(m - 1);

    auto trial = [&](double coeff) {
      return clip(centroid + coeff * (s.vertices[worst] - centroid), lower, upper);
    };
    const RealVector xr = trial(-1.0);
    const double fr = evaluate(xr);
    bool shrink = false;
    if (fr < best) {
      const RealVector xe = trial(-2.0);
      const double fe = evaluate(xe);
      if (fe < fr) {
        s.vertices[worst] = xe;
        s.values[worst] = fe;
      } else {
        s.vertices[worst] = xr;
        s.values[worst] = fr;
      }
    } else if (fr < s.values[second]) {
      s.vertices[worst] = xr;
      s.values[worst] = fr;
    } else if (fr < s.values[worst]) {
      const RealVector xc = trial(-0.5);
      const double fc = evaluate(xc);
      if (fc <= fr) {
        s.vertices[worst] = xc;
        s.values[worst] = fc;
      } else {
        shrink = true;
      }
    } else {
      const RealVector xc = trial(0.5);
      const double fc = evaluate(xc);
      if (fc < s.values[worst]) {
        s.vertices[worst] = xc;
        s.values[worst] = fc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      const RealVector& xb = s.vertices[order.front()];
      for (std::size_t k = 1; k < m; ++k) {
        const std::size_t v = order[k];
        s.vertices[v] = clip(xb + 0.5 * (s.vertices[v] - xb), lower, upper);
        s.values[v] = evaluate(s.vertices[v]);
      }
    }
    ++rec.iterations;
    rec.cost_trace.push_back(
        std::min(rec.cost_trace.back(), *std::min_element(s.values.begin(), s.values.end())));
  }
  sort_simplex();
  rec.x = s.vertices[order.front()];
  rec.final_cost = s.values[order.front()];
  rec.wall_seconds = seconds_since(start);
  return rec;
}

RunRecord lbfgsb_minimize(const OptimizationProblem& prob, const RealVector& x0) {
  return lbfgsb_minimize(
      [&](const RealVector& x, RealVector& g) {
        require_feasible(x, prob);
        return total_cost_and_gradient(x, prob, g);
      },
      x0, options_of(prob));
}

RunRecord nelder_mead_minimize(const OptimizationProblem& prob, const RealVector& x0) {
  return nelder_mead_minimize(
      [&](const RealVector& x) {
        require_feasible(x, prob);
        return total_cost(x, prob);
      },
      x0, options_of(prob));
}

RealVector random_start(const OptimizationProblem& prob, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RealVector x(prob.lower.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double w = prob.upper[i] - prob.lower[i];
    std::uniform_real_distribution<double> dist(prob.lower[i] + 0.25 * w, prob.upper[i] - 0.25 * w);
    x[i] = w > 0.0 ? dist(rng) : prob.lower[i];
  }
  return x;
}

std::vector<double> restart_curve(std::vector<double> finals, std::size_t max_restarts) {
  if (finals.empty()) throw std::invalid_argument("restart curve needs at least one run");
  std::sort(finals.begin(), finals.end());
  const double n = static_cast<double>(finals.size());
  std::vector<double> curve;
  for (std::size_t r = 1; r <= max_restarts; ++r) {
    // P(min >= x_(i)) = ((n - i + 1) / n)^r for the i-th order statistic (1-based)
    double e = finals[0];
    for (std::size_t i = 1; i < finals.size(); ++i)
      e += (finals[i] - finals[i - 1]) * std::pow((n - static_cast<double>(i)) / n, static_cast<double>(r));
    curve.push_back(e);
  }
  return curve;
}

ComparisonReport compare_runs(const OptimizationProblem& prob, std::size_t n_runs,
                              std::uint64_t seed, const CompareOptions& opts) {
  if (n_runs < 1) throw std::invalid_argument("compare_runs needs n_runs >= 1");
  kernels::ThreadLimit single(1);
  ComparisonReport report;
  for (std::size_t r = 0; r < n_runs; ++r) {
    const std::uint64_t s = seed + r;
    const RealVector x0 = random_start(prob, s);
    report.seeds.push_back(s);
    if (opts.run_lbfgsb) report.lbfgsb.push_back(lbfgsb_minimize(prob, x0));
    if (opts.run_nelder_mead) report.nelder_mead.push_back(nelder_mead_minimize(prob, x0));
  }
  auto finals = [](const std::vector<RunRecord>& runs) {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(r.final_cost);
    return v;
  };
  if (opts.run_lbfgsb) report.lbfgsb_restart = restart_curve(finals(report.lbfgsb), n_runs);
  if (opts.run_nelder_mead) report.nelder_mead_restart = restart_curve(finals(report.nelder_mead), n_runs);
  return report;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace ffgrad
