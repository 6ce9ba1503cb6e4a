#include "rtpinn/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtpinn/errors.hpp"

namespace rtpinn {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

struct Trial {
  double a = 0.0;
  double f = 0.0;
  double d = 0.0;
};

// Minimizer of the cubic through two trials, safeguarded to the middle 80% of
// the bracket; bisection when the cubic is unusable.
double interpolate(const Trial& lo, const Trial& hi) {
  const double left = std::min(lo.a, hi.a);
  const double right = std::max(lo.a, hi.a);
  const double mid = 0.5 * (left + right);
  if (!std::isfinite(lo.f) || !std::isfinite(hi.f) || !std::isfinite(lo.d) || !std::isfinite(hi.d)) return mid;
  const double d1 = lo.d + hi.d - 3.0 * (lo.f - hi.f) / (lo.a - hi.a);
  const double disc = d1 * d1 - lo.d * hi.d;
  if (disc < 0.0) return mid;
  const double d2 = std::copysign(std::sqrt(disc), hi.a - lo.a);
  const double x = hi.a - (hi.a - lo.a) * (hi.d + d2 - d1) / (hi.d - lo.d + 2.0 * d2);
  const double margin = 0.1 * (right - left);
  if (!std::isfinite(x) || x < left + margin || x > right - margin) return mid;
  return x;
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
  if (name == "adam") return Algorithm::adam;
  if (name == "lbfgs") return Algorithm::lbfgs;
  throw ConfigError("unknown optimizer '" + name + "' (expected adam or lbfgs)");
}

std::string to_string(Algorithm a) { return a == Algorithm::adam ? "adam" : "lbfgs"; }

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::gradient_tolerance: return "gradient_tolerance";
    case StopReason::loss_tolerance: return "loss_tolerance";
    case StopReason::line_search_failed: return "line_search_failed";
    case StopReason::non_finite: return "non_finite";
  }
  return "unknown";
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("ADAM betas must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("ADAM epsilon must be > 0");
  if (history == 0) throw ConfigError("LBFGS history size must be >= 1");
  if (!(wolfe_c1 > 0.0 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0)) throw ConfigError("Wolfe constants need 0 < c1 < c2 < 1");
  if (max_line_search < 2) throw ConfigError("line search needs at least 2 evaluations");
  if (!(gradient_tolerance > 0.0) || !(loss_tolerance > 0.0)) throw ConfigError("tolerances must be > 0");
}

LossReport FunctionObjective::evaluate(std::span<const double> theta, std::span<double> grad) {
  LossReport r;
  r.total = fn_(theta, grad);
  return r;
}

void adam_step(AdamState& state, std::span<double> theta, std::span<const double> grad, const OptimizerConfig& c) {
  const std::size_t n = theta.size();
  if (grad.size() != n) throw ContractError("adam_step: gradient size mismatch");
  if (state.m.size() != n) {
    state.m.assign(n, 0.0);
    state.v.assign(n, 0.0);
    state.step = 0;
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < n; ++i) {
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * grad[i];
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    theta[i] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
  }
}

std::vector<double> lbfgs_direction(const LbfgsState& state, std::span<const double> grad) {
  std::vector<double> q(grad.begin(), grad.end());
  const std::size_t m = state.pairs.size();
  std::vector<double> alpha(m);
  for (std::size_t k = m; k-- > 0;) {
    const auto& p = state.pairs[k];
    alpha[k] = p.rho * dot(p.s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * p.y[i];
  }
  if (m > 0) {
    const auto& last = state.pairs.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : q) v *= gamma;
  }
  for (std::size_t k = 0; k < m; ++k) {
    const auto& p = state.pairs[k];
    const double beta = p.rho * dot(p.y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * p.s[i];
  }
  for (double& v : q) v = -v;
  return q;
}

bool lbfgs_update(LbfgsState& state, std::vector<double> s, std::vector<double> y, std::size_t history) {
  const double sy = dot(s, y);
  if (!(sy > 0.0) || !std::isfinite(sy)) {
    ++state.skipped_pairs;
    return false;
  }
  if (state.pairs.size() == history) state.pairs.pop_front();
  state.pairs.push_back({std::move(s), std::move(y), 1.0 / sy});
  return true;
}

LineSearchResult strong_wolfe_search(Objective& objective, std::span<const double> theta, double f0,
                                     std::span<const double> grad0, std::span<const double> direction,
                                     double alpha_init, const OptimizerConfig& c) {
  LineSearchResult res;
  const std::size_t n = theta.size();
  const double d0 = dot(grad0, direction);
  if (!(d0 < 0.0)) return res;

  std::vector<double> th(n), g(n);
  LossReport rep;
  const auto trial = [&](double a) {
    for (std::size_t i = 0; i < n; ++i) th[i] = theta[i] + a * direction[i];
    ++res.evaluations;
    const double inf = std::numeric_limits<double>::infinity();
    try {
      rep = objective.evaluate(th, g);
    } catch (const NumericalError&) {
      return Trial{a, inf, std::numeric_limits<double>::quiet_NaN()};
    }
    if (!std::isfinite(rep.total) || !all_finite(g)) return Trial{a, inf, std::numeric_limits<double>::quiet_NaN()};
    return Trial{a, rep.total, dot(g, direction)};
  };
  const auto accept = [&](const Trial& t) {
    res.ok = true;
    res.alpha = t.a;
    res.report = rep;
    res.theta = th;
    res.grad = g;
    return res;
  };
  const auto armijo_fails = [&](const Trial& t) { return !(t.f <= f0 + c.wolfe_c1 * t.a * d0); };

  const auto zoom = [&](Trial lo, Trial hi) {
    while (res.evaluations < c.max_line_search) {
      const double a = interpolate(lo, hi);
      if (a == lo.a || a == hi.a) break;  // bracket collapsed to rounding
      const Trial t = trial(a);
      if (armijo_fails(t) || t.f >= lo.f) {
        hi = t;
      } else {
        if (std::abs(t.d) <= -c.wolfe_c2 * d0) return accept(t);
        if (t.d * (hi.a - lo.a) >= 0.0) hi = lo;
        lo = t;
      }
    }
    return res;
  };

  Trial prev{0.0, f0, d0};
  double a = alpha_init;
  for (bool first = true; res.evaluations < c.max_line_search; first = false) {
    const Trial t = trial(a);
    if (armijo_fails(t) || (!first && t.f >= prev.f)) return zoom(prev, t);
    if (std::abs(t.d) <= -c.wolfe_c2 * d0) return accept(t);
    if (t.d >= 0.0) return zoom(t, prev);
    prev = t;
    a *= 2.0;
  }
  return res;
}

LbfgsStepResult lbfgs_step(LbfgsState& state, Objective& objective, std::vector<double>& theta, LossReport& report,
                           std::vector<double>& grad, const OptimizerConfig& c) {
  LbfgsStepResult out;
  const double gnorm = norm2(grad);
  if (gnorm == 0.0) {
    out.ok = true;
    return out;
  }
  std::vector<double> dir = lbfgs_direction(state, grad);
  if (!(dot(dir, grad) < 0.0)) {
    state.pairs.clear();
    dir = lbfgs_direction(state, grad);
  }
  const double alpha0 = state.pairs.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
  auto ls = strong_wolfe_search(objective, theta, report.total, grad, dir, alpha0, c);
  out.evaluations = ls.evaluations;

  if (!ls.ok) {
    // Fallback: Armijo backtracking along the negative gradient with a fresh memory.
    state.pairs.clear();
    out.fallback = true;
    std::vector<double> th(theta.size()), g(theta.size());
    double a = 1.0 / gnorm;
    for (int k = 0; k < 60 && !ls.ok; ++k, a *= 0.5) {
      for (std::size_t i = 0; i < th.size(); ++i) th[i] = theta[i] - a * grad[i];
      ++out.evaluations;
      LossReport r;
      try {
        r = objective.evaluate(th, g);
      } catch (const NumericalError&) {
        continue;
      }
      if (std::isfinite(r.total) && all_finite(g) && r.total < report.total &&
          r.total <= report.total - c.wolfe_c1 * a * gnorm * gnorm) {
        ls.ok = true;
        ls.alpha = a;
        ls.report = r;
        ls.theta = th;
        ls.grad = g;
      }
    }
    if (!ls.ok) return out;
  }

  std::vector<double> s(theta.size()), y(theta.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = ls.theta[i] - theta[i];
    y[i] = ls.grad[i] - grad[i];
  }
  out.step = norm2(s);
  lbfgs_update(state, std::move(s), std::move(y), c.history);
  theta = std::move(ls.theta);
  grad = std::move(ls.grad);
  report = ls.report;
  out.ok = true;
  return out;
}

OptimizationResult minimize(Objective& objective, std::vector<double> theta, const OptimizerConfig& c,
                            const IterationCallback& callback) {
  c.validate();
  if (theta.size() != objective.dimension()) throw ContractError("initial parameters do not match the objective");
  OptimizationResult res;
  std::vector<double> grad(theta.size());
  LossReport report = objective.evaluate(theta, grad);
  res.evaluations = 1;
  if (!std::isfinite(report.total) || !all_finite(grad)) throw NumericalError("loss is not finite at the initial point");

  const auto record = [&](std::size_t it, double step) {
    IterationRecord r{it, report, norm2(grad), step, res.evaluations};
    res.history.push_back(r);
    if (callback) callback(r);
  };
  record(0, 0.0);
  res.theta = theta;
  res.report = report;

  AdamState adam;
  LbfgsState lbfgs;
  for (std::size_t it = 1; it <= c.max_iterations; ++it) {
    if (norm2(grad) <= c.gradient_tolerance) {
      res.reason = StopReason::gradient_tolerance;
      break;
    }
    const double previous = report.total;
    double step = 0.0;
    if (c.algorithm == Algorithm::adam) {
      std::vector<double> before = theta;
      adam_step(adam, theta, grad, c);
      ++res.evaluations;
      bool finite = true;
      try {
        report = objective.evaluate(theta, grad);
        finite = std::isfinite(report.total) && all_finite(grad);
      } catch (const NumericalError& e) {
        finite = false;
        res.diagnostics.push_back("iteration " + std::to_string(it) + ": " + e.what());
      }
      if (!finite) {
        res.reason = StopReason::non_finite;
        res.diagnostics.push_back("iteration " + std::to_string(it) + ": non-finite loss, stopping with the best iterate");
        break;
      }
      for (std::size_t i = 0; i < before.size(); ++i) before[i] = theta[i] - before[i];
      step = norm2(before);
    } else {
      const auto r = lbfgs_step(lbfgs, objective, theta, report, grad, c);
      res.evaluations += r.evaluations;
      if (r.fallback) {
        res.diagnostics.push_back("iteration " + std::to_string(it) +
                                  (r.ok ? ": line search failed, took a gradient step" : ": line search failed"));
      }
      if (!r.ok) {
        res.reason = StopReason::line_search_failed;
        break;
      }
      step = r.step;
    }
    res.iterations = it;
    record(it, step);
    if (report.total < res.report.total) {
      res.theta = theta;
      res.report = report;
    }
    if (c.algorithm == Algorithm::lbfgs && std::abs(previous - report.total) <= c.loss_tolerance * std::abs(previous)) {
      res.reason = StopReason::loss_tolerance;
      break;
    }
  }
  return res;
}

}  // namespace rtpinn
