#pragma once

#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rtpinn/objective.hpp"
#include "rtpinn/residuals.hpp"

namespace rtpinn {

enum class Algorithm { adam, lbfgs };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm a);

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::lbfgs;
  std::size_t max_iterations = 5000;
  // ADAM
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // LBFGS
  std::size_t history = 50;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  std::size_t max_line_search = 40;
  // Stop when the gradient 2-norm or the relative loss change drops below these.
  double gradient_tolerance = 1e-10;
  double loss_tolerance = 1e-15;

  void validate() const;
};

// Wraps a plain f(theta, grad) -> value as an Objective.
class FunctionObjective final : public Objective {
 public:
  using Fn = std::function<double(std::span<const double> theta, std::span<double> grad)>;
  FunctionObjective(std::size_t dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}
  std::size_t dimension() const override { return dim_; }
  LossReport evaluate(std::span<const double> theta, std::span<double> grad) override;

 private:
  std::size_t dim_;
  Fn fn_;
};

struct AdamState {
  std::vector<double> m, v;
  std::size_t step = 0;
};

// One biased-moment ADAM update of theta in place.
void adam_step(AdamState& state, std::span<double> theta, std::span<const double> grad, const OptimizerConfig& config);

struct LbfgsState {
  struct Pair {
    std::vector<double> s, y;
    double rho = 0.0;
  };
  std::deque<Pair> pairs;
  std::size_t skipped_pairs = 0;
};

// Two-loop recursion: returns -H g for the current memory (-g when the memory
// is empty).
std::vector<double> lbfgs_direction(const LbfgsState& state, std::span<const double> grad);
// Stores the pair (s, y) unless the curvature condition s.y > 0 fails.
bool lbfgs_update(LbfgsState& state, std::vector<double> s, std::vector<double> y, std::size_t history);

struct LineSearchResult {
  bool ok = false;
  double alpha = 0.0;
  LossReport report;
  std::vector<double> theta;
  std::vector<double> grad;
  std::size_t evaluations = 0;
};

// Strong-Wolfe search along `direction` from (theta, f0, grad0). Trial points
// whose loss is not finite are treated as too long a step.
LineSearchResult strong_wolfe_search(Objective& objective, std::span<const double> theta, double f0,
                                     std::span<const double> grad0, std::span<const double> direction,
                                     double alpha_init, const OptimizerConfig& config);

struct LbfgsStepResult {
  bool ok = false;
  bool fallback = false;  // a gradient step replaced the failed quasi-Newton step
  double step = 0.0;
  std::size_t evaluations = 0;
};

// One LBFGS iteration: direction, line search, memory update. On success
// theta, report and grad hold the new iterate.
LbfgsStepResult lbfgs_step(LbfgsState& state, Objective& objective, std::vector<double>& theta, LossReport& report,
                           std::vector<double>& grad, const OptimizerConfig& config);

enum class StopReason { max_iterations, gradient_tolerance, loss_tolerance, line_search_failed, non_finite };
std::string to_string(StopReason r);

struct IterationRecord {
  std::size_t iteration = 0;
  LossReport report;
  double grad_norm = 0.0;
  double step = 0.0;
  std::size_t evaluations = 0;  // cumulative
};

struct OptimizationResult {
  std::vector<double> theta;  // best loss seen
  LossReport report;          // at theta
  std::vector<IterationRecord> history;
  StopReason reason = StopReason::max_iterations;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::vector<std::string> diagnostics;
};

using IterationCallback = std::function<void(const IterationRecord&)>;

// Runs the configured optimizer from theta0. Deterministic for a fixed
// objective. A non-finite loss at the initial point throws NumericalError;
// later ones stop the run and return the best iterate.
OptimizationResult minimize(Objective& objective, std::vector<double> theta0, const OptimizerConfig& config,
                            const IterationCallback& callback = {});

}  // namespace rtpinn
