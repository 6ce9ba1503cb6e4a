#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rtpinn/network.hpp"
#include "rtpinn/objective.hpp"
#include "rtpinn/optimizer.hpp"

namespace rtpinn {

struct TrainedModel {
  MlpNetwork u;
  std::optional<MlpNetwork> k;  // inverse mode
  LossReport report;            // at the returned parameters
  OptimizationResult optimization;
  double wall_seconds = 0.0;
  std::string provenance;
};

struct TrainOptions {
  ObjectiveOptions objective;
  IterationCallback callback;
};

// Forward training from the initial network `u0`. Returns the best-loss
// parameters seen by the optimizer.
TrainedModel train(const RteProblem& problem, const TrainingSets& sets, const SphereRule& rule, const MlpNetwork& u0,
                   const LossConfig& loss, const OptimizerConfig& optimizer, const TrainOptions& options = {});

// Inverse training of (u, k) against measured incident radiation at sets.data.
TrainedModel train_inverse(const RteProblem& problem, const TrainingSets& sets, const std::vector<double>& measured,
                           const SphereRule& rule, const MlpNetwork& u0, const MlpNetwork& k0, const LossConfig& loss,
                           const OptimizerConfig& optimizer, const TrainOptions& options = {});

// Hyperparameter grid: hidden-layer counts, hidden widths, interior weights,
// regularization weights, and the number of retrainings per configuration.
struct EnsembleGrid {
  std::vector<std::size_t> depths;
  std::vector<std::size_t> widths;
  std::vector<double> lambdas;
  std::vector<double> lambda_regs;
  std::size_t retrainings = 1;
  std::uint64_t seed_base = 0;

  void validate() const;
  std::size_t size() const;
};

// Default hyperparameter grid for a named problem.
EnsembleGrid default_ensemble_grid(const std::string& problem);

struct EnsembleMember {
  std::size_t depth = 0;
  std::size_t width = 0;
  double lambda = 1.0;
  double lambda_reg = 0.0;
  std::size_t retrain = 0;
  std::uint64_t seed = 0;  // seed_base + retrain, so it does not depend on grid order

  std::vector<std::size_t> network_widths(std::size_t input_dim) const;
  bool operator<(const EnsembleMember& o) const;
};

// Every (configuration, retrain) combination in lexicographic grid order.
std::vector<EnsembleMember> enumerate(const EnsembleGrid& grid);

struct LeaderboardEntry {
  EnsembleMember member;
  bool ok = false;
  std::string error;
  LossReport report;
  std::size_t iterations = 0;
  double wall_seconds = 0.0;
};

struct EnsembleResult {
  TrainedModel best;
  EnsembleMember best_member;
  // Successful runs by ascending loss, then failed runs.
  std::vector<LeaderboardEntry> leaderboard;
};

using MemberRunner = std::function<TrainedModel(const EnsembleMember&)>;

// Trains all members on `jobs` worker threads and keeps the lowest training
// loss (ties broken by member order). Individual failures are recorded; if
// every member fails a NumericalError is thrown.
EnsembleResult ensemble_train(const std::vector<EnsembleMember>& members, const MemberRunner& run, std::size_t jobs);

// Runner for forward problems: Xavier init from the member seed, then train.
MemberRunner forward_runner(const RteProblem& problem, const TrainingSets& sets, const SphereRule& rule,
                            const LossConfig& base_loss, const OptimizerConfig& optimizer, ObjectiveOptions options = {});

// Runner for the inverse problem; the absorption network has shape
// [in_k, width x depth, 1] like the intensity network.
MemberRunner inverse_runner(const RteProblem& problem, const TrainingSets& sets, const std::vector<double>& measured,
                            const SphereRule& rule, const LossConfig& base_loss, const OptimizerConfig& optimizer,
                            ObjectiveOptions options = {});

}  // namespace rtpinn
