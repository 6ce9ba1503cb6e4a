#include "rtpinn/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "rtpinn/errors.hpp"

namespace rtpinn {
namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string describe(const MlpShape& shape, const LossConfig& loss, const OptimizerConfig& opt) {
  std::ostringstream s;
  s << "widths=";
  for (std::size_t i = 0; i < shape.widths().size(); ++i) s << (i ? "x" : "") << shape.widths()[i];
  s << " lambda=" << loss.lambda << " lambda_reg=" << loss.lambda_reg << " q=" << loss.q
    << " optimizer=" << to_string(opt.algorithm) << " max_iterations=" << opt.max_iterations;
  return s.str();
}

}  // namespace

TrainedModel train(const RteProblem& problem, const TrainingSets& sets, const SphereRule& rule, const MlpNetwork& u0,
                   const LossConfig& loss, const OptimizerConfig& optimizer, const TrainOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  PinnObjective objective(problem, sets, rule, u0.shape(), loss, options.objective);
  std::vector<double> theta(u0.parameters().begin(), u0.parameters().end());
  TrainedModel m;
  m.optimization = minimize(objective, std::move(theta), optimizer, options.callback);
  m.u = u0;
  m.u.set_parameters(m.optimization.theta);
  m.report = m.optimization.report;
  m.wall_seconds = seconds_since(start);
  m.provenance = problem.name + " " + describe(u0.shape(), loss, optimizer);
  return m;
}

TrainedModel train_inverse(const RteProblem& problem, const TrainingSets& sets, const std::vector<double>& measured,
                           const SphereRule& rule, const MlpNetwork& u0, const MlpNetwork& k0, const LossConfig& loss,
                           const OptimizerConfig& optimizer, const TrainOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  PinnObjective objective(problem, sets, measured, rule, u0.shape(), k0.shape(), loss, false, options.objective);
  std::vector<double> theta(u0.parameters().begin(), u0.parameters().end());
  theta.insert(theta.end(), k0.parameters().begin(), k0.parameters().end());
  TrainedModel m;
  m.optimization = minimize(objective, std::move(theta), optimizer, options.callback);
  const std::span<const double> best(m.optimization.theta);
  m.u = u0;
  m.u.set_parameters(best.first(u0.parameter_count()));
  m.k = k0;
  m.k->set_parameters(best.subspan(u0.parameter_count()));
  m.report = m.optimization.report;
  m.wall_seconds = seconds_since(start);
  m.provenance = problem.name + " inverse " + describe(u0.shape(), loss, optimizer);
  return m;
}

void EnsembleGrid::validate() const {
  if (depths.empty() || widths.empty() || lambdas.empty() || lambda_regs.empty()) {
    throw ConfigError("ensemble grid lists must be nonempty");
  }
  if (retrainings < 1) throw ConfigError("ensemble needs at least one retraining");
  for (auto d : depths)
    if (d < 1) throw ConfigError("hidden-layer count must be >= 1");
  for (auto w : widths)
    if (w < 1) throw ConfigError("hidden width must be >= 1");
  for (double l : lambdas)
    if (!(l >= 0.0)) throw ConfigError("lambda must be >= 0");
  for (double l : lambda_regs)
    if (!(l >= 0.0)) throw ConfigError("lambda_reg must be >= 0");
}

std::size_t EnsembleGrid::size() const {
  return depths.size() * widths.size() * lambdas.size() * lambda_regs.size() * retrainings;
}

EnsembleGrid default_ensemble_grid(const std::string& problem) {
  if (problem == "slab1d" || problem == "cube3d-mono") return {{4, 8}, {16, 20, 24}, {0.1, 1, 10}, {0}, 5, 0};
  if (problem == "cube3d-poly") return {{4, 8}, {16, 20}, {0.1, 1}, {0, 1e-6, 1e-5}, 10, 0};
  if (problem == "shell-time") return {{4, 8, 12, 16, 20}, {16, 20, 24, 28, 32, 36, 40}, {0.1, 1}, {0}, 20, 0};
  if (problem == "inverse-cube") return {{4, 8}, {16, 20, 24}, {1, 10}, {0}, 5, 0};
  throw ConfigError("no published grid for problem '" + problem + "'");
}

std::vector<std::size_t> EnsembleMember::network_widths(std::size_t input_dim) const {
  std::vector<std::size_t> w{input_dim};
  w.insert(w.end(), depth, width);
  w.push_back(1);
  return w;
}

bool EnsembleMember::operator<(const EnsembleMember& o) const {
  return std::tie(depth, width, lambda, lambda_reg, retrain) < std::tie(o.depth, o.width, o.lambda, o.lambda_reg, o.retrain);
}

std::vector<EnsembleMember> enumerate(const EnsembleGrid& grid) {
  grid.validate();
  std::vector<EnsembleMember> out;
  out.reserve(grid.size());
  for (auto d : grid.depths)
    for (auto w : grid.widths)
      for (double l : grid.lambdas)
        for (double r : grid.lambda_regs)
          for (std::size_t k = 0; k < grid.retrainings; ++k) out.push_back({d, w, l, r, k, grid.seed_base + k});
  return out;
}

EnsembleResult ensemble_train(const std::vector<EnsembleMember>& members, const MemberRunner& run, std::size_t jobs) {
  if (members.empty()) throw ConfigError("ensemble has no members");
  jobs = std::clamp<std::size_t>(jobs, 1, members.size());

  std::vector<LeaderboardEntry> board(members.size());
  std::optional<TrainedModel> best;
  EnsembleMember best_member;
  std::mutex collector;
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (std::size_t i = next++; i < members.size(); i = next++) {
      LeaderboardEntry e;
      e.member = members[i];
      std::optional<TrainedModel> model;
      try {
        model = run(members[i]);
        e.ok = std::isfinite(model->report.total);
        if (!e.ok) e.error = "non-finite loss";
        e.report = model->report;
        e.iterations = model->optimization.iterations;
        e.wall_seconds = model->wall_seconds;
      } catch (const std::exception& ex) {
        e.error = ex.what();
      }
      std::lock_guard lock(collector);
      if (e.ok) {
        const bool better = !best || e.report.total < best->report.total ||
                            (e.report.total == best->report.total && e.member < best_member);
        if (better) {
          best = std::move(model);
          best_member = e.member;
        }
      }
      board[i] = std::move(e);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (!best) throw NumericalError("every ensemble member failed; first error: " + board.front().error);
  std::stable_sort(board.begin(), board.end(), [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
    if (a.ok != b.ok) return a.ok;
    if (!a.ok) return a.member < b.member;
    if (a.report.total != b.report.total) return a.report.total < b.report.total;
    return a.member < b.member;
  });
  return {std::move(*best), best_member, std::move(board)};
}

MemberRunner forward_runner(const RteProblem& problem, const TrainingSets& sets, const SphereRule& rule,
                            const LossConfig& base_loss, const OptimizerConfig& optimizer, ObjectiveOptions options) {
  return [=](const EnsembleMember& m) {
    LossConfig loss = base_loss;
    loss.lambda = m.lambda;
    loss.lambda_reg = m.lambda_reg;
    const auto u0 = init_network(m.network_widths(problem.domain.input_dim()), m.seed);
    return train(problem, sets, rule, u0, loss, optimizer, {options, {}});
  };
}

MemberRunner inverse_runner(const RteProblem& problem, const TrainingSets& sets, const std::vector<double>& measured,
                            const SphereRule& rule, const LossConfig& base_loss, const OptimizerConfig& optimizer,
                            ObjectiveOptions options) {
  return [=](const EnsembleMember& m) {
    LossConfig loss = base_loss;
    loss.lambda = m.lambda;
    loss.lambda_reg = m.lambda_reg;
    const auto u0 = init_network(m.network_widths(problem.domain.input_dim()), m.seed);
    const auto k0 = init_network(m.network_widths(problem.domain.absorption_input_dim()), m.seed + 0x6b);
    return train_inverse(problem, sets, measured, rule, u0, k0, loss, optimizer, {options, {}});
  };
}

}  // namespace rtpinn
