#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rtpinn/bounds.hpp"
#include "rtpinn/objective.hpp"
#include "rtpinn/optimizer.hpp"
#include "rtpinn/training.hpp"

namespace rtpinn {

// Grid used for field dumps and error norms.
struct EvalGrid {
  int nx = 0;          // points per spatial axis
  int n_mu = 0;        // slab intensity grid in mu
  std::vector<double> times;
  std::vector<double> frequencies;
  std::vector<double> radii;  // shell comparison radii
};

// Inputs of the bound report that cannot be derived from a run.
struct BoundOptions {
  std::string lemma = "auto";  // auto | time | steady
  int s = 1;
  double v_tb = 1.0, v_sb = 1.0, v_int = 1.0, c_bar = 1.0;
  std::optional<double> kappa;
  std::optional<double> c_epsilon;
};

// Fully resolved run configuration. Built from a JSON tree in which
// defaults < config file < --set overrides < dedicated flags.
struct RunConfig {
  std::string problem;
  ProblemOptions problem_options;
  std::uint64_t seed = 0;
  SampleCounts counts;
  Sampler sampler = Sampler::sobol;
  Sampler data_sampler = Sampler::uniform_random;
  std::size_t depth = 4;
  std::size_t width = 16;
  std::size_t k_depth = 4;
  std::size_t k_width = 16;
  int n_mu = 10;
  int n_phi = 10;
  LossConfig loss;
  OptimizerConfig optimizer;
  EnsembleGrid grid;
  std::size_t jobs = 1;
  std::size_t chunk_columns = 2048;
  std::size_t log_every = 0;
  std::filesystem::path output_dir;
  EvalGrid eval;
  BoundOptions bound;
  BoundInputs bound_inputs;  // only for the standalone bound verb
  nlohmann::json tree;       // resolved tree, as echoed by --dry-run

  std::vector<std::size_t> u_widths(std::size_t input_dim) const;
  std::vector<std::size_t> k_widths(std::size_t input_dim) const;
  // Hash of everything except the output section.
  std::string hash() const;
};

// Defaults for a problem name.
nlohmann::json default_tree(const std::string& problem);

// Applies "a.b.c=value" to the tree; value is parsed as JSON when possible,
// otherwise kept as a string.
void apply_override(nlohmann::json& tree, const std::string& assignment);

// Resolves defaults for the problem named in `user` (or slab1d) and merges
// `user` on top. Unknown keys are configuration errors.
RunConfig resolve_config(const nlohmann::json& user);

nlohmann::json load_json_file(const std::filesystem::path& path);

// Output directory: absolute paths are kept; relative ones are placed under
// $RTPINN_OUTPUT_ROOT when it is set, else under the working directory.
std::filesystem::path resolve_output_dir(const std::filesystem::path& dir);

}  // namespace rtpinn
