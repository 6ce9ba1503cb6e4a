#pragma once

#include <filesystem>
#include <ostream>

#include "json.hpp"
#include "rtpinn/bounds.hpp"
#include "rtpinn/config.hpp"
#include "rtpinn/problems.hpp"
#include "rtpinn/training.hpp"

namespace rtpinn {

// Run verbs. Each writes its artifacts under resolve_output_dir(config.output_dir),
// logs progress to `log` and returns the summary that is also stored in run.json
// (or oracles.json / bound.json). Configuration problems throw ConfigError.
nlohmann::json run_solve(const RunConfig& config, std::ostream& log);
nlohmann::json run_invert(const RunConfig& config, std::ostream& log);
nlohmann::json run_ensemble(const RunConfig& config, std::ostream& log);
nlohmann::json run_bound(const RunConfig& config, std::ostream& log);

// Closed-form regression checks. The summary has "passed" and one entry per
// check with its value and tolerance.
nlohmann::json run_oracles(const RunConfig& config, std::ostream& log);

// Problem, angular rule and training sets as a run builds them.
RteProblem configured_problem(const RunConfig& config);
SphereRule configured_rule(const RteProblem& problem, const RunConfig& config);
TrainingSets configured_sets(const RteProblem& problem, const RunConfig& config);

// Bound inputs for a trained model: training errors and counts from the run,
// coefficient extrema sampled at the interior training points.
BoundInputs bound_inputs_for(const RteProblem& problem, const SphereRule& rule, const TrainingSets& sets,
                             const LossReport& report, const BoundOptions& options,
                             const CoefficientFn& absorption = {});
BoundValue evaluate_bound(const BoundInputs& inputs, const std::string& lemma, bool steady);
nlohmann::json bound_to_json(const BoundInputs& inputs, const BoundValue& value, const std::string& lemma);

}  // namespace rtpinn
