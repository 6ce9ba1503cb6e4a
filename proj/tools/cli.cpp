#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rtpinn/app.hpp"
#include "rtpinn/artifacts.hpp"
#include "rtpinn/config.hpp"
#include "rtpinn/errors.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct Options {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string problem;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  bool dry_run = false;
  bool quiet = false;
};

// defaults < config file < --set < dedicated flags
json user_tree(const Options& o, const std::string& verb) {
  json tree = o.config_file.empty() ? json::object() : rtpinn::load_json_file(o.config_file);
  for (const auto& s : o.overrides) rtpinn::apply_override(tree, s);
  if (!o.problem.empty()) tree["problem"] = o.problem;
  if (o.seed) tree["seed"] = *o.seed;
  if (o.jobs) tree["jobs"] = *o.jobs;
  if (verb == "invert" && !tree.contains("problem")) tree["problem"] = "inverse-cube";
  if (!o.out.empty()) {
    tree["output"]["dir"] = o.out;
  } else if ((verb == "oracles" || verb == "bound") && !(tree.contains("output") && tree["output"].contains("dir"))) {
    tree["output"]["dir"] = "runs/" + verb;
  }
  return tree;
}

void write_error(const std::filesystem::path& dir, const std::string& verb, const std::string& type,
                 const std::string& message, int code) {
  const json record = {{"error", {{"verb", verb}, {"type", type}, {"message", message}, {"exit_code", code}}}};
  std::cerr << record.dump() << "\n";
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream out(dir / "error.json");
  if (out) out << record.dump(2) << "\n";
}

int run(const std::string& verb, const Options& o) {
  // Where error.json goes if the configuration cannot be resolved.
  std::filesystem::path dir = o.out.empty() ? std::filesystem::path() : rtpinn::resolve_output_dir(o.out);
  try {
    const auto config = rtpinn::resolve_config(user_tree(o, verb));
    dir = rtpinn::resolve_output_dir(config.output_dir);
    if (o.dry_run) {
      std::cout << config.tree.dump(2) << "\n";
      return kOk;
    }
    std::ofstream discard;  // never opened, so writes are dropped
    std::ostream& log = o.quiet ? discard : std::cout;
    json summary;
    if (verb == "solve") {
      summary = rtpinn::run_solve(config, log);
    } else if (verb == "invert") {
      summary = rtpinn::run_invert(config, log);
    } else if (verb == "ensemble") {
      summary = rtpinn::run_ensemble(config, log);
    } else if (verb == "oracles") {
      summary = rtpinn::run_oracles(config, log);
      if (!summary["passed"].get<bool>()) {
        write_error(dir, verb, "runtime", "one or more oracle checks failed", kRuntimeError);
        return kRuntimeError;
      }
    } else {
      summary = rtpinn::run_bound(config, log);
    }
    log << "artifacts in " << dir.string() << "\n";
    return kOk;
  } catch (const rtpinn::ConfigError& e) {
    write_error(dir, verb, "config", e.what(), kConfigError);
    return kConfigError;
  } catch (const std::exception& e) {
    write_error(dir, verb, "runtime", e.what(), kRuntimeError);
    return kRuntimeError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-informed neural networks for radiative transfer"};
  app.set_version_flag("--version", rtpinn::code_version());
  app.require_subcommand(1);
  Options o;
  const std::vector<std::pair<std::string, std::string>> verbs = {
      {"solve", "Train a PINN for a forward problem"},
      {"invert", "Reconstruct the absorption coefficient from incident-radiation data"},
      {"ensemble", "Train the hyperparameter grid and keep the lowest training loss"},
      {"oracles", "Run the closed-form regression checks"},
      {"bound", "Evaluate a generalization bound from bound.inputs"}};
  std::string chosen;
  for (const auto& [name, help] : verbs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", o.config_file, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("-s,--set", o.overrides, "Override a value: dotted.key=json_value (repeatable)");
    sub->add_option("-p,--problem", o.problem, "slab1d, cube3d-mono, cube3d-poly, shell-time or inverse-cube");
    sub->add_option("-o,--out", o.out, "Output directory (relative paths go under $RTPINN_OUTPUT_ROOT)");
    sub->add_option("--seed", o.seed, "Seed for sampling and initialization");
    sub->add_option("-j,--jobs", o.jobs, "Worker threads for ensemble members");
    sub->add_flag("--dry-run", o.dry_run, "Print the resolved configuration and exit");
    sub->add_flag("-q,--quiet", o.quiet, "No progress output");
    sub->callback([&chosen, name = name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  return run(chosen, o);
}
