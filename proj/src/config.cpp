#include "rtpinn/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include "rtpinn/errors.hpp"

namespace rtpinn {
namespace {

using nlohmann::json;

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Rejects keys of `user` that the defaults do not know about.
void check_keys(const json& defaults, const json& user, const std::string& prefix) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!defaults.contains(it.key())) throw ConfigError("unknown configuration key '" + path + "'");
    const auto& d = defaults.at(it.key());
    if (d.is_object() && !d.empty() && it.value().is_object()) check_keys(d, it.value(), path);
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& section) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("configuration value '" + section + "." + key + "' has the wrong type");
  }
}

template <class T>
std::optional<T> get_optional(const json& j, const char* key, const std::string& section) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get<T>(j, key, section);
}

}  // namespace

json default_tree(const std::string& problem) {
  json t;
  t["problem"] = problem;
  t["seed"] = 0;
  t["problem_options"] = {{"sigma", 0.0}, {"k_nu", 1.0}, {"intensity_scale", 1.0}};
  json sampling = {{"n_int", 2048}, {"n_sb", 512}, {"n_tb", 0}, {"n_d", 0}, {"sampler", "sobol"},
                   {"data_sampler", "uniform_random"}};
  json network = {{"depth", 4}, {"width", 16}, {"k_depth", 4}, {"k_width", 16}};
  json angular = {{"n_mu", 10}, {"n_phi", 10}};
  json loss = {{"lambda", 1.0}, {"lambda_reg", 0.0}, {"q", 2}, {"lambda_k", 0.0}, {"k_boundary_weight", 1.0}};
  json eval = {{"nx", 24},
               {"n_mu", 64},
               {"times", json::array()},
               {"frequencies", json::array()},
               {"radii", json::array()}};
  if (problem == "slab1d") {
    angular["n_phi"] = 1;
    eval["nx"] = 101;
    eval["n_mu"] = 101;
  } else if (problem == "cube3d-mono") {
    sampling["n_int"] = 4096;
    sampling["n_sb"] = 3072;
  } else if (problem == "cube3d-poly") {
    sampling["n_int"] = 4096;
    sampling["n_sb"] = 3072;
    network["width"] = 20;
    eval["frequencies"] = {0.0, 0.5, 1.0};
  } else if (problem == "shell-time") {
    sampling["n_int"] = 4096;
    sampling["n_sb"] = 2048;
    sampling["n_tb"] = 2048;
    angular["n_mu"] = 6;
    angular["n_phi"] = 6;
    eval["times"] = {1.0};
    eval["radii"] = {2.5, 3.0};
  } else if (problem == "inverse-cube") {
    sampling["n_int"] = 4096;
    sampling["n_sb"] = 3072;
    sampling["n_d"] = 1024;
    loss["lambda_k"] = 1e-3;
    // |u| is below 2e-3 here (max |G_bar| = 1/64); train on u / 1e-3.
    t["problem_options"]["intensity_scale"] = 1e-3;
  } else {
    throw ConfigError("unknown problem '" + problem + "'");
  }
  t["sampling"] = sampling;
  t["network"] = network;
  t["angular"] = angular;
  t["loss"] = loss;
  const OptimizerConfig o;
  t["optimizer"] = {{"algorithm", "lbfgs"},
                    {"max_iterations", o.max_iterations},
                    {"learning_rate", o.learning_rate},
                    {"beta1", o.beta1},
                    {"beta2", o.beta2},
                    {"epsilon", o.epsilon},
                    {"history", o.history},
                    {"wolfe_c1", o.wolfe_c1},
                    {"wolfe_c2", o.wolfe_c2},
                    {"max_line_search", o.max_line_search},
                    {"gradient_tolerance", o.gradient_tolerance},
                    {"loss_tolerance", o.loss_tolerance}};
  const auto g = default_ensemble_grid(problem);
  t["ensemble"] = {{"depths", g.depths},           {"widths", g.widths},
                   {"lambdas", g.lambdas},         {"lambda_regs", g.lambda_regs},
                   {"retrainings", g.retrainings}, {"seed_base", g.seed_base}};
  t["jobs"] = 1;
  t["chunk_columns"] = 2048;
  t["log_every"] = 0;
  t["output"] = {{"dir", "runs/" + problem}};
  t["eval"] = eval;
  t["bound"] = {{"lemma", "auto"}, {"s", 1},          {"v_tb", 1.0},         {"v_sb", 1.0},
                {"v_int", 1.0},    {"c_bar", 1.0},    {"kappa", nullptr},    {"c_epsilon", nullptr},
                {"inputs", json::object()}};
  return t;
}

void apply_override(json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &tree;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json j = json::parse(in, nullptr, false, true);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("config file '" + path.string() + "' is not a JSON object");
  return j;
}

std::filesystem::path resolve_output_dir(const std::filesystem::path& dir) {
  if (dir.is_absolute()) return dir;
  if (const char* root = std::getenv("RTPINN_OUTPUT_ROOT"); root != nullptr && *root != '\0') {
    return std::filesystem::path(root) / dir;
  }
  return dir;
}

std::vector<std::size_t> RunConfig::u_widths(std::size_t input_dim) const {
  return EnsembleMember{depth, width, 0, 0, 0, 0}.network_widths(input_dim);
}

std::vector<std::size_t> RunConfig::k_widths(std::size_t input_dim) const {
  return EnsembleMember{k_depth, k_width, 0, 0, 0, 0}.network_widths(input_dim);
}

std::string RunConfig::hash() const {
  json t = tree;
  t.erase("output");
  t.erase("jobs");
  t.erase("log_every");
  return fnv1a(t.dump());
}

RunConfig resolve_config(const json& user) {
  if (!user.is_object()) throw ConfigError("configuration must be a JSON object");
  const std::string problem = user.contains("problem") ? get<std::string>(user, "problem", "") : "slab1d";
  json tree = default_tree(problem);
  check_keys(tree, user, "");
  tree.merge_patch(user);

  RunConfig c;
  c.tree = tree;
  c.problem = problem;
  c.seed = get<std::uint64_t>(tree, "seed", "");
  const auto& po = tree["problem_options"];
  c.problem_options.sigma = get<double>(po, "sigma", "problem_options");
  c.problem_options.k_nu = get<double>(po, "k_nu", "problem_options");
  c.problem_options.intensity_scale = get<double>(po, "intensity_scale", "problem_options");
  if (!(c.problem_options.intensity_scale > 0.0)) throw ConfigError("problem_options.intensity_scale must be > 0");

  const auto& s = tree["sampling"];
  c.counts = {get<std::size_t>(s, "n_int", "sampling"), get<std::size_t>(s, "n_sb", "sampling"),
              get<std::size_t>(s, "n_tb", "sampling"), get<std::size_t>(s, "n_d", "sampling")};
  c.sampler = parse_sampler(get<std::string>(s, "sampler", "sampling"));
  c.data_sampler = parse_sampler(get<std::string>(s, "data_sampler", "sampling"));

  const auto& n = tree["network"];
  c.depth = get<std::size_t>(n, "depth", "network");
  c.width = get<std::size_t>(n, "width", "network");
  c.k_depth = get<std::size_t>(n, "k_depth", "network");
  c.k_width = get<std::size_t>(n, "k_width", "network");
  if (c.depth < 1 || c.width < 1 || c.k_depth < 1 || c.k_width < 1) {
    throw ConfigError("network depth and width must be >= 1");
  }

  const auto& a = tree["angular"];
  c.n_mu = get<int>(a, "n_mu", "angular");
  c.n_phi = get<int>(a, "n_phi", "angular");
  if (c.n_mu < 1 || c.n_mu > 128 || c.n_phi < 1) throw ConfigError("angular rule needs 1 <= n_mu <= 128 and n_phi >= 1");

  const auto& l = tree["loss"];
  c.loss.lambda = get<double>(l, "lambda", "loss");
  c.loss.lambda_reg = get<double>(l, "lambda_reg", "loss");
  c.loss.q = get<int>(l, "q", "loss");
  c.loss.lambda_k = get<double>(l, "lambda_k", "loss");
  c.loss.k_boundary_weight = get<double>(l, "k_boundary_weight", "loss");
  c.loss.validate();

  const auto& o = tree["optimizer"];
  c.optimizer.algorithm = parse_algorithm(get<std::string>(o, "algorithm", "optimizer"));
  c.optimizer.max_iterations = get<std::size_t>(o, "max_iterations", "optimizer");
  c.optimizer.learning_rate = get<double>(o, "learning_rate", "optimizer");
  c.optimizer.beta1 = get<double>(o, "beta1", "optimizer");
  c.optimizer.beta2 = get<double>(o, "beta2", "optimizer");
  c.optimizer.epsilon = get<double>(o, "epsilon", "optimizer");
  c.optimizer.history = get<std::size_t>(o, "history", "optimizer");
  c.optimizer.wolfe_c1 = get<double>(o, "wolfe_c1", "optimizer");
  c.optimizer.wolfe_c2 = get<double>(o, "wolfe_c2", "optimizer");
  c.optimizer.max_line_search = get<std::size_t>(o, "max_line_search", "optimizer");
  c.optimizer.gradient_tolerance = get<double>(o, "gradient_tolerance", "optimizer");
  c.optimizer.loss_tolerance = get<double>(o, "loss_tolerance", "optimizer");
  c.optimizer.validate();

  const auto& e = tree["ensemble"];
  c.grid.depths = get<std::vector<std::size_t>>(e, "depths", "ensemble");
  c.grid.widths = get<std::vector<std::size_t>>(e, "widths", "ensemble");
  c.grid.lambdas = get<std::vector<double>>(e, "lambdas", "ensemble");
  c.grid.lambda_regs = get<std::vector<double>>(e, "lambda_regs", "ensemble");
  c.grid.retrainings = get<std::size_t>(e, "retrainings", "ensemble");
  c.grid.seed_base = get<std::uint64_t>(e, "seed_base", "ensemble");
  c.grid.validate();

  c.jobs = get<std::size_t>(tree, "jobs", "");
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  c.chunk_columns = get<std::size_t>(tree, "chunk_columns", "");
  if (c.chunk_columns < 1) throw ConfigError("chunk_columns must be >= 1");
  c.log_every = get<std::size_t>(tree, "log_every", "");
  c.output_dir = get<std::string>(tree["output"], "dir", "output");

  const auto& ev = tree["eval"];
  c.eval.nx = get<int>(ev, "nx", "eval");
  c.eval.n_mu = get<int>(ev, "n_mu", "eval");
  c.eval.times = get<std::vector<double>>(ev, "times", "eval");
  c.eval.frequencies = get<std::vector<double>>(ev, "frequencies", "eval");
  c.eval.radii = get<std::vector<double>>(ev, "radii", "eval");
  if (c.eval.nx < 2 || c.eval.n_mu < 2) throw ConfigError("evaluation grids need at least 2 points per axis");

  const auto& b = tree["bound"];
  c.bound.lemma = get<std::string>(b, "lemma", "bound");
  if (c.bound.lemma != "auto" && c.bound.lemma != "time" && c.bound.lemma != "steady") {
    throw ConfigError("bound.lemma must be auto, time or steady");
  }
  c.bound.s = get<int>(b, "s", "bound");
  c.bound.v_tb = get<double>(b, "v_tb", "bound");
  c.bound.v_sb = get<double>(b, "v_sb", "bound");
  c.bound.v_int = get<double>(b, "v_int", "bound");
  c.bound.c_bar = get<double>(b, "c_bar", "bound");
  c.bound.kappa = get_optional<double>(b, "kappa", "bound");
  c.bound.c_epsilon = get_optional<double>(b, "c_epsilon", "bound");

  // Standalone bound inputs (bound verb).
  const auto& bi = b["inputs"];
  static const std::set<std::string> known = {"e_tb", "e_sb", "e_int", "n_tb", "n_sb", "n_int", "n_s", "d",
                                              "sigma_sup", "psi_sup", "s_d", "T", "c", "k_min", "sigma_min",
                                              "sigma_max"};
  for (auto it = bi.begin(); it != bi.end(); ++it) {
    if (!known.contains(it.key())) throw ConfigError("unknown bound input 'bound.inputs." + it.key() + "'");
  }
  auto& in = c.bound_inputs;
  const std::string sec = "bound.inputs";
  in.e_tb = get_optional<double>(bi, "e_tb", sec).value_or(0.0);
  in.e_sb = get_optional<double>(bi, "e_sb", sec).value_or(0.0);
  in.e_int = get_optional<double>(bi, "e_int", sec).value_or(0.0);
  in.n_tb = get_optional<std::size_t>(bi, "n_tb", sec).value_or(1);
  in.n_sb = get_optional<std::size_t>(bi, "n_sb", sec).value_or(1);
  in.n_int = get_optional<std::size_t>(bi, "n_int", sec).value_or(1);
  in.n_s = get_optional<std::size_t>(bi, "n_s", sec).value_or(1);
  in.d = get_optional<int>(bi, "d", sec).value_or(3);
  in.sigma_sup = get_optional<double>(bi, "sigma_sup", sec).value_or(0.0);
  in.psi_sup = get_optional<double>(bi, "psi_sup", sec).value_or(0.0);
  in.s_d = get_optional<double>(bi, "s_d", sec).value_or(0.0);
  in.horizon = get_optional<double>(bi, "T", sec);
  in.light_speed = get_optional<double>(bi, "c", sec);
  in.k_min = get_optional<double>(bi, "k_min", sec);
  in.sigma_min = get_optional<double>(bi, "sigma_min", sec);
  in.sigma_max = get_optional<double>(bi, "sigma_max", sec);
  in.s = c.bound.s;
  in.v_tb = c.bound.v_tb;
  in.v_sb = c.bound.v_sb;
  in.v_int = c.bound.v_int;
  in.c_bar = c.bound.c_bar;
  in.kappa = c.bound.kappa;
  in.c_epsilon = c.bound.c_epsilon;
  return c;
}

}  // namespace rtpinn
