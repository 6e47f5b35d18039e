#include "wrg/cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wrg/harness.hpp"
#include "wrg/io.hpp"

namespace wrg {

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known)
      throw std::invalid_argument(std::string(where) + ": unknown key \"" + item.key() + "\"");
  }
}

const json& req(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end())
    throw std::invalid_argument(std::string(where) + ": missing key \"" + key + "\"");
  return *it;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->template get<T>();
}

json load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string(path) + ": " + e.what());
  }
}

// Relative output directories land under WRGSIM_OUTPUT_ROOT when it is set.
std::string apply_root(const std::string& dir) {
  const std::filesystem::path p(dir);
  if (p.is_absolute()) return dir;
  const char* root = std::getenv("WRGSIM_OUTPUT_ROOT");
  if (root == nullptr || *root == '\0') return dir;
  return (std::filesystem::path(root) / p).string();
}

struct CommonOpts {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool verbose = false;
  CLI::Option* out_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

CommonOpts& add_common(CLI::App* cmd, std::list<CommonOpts>& storage, bool with_seed = true) {
  storage.emplace_back();
  CommonOpts& o = storage.back();
  cmd->add_option("--config", o.config, "JSON configuration file")->required();
  o.out_opt = cmd->add_option("--out", o.out, "override the configured output directory");
  if (with_seed) o.seed_opt = cmd->add_option("--seed", o.seed, "override the configured seed");
  cmd->add_flag("--verbose", o.verbose, "print a completion line");
  return o;
}

void finish(const CommonOpts& o, const std::string& dir) {
  if (o.verbose) std::cout << "wrote " << dir << "\n";
}

struct GraphCmdConfig {
  LawSpec law;
  int n = 100;
  std::string nodes = "random";  // random | deterministic
  std::uint64_t seed = 42;
  int grid = 0;  // mean kernel resolution; 0 resolves to n
  std::string out_dir = "graph";

  json to_json() const {
    return json{{"law", law_to_json(law)}, {"n", n},       {"nodes", nodes},
                {"seed", seed},            {"grid", grid}, {"out_dir", out_dir}};
  }

  static GraphCmdConfig from_json(const json& j) {
    check_keys(j, {"law", "n", "nodes", "seed", "grid", "out_dir"}, "sample-graph config");
    GraphCmdConfig c;
    c.law = law_from_json(req(j, "law", "sample-graph config"));
    c.n = get_or(j, "n", c.n);
    c.nodes = get_or(j, "nodes", c.nodes);
    c.seed = get_or(j, "seed", c.seed);
    c.grid = get_or(j, "grid", c.grid);
    c.out_dir = get_or(j, "out_dir", c.out_dir);
    if (c.n < 1) throw std::invalid_argument("n must be positive");
    if (c.nodes != "random" && c.nodes != "deterministic")
      throw std::invalid_argument("nodes must be random or deterministic");
    if (c.grid < 0) throw std::invalid_argument("grid must be nonnegative");
    if (c.grid == 0) c.grid = c.n;
    return c;
  }
};

struct SimCmdConfig {
  LawSpec law;
  int n = 100;
  std::string nodes = "random";
  double T = 10.0;
  double dt = 0.01;
  int store_every = 1;
  double eps = 0.1;  // blink only
  std::uint64_t seed = 42;
  double blowup_threshold = 1e12;
  InitSpec init;
  InteractionSpec interaction;
  std::string out_dir;

  json to_json(bool blinking) const {
    json j{{"law", law_to_json(law)},
           {"n", n},
           {"nodes", nodes},
           {"T", T},
           {"dt", dt},
           {"store_every", store_every},
           {"seed", seed},
           {"blowup_threshold", blowup_threshold},
           {"init", init_to_json(init)},
           {"interaction", interaction_to_json(interaction)},
           {"out_dir", out_dir}};
    if (blinking) j["eps"] = eps;
    return j;
  }

  static SimCmdConfig from_json(const json& j, bool blinking) {
    if (blinking) {
      check_keys(j,
                 {"law", "n", "nodes", "T", "dt", "store_every", "eps", "seed",
                  "blowup_threshold", "init", "interaction", "out_dir"},
                 "blink config");
    } else {
      check_keys(j,
                 {"law", "n", "nodes", "T", "dt", "store_every", "seed", "blowup_threshold",
                  "init", "interaction", "out_dir"},
                 "simulate config");
    }
    SimCmdConfig c;
    c.out_dir = blinking ? "blink" : "run";
    c.law = law_from_json(req(j, "law", "simulate config"));
    c.n = get_or(j, "n", c.n);
    c.nodes = get_or(j, "nodes", c.nodes);
    c.T = get_or(j, "T", c.T);
    c.dt = get_or(j, "dt", c.dt);
    c.store_every = get_or(j, "store_every", c.store_every);
    c.eps = get_or(j, "eps", c.eps);
    c.seed = get_or(j, "seed", c.seed);
    c.blowup_threshold = get_or(j, "blowup_threshold", c.blowup_threshold);
    if (j.contains("init")) c.init = init_from_json(j["init"]);
    if (j.contains("interaction")) c.interaction = interaction_from_json(j["interaction"]);
    c.out_dir = get_or(j, "out_dir", c.out_dir);
    if (c.n < 1) throw std::invalid_argument("n must be positive");
    if (c.nodes != "random" && c.nodes != "deterministic")
      throw std::invalid_argument("nodes must be random or deterministic");
    return c;
  }

  NodeSet make_nodes() const {
    return nodes == "random" ? make_nodes_random(n, seed) : make_nodes_deterministic(n);
  }
};

struct LimitCmdConfig {
  LawSpec law;
  int m = 256;
  double T = 10.0;
  double dt = 0.01;
  int store_every = 1;
  InitSpec init;
  InteractionSpec interaction;
  std::string out_dir = "limit";

  json to_json() const {
    return json{{"law", law_to_json(law)},
                {"m", m},
                {"T", T},
                {"dt", dt},
                {"store_every", store_every},
                {"init", init_to_json(init)},
                {"interaction", interaction_to_json(interaction)},
                {"out_dir", out_dir}};
  }

  static LimitCmdConfig from_json(const json& j) {
    check_keys(j, {"law", "m", "T", "dt", "store_every", "init", "interaction", "out_dir"},
               "limit config");
    LimitCmdConfig c;
    c.law = law_from_json(req(j, "law", "limit config"));
    c.m = get_or(j, "m", c.m);
    c.T = get_or(j, "T", c.T);
    c.dt = get_or(j, "dt", c.dt);
    c.store_every = get_or(j, "store_every", c.store_every);
    if (j.contains("init")) c.init = init_from_json(j["init"]);
    if (j.contains("interaction")) c.interaction = interaction_from_json(j["interaction"]);
    c.out_dir = get_or(j, "out_dir", c.out_dir);
    if (c.m < 1) throw std::invalid_argument("m must be positive");
    return c;
  }
};

struct MomentsCmdConfig {
  LawSpec law;
  int n = 200;
  int trials = 1000;
  std::uint64_t seed = 42;
  int ref_cells = 1024;
  double t = 0.0;  // profile time; 0 keeps the initial data
  double dt = 0.01;
  InitSpec init;
  InteractionSpec interaction;
  std::string out_dir = "moments";

  json to_json() const {
    return json{{"law", law_to_json(law)},
                {"n", n},
                {"trials", trials},
                {"seed", seed},
                {"ref_cells", ref_cells},
                {"t", t},
                {"dt", dt},
                {"init", init_to_json(init)},
                {"interaction", interaction_to_json(interaction)},
                {"out_dir", out_dir}};
  }

  static MomentsCmdConfig from_json(const json& j) {
    check_keys(j,
               {"law", "n", "trials", "seed", "ref_cells", "t", "dt", "init", "interaction",
                "out_dir"},
               "moments config");
    MomentsCmdConfig c;
    c.law = law_from_json(req(j, "law", "moments config"));
    c.n = get_or(j, "n", c.n);
    c.trials = get_or(j, "trials", c.trials);
    c.seed = get_or(j, "seed", c.seed);
    c.ref_cells = get_or(j, "ref_cells", c.ref_cells);
    c.t = get_or(j, "t", c.t);
    c.dt = get_or(j, "dt", c.dt);
    if (j.contains("init")) c.init = init_from_json(j["init"]);
    if (j.contains("interaction")) c.interaction = interaction_from_json(j["interaction"]);
    c.out_dir = get_or(j, "out_dir", c.out_dir);
    if (c.n < 1 || c.trials < 1 || c.ref_cells < 1)
      throw std::invalid_argument("n, trials and ref_cells must be positive");
    if (c.t < 0.0) throw std::invalid_argument("t must be nonnegative");
    return c;
  }
};

void run_sample_graph(const CommonOpts& o) {
  json j = load_config(o.config);
  GraphCmdConfig c = GraphCmdConfig::from_json(j);
  if (o.out_opt->count() > 0) c.out_dir = o.out;
  if (o.seed_opt->count() > 0) c.seed = o.seed;
  const std::string dir = apply_root(c.out_dir);
  std::filesystem::create_directories(dir);

  const LawPtr law = make_law(c.law);
  const NodeSet nodes =
      c.nodes == "random" ? make_nodes_random(c.n, c.seed) : make_nodes_deterministic(c.n);
  const WeightMatrix xi = sample_weight_matrix(*law, nodes, c.seed);
  write_text_file(dir + "/config.json", c.to_json().dump(2) + "\n");
  write_nodes_csv(dir + "/nodes.csv", nodes);
  write_matrix_csv(dir + "/matrix.csv", xi);
  write_matrix_pgm(dir + "/matrix.pgm", xi);
  write_mean_kernel_csv(dir + "/mean_kernel.csv", *law, c.grid);
  finish(o, dir);
}

void run_simulate(const CommonOpts& o, bool blinking) {
  json j = load_config(o.config);
  SimCmdConfig c = SimCmdConfig::from_json(j, blinking);
  if (o.out_opt->count() > 0) c.out_dir = o.out;
  if (o.seed_opt->count() > 0) c.seed = o.seed;
  const std::string dir = apply_root(c.out_dir);
  std::filesystem::create_directories(dir);

  const LawPtr law = make_law(c.law);
  const Interaction d = make_interaction(c.interaction);
  const InitialData g = make_init(c.init);
  const NodeSet nodes = c.make_nodes();
  const Trajectory traj =
      blinking ? integrate_blinking(*law, nodes, d, g, c.T, c.dt, c.eps, c.seed, c.store_every,
                                    c.blowup_threshold)
               : integrate_finite(*law, nodes, d, g, c.T, c.dt, c.seed, c.store_every,
                                  c.blowup_threshold);
  write_text_file(dir + "/config.json", c.to_json(blinking).dump(2) + "\n");
  write_nodes_csv(dir + "/nodes.csv", nodes);
  write_trajectory_csv(dir + "/trajectory.csv", traj);
  finish(o, dir);
}

void run_limit(const CommonOpts& o) {
  json j = load_config(o.config);
  LimitCmdConfig c = LimitCmdConfig::from_json(j);
  if (o.out_opt->count() > 0) c.out_dir = o.out;
  const std::string dir = apply_root(c.out_dir);
  std::filesystem::create_directories(dir);

  const LawPtr law = make_law(c.law);
  const GridTrajectory sol = solve_graph_limit(*law, make_interaction(c.interaction),
                                               make_init(c.init), c.m, c.T, c.dt, c.store_every);
  write_text_file(dir + "/config.json", c.to_json().dump(2) + "\n");
  write_grid_trajectory_csv(dir + "/solution.csv", sol);
  finish(o, dir);
}

void run_converge(const CommonOpts& o) {
  json j = load_config(o.config);
  SweepConfig c = SweepConfig::from_json(j);
  if (o.out_opt->count() > 0) c.out_dir = o.out;
  if (o.seed_opt->count() > 0) c.seed = o.seed;
  if (c.out_dir.empty()) c.out_dir = "converge";
  const ConvergenceReport rep = run_convergence(c);
  const std::string dir = apply_root(c.out_dir);
  write_convergence_outputs(dir, c, rep);
  finish(o, dir);
}

void run_tails(const CommonOpts& o) {
  json j = load_config(o.config);
  TailConfig c = TailConfig::from_json(j);
  if (o.out_opt->count() > 0) c.out_dir = o.out;
  if (o.seed_opt->count() > 0) c.seed = o.seed;
  if (c.out_dir.empty()) c.out_dir = "tails";
  const TailSweepReport rep = run_concentration_tails(c);
  const std::string dir = apply_root(c.out_dir);
  write_tail_outputs(dir, c, rep);
  finish(o, dir);
}

void run_moments(const CommonOpts& o) {
  json j = load_config(o.config);
  MomentsCmdConfig c = MomentsCmdConfig::from_json(j);
  if (o.out_opt->count() > 0) c.out_dir = o.out;
  if (o.seed_opt->count() > 0) c.seed = o.seed;
  const std::string dir = apply_root(c.out_dir);
  std::filesystem::create_directories(dir);

  const LawPtr law = make_law(c.law);
  const Interaction d = make_interaction(c.interaction);
  const InitialData g = make_init(c.init);
  GridFunction u_ref;
  if (c.t > 0.0) {
    const GridTrajectory sol = solve_graph_limit(*law, d, g, c.ref_cells, c.t, c.dt);
    u_ref = sol.snapshot(sol.steps() - 1);
  } else {
    u_ref = GridFunction::from_function(c.ref_cells, g.eval);
  }
  const ResidualMomentReport rep = residual_moment_check(*law, c.n, u_ref, d, c.trials, c.seed);

  write_text_file(dir + "/config.json", c.to_json().dump(2) + "\n");
  std::string csv = "sigma2,ratio2,ratio4,se2,se4,trials,degenerate\n";
  csv += format_double(rep.sigma2) + "," + format_double(rep.ratio2) + "," +
         format_double(rep.ratio4) + "," + format_double(rep.se2) + "," +
         format_double(rep.se4) + "," + std::to_string(rep.trials) + "," +
         (rep.degenerate ? "1" : "0") + "\n";
  write_text_file(dir + "/moments.csv", csv);
  finish(o, dir);
}

void run_averaging(const CommonOpts& o) {
  json j = load_config(o.config);
  AveragingConfig c = AveragingConfig::from_json(j);
  if (o.out_opt->count() > 0) c.out_dir = o.out;
  if (o.seed_opt->count() > 0) c.seed = o.seed;
  if (c.out_dir.empty()) c.out_dir = "averaging";
  const AveragingReport rep = run_averaging_sweep(c);
  const std::string dir = apply_root(c.out_dir);
  write_averaging_outputs(dir, c, rep);
  finish(o, dir);
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"interacting particle systems on weighted random graphs"};
  app.name("wrgsim");
  app.require_subcommand(1);
  std::list<CommonOpts> storage;

  CLI::App* graph = app.add_subcommand("sample-graph", "draw one weighted graph and its mean kernel");
  CommonOpts& graph_o = add_common(graph, storage);
  graph->callback([&graph_o] { run_sample_graph(graph_o); });

  CLI::App* sim = app.add_subcommand("simulate", "integrate the particle system on a sampled graph");
  CommonOpts& sim_o = add_common(sim, storage);
  sim->callback([&sim_o] { run_simulate(sim_o, false); });

  CLI::App* blink = app.add_subcommand("blink", "integrate with the matrix resampled every eps");
  CommonOpts& blink_o = add_common(blink, storage);
  blink->callback([&blink_o] { run_simulate(blink_o, true); });

  CLI::App* limit = app.add_subcommand("limit", "solve the deterministic limit dynamics");
  CommonOpts& limit_o = add_common(limit, storage, false);
  limit->callback([&limit_o] { run_limit(limit_o); });

  CLI::App* conv = app.add_subcommand("converge", "Monte Carlo error sweep against the limit");
  CommonOpts& conv_o = add_common(conv, storage);
  conv->callback([&conv_o] { run_converge(conv_o); });

  CLI::App* tails = app.add_subcommand("tails", "exceedance rates of the matrix statistics");
  CommonOpts& tails_o = add_common(tails, storage);
  tails->callback([&tails_o] { run_tails(tails_o); });

  CLI::App* moments = app.add_subcommand("moments", "residual moments against the quadrature variance");
  CommonOpts& moments_o = add_common(moments, storage);
  moments->callback([&moments_o] { run_moments(moments_o); });

  CLI::App* avg = app.add_subcommand("averaging", "blinking-versus-averaged distance sweep");
  CommonOpts& avg_o = add_common(avg, storage);
  avg->callback([&avg_o] { run_averaging(avg_o); });

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const BlowupError& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace wrg
