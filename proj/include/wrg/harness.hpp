#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wrg/stats.hpp"

namespace wrg {

using json = nlohmann::json;

/** Named mean kernel usable from a config file. */
struct KernelSpec {
  std::string kind;    // constant | product | small_world_mean | garlaschelli_xy_mean
  double value = 0.0;  // constant
  double r = 0.0;      // small_world_mean
};

struct LawSpec {
  std::string kind;  // bernoulli | garlaschelli | garlaschelli_xy | exponential | small_world | delta
  double p = 0.0;
  double lambda = 0.0;
  double r = 0.0;
  KernelSpec kernel;  // graphon of bernoulli, mean kernel of delta
};

struct InitSpec {
  std::string kind = "sine_squared";  // sine_squared | constant
  double value = 0.0;
};

struct InteractionSpec {
  std::string kind = "rational";  // rational only
};

Kernel2D make_kernel(const KernelSpec& spec);
LawPtr make_law(const LawSpec& spec);
InitialData make_init(const InitSpec& spec);
Interaction make_interaction(const InteractionSpec& spec);

json kernel_to_json(const KernelSpec&);
json law_to_json(const LawSpec&);
json init_to_json(const InitSpec&);
json interaction_to_json(const InteractionSpec&);
KernelSpec kernel_from_json(const json&);
LawSpec law_from_json(const json&);
InitSpec init_from_json(const json&);
InteractionSpec interaction_from_json(const json&);

// Seed of Monte Carlo cell (n, trial); independent of the size list.
std::uint64_t trial_seed(std::uint64_t master_seed, int n, int trial);

/** Convergence sweep over system sizes against one shared reference solution. */
struct SweepConfig {
  LawSpec law;
  std::string mode = "rr";  // rr | rd | blinking
  std::vector<int> sizes{25, 50, 100, 200, 400};
  int trials = 20;
  double T = 10.0;
  double dt = 0.01;
  double eps = 0.1;  // blinking interval, used by mode "blinking"
  std::uint64_t seed = 42;
  int ref_multiplier = 16;  // reference cells per largest size
  int threads = 1;          // 0 selects the hardware thread count
  double blowup_threshold = 1e12;
  InitSpec init;
  InteractionSpec interaction;
  std::string out_dir;

  json to_json() const;
  static SweepConfig from_json(const json& j);
};

struct SizeStats {
  int n = 0;
  std::vector<double> errors;  // per trial; NaN marks an excluded blow-up
  double median = 0.0;
  double mean = 0.0;
  double envelope = 0.0;       // theoretical high-probability error bound
  double tail_bound = 0.0;     // theoretical probability of exceeding it
  double exceed_fraction = 0.0;
  int excluded = 0;
};

struct ConvergenceReport {
  std::vector<SizeStats> per_size;
  PowerLawFit fit;
  bool fit_skipped = false;
  ErrorBoundConstants constants{};
  double moment_bound = 0.0;
  int ref_cells = 0;
};

// Errors per (size, trial): the integrated system against the reference
// solution of the limit dynamics. rr and blinking draw random nodes and
// measure the mean-square error at the node coordinates; rd uses mid-cell
// nodes and the L2([0,1]) distance of the embedded states. A precomputed
// reference matching (ref_cells, T, dt) may be shared across sweeps.
ConvergenceReport run_convergence(const SweepConfig& cfg,
                                  const GridTrajectory* shared_ref = nullptr);

// Reference solution a sweep would build internally.
GridTrajectory solve_reference(const SweepConfig& cfg);

void write_convergence_outputs(const std::string& dir, const SweepConfig& cfg,
                               const ConvergenceReport& rep);

/** Blinking-versus-averaged distance as the blinking interval shrinks. */
struct AveragingConfig {
  LawSpec law;
  int n = 20;
  std::vector<double> eps_list{1.0, 0.5, 0.1, 0.01};
  int trials = 20;
  double T = 10.0;
  double dt = 0.01;
  std::uint64_t seed = 42;
  int threads = 1;
  double blowup_threshold = 1e12;
  InitSpec init;
  InteractionSpec interaction;
  std::string out_dir;

  json to_json() const;
  static AveragingConfig from_json(const json& j);
};

struct AveragingStats {
  double eps = 0.0;
  std::vector<double> errors;
  double median = 0.0;
  double mean = 0.0;
  int excluded = 0;
};

struct AveragingReport {
  std::vector<AveragingStats> per_eps;
};

// Per trial, one node draw and one averaged trajectory are shared across the
// eps list; the distance is the sup-time mean-square gap blinking-averaged.
AveragingReport run_averaging_sweep(const AveragingConfig& cfg);

void write_averaging_outputs(const std::string& dir, const AveragingConfig& cfg,
                             const AveragingReport& rep);

/** Exceedance frequencies of the matrix concentration statistics. */
struct TailConfig {
  LawSpec law;
  std::vector<int> sizes{100};
  int trials = 2000;
  std::uint64_t seed = 42;
  int threads = 1;
  std::string out_dir;

  json to_json() const;
  static TailConfig from_json(const json& j);
};

struct TailSizeReport {
  int n = 0;
  TailReport rms;           // threshold 2M, theoretical bound 1/n^2
  TailReport max_row_mean;  // threshold 2M, theoretical bound 5/n
};

struct TailSweepReport {
  double threshold = 0.0;  // 2M
  std::vector<TailSizeReport> per_size;
};

TailSweepReport run_concentration_tails(const TailConfig& cfg);

void write_tail_outputs(const std::string& dir, const TailConfig& cfg,
                        const TailSweepReport& rep);

/** Per-interval growth check of the blinking-versus-intermediate distance. */
struct CouplingConfig {
  LawSpec law;
  int n = 100;
  double eps = 0.1;
  double T = 1.0;
  double dt = 0.01;
  int trials = 200;
  std::uint64_t seed = 42;
  int ref_multiplier = 16;
  int threads = 1;
  InitSpec init;
  InteractionSpec interaction;

  json to_json() const;
  static CouplingConfig from_json(const json& j);
};

struct CouplingReport {
  int events = 0;      // (trial, interval) pairs
  int holds = 0;       // events where the growth bound held along the interval
  double frequency = 0.0;
  double growth_factor = 0.0;    // e^{4 L M eps}
  double bound = 0.0;            // theoretical holding probability 1 - 6/n
  double violation_ci_upper = 0.0;
};

CouplingReport run_interval_coupling_check(const CouplingConfig& cfg);

}  // namespace wrg
