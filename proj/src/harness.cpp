#include "wrg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wrg/io.hpp"
#include "wrg/rng.hpp"

namespace wrg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

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

int thread_count(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

void check_divides(double total, double step, const char* message) {
  const long long k = std::llround(total / step);
  if (k < 1 || std::fabs(k * step - total) > 1e-9 * std::max(1.0, std::fabs(total)))
    throw std::invalid_argument(message);
}

// First failure message captured inside a parallel loop; exceptions must not
// escape an OpenMP region.
struct FailureFlag {
  std::string message;

  void capture(const std::exception& e) {
#pragma omp critical(wrg_failure_flag)
    if (message.empty()) message = e.what();
  }
  void rethrow() const {
    if (!message.empty()) throw std::runtime_error(message);
  }
};

double median_finite(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double mean_finite(const std::vector<double>& v, int& excluded) {
  double s = 0.0;
  int kept = 0;
  excluded = 0;
  for (double x : v) {
    if (std::isfinite(x)) {
      s += x;
      ++kept;
    } else {
      ++excluded;
    }
  }
  return kept == 0 ? kNaN : s / kept;
}

void validate_sweep(const SweepConfig& cfg) {
  if (cfg.mode != "rr" && cfg.mode != "rd" && cfg.mode != "blinking")
    throw std::invalid_argument("mode must be one of rr, rd, blinking");
  if (cfg.sizes.empty()) throw std::invalid_argument("sizes must be nonempty");
  for (int n : cfg.sizes)
    if (n < 1) throw std::invalid_argument("sizes must be positive");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be positive");
  if (!(cfg.T > 0.0) || !(cfg.dt > 0.0)) throw std::invalid_argument("T and dt must be positive");
  check_divides(cfg.T, cfg.dt, "dt must divide T");
  if (cfg.mode == "blinking") {
    if (!(cfg.eps > 0.0)) throw std::invalid_argument("blinking mode needs eps > 0");
    check_divides(cfg.eps, cfg.dt, "dt must divide eps");
    check_divides(cfg.T, cfg.eps, "eps must divide T");
  }
  if (cfg.ref_multiplier < 1) throw std::invalid_argument("ref_multiplier must be positive");
  if (cfg.threads < 0) throw std::invalid_argument("threads must be nonnegative");
  if (!(cfg.blowup_threshold > 0.0))
    throw std::invalid_argument("blowup_threshold must be positive");
}

void check_alignment(const Trajectory& traj, const GridTrajectory& ref) {
  if (traj.steps() != ref.steps() ||
      std::fabs(traj.dt * traj.store_every - ref.traj.dt * ref.traj.store_every) > 1e-12 ||
      std::fabs(traj.t0 - ref.traj.t0) > 1e-9)
    throw std::invalid_argument("trajectory and reference live on different time grids");
}

// sup over stored steps of the mean-square gap at the node coordinates.
double sup_node_rms_error(const Trajectory& traj, const GridTrajectory& ref,
                          const NodeSet& nodes) {
  check_alignment(traj, ref);
  const int n = traj.n;
  const int m = ref.m();
  std::vector<int> cell(n);
  for (int i = 0; i < n; ++i)
    cell[i] = std::clamp(static_cast<int>(nodes.coords[i] * m), 0, m - 1);
  double sup2 = 0.0;
  for (int k = 0; k < traj.steps(); ++k) {
    const double* u = traj.state(k);
    const double* v = ref.state(k);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double diff = u[i] - v[cell[i]];
      s += diff * diff;
    }
    sup2 = std::max(sup2, s);
  }
  return std::sqrt(sup2 / n);
}

// sup over stored steps of the L2([0,1]) gap of the embedded step functions.
double sup_l2_error(const Trajectory& traj, const GridTrajectory& ref) {
  check_alignment(traj, ref);
  double sup = 0.0;
  for (int k = 0; k < traj.steps(); ++k)
    sup = std::max(sup, l2_distance_cells(traj.state(k), traj.n, ref.state(k), ref.m()));
  return sup;
}

std::string int_csv(long long v) { return std::to_string(v); }

}  // namespace

Kernel2D make_kernel(const KernelSpec& spec) {
  if (spec.kind == "constant") {
    const double v = spec.value;
    if (!(v >= 0.0)) throw std::invalid_argument("constant kernel needs value >= 0");
    return [v](double, double) { return v; };
  }
  if (spec.kind == "product") {
    return [](double x, double y) { return x * y; };
  }
  if (spec.kind == "small_world_mean") {
    const double r = spec.r;
    if (!(r > 0.0 && r <= 0.5))
      throw std::invalid_argument("small_world_mean kernel needs r in (0, 1/2]");
    return [r](double x, double y) {
      const double rho = ring_distance(x, y);
      return rho <= r ? 1.0 - rho / (2.0 * r) : 0.5;
    };
  }
  if (spec.kind == "garlaschelli_xy_mean") {
    return [](double x, double y) { return x * y / (2.0 - x * y); };
  }
  throw std::invalid_argument("unknown kernel kind \"" + spec.kind + "\"");
}

LawPtr make_law(const LawSpec& spec) {
  if (spec.kind == "bernoulli") return make_bernoulli_graphon(make_kernel(spec.kernel));
  if (spec.kind == "garlaschelli") return make_garlaschelli_const(spec.p);
  if (spec.kind == "garlaschelli_xy") return make_garlaschelli_xy();
  if (spec.kind == "exponential") return make_exponential(spec.lambda);
  if (spec.kind == "small_world") return make_small_world(spec.r);
  if (spec.kind == "delta") return make_delta(make_kernel(spec.kernel));
  throw std::invalid_argument("unknown law kind \"" + spec.kind + "\"");
}

InitialData make_init(const InitSpec& spec) {
  if (spec.kind == "sine_squared") return InitialData::sine_squared();
  if (spec.kind == "constant") return InitialData::constant(spec.value);
  throw std::invalid_argument("unknown init kind \"" + spec.kind + "\"");
}

Interaction make_interaction(const InteractionSpec& spec) {
  if (spec.kind == "rational") return Interaction::rational_attraction();
  throw std::invalid_argument("unknown interaction kind \"" + spec.kind + "\"");
}

json kernel_to_json(const KernelSpec& k) {
  json j{{"kind", k.kind}};
  if (k.kind == "constant") j["value"] = k.value;
  if (k.kind == "small_world_mean") j["r"] = k.r;
  return j;
}

KernelSpec kernel_from_json(const json& j) {
  check_keys(j, {"kind", "value", "r"}, "kernel");
  KernelSpec k;
  k.kind = req(j, "kind", "kernel").get<std::string>();
  k.value = get_or(j, "value", 0.0);
  k.r = get_or(j, "r", 0.0);
  return k;
}

json law_to_json(const LawSpec& l) {
  json j{{"kind", l.kind}};
  if (l.kind == "garlaschelli") j["p"] = l.p;
  if (l.kind == "exponential") j["lambda"] = l.lambda;
  if (l.kind == "small_world") j["r"] = l.r;
  if (l.kind == "bernoulli" || l.kind == "delta") j["kernel"] = kernel_to_json(l.kernel);
  return j;
}

LawSpec law_from_json(const json& j) {
  check_keys(j, {"kind", "p", "lambda", "r", "kernel"}, "law");
  LawSpec l;
  l.kind = req(j, "kind", "law").get<std::string>();
  l.p = get_or(j, "p", 0.0);
  l.lambda = get_or(j, "lambda", 0.0);
  l.r = get_or(j, "r", 0.0);
  if (j.contains("kernel")) l.kernel = kernel_from_json(j["kernel"]);
  return l;
}

json init_to_json(const InitSpec& s) {
  json j{{"kind", s.kind}};
  if (s.kind == "constant") j["value"] = s.value;
  return j;
}

InitSpec init_from_json(const json& j) {
  check_keys(j, {"kind", "value"}, "init");
  InitSpec s;
  s.kind = get_or<std::string>(j, "kind", "sine_squared");
  s.value = get_or(j, "value", 0.0);
  return s;
}

json interaction_to_json(const InteractionSpec& s) { return json{{"kind", s.kind}}; }

InteractionSpec interaction_from_json(const json& j) {
  check_keys(j, {"kind"}, "interaction");
  InteractionSpec s;
  s.kind = get_or<std::string>(j, "kind", "rational");
  return s;
}

std::uint64_t trial_seed(std::uint64_t master_seed, int n, int trial) {
  return stream_key({master_seed, kTrialStream, static_cast<std::uint64_t>(n),
                     static_cast<std::uint64_t>(trial)});
}

json SweepConfig::to_json() const {
  return json{{"law", law_to_json(law)},
              {"mode", mode},
              {"sizes", sizes},
              {"trials", trials},
              {"T", T},
              {"dt", dt},
              {"eps", eps},
              {"seed", seed},
              {"ref_multiplier", ref_multiplier},
              {"threads", threads},
              {"blowup_threshold", blowup_threshold},
              {"init", init_to_json(init)},
              {"interaction", interaction_to_json(interaction)},
              {"out_dir", out_dir}};
}

SweepConfig SweepConfig::from_json(const json& j) {
  check_keys(j,
             {"law", "mode", "sizes", "trials", "T", "dt", "eps", "seed", "ref_multiplier",
              "threads", "blowup_threshold", "init", "interaction", "out_dir"},
             "sweep config");
  SweepConfig cfg;
  cfg.law = law_from_json(req(j, "law", "sweep config"));
  cfg.mode = get_or(j, "mode", cfg.mode);
  cfg.sizes = get_or(j, "sizes", cfg.sizes);
  cfg.trials = get_or(j, "trials", cfg.trials);
  cfg.T = get_or(j, "T", cfg.T);
  cfg.dt = get_or(j, "dt", cfg.dt);
  cfg.eps = get_or(j, "eps", cfg.eps);
  cfg.seed = get_or(j, "seed", cfg.seed);
  cfg.ref_multiplier = get_or(j, "ref_multiplier", cfg.ref_multiplier);
  cfg.threads = get_or(j, "threads", cfg.threads);
  cfg.blowup_threshold = get_or(j, "blowup_threshold", cfg.blowup_threshold);
  if (j.contains("init")) cfg.init = init_from_json(j["init"]);
  if (j.contains("interaction")) cfg.interaction = interaction_from_json(j["interaction"]);
  cfg.out_dir = get_or<std::string>(j, "out_dir", "");
  validate_sweep(cfg);
  return cfg;
}

GridTrajectory solve_reference(const SweepConfig& cfg) {
  validate_sweep(cfg);
  const int max_n = *std::max_element(cfg.sizes.begin(), cfg.sizes.end());
  const LawPtr law = make_law(cfg.law);
  return solve_graph_limit(*law, make_interaction(cfg.interaction), make_init(cfg.init),
                           cfg.ref_multiplier * max_n, cfg.T, cfg.dt);
}

ConvergenceReport run_convergence(const SweepConfig& cfg, const GridTrajectory* shared_ref) {
  validate_sweep(cfg);
  const LawPtr law = make_law(cfg.law);
  const Interaction d = make_interaction(cfg.interaction);
  const InitialData g = make_init(cfg.init);
  const int max_n = *std::max_element(cfg.sizes.begin(), cfg.sizes.end());
  const int m_ref = cfg.ref_multiplier * max_n;

  GridTrajectory local;
  if (shared_ref == nullptr) {
    local = solve_reference(cfg);
    shared_ref = &local;
  } else if (shared_ref->m() != m_ref) {
    throw std::invalid_argument("shared reference resolution does not match the sweep");
  }
  const GridTrajectory& ref = *shared_ref;

  ConvergenceReport rep;
  rep.ref_cells = ref.m();
  rep.moment_bound = law->moment_bound();
  rep.constants = error_bound_constants(d.sup_bound(), d.lipschitz(), rep.moment_bound, cfg.T,
                                        g.holder_half, law->mean_holder());

  const int nsizes = static_cast<int>(cfg.sizes.size());
  const long long njobs = static_cast<long long>(nsizes) * cfg.trials;
  std::vector<double> errors(njobs, kNaN);
  const int nthreads = thread_count(cfg.threads);
  FailureFlag failure;

#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (long long job = 0; job < njobs; ++job) {
    const int n = cfg.sizes[static_cast<int>(job / cfg.trials)];
    const int t = static_cast<int>(job % cfg.trials);
    const std::uint64_t ts = trial_seed(cfg.seed, n, t);
    try {
      if (cfg.mode == "rd") {
        const NodeSet nodes = make_nodes_deterministic(n);
        const Trajectory traj =
            integrate_finite(*law, nodes, d, g, cfg.T, cfg.dt, ts, 1, cfg.blowup_threshold);
        errors[job] = sup_l2_error(traj, ref);
      } else if (cfg.mode == "blinking") {
        const NodeSet nodes = make_nodes_random(n, ts);
        const Trajectory traj = integrate_blinking(*law, nodes, d, g, cfg.T, cfg.dt, cfg.eps, ts,
                                                   1, cfg.blowup_threshold);
        errors[job] = sup_node_rms_error(traj, ref, nodes);
      } else {
        const NodeSet nodes = make_nodes_random(n, ts);
        const Trajectory traj =
            integrate_finite(*law, nodes, d, g, cfg.T, cfg.dt, ts, 1, cfg.blowup_threshold);
        errors[job] = sup_node_rms_error(traj, ref, nodes);
      }
    } catch (const BlowupError&) {
      errors[job] = kNaN;
    } catch (const std::exception& e) {
      failure.capture(e);
    }
  }
  failure.rethrow();

  for (int is = 0; is < nsizes; ++is) {
    SizeStats s;
    s.n = cfg.sizes[is];
    s.errors.assign(errors.begin() + static_cast<long long>(is) * cfg.trials,
                    errors.begin() + static_cast<long long>(is + 1) * cfg.trials);
    s.median = median_finite(s.errors);
    s.mean = mean_finite(s.errors, s.excluded);
    if (cfg.mode == "blinking") {
      s.envelope = rep.constants.c3 / std::sqrt(s.n * cfg.eps);
      s.tail_bound = std::min(rep.constants.c3_tilde / (s.n * cfg.eps), 1.0);
    } else if (cfg.mode == "rd") {
      s.envelope = rep.constants.c2 / std::sqrt(static_cast<double>(s.n));
      s.tail_bound = std::min(rep.constants.c1_tilde / s.n, 1.0);
    } else {
      s.envelope = rep.constants.c1 / std::sqrt(static_cast<double>(s.n));
      s.tail_bound = std::min(rep.constants.c1_tilde / s.n, 1.0);
    }
    int exceed = 0;
    for (double e : s.errors)
      if (!std::isfinite(e) || e >= s.envelope) ++exceed;
    s.exceed_fraction = static_cast<double>(exceed) / cfg.trials;
    rep.per_size.push_back(std::move(s));
  }

  std::vector<double> xs, ys;
  for (const SizeStats& s : rep.per_size) {
    if (std::isfinite(s.median) && s.median > 0.0) {
      xs.push_back(static_cast<double>(s.n));
      ys.push_back(s.median);
    }
  }
  rep.fit_skipped = xs.size() < 2;
  if (!rep.fit_skipped) rep.fit = fit_power_law(xs, ys);
  return rep;
}

void write_convergence_outputs(const std::string& dir, const SweepConfig& cfg,
                               const ConvergenceReport& rep) {
  std::filesystem::create_directories(dir);
  write_text_file(dir + "/config.json", cfg.to_json().dump(2) + "\n");

  std::string errors = "N,trial,error\n";
  for (const SizeStats& s : rep.per_size)
    for (std::size_t t = 0; t < s.errors.size(); ++t)
      errors += int_csv(s.n) + "," + int_csv(static_cast<long long>(t)) + "," +
                format_double(s.errors[t]) + "\n";
  write_text_file(dir + "/errors.csv", errors);

  std::string report = "N,median,mean,envelope,exceed_fraction,tail_bound,excluded\n";
  for (const SizeStats& s : rep.per_size)
    report += int_csv(s.n) + "," + format_double(s.median) + "," + format_double(s.mean) + "," +
              format_double(s.envelope) + "," + format_double(s.exceed_fraction) + "," +
              format_double(s.tail_bound) + "," + int_csv(s.excluded) + "\n";
  write_text_file(dir + "/report.csv", report);

  std::ostringstream sum;
  sum << "convergence sweep\n";
  sum << "mode: " << cfg.mode << "\n";
  sum << "law: " << cfg.law.kind << "\n";
  sum << "sizes:";
  for (int n : cfg.sizes) sum << ' ' << n;
  sum << "\n";
  sum << "trials per size: " << cfg.trials << "\n";
  sum << "T: " << format_double(cfg.T) << "  dt: " << format_double(cfg.dt);
  if (cfg.mode == "blinking") sum << "  eps: " << format_double(cfg.eps);
  sum << "\n";
  sum << "reference cells: " << rep.ref_cells << "\n";
  sum << "moment bound M: " << format_double(rep.moment_bound) << "\n";
  const ErrorBoundConstants& c = rep.constants;
  sum << "constants: c1=" << format_double(c.c1) << " c1_tilde=" << format_double(c.c1_tilde)
      << " c2=" << format_double(c.c2) << " c3=" << format_double(c.c3)
      << " c3_tilde=" << format_double(c.c3_tilde) << " c4=" << format_double(c.c4)
      << " l_g=" << format_double(c.l_g) << "\n";
  if (rep.fit_skipped)
    sum << "rate fit: skipped\n";
  else
    sum << "rate fit: slope=" << format_double(rep.fit.slope)
        << " intercept=" << format_double(rep.fit.intercept)
        << " r2=" << format_double(rep.fit.r2) << "\n";
  for (const SizeStats& s : rep.per_size)
    sum << "N=" << s.n << " median=" << format_double(s.median)
        << " mean=" << format_double(s.mean) << " envelope=" << format_double(s.envelope)
        << " exceed=" << format_double(s.exceed_fraction)
        << " tail_bound=" << format_double(s.tail_bound) << " excluded=" << s.excluded << "\n";
  write_text_file(dir + "/summary.txt", sum.str());
}

json AveragingConfig::to_json() const {
  return json{{"law", law_to_json(law)},
              {"n", n},
              {"eps_list", eps_list},
              {"trials", trials},
              {"T", T},
              {"dt", dt},
              {"seed", seed},
              {"threads", threads},
              {"blowup_threshold", blowup_threshold},
              {"init", init_to_json(init)},
              {"interaction", interaction_to_json(interaction)},
              {"out_dir", out_dir}};
}

AveragingConfig AveragingConfig::from_json(const json& j) {
  check_keys(j,
             {"law", "n", "eps_list", "trials", "T", "dt", "seed", "threads", "blowup_threshold",
              "init", "interaction", "out_dir"},
             "averaging config");
  AveragingConfig cfg;
  cfg.law = law_from_json(req(j, "law", "averaging config"));
  cfg.n = get_or(j, "n", cfg.n);
  cfg.eps_list = get_or(j, "eps_list", cfg.eps_list);
  cfg.trials = get_or(j, "trials", cfg.trials);
  cfg.T = get_or(j, "T", cfg.T);
  cfg.dt = get_or(j, "dt", cfg.dt);
  cfg.seed = get_or(j, "seed", cfg.seed);
  cfg.threads = get_or(j, "threads", cfg.threads);
  cfg.blowup_threshold = get_or(j, "blowup_threshold", cfg.blowup_threshold);
  if (j.contains("init")) cfg.init = init_from_json(j["init"]);
  if (j.contains("interaction")) cfg.interaction = interaction_from_json(j["interaction"]);
  cfg.out_dir = get_or<std::string>(j, "out_dir", "");
  return cfg;
}

AveragingReport run_averaging_sweep(const AveragingConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("n must be positive");
  if (cfg.eps_list.empty()) throw std::invalid_argument("eps_list must be nonempty");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be positive");
  if (!(cfg.T > 0.0) || !(cfg.dt > 0.0)) throw std::invalid_argument("T and dt must be positive");
  if (!(cfg.blowup_threshold > 0.0))
    throw std::invalid_argument("blowup_threshold must be positive");
  if (cfg.threads < 0) throw std::invalid_argument("threads must be nonnegative");
  check_divides(cfg.T, cfg.dt, "dt must divide T");
  for (double e : cfg.eps_list) {
    if (!(e > 0.0)) throw std::invalid_argument("eps values must be positive");
    check_divides(e, cfg.dt, "dt must divide every eps");
    check_divides(cfg.T, e, "every eps must divide T");
  }
  const LawPtr law = make_law(cfg.law);
  const Interaction d = make_interaction(cfg.interaction);
  const InitialData g = make_init(cfg.init);

  const int neps = static_cast<int>(cfg.eps_list.size());
  std::vector<double> errors(static_cast<std::size_t>(neps) * cfg.trials, kNaN);
  const int nthreads = thread_count(cfg.threads);
  FailureFlag failure;

#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t ts = trial_seed(cfg.seed, cfg.n, t);
    const NodeSet nodes = make_nodes_random(cfg.n, ts);
    try {
      const Trajectory avg =
          integrate_averaged(*law, nodes, d, g, cfg.T, cfg.dt, 1, cfg.blowup_threshold);
      for (int e = 0; e < neps; ++e) {
        try {
          const Trajectory blink = integrate_blinking(*law, nodes, d, g, cfg.T, cfg.dt,
                                                      cfg.eps_list[e], ts, 1,
                                                      cfg.blowup_threshold);
          errors[static_cast<std::size_t>(e) * cfg.trials + t] =
              sup_time_rms_distance(blink, avg);
        } catch (const BlowupError&) {
        }
      }
    } catch (const BlowupError&) {
    } catch (const std::exception& e) {
      failure.capture(e);
    }
  }
  failure.rethrow();

  AveragingReport rep;
  for (int e = 0; e < neps; ++e) {
    AveragingStats s;
    s.eps = cfg.eps_list[e];
    s.errors.assign(errors.begin() + static_cast<std::size_t>(e) * cfg.trials,
                    errors.begin() + static_cast<std::size_t>(e + 1) * cfg.trials);
    s.median = median_finite(s.errors);
    s.mean = mean_finite(s.errors, s.excluded);
    rep.per_eps.push_back(std::move(s));
  }
  return rep;
}

void write_averaging_outputs(const std::string& dir, const AveragingConfig& cfg,
                             const AveragingReport& rep) {
  std::filesystem::create_directories(dir);
  write_text_file(dir + "/config.json", cfg.to_json().dump(2) + "\n");

  std::string errors = "eps,trial,error\n";
  for (const AveragingStats& s : rep.per_eps)
    for (std::size_t t = 0; t < s.errors.size(); ++t)
      errors += format_double(s.eps) + "," + int_csv(static_cast<long long>(t)) + "," +
                format_double(s.errors[t]) + "\n";
  write_text_file(dir + "/errors.csv", errors);

  std::string report = "eps,median,mean,excluded\n";
  for (const AveragingStats& s : rep.per_eps)
    report += format_double(s.eps) + "," + format_double(s.median) + "," +
              format_double(s.mean) + "," + int_csv(s.excluded) + "\n";
  write_text_file(dir + "/report.csv", report);

  std::ostringstream sum;
  sum << "averaging sweep\n";
  sum << "law: " << cfg.law.kind << "\n";
  sum << "n: " << cfg.n << "  trials: " << cfg.trials << "\n";
  sum << "T: " << format_double(cfg.T) << "  dt: " << format_double(cfg.dt) << "\n";
  for (const AveragingStats& s : rep.per_eps)
    sum << "eps=" << format_double(s.eps) << " median=" << format_double(s.median)
        << " mean=" << format_double(s.mean) << " excluded=" << s.excluded << "\n";
  write_text_file(dir + "/summary.txt", sum.str());
}

json TailConfig::to_json() const {
  return json{{"law", law_to_json(law)}, {"sizes", sizes},   {"trials", trials},
              {"seed", seed},            {"threads", threads}, {"out_dir", out_dir}};
}

TailConfig TailConfig::from_json(const json& j) {
  check_keys(j, {"law", "sizes", "trials", "seed", "threads", "out_dir"}, "tail config");
  TailConfig cfg;
  cfg.law = law_from_json(req(j, "law", "tail config"));
  cfg.sizes = get_or(j, "sizes", cfg.sizes);
  cfg.trials = get_or(j, "trials", cfg.trials);
  cfg.seed = get_or(j, "seed", cfg.seed);
  cfg.threads = get_or(j, "threads", cfg.threads);
  cfg.out_dir = get_or<std::string>(j, "out_dir", "");
  return cfg;
}

TailSweepReport run_concentration_tails(const TailConfig& cfg) {
  if (cfg.sizes.empty()) throw std::invalid_argument("sizes must be nonempty");
  for (int n : cfg.sizes)
    if (n < 1) throw std::invalid_argument("sizes must be positive");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be positive");
  const LawPtr law = make_law(cfg.law);
  const double threshold = 2.0 * law->moment_bound();
  const int nthreads = thread_count(cfg.threads);

  TailSweepReport rep;
  rep.threshold = threshold;
  for (int n : cfg.sizes) {
    std::vector<double> rms(cfg.trials), row(cfg.trials);
    FailureFlag failure;
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
    for (int t = 0; t < cfg.trials; ++t) {
      try {
        const std::uint64_t ts = trial_seed(cfg.seed, n, t);
        const NodeSet nodes = make_nodes_random(n, ts);
        const WeightMatrix xi = sample_weight_matrix(*law, nodes, ts);
        const ConcentrationStats cs = concentration_stats(xi);
        rms[t] = cs.rms;
        row[t] = cs.max_row_mean;
      } catch (const std::exception& e) {
        failure.capture(e);
      }
    }
    failure.rethrow();
    TailSizeReport s;
    s.n = n;
    auto summarize = [&](const std::vector<double>& v, double bound) {
      TailReport r;
      r.trials = cfg.trials;
      r.threshold = threshold;
      r.bound = std::min(bound, 1.0);
      for (double x : v)
        if (x >= threshold) ++r.exceed_count;
      r.rate = static_cast<double>(r.exceed_count) / cfg.trials;
      r.ci_upper = binomial_upper_ci(cfg.trials, r.exceed_count);
      return r;
    };
    s.rms = summarize(rms, 1.0 / (static_cast<double>(n) * n));
    s.max_row_mean = summarize(row, 5.0 / n);
    rep.per_size.push_back(s);
  }
  return rep;
}

void write_tail_outputs(const std::string& dir, const TailConfig& cfg,
                        const TailSweepReport& rep) {
  std::filesystem::create_directories(dir);
  write_text_file(dir + "/config.json", cfg.to_json().dump(2) + "\n");

  std::string csv = "N,statistic,trials,exceed_count,rate,ci_upper,threshold,bound\n";
  auto line = [&](int n, const char* name, const TailReport& r) {
    csv += int_csv(n) + "," + name + "," + int_csv(r.trials) + "," + int_csv(r.exceed_count) +
           "," + format_double(r.rate) + "," + format_double(r.ci_upper) + "," +
           format_double(r.threshold) + "," + format_double(r.bound) + "\n";
  };
  for (const TailSizeReport& s : rep.per_size) {
    line(s.n, "rms", s.rms);
    line(s.n, "max_row_mean", s.max_row_mean);
  }
  write_text_file(dir + "/tails.csv", csv);

  std::ostringstream sum;
  sum << "concentration tails\n";
  sum << "law: " << cfg.law.kind << "\n";
  sum << "threshold: " << format_double(rep.threshold) << "\n";
  for (const TailSizeReport& s : rep.per_size) {
    sum << "N=" << s.n << " rms: " << s.rms.exceed_count << "/" << s.rms.trials
        << " (ci " << format_double(s.rms.ci_upper) << ", bound " << format_double(s.rms.bound)
        << ")\n";
    sum << "N=" << s.n << " max_row_mean: " << s.max_row_mean.exceed_count << "/"
        << s.max_row_mean.trials << " (ci " << format_double(s.max_row_mean.ci_upper)
        << ", bound " << format_double(s.max_row_mean.bound) << ")\n";
  }
  write_text_file(dir + "/summary.txt", sum.str());
}

json CouplingConfig::to_json() const {
  return json{{"law", law_to_json(law)},
              {"n", n},
              {"eps", eps},
              {"T", T},
              {"dt", dt},
              {"trials", trials},
              {"seed", seed},
              {"ref_multiplier", ref_multiplier},
              {"threads", threads},
              {"init", init_to_json(init)},
              {"interaction", interaction_to_json(interaction)}};
}

CouplingConfig CouplingConfig::from_json(const json& j) {
  check_keys(j,
             {"law", "n", "eps", "T", "dt", "trials", "seed", "ref_multiplier", "threads",
              "init", "interaction"},
             "coupling config");
  CouplingConfig cfg;
  cfg.law = law_from_json(req(j, "law", "coupling config"));
  cfg.n = get_or(j, "n", cfg.n);
  cfg.eps = get_or(j, "eps", cfg.eps);
  cfg.T = get_or(j, "T", cfg.T);
  cfg.dt = get_or(j, "dt", cfg.dt);
  cfg.trials = get_or(j, "trials", cfg.trials);
  cfg.seed = get_or(j, "seed", cfg.seed);
  cfg.ref_multiplier = get_or(j, "ref_multiplier", cfg.ref_multiplier);
  cfg.threads = get_or(j, "threads", cfg.threads);
  if (j.contains("init")) cfg.init = init_from_json(j["init"]);
  if (j.contains("interaction")) cfg.interaction = interaction_from_json(j["interaction"]);
  return cfg;
}

CouplingReport run_interval_coupling_check(const CouplingConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("n must be positive");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be positive");
  if (!(cfg.eps > 0.0) || !(cfg.T > 0.0) || !(cfg.dt > 0.0))
    throw std::invalid_argument("eps, T and dt must be positive");
  if (cfg.ref_multiplier < 1) throw std::invalid_argument("ref_multiplier must be positive");
  const LawPtr law = make_law(cfg.law);
  const Interaction d = make_interaction(cfg.interaction);
  const InitialData g = make_init(cfg.init);

  const long long spi = std::llround(cfg.eps / cfg.dt);
  const long long intervals = std::llround(cfg.T / cfg.eps);
  if (spi < 1 || std::fabs(spi * cfg.dt - cfg.eps) > 1e-9 * std::max(1.0, cfg.eps))
    throw std::invalid_argument("dt must divide eps");
  if (intervals < 1 || std::fabs(intervals * cfg.eps - cfg.T) > 1e-9 * std::max(1.0, cfg.T))
    throw std::invalid_argument("eps must divide T");

  const GridTrajectory ref =
      solve_graph_limit(*law, d, g, cfg.ref_multiplier * cfg.n, cfg.T, cfg.dt);
  const double growth =
      std::exp(4.0 * d.lipschitz() * law->moment_bound() * cfg.eps);

  const long long events = static_cast<long long>(cfg.trials) * intervals;
  std::vector<char> held(events, 0);
  const int nthreads = thread_count(cfg.threads);
  FailureFlag failure;

#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t ts = trial_seed(cfg.seed, cfg.n, t);
    const NodeSet nodes = make_nodes_random(cfg.n, ts);
    try {
      const Trajectory blink =
          integrate_blinking(*law, nodes, d, g, cfg.T, cfg.dt, cfg.eps, ts);
      for (long long k = 0; k < intervals; ++k) {
        const Trajectory inter = integrate_intermediate(*law, nodes, d, ref,
                                                        static_cast<int>(k), cfg.eps, cfg.dt, ts);
        auto gap = [&](long long s) {
          const double* a = blink.state(static_cast<int>(k * spi + s));
          const double* b = inter.state(static_cast<int>(s));
          double sum = 0.0;
          for (int i = 0; i < cfg.n; ++i) {
            const double z = a[i] - b[i];
            sum += z * z;
          }
          return std::sqrt(sum / cfg.n);
        };
        const double bound = growth * gap(0) * (1.0 + 1e-9);
        bool ok = true;
        for (long long s = 0; s <= spi; ++s) {
          if (gap(s) > bound) {
            ok = false;
            break;
          }
        }
        held[t * intervals + k] = ok ? 1 : 0;
      }
    } catch (const BlowupError&) {
    } catch (const std::exception& e) {
      failure.capture(e);
    }
  }
  failure.rethrow();

  CouplingReport rep;
  rep.events = static_cast<int>(events);
  for (char h : held) rep.holds += h;
  rep.frequency = static_cast<double>(rep.holds) / events;
  rep.growth_factor = growth;
  rep.bound = std::max(0.0, 1.0 - 6.0 / cfg.n);
  rep.violation_ci_upper = binomial_upper_ci(rep.events, rep.events - rep.holds);
  return rep;
}

}  // namespace wrg
