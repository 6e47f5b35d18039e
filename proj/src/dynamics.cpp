#include "wrg/dynamics.hpp"

#include <cmath>
#include <string>

#include "wrg/continuum.hpp"

namespace wrg {

namespace {

struct RationalD {
  double operator()(double z) const { return z / (1.0 + z * z); }
};

struct CustomD {
  const std::function<double(double)>* f;
  double operator()(double z) const { return (*f)(z); }
};

template <class F>
void pair_rhs_impl(int n, const double* __restrict w, const double* __restrict u,
                   double* __restrict out, F d) {
  const double inv = 1.0 / n;
#pragma omp parallel for schedule(static) if (n >= 1024)
  for (int i = 0; i < n; ++i) {
    const double ui = u[i];
    const double* wi = w + static_cast<std::size_t>(i) * n;
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += wi[j] * d(u[j] - ui);
    out[i] = s * inv;
  }
}

// Number of steps covering [0,T] with step dt; rejects non-divisible spans.
long long checked_steps(double span, double dt, const char* what) {
  if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
  if (!(span > 0.0)) throw std::invalid_argument("time span must be positive");
  const long long steps = std::llround(span / dt);
  if (steps < 1 || std::fabs(steps * dt - span) > 1e-9 * std::max(1.0, span))
    throw std::invalid_argument(std::string(what) + " must be an integer multiple of the step");
  return steps;
}

class Rk4Engine {
 public:
  Rk4Engine(int n, double blowup) : n_(n), blowup_(blowup), k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

  template <class Rhs>
  void step(std::vector<double>& u, double t, double dt, Rhs&& rhs) {
    rhs(u.data(), k1_.data());
    axpy(u, dt / 2.0, k1_);
    rhs(tmp_.data(), k2_.data());
    axpy(u, dt / 2.0, k2_);
    rhs(tmp_.data(), k3_.data());
    axpy(u, dt, k3_);
    rhs(tmp_.data(), k4_.data());
    const double w = dt / 6.0;
    for (int i = 0; i < n_; ++i)
      u[i] += w * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    for (int i = 0; i < n_; ++i)
      if (!(std::fabs(u[i]) <= blowup_)) throw BlowupError(t + dt);
  }

 private:
  void axpy(const std::vector<double>& u, double a, const std::vector<double>& k) {
    for (int i = 0; i < n_; ++i) tmp_[i] = u[i] + a * k[i];
  }

  int n_;
  double blowup_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

// Shared driver: pre_step runs before each step with its index and left time.
template <class Rhs, class PreStep>
Trajectory run_rk4(int n, const double* u0, double t0, double T, double dt, int store_every,
                   double blowup_threshold, Rhs&& rhs, PreStep&& pre_step) {
  if (n <= 0) throw std::invalid_argument("state dimension must be positive");
  if (store_every < 1) throw std::invalid_argument("store_every must be at least 1");
  const long long steps = checked_steps(T, dt, "time span");
  if (steps % store_every != 0)
    throw std::invalid_argument("store_every must divide the step count");

  Trajectory traj;
  traj.t0 = t0;
  traj.dt = dt;
  traj.store_every = store_every;
  traj.n = n;
  traj.data.reserve(static_cast<std::size_t>(steps / store_every + 1) * n);
  traj.data.assign(u0, u0 + n);

  std::vector<double> u(u0, u0 + n);
  Rk4Engine engine(n, blowup_threshold);
  for (long long s = 0; s < steps; ++s) {
    const double t = t0 + dt * s;
    pre_step(s, t);
    engine.step(u, t, dt, rhs);
    if ((s + 1) % store_every == 0) traj.data.insert(traj.data.end(), u.begin(), u.end());
  }
  return traj;
}

std::vector<double> initial_state(const InitialData& g, const NodeSet& nodes) {
  if (!g.eval) throw std::invalid_argument("initial data must be callable");
  std::vector<double> u(nodes.size());
  for (int i = 0; i < nodes.size(); ++i) u[i] = g.eval(nodes.coords[i]);
  return u;
}

}  // namespace

Interaction Interaction::rational_attraction() { return Interaction(); }

Interaction Interaction::custom(std::function<double(double)> f, double sup_bound,
                                double lipschitz) {
  if (!f) throw std::invalid_argument("interaction must be callable");
  if (!(sup_bound > 0.0) || !(lipschitz > 0.0))
    throw std::invalid_argument("interaction constants must be positive");
  Interaction d;
  d.builtin_ = false;
  d.fn_ = std::move(f);
  d.sup_bound_ = sup_bound;
  d.lipschitz_ = lipschitz;
  return d;
}

InitialData InitialData::sine_squared() {
  InitialData g;
  g.eval = [](double x) {
    const double s = std::sin(4.0 * x);
    return s * s;
  };
  g.holder_half = 2.0;
  return g;
}

InitialData InitialData::constant(double c) {
  InitialData g;
  g.eval = [c](double) { return c; };
  g.holder_half = 0.0;
  return g;
}

BlowupError::BlowupError(double t)
    : std::runtime_error("state blew up at t=" + std::to_string(t)), time_(t) {}

void pair_rhs(const WeightMatrix& w, const Interaction& d, const double* u, double* out) {
  if (w.n <= 0) throw std::invalid_argument("weight matrix is empty");
  if (d.builtin()) {
    pair_rhs_impl(w.n, w.w.data(), u, out, RationalD{});
  } else {
    const std::function<double(double)> f = [&d](double z) { return d(z); };
    pair_rhs_impl(w.n, w.w.data(), u, out, CustomD{&f});
  }
}

Trajectory integrate_rk4(int n, const double* u0, double t0, double T, double dt,
                         int store_every, const VectorField& rhs, double blowup_threshold) {
  if (!rhs) throw std::invalid_argument("vector field must be callable");
  return run_rk4(n, u0, t0, T, dt, store_every, blowup_threshold,
                 [&rhs](const double* u, double* out) { rhs(u, out); },
                 [](long long, double) {});
}

Trajectory integrate_finite(const GraphLaw& law, const NodeSet& nodes, const Interaction& d,
                            const InitialData& g, double T, double dt, std::uint64_t seed,
                            int store_every, double blowup_threshold) {
  const WeightMatrix xi = sample_weight_matrix(law, nodes, seed, 0);
  const std::vector<double> u0 = initial_state(g, nodes);
  return run_rk4(nodes.size(), u0.data(), 0.0, T, dt, store_every, blowup_threshold,
                 [&xi, &d](const double* u, double* out) { pair_rhs(xi, d, u, out); },
                 [](long long, double) {});
}

Trajectory integrate_averaged(const GraphLaw& law, const NodeSet& nodes, const Interaction& d,
                              const InitialData& g, double T, double dt, int store_every,
                              double blowup_threshold) {
  const WeightMatrix wbar = expected_weight_matrix(law, nodes);
  const std::vector<double> u0 = initial_state(g, nodes);
  return run_rk4(nodes.size(), u0.data(), 0.0, T, dt, store_every, blowup_threshold,
                 [&wbar, &d](const double* u, double* out) { pair_rhs(wbar, d, u, out); },
                 [](long long, double) {});
}

Trajectory integrate_blinking(const GraphLaw& law, const NodeSet& nodes, const Interaction& d,
                              const InitialData& g, double T, double dt, double eps,
                              std::uint64_t seed, int store_every, double blowup_threshold) {
  const long long steps_per_interval = checked_steps(eps, dt, "blinking interval");
  checked_steps(T, eps, "time span over the blinking interval");
  const std::vector<double> u0 = initial_state(g, nodes);
  WeightMatrix xi;
  return run_rk4(nodes.size(), u0.data(), 0.0, T, dt, store_every, blowup_threshold,
                 [&xi, &d](const double* u, double* out) { pair_rhs(xi, d, u, out); },
                 [&](long long s, double) {
                   if (s % steps_per_interval == 0)
                     resample_weight_matrix(xi, law, nodes, seed, s / steps_per_interval);
                 });
}

Trajectory integrate_intermediate(const GraphLaw& law, const NodeSet& nodes,
                                  const Interaction& d, const GridTrajectory& ref, int interval,
                                  double eps, double dt, std::uint64_t seed, int store_every,
                                  double blowup_threshold) {
  if (interval < 0) throw std::invalid_argument("interval index must be nonnegative");
  checked_steps(eps, dt, "blinking interval");
  const double t_start = interval * eps;
  const GridFunction start = ref.snapshot_at_time(t_start);
  std::vector<double> u0(nodes.size());
  for (int i = 0; i < nodes.size(); ++i) u0[i] = start.eval(nodes.coords[i]);
  const WeightMatrix xi = sample_weight_matrix(law, nodes, seed, interval);
  return run_rk4(nodes.size(), u0.data(), t_start, eps, dt, store_every, blowup_threshold,
                 [&xi, &d](const double* u, double* out) { pair_rhs(xi, d, u, out); },
                 [](long long, double) {});
}

}  // namespace wrg
