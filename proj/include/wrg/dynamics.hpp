#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "wrg/graph.hpp"

namespace wrg {

struct GridTrajectory;

/**
 * Pairwise interaction D with its analytic constants: K bounds |D| and L is
 * a Lipschitz constant. Built-ins carry exact constants; custom functions
 * must supply theirs.
 */
class Interaction {
 public:
  // z / (1 + z^2); |D| <= 1/2 attained at z = 1, Lipschitz constant 1.
  static Interaction rational_attraction();
  static Interaction custom(std::function<double(double)> f, double sup_bound, double lipschitz);

  double operator()(double z) const { return builtin_ ? eval_builtin(z) : fn_(z); }
  double sup_bound() const { return sup_bound_; }
  double lipschitz() const { return lipschitz_; }
  bool builtin() const { return builtin_; }

  static double eval_builtin(double z) { return z / (1.0 + z * z); }

 private:
  Interaction() = default;
  bool builtin_ = true;
  std::function<double(double)> fn_;
  double sup_bound_ = 0.5;
  double lipschitz_ = 1.0;
};

/** Initial profile g on [0,1] with a 1/2-Holder constant for the envelopes. */
struct InitialData {
  std::function<double(double)> eval;
  double holder_half = 0.0;

  // sin(4x)^2; |g'| <= 4 and the range is 1, so the 1/2-Holder constant is 2.
  static InitialData sine_squared();
  static InitialData constant(double c);
};

/** Fixed-step solution record: state i of stored step k at data[k*n + i]. */
struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  int store_every = 1;
  int n = 0;
  std::vector<double> data;

  int steps() const { return n == 0 ? 0 : static_cast<int>(data.size()) / n; }
  const double* state(int k) const { return data.data() + static_cast<std::size_t>(k) * n; }
  double* state(int k) { return data.data() + static_cast<std::size_t>(k) * n; }
  double time_at(int k) const { return t0 + dt * store_every * k; }
  std::vector<double> final_state() const {
    return std::vector<double>(state(steps() - 1), state(steps() - 1) + n);
  }
};

/** Thrown when a state leaves the finite range during integration. */
class BlowupError : public std::runtime_error {
 public:
  explicit BlowupError(double t);
  double time() const { return time_; }

 private:
  double time_;
};

// du_i/dt = (1/n) sum_j w_ij D(u_j - u_i), written into out.
void pair_rhs(const WeightMatrix& w, const Interaction& d, const double* u, double* out);

// Classical fixed-step RK4 for a generic autonomous vector field.
// Requires round(T/dt) steps matching T and store_every dividing the count.
using VectorField = std::function<void(const double*, double*)>;
Trajectory integrate_rk4(int n, const double* u0, double t0, double T, double dt,
                         int store_every, const VectorField& rhs,
                         double blowup_threshold = 1e12);

// Fixed sampled matrix xi (interval 0 of master_seed), initial state g(coords).
Trajectory integrate_finite(const GraphLaw& law, const NodeSet& nodes, const Interaction& d,
                            const InitialData& g, double T, double dt, std::uint64_t seed,
                            int store_every = 1, double blowup_threshold = 1e12);

// Mean matrix wbar(coords_i, coords_j) in place of the sampled one.
Trajectory integrate_averaged(const GraphLaw& law, const NodeSet& nodes, const Interaction& d,
                              const InitialData& g, double T, double dt, int store_every = 1,
                              double blowup_threshold = 1e12);

// Matrix resampled at the start of every interval [k eps, (k+1) eps); the
// interval-k matrix drives all RK4 stages of steps whose left endpoint lies
// in it. Requires dt dividing eps and eps dividing T.
Trajectory integrate_blinking(const GraphLaw& law, const NodeSet& nodes, const Interaction& d,
                              const InitialData& g, double T, double dt, double eps,
                              std::uint64_t seed, int store_every = 1,
                              double blowup_threshold = 1e12);

// One blinking interval started from the reference solution: initial state is
// ref at time k*eps evaluated at the node coordinates, and the weight matrix
// is the interval-k draw of the same master seed as integrate_blinking.
Trajectory integrate_intermediate(const GraphLaw& law, const NodeSet& nodes,
                                  const Interaction& d, const GridTrajectory& ref, int interval,
                                  double eps, double dt, std::uint64_t seed,
                                  int store_every = 1, double blowup_threshold = 1e12);

}  // namespace wrg
