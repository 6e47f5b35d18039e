#pragma once

#include <functional>
#include <vector>

#include "wrg/dynamics.hpp"

namespace wrg {

/** Piecewise-constant function on a uniform partition of [0,1] into m cells. */
struct GridFunction {
  int m = 0;
  std::vector<double> values;

  // Value of the cell containing x; x is clamped to [0,1].
  double eval(double x) const;

  static GridFunction from_function(int m, const std::function<double(double)>& f);
};

/** Grid-valued solution record; state k is a GridFunction on m cells. */
struct GridTrajectory {
  Trajectory traj;

  int m() const { return traj.n; }
  int steps() const { return traj.steps(); }
  double time_at(int k) const { return traj.time_at(k); }
  const double* state(int k) const { return traj.state(k); }
  GridFunction snapshot(int k) const;
  // Stored snapshot whose time matches t to 1e-9; throws otherwise.
  GridFunction snapshot_at_time(double t) const;
};

// Method-of-lines solution of the nonlocal dynamics with kernel wbar:
// mid-cell collocation, rectangle-rule coupling, RK4 in time. Identical by
// construction to integrate_averaged on deterministic nodes with n = m.
GridTrajectory solve_graph_limit(const GraphLaw& law, const Interaction& d,
                                 const InitialData& g, int m, double T, double dt,
                                 int store_every = 1);

// Values of u at the node coordinates.
std::vector<double> project(const GridFunction& u, const NodeSet& nodes);

// Step function with one cell per entry.
GridFunction embed(std::vector<double> values);

// Root mean square norm: sqrt((1/n) sum u_i^2).
double norm_mean_square(const double* u, int n);
double norm_mean_square(const std::vector<double>& u);

// L2([0,1]) distance of two step functions, exact on the common refinement.
double l2_distance_grid(const GridFunction& a, const GridFunction& b);
double l2_distance_cells(const double* a, int na, const double* b, int nb);

// Max over stored steps of metric(state_a, state_b, n); the time grids of the
// two trajectories must coincide.
using StateMetric = std::function<double(const double*, const double*, int)>;
double sup_time_distance(const Trajectory& a, const Trajectory& b, const StateMetric& metric);

// sup_time_distance with the root mean square norm of the difference.
double sup_time_rms_distance(const Trajectory& a, const Trajectory& b);

}  // namespace wrg
