#include "wrg/continuum.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace wrg {

namespace {

void check_cells(int m) {
  if (m <= 0) throw std::invalid_argument("cell count must be positive");
}

}  // namespace

double GridFunction::eval(double x) const {
  int c = static_cast<int>(x * m);
  if (c < 0) c = 0;
  if (c >= m) c = m - 1;
  return values[c];
}

GridFunction GridFunction::from_function(int m, const std::function<double(double)>& f) {
  check_cells(m);
  if (!f) throw std::invalid_argument("function must be callable");
  GridFunction u;
  u.m = m;
  u.values.resize(m);
  for (int i = 0; i < m; ++i) u.values[i] = f(midcell(i, m));
  return u;
}

GridFunction GridTrajectory::snapshot(int k) const {
  if (k < 0 || k >= steps()) throw std::invalid_argument("snapshot index out of range");
  GridFunction u;
  u.m = traj.n;
  u.values.assign(state(k), state(k) + traj.n);
  return u;
}

GridFunction GridTrajectory::snapshot_at_time(double t) const {
  const double stride = traj.dt * traj.store_every;
  const long long k = std::llround((t - traj.t0) / stride);
  if (k < 0 || k >= steps() || std::fabs(time_at(static_cast<int>(k)) - t) > 1e-9)
    throw std::invalid_argument("no stored snapshot at the requested time");
  return snapshot(static_cast<int>(k));
}

GridTrajectory solve_graph_limit(const GraphLaw& law, const Interaction& d,
                                 const InitialData& g, int m, double T, double dt,
                                 int store_every) {
  check_cells(m);
  GridTrajectory sol;
  sol.traj = integrate_averaged(law, make_nodes_deterministic(m), d, g, T, dt, store_every);
  return sol;
}

std::vector<double> project(const GridFunction& u, const NodeSet& nodes) {
  std::vector<double> out(nodes.size());
  for (int i = 0; i < nodes.size(); ++i) out[i] = u.eval(nodes.coords[i]);
  return out;
}

GridFunction embed(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("cannot embed an empty vector");
  GridFunction u;
  u.m = static_cast<int>(values.size());
  u.values = std::move(values);
  return u;
}

double norm_mean_square(const double* u, int n) {
  if (n <= 0) throw std::invalid_argument("vector must be nonempty");
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += u[i] * u[i];
  return std::sqrt(s / n);
}

double norm_mean_square(const std::vector<double>& u) {
  return norm_mean_square(u.data(), static_cast<int>(u.size()));
}

double l2_distance_cells(const double* a, int na, const double* b, int nb) {
  check_cells(na);
  check_cells(nb);
  const std::uint64_t ma = na, mb = nb;
  const std::uint64_t g = std::gcd(ma, mb);
  if ((ma / g) > UINT64_MAX / mb)
    throw std::invalid_argument("grids have no common refinement within budget");
  const std::uint64_t refined = (ma / g) * mb;
  const std::uint64_t ka = refined / ma, kb = refined / mb;
  double err2 = 0.0;
  std::uint64_t pos = 0, ia = 0, ib = 0;
  while (pos < refined) {
    const std::uint64_t next = std::min((ia + 1) * ka, (ib + 1) * kb);
    const double diff = a[ia] - b[ib];
    err2 += static_cast<double>(next - pos) * diff * diff;
    if (next == (ia + 1) * ka) ++ia;
    if (next == (ib + 1) * kb) ++ib;
    pos = next;
  }
  return std::sqrt(err2 / static_cast<double>(refined));
}

double l2_distance_grid(const GridFunction& a, const GridFunction& b) {
  return l2_distance_cells(a.values.data(), a.m, b.values.data(), b.m);
}

double sup_time_distance(const Trajectory& a, const Trajectory& b, const StateMetric& metric) {
  if (!metric) throw std::invalid_argument("metric must be callable");
  if (a.n != b.n) throw std::invalid_argument("trajectories have different dimensions");
  if (a.steps() != b.steps()) throw std::invalid_argument("trajectories have different lengths");
  if (std::fabs(a.t0 - b.t0) > 1e-9 ||
      std::fabs(a.dt * a.store_every - b.dt * b.store_every) > 1e-12)
    throw std::invalid_argument("trajectories live on different time grids");
  double sup = 0.0;
  for (int k = 0; k < a.steps(); ++k) sup = std::max(sup, metric(a.state(k), b.state(k), a.n));
  return sup;
}

double sup_time_rms_distance(const Trajectory& a, const Trajectory& b) {
  return sup_time_distance(a, b, [](const double* x, const double* y, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = x[i] - y[i];
      s += d * d;
    }
    return std::sqrt(s / n);
  });
}

}  // namespace wrg
