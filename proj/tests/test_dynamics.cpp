#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wrg/continuum.hpp"
#include "wrg/dynamics.hpp"

using namespace wrg;

namespace {

double range_of(const double* u, int n) {
  double lo = u[0], hi = u[0];
  for (int i = 1; i < n; ++i) {
    lo = std::min(lo, u[i]);
    hi = std::max(hi, u[i]);
  }
  return hi - lo;
}

}  // namespace

TEST_CASE("rational attraction peaks at one half") {
  const Interaction d = Interaction::rational_attraction();
  CHECK(d(0.0) == 0.0);
  CHECK(d(1.0) == 0.5);
  CHECK(d(-1.0) == -0.5);
  CHECK(d.sup_bound() == 0.5);
  CHECK(d.lipschitz() == 1.0);
  for (double z = -6.0; z <= 6.0; z += 0.01) {
    CHECK(std::fabs(d(z)) <= 0.5);
    CHECK(std::fabs(d(z + 0.01) - d(z)) <= 0.01 + 1e-12);
  }
}

TEST_CASE("initial profiles carry their regularity constants") {
  const InitialData g = InitialData::sine_squared();
  CHECK(g.eval(0.0) == 0.0);
  CHECK(g.eval(0.25) == doctest::Approx(std::sin(1.0) * std::sin(1.0)).epsilon(1e-15));
  CHECK(g.holder_half == 2.0);
  const InitialData c = InitialData::constant(0.7);
  CHECK(c.eval(0.9) == 0.7);
  CHECK(c.holder_half == 0.0);
}

TEST_CASE("rk4 integrates exponential decay to fourth order") {
  const VectorField decay = [](const double* u, double* out) { out[0] = -u[0]; };
  const double u0 = 1.0;
  const Trajectory fine = integrate_rk4(1, &u0, 0.0, 1.0, 0.01, 1, decay);
  CHECK(std::fabs(fine.final_state()[0] - std::exp(-1.0)) <= 1e-9);

  const Trajectory h1 = integrate_rk4(1, &u0, 0.0, 1.0, 0.1, 1, decay);
  const Trajectory h2 = integrate_rk4(1, &u0, 0.0, 1.0, 0.05, 1, decay);
  const double e1 = std::fabs(h1.final_state()[0] - std::exp(-1.0));
  const double e2 = std::fabs(h2.final_state()[0] - std::exp(-1.0));
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("pairwise rhs matches a two-node hand computation") {
  const LawPtr ones = make_delta([](double, double) { return 1.0; });
  const NodeSet nodes = make_nodes_deterministic(2);
  const WeightMatrix xi = sample_weight_matrix(*ones, nodes, 0);
  const Interaction d = Interaction::rational_attraction();
  const double u[2] = {0.0, 1.0};
  double out[2];
  pair_rhs(xi, d, u, out);
  CHECK(out[0] == 0.25);
  CHECK(out[1] == -0.25);
}

TEST_CASE("rhs is bounded by the interaction bound times the row mean") {
  const LawPtr law = make_exponential(0.7);
  const NodeSet nodes = make_nodes_random(50, 21);
  const WeightMatrix xi = sample_weight_matrix(*law, nodes, 21);
  const Interaction d = Interaction::rational_attraction();
  std::vector<double> u(50), out(50);
  for (int i = 0; i < 50; ++i) u[i] = std::sin(7.0 * i);
  pair_rhs(xi, d, u.data(), out.data());
  for (int i = 0; i < 50; ++i) {
    double row_mean = 0.0;
    for (int j = 0; j < 50; ++j) row_mean += xi.at(i, j);
    row_mean /= 50.0;
    CHECK(std::fabs(out[i]) <= 0.5 * row_mean + 1e-15);
  }
}

TEST_CASE("point-mass law makes sampled and averaged runs identical") {
  const LawPtr law = make_delta([](double x, double y) { return 0.6 + 0.2 * x * y; });
  const NodeSet nodes = make_nodes_random(20, 9);
  const Interaction d = Interaction::rational_attraction();
  const InitialData g = InitialData::sine_squared();
  const Trajectory fin = integrate_finite(*law, nodes, d, g, 1.0, 0.01, 1234);
  const Trajectory avg = integrate_averaged(*law, nodes, d, g, 1.0, 0.01);
  CHECK(fin.data == avg.data);
  const Trajectory blink = integrate_blinking(*law, nodes, d, g, 1.0, 0.01, 0.25, 99);
  CHECK(blink.data == avg.data);
}

TEST_CASE("one blinking interval reduces to the fixed-matrix run") {
  const LawPtr law = make_garlaschelli_const(0.4);
  const NodeSet nodes = make_nodes_random(15, 3);
  const Interaction d = Interaction::rational_attraction();
  const InitialData g = InitialData::sine_squared();
  const Trajectory fin = integrate_finite(*law, nodes, d, g, 0.5, 0.01, 777);
  const Trajectory blink = integrate_blinking(*law, nodes, d, g, 0.5, 0.01, 0.5, 777);
  CHECK(fin.data == blink.data);
}

TEST_CASE("blinking redraws the matrix after each interval") {
  const LawPtr law = make_garlaschelli_const(0.4);
  const NodeSet nodes = make_nodes_random(15, 3);
  const Interaction d = Interaction::rational_attraction();
  const InitialData g = InitialData::sine_squared();
  const Trajectory fin = integrate_finite(*law, nodes, d, g, 0.5, 0.01, 777);
  const Trajectory blink = integrate_blinking(*law, nodes, d, g, 0.5, 0.01, 0.25, 777);
  const int spi = 25;
  for (int k = 0; k <= spi; ++k)
    for (int i = 0; i < 15; ++i) CHECK(blink.state(k)[i] == fin.state(k)[i]);
  bool differs = false;
  for (int k = spi + 1; k < blink.steps() && !differs; ++k)
    for (int i = 0; i < 15 && !differs; ++i) differs = blink.state(k)[i] != fin.state(k)[i];
  CHECK(differs);
}

TEST_CASE("nonnegative weights keep the state range from expanding") {
  const LawPtr law = make_small_world(0.25);
  const NodeSet nodes = make_nodes_random(40, 17);
  const Trajectory traj = integrate_finite(*law, nodes, Interaction::rational_attraction(),
                                           InitialData::sine_squared(), 2.0, 0.01, 17);
  double prev = range_of(traj.state(0), 40);
  for (int k = 1; k < traj.steps(); ++k) {
    const double cur = range_of(traj.state(k), 40);
    CHECK(cur <= prev + 1e-9);
    prev = cur;
  }
}

TEST_CASE("sparse storage records every fifth step bitwise") {
  const LawPtr law = make_garlaschelli_xy();
  const NodeSet nodes = make_nodes_random(10, 5);
  const Interaction d = Interaction::rational_attraction();
  const InitialData g = InitialData::sine_squared();
  const Trajectory dense = integrate_finite(*law, nodes, d, g, 1.0, 0.01, 2);
  const Trajectory sparse = integrate_finite(*law, nodes, d, g, 1.0, 0.01, 2, 5);
  CHECK(dense.steps() == 101);
  CHECK(sparse.steps() == 21);
  for (int k = 0; k < sparse.steps(); ++k) {
    CHECK(sparse.time_at(k) == doctest::Approx(0.05 * k).epsilon(1e-12));
    for (int i = 0; i < 10; ++i) CHECK(sparse.state(k)[i] == dense.state(5 * k)[i]);
  }
}

TEST_CASE("intermediate runs restarted on the reference grid reproduce it") {
  const LawPtr law = make_delta([](double x, double y) { return 0.5 + 0.3 * x * y; });
  const Interaction d = Interaction::rational_attraction();
  const InitialData g = InitialData::sine_squared();
  const int m = 16;
  const GridTrajectory ref = solve_graph_limit(*law, d, g, m, 1.0, 0.01);
  const NodeSet nodes = make_nodes_deterministic(m);
  const Trajectory inter = integrate_intermediate(*law, nodes, d, ref, 2, 0.25, 0.01, 42);
  CHECK(inter.t0 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(inter.steps() == 26);
  for (int s = 0; s < inter.steps(); ++s)
    for (int i = 0; i < m; ++i) CHECK(inter.state(s)[i] == ref.state(50 + s)[i]);
}

TEST_CASE("states beyond the threshold raise a timed blow-up error") {
  const VectorField quad = [](const double* u, double* out) { out[0] = u[0] * u[0]; };
  const double u0 = 1.0;
  CHECK_THROWS_AS(integrate_rk4(1, &u0, 0.0, 2.0, 0.001, 1, quad, 10.0), BlowupError);
  try {
    integrate_rk4(1, &u0, 0.0, 2.0, 0.001, 1, quad, 10.0);
  } catch (const BlowupError& e) {
    CHECK(e.time() > 0.85);
    CHECK(e.time() < 1.05);
  }
}

TEST_CASE("time grid validation") {
  const double u0 = 1.0;
  const VectorField decay = [](const double* u, double* out) { out[0] = -u[0]; };
  CHECK_THROWS_AS(integrate_rk4(1, &u0, 0.0, 1.0, 0.3, 1, decay), std::invalid_argument);
  CHECK_THROWS_AS(integrate_rk4(1, &u0, 0.0, 1.0, 0.1, 3, decay), std::invalid_argument);
  CHECK_THROWS_AS(integrate_rk4(1, &u0, 0.0, -1.0, 0.1, 1, decay), std::invalid_argument);
  CHECK_THROWS_AS(integrate_rk4(1, &u0, 0.0, 1.0, 0.0, 1, decay), std::invalid_argument);

  const LawPtr law = make_garlaschelli_const(0.4);
  const NodeSet nodes = make_nodes_random(5, 1);
  const Interaction d = Interaction::rational_attraction();
  const InitialData g = InitialData::sine_squared();
  CHECK_THROWS_AS(integrate_blinking(*law, nodes, d, g, 1.0, 0.1, 0.25, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate_blinking(*law, nodes, d, g, 1.0, 0.1, 0.3, 1),
                  std::invalid_argument);
}

TEST_CASE("custom interactions validate their constants") {
  CHECK_THROWS_AS(Interaction::custom(nullptr, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Interaction::custom([](double z) { return z; }, 0.0, 1.0),
                  std::invalid_argument);
  const Interaction lin = Interaction::custom([](double z) { return 0.25 * z; }, 10.0, 0.25);
  CHECK(lin(2.0) == 0.5);
  CHECK_FALSE(lin.builtin());
  CHECK(lin.sup_bound() == 10.0);
}
