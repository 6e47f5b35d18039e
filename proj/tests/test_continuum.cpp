#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wrg/continuum.hpp"
#include "wrg/dynamics.hpp"

using namespace wrg;

TEST_CASE("root mean square norm") {
  const std::vector<double> u = {3.0, 4.0};
  CHECK(norm_mean_square(u) == doctest::Approx(5.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(norm_mean_square(u.data(), 2) == norm_mean_square(u));
  CHECK(norm_mean_square(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
}

TEST_CASE("grid functions evaluate by cell with clamping") {
  GridFunction f;
  f.m = 4;
  f.values = {1.0, 2.0, 3.0, 4.0};
  CHECK(f.eval(0.1) == 1.0);
  CHECK(f.eval(0.3) == 2.0);
  CHECK(f.eval(0.25) == 2.0);
  CHECK(f.eval(0.999) == 4.0);
  CHECK(f.eval(1.0) == 4.0);
  CHECK(f.eval(-0.5) == 1.0);
  CHECK(f.eval(1.5) == 4.0);
}

TEST_CASE("from_function samples mid-cells") {
  const GridFunction f = GridFunction::from_function(4, [](double x) { return 10.0 * x; });
  CHECK(f.values[0] == 1.25);
  CHECK(f.values[1] == 3.75);
  CHECK(f.values[2] == 6.25);
  CHECK(f.values[3] == 8.75);
}

TEST_CASE("embed makes one cell per entry") {
  const GridFunction f = embed({0.5, 0.9});
  CHECK(f.m == 2);
  CHECK(f.eval(0.2) == 0.5);
  CHECK(f.eval(0.8) == 0.9);
}

TEST_CASE("step-function distance is exact on hand examples") {
  const GridFunction one = embed({1.0});
  const GridFunction half = embed({0.0, 1.0});
  CHECK(l2_distance_grid(one, half) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(l2_distance_grid(half, one) == l2_distance_grid(one, half));

  // coprime cell counts: refinement has 6 cells, squared gap 3/6
  const GridFunction a = embed({0.0, 1.0});
  const GridFunction b = embed({0.0, 1.0, 0.0});
  CHECK(l2_distance_grid(a, b) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));

  const GridFunction c3 = GridFunction::from_function(3, [](double) { return 0.7; });
  const GridFunction c5 = GridFunction::from_function(5, [](double) { return 0.7; });
  CHECK(l2_distance_grid(c3, c5) == 0.0);

  CHECK(l2_distance_cells(a.values.data(), a.m, b.values.data(), b.m) ==
        l2_distance_grid(a, b));
}

TEST_CASE("limit solver equals the averaged run on deterministic nodes") {
  const LawPtr law = make_garlaschelli_xy();
  const Interaction d = Interaction::rational_attraction();
  const InitialData g = InitialData::sine_squared();
  const int m = 20;
  const GridTrajectory lim = solve_graph_limit(*law, d, g, m, 0.5, 0.01);
  const Trajectory avg = integrate_averaged(*law, make_nodes_deterministic(m), d, g, 0.5, 0.01);
  CHECK(lim.traj.data == avg.data);
  CHECK(lim.m() == m);
  CHECK(lim.steps() == 51);
}

TEST_CASE("snapshots index stored steps and match stored times") {
  const LawPtr law = make_small_world(0.3);
  const GridTrajectory lim = solve_graph_limit(*law, Interaction::rational_attraction(),
                                               InitialData::sine_squared(), 8, 0.5, 0.01);
  const GridFunction s25 = lim.snapshot(25);
  CHECK(s25.m == 8);
  for (int i = 0; i < 8; ++i) CHECK(s25.values[i] == lim.state(25)[i]);
  const GridFunction at = lim.snapshot_at_time(0.25);
  CHECK(at.values == s25.values);
  CHECK_THROWS_AS(lim.snapshot_at_time(0.2437), std::invalid_argument);
  CHECK_THROWS_AS(lim.snapshot_at_time(9.0), std::invalid_argument);
}

TEST_CASE("projection restricts a grid function to node coordinates") {
  const GridFunction f = GridFunction::from_function(8, [](double x) { return x * x; });
  const std::vector<double> at_cells = project(f, make_nodes_deterministic(8));
  CHECK(at_cells == f.values);
  const NodeSet nodes = make_nodes_random(10, 4);
  const std::vector<double> at_nodes = project(f, nodes);
  for (int i = 0; i < 10; ++i) CHECK(at_nodes[i] == f.eval(nodes.coords[i]));
}

TEST_CASE("symmetric kernels conserve the state mean") {
  const LawPtr law = make_garlaschelli_xy();
  const GridTrajectory lim = solve_graph_limit(*law, Interaction::rational_attraction(),
                                               InitialData::sine_squared(), 32, 2.0, 0.01);
  double mean0 = 0.0;
  for (int i = 0; i < 32; ++i) mean0 += lim.state(0)[i];
  mean0 /= 32.0;
  for (int k = 1; k < lim.steps(); ++k) {
    double mk = 0.0;
    for (int i = 0; i < 32; ++i) mk += lim.state(k)[i];
    mk /= 32.0;
    CHECK(std::fabs(mk - mean0) <= 1e-12);
  }
}

TEST_CASE("grid refinement shrinks the terminal gap") {
  const LawPtr law = make_small_world(0.3);
  const Interaction d = Interaction::rational_attraction();
  const InitialData g = InitialData::sine_squared();
  double prev = -1.0;
  for (int m : {8, 16, 32}) {
    const GridTrajectory coarse = solve_graph_limit(*law, d, g, m, 0.5, 0.01);
    const GridTrajectory fine = solve_graph_limit(*law, d, g, 2 * m, 0.5, 0.01);
    const double gap = l2_distance_grid(coarse.snapshot(coarse.steps() - 1),
                                        fine.snapshot(fine.steps() - 1));
    CHECK(gap > 0.0);
    if (prev >= 0.0) CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("trajectory sup distance needs matching time grids") {
  const LawPtr zero = make_delta([](double, double) { return 0.0; });
  const NodeSet nodes = make_nodes_random(6, 8);
  const Interaction d = Interaction::rational_attraction();
  const Trajectory a = integrate_averaged(*zero, nodes, d, InitialData::constant(0.3), 1.0, 0.1);
  const Trajectory b = integrate_averaged(*zero, nodes, d, InitialData::constant(0.7), 1.0, 0.1);
  CHECK(sup_time_rms_distance(a, b) == doctest::Approx(0.4).epsilon(1e-15));

  const Trajectory c = integrate_averaged(*zero, nodes, d, InitialData::constant(0.7), 1.0, 0.05);
  CHECK_THROWS_AS(sup_time_rms_distance(a, c), std::invalid_argument);
  const Trajectory e = integrate_averaged(*zero, make_nodes_random(5, 8), d,
                                          InitialData::constant(0.7), 1.0, 0.1);
  CHECK_THROWS_AS(sup_time_rms_distance(a, e), std::invalid_argument);
}

TEST_CASE("limit solver validates the cell count") {
  const LawPtr law = make_garlaschelli_const(0.3);
  CHECK_THROWS_AS(solve_graph_limit(*law, Interaction::rational_attraction(),
                                    InitialData::sine_squared(), 0, 1.0, 0.01),
                  std::invalid_argument);
}
