#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wrg/stats.hpp"

using namespace wrg;

TEST_CASE("envelope constants at unit parameters") {
  const ErrorBoundConstants c = error_bound_constants(0.5, 1.0, 1.0, 1.0, 2.0, 0.0);
  CHECK(c.c1_tilde == 6.1875);
  CHECK(c.c3_tilde == 12.1875);
  CHECK(c.c1 == doctest::Approx(100.64221236374541).epsilon(1e-14));
  CHECK(c.c3 == doctest::Approx(1348.5590994848976).epsilon(1e-14));
  CHECK(c.c4 == doctest::Approx(44.334336593583899).epsilon(1e-14));
  CHECK(c.c2 == doctest::Approx(201.28442472749083).epsilon(1e-14));
  CHECK(c.l_g == 1.0);
}

TEST_CASE("envelope constants with a heavy moment bound") {
  const double M = std::pow(75.0, 0.25);
  const ErrorBoundConstants c = error_bound_constants(0.5, 1.0, M, 1.0, 2.0, 0.0);
  CHECK(c.c1_tilde == doctest::Approx(20.0625).epsilon(1e-12));
  CHECK(c.c3_tilde == doctest::Approx(26.0625).epsilon(1e-12));
}

TEST_CASE("envelope constants grow with horizon and moment bound") {
  const ErrorBoundConstants a = error_bound_constants(0.5, 1.0, 1.0, 1.0, 2.0, 0.0);
  const ErrorBoundConstants b = error_bound_constants(0.5, 1.0, 1.0, 2.0, 2.0, 0.0);
  const ErrorBoundConstants m = error_bound_constants(0.5, 1.0, 2.0, 1.0, 2.0, 0.0);
  CHECK(b.c1 > a.c1);
  CHECK(b.c3 > a.c3);
  CHECK(b.c3_tilde == 2.0 * a.c3_tilde);
  CHECK(m.c1 > a.c1);
  CHECK(m.c1_tilde > a.c1_tilde);
  CHECK(m.c1_tilde == 3.0 * 1.0 + 6.0);
  CHECK_THROWS_AS(error_bound_constants(0.0, 1.0, 1.0, 1.0, 2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(error_bound_constants(0.5, 1.0, 1.0, -1.0, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("mean-kernel Holder constant enters through the larger rate") {
  const ErrorBoundConstants c = error_bound_constants(0.5, 1.0, 1.0, 1.0, 2.0, 3.0);
  CHECK(c.l_g == 3.0);
  CHECK(c.c4 == doctest::Approx(6.0 * std::exp(6.0)).epsilon(1e-14));
}

TEST_CASE("concentration statistics on a hand matrix") {
  WeightMatrix xi;
  xi.n = 2;
  xi.w = {1.0, 2.0, 3.0, 4.0};
  const ConcentrationStats s = concentration_stats(xi);
  CHECK(s.rms == doctest::Approx(std::sqrt(7.5)).epsilon(1e-15));
  CHECK(s.max_row_mean == 3.5);
  WeightMatrix empty;
  CHECK_THROWS_AS(concentration_stats(empty), std::invalid_argument);
}

TEST_CASE("quadrature variance on a two-level profile is exact") {
  const GridFunction u = embed({0.0, 1.0, 0.0, 1.0});
  const Interaction d = Interaction::rational_attraction();
  const LawPtr law = make_garlaschelli_const(0.5);
  CHECK(fluctuation_variance(*law, u, d) == 0.3125);
  CHECK(fluctuation_variance_mean_kernel(*law, u, d) == 0.0625);
}

TEST_CASE("second-moment and mean-kernel variances coincide for binary weights") {
  const LawPtr law = make_bernoulli_graphon([](double x, double y) { return 0.5 + 0.3 * x * y; });
  const GridFunction u = GridFunction::from_function(32, [](double x) { return std::sin(4.0 * x); });
  const Interaction d = Interaction::rational_attraction();
  CHECK(fluctuation_variance(*law, u, d) == fluctuation_variance_mean_kernel(*law, u, d));
}

TEST_CASE("quadrature variance respects the moment envelope") {
  const Interaction d = Interaction::rational_attraction();
  const GridFunction u = GridFunction::from_function(64, [](double x) {
    const double s = std::sin(4.0 * x);
    return s * s;
  });
  const std::vector<LawPtr> laws = {
      make_garlaschelli_const(0.5), make_garlaschelli_xy(),   make_exponential(2.0),
      make_small_world(0.25),       make_delta([](double x, double y) { return x + y; }),
  };
  for (const LawPtr& law : laws) {
    const double v = fluctuation_variance(*law, u, d);
    const double cap = law->moment_bound() * law->moment_bound() * 0.25;
    CHECK(v >= 0.0);
    CHECK(v <= cap + 1e-12);
  }
  CHECK(fluctuation_variance(*laws[0], u, d) > fluctuation_variance_mean_kernel(*laws[0], u, d));
}

TEST_CASE("point-mass residual vanishes on its own grid") {
  const LawPtr law = make_delta([](double x, double y) { return 0.5 + 0.4 * x * y; });
  const int m = 24;
  const NodeSet nodes = make_nodes_deterministic(m);
  const WeightMatrix xi = sample_weight_matrix(*law, nodes, 13);
  const GridFunction u = GridFunction::from_function(m, [](double x) { return std::sin(4.0 * x); });
  const std::vector<double> res =
      interaction_residual(xi, nodes, u, *law, Interaction::rational_attraction());
  for (double r : res) CHECK(std::fabs(r) <= 1e-15);
}

TEST_CASE("residual is invariant under shifting the reference profile") {
  const LawPtr law = make_garlaschelli_xy();
  const NodeSet nodes = make_nodes_random(40, 11);
  const WeightMatrix xi = sample_weight_matrix(*law, nodes, 11);
  const Interaction d = Interaction::rational_attraction();
  GridFunction u = GridFunction::from_function(32, [](double x) { return x * x; });
  const std::vector<double> base = interaction_residual(xi, nodes, u, *law, d);
  for (double& v : u.values) v += 2.0;
  const std::vector<double> shifted = interaction_residual(xi, nodes, u, *law, d);
  for (int i = 0; i < 40; ++i) CHECK(shifted[i] == doctest::Approx(base[i]).epsilon(1e-12));
  const NodeSet small = make_nodes_random(5, 1);
  CHECK_THROWS_AS(interaction_residual(xi, small, u, *law, d), std::invalid_argument);
}

TEST_CASE("sampled residual mean vanishes for a symmetric kernel") {
  const LawPtr law = make_garlaschelli_xy();
  const GridFunction u = GridFunction::from_function(64, [](double x) {
    const double s = std::sin(4.0 * x);
    return s * s;
  });
  const Interaction d = Interaction::rational_attraction();
  const int n = 50, trials = 400;
  double sum = 0.0, sumsq = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t ts = stream_key({314159u, kTrialStream, static_cast<std::uint64_t>(t)});
    const NodeSet nodes = make_nodes_random(n, ts);
    const WeightMatrix xi = sample_weight_matrix(*law, nodes, ts);
    const std::vector<double> res = interaction_residual(xi, nodes, u, *law, d);
    double mean = 0.0;
    for (double r : res) mean += r;
    mean /= n;
    sum += mean;
    sumsq += mean * mean;
  }
  const double mc_mean = sum / trials;
  const double mc_var = sumsq / trials - mc_mean * mc_mean;
  const double se = std::sqrt(mc_var / trials);
  CHECK(std::fabs(mc_mean) <= 4.0 * se + 1e-12);
}

TEST_CASE("normalized residual moments match the quadrature variance") {
  const LawPtr law = make_garlaschelli_xy();
  const GridFunction u = GridFunction::from_function(64, [](double x) {
    const double s = std::sin(4.0 * x);
    return s * s;
  });
  const ResidualMomentReport rep =
      residual_moment_check(*law, 200, u, Interaction::rational_attraction(), 3000, 2718);
  CHECK_FALSE(rep.degenerate);
  CHECK(rep.trials == 3000);
  CHECK(rep.sigma2 > 0.0);
  CHECK(std::fabs(rep.ratio2 - 1.0) <= 5.0 * rep.se2 + 0.02);
  CHECK(std::fabs(rep.ratio4 - 1.0) <= 6.0 * rep.se4 + 0.1);
}

TEST_CASE("flat profiles degenerate the moment check") {
  const LawPtr law = make_delta([](double x, double y) { return x * y; });
  const GridFunction u = GridFunction::from_function(16, [](double) { return 0.3; });
  const ResidualMomentReport rep =
      residual_moment_check(*law, 50, u, Interaction::rational_attraction(), 10, 1);
  CHECK(rep.degenerate);
  CHECK(rep.sigma2 == 0.0);
  CHECK_THROWS_AS(residual_moment_check(*law, 0, u, Interaction::rational_attraction(), 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(residual_moment_check(*law, 50, u, Interaction::rational_attraction(), 1, 1),
                  std::invalid_argument);
}

TEST_CASE("exact binomial upper confidence bounds") {
  CHECK(binomial_upper_ci(100, 0) == doctest::Approx(0.029513049607039876).epsilon(1e-10));
  CHECK(binomial_upper_ci(10, 1) == doctest::Approx(0.39416330243650466).epsilon(1e-10));
  CHECK(binomial_upper_ci(20, 5) == doctest::Approx(0.45558240400174876).epsilon(1e-10));
  CHECK(binomial_upper_ci(1, 0) == doctest::Approx(0.95).epsilon(1e-10));
  CHECK(binomial_upper_ci(50, 50) == 1.0);
  CHECK(binomial_upper_ci(10, 2) > binomial_upper_ci(10, 1));
  CHECK(binomial_upper_ci(1000, 10) < binomial_upper_ci(100, 1));
  CHECK_THROWS_AS(binomial_upper_ci(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(binomial_upper_ci(10, 11), std::invalid_argument);
  CHECK_THROWS_AS(binomial_upper_ci(10, 1, 1.0), std::invalid_argument);
}

TEST_CASE("tail frequency counts threshold hits inclusively") {
  const TailReport rep = tail_frequency(
      [](int t) { return t == 0 ? 5.0 : (t < 4 ? 10.0 : 0.0); }, 10, 5.0, 0.7);
  CHECK(rep.trials == 10);
  CHECK(rep.exceed_count == 4);
  CHECK(rep.rate == 0.4);
  CHECK(rep.threshold == 5.0);
  CHECK(rep.bound == 0.7);
  CHECK(rep.ci_upper == doctest::Approx(binomial_upper_ci(10, 4)).epsilon(1e-14));
  CHECK(rep.ci_upper > rep.rate);
  CHECK_THROWS_AS(tail_frequency(nullptr, 10, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(tail_frequency([](int) { return 0.0; }, 0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("power-law fit recovers exact exponents") {
  const std::vector<double> x = {1.0, 2.0, 4.0, 8.0, 16.0};
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 3.0 * std::pow(x[i], -0.5);
  const PowerLawFit fit = fit_power_law(x, y);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_power_law({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law({1.0, 2.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law({1.0, -2.0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law({1.0, 2.0}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law({2.0, 2.0}, {1.0, 3.0}), std::invalid_argument);
}
