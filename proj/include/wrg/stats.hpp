#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wrg/continuum.hpp"

namespace wrg {

/** Concentration statistics of a weight matrix. */
struct ConcentrationStats {
  double rms;           // sqrt((1/n^2) sum_ij xi_ij^2)
  double max_row_mean;  // max_i (1/n) sum_j xi_ij
};

ConcentrationStats concentration_stats(const WeightMatrix& xi);

// Residual of the sampled interaction term against its mean-field value:
// out_i = (1/n) sum_j xi_ij D(u(X_j) - u(X_i)) - int wbar(X_i, y) D(u(y) - u(X_i)) dy,
// with u and the integral taken on the reference grid.
std::vector<double> interaction_residual(const WeightMatrix& xi, const NodeSet& nodes,
                                         const GridFunction& u_ref, const GraphLaw& law,
                                         const Interaction& d);

// Variance of the normalized residual sqrt(n) * out_i for i.i.d. uniform
// nodes, computed by rectangle-rule quadrature on the grid of u_ref:
// integral of (second moment)(x,y) D(u(y)-u(x))^2 minus the squared mean term.
double fluctuation_variance(const GraphLaw& law, const GridFunction& u_ref,
                            const Interaction& d);

// Variant with the mean kernel in place of the second moment in the first
// term; kept for comparison with the second-moment form above.
double fluctuation_variance_mean_kernel(const GraphLaw& law, const GridFunction& u_ref,
                                        const Interaction& d);

/** Monte Carlo moments of the normalized residual against the quadrature variance. */
struct ResidualMomentReport {
  double sigma2 = 0.0;      // quadrature variance
  double ratio2 = 0.0;      // E[Y^2] / sigma2
  double ratio4 = 0.0;      // E[Y^4] / (3 sigma2^2)
  double se2 = 0.0;         // standard errors of the two ratios
  double se4 = 0.0;
  int trials = 0;
  bool degenerate = false;  // sigma2 below 1e-12, ratios meaningless
};

ResidualMomentReport residual_moment_check(const GraphLaw& law, int n,
                                           const GridFunction& u_ref, const Interaction& d,
                                           int trials, std::uint64_t seed);

/**
 * Deterministic error-envelope constants from the model parameters:
 * K, L from the interaction, M from the law, T the horizon, and 1/2-Holder
 * constants of the initial data and the mean kernel.
 */
struct ErrorBoundConstants {
  double c1;        // sqrt(T) sqrt(1+M^2K^2) e^{(1/2+4ML)T}
  double c1_tilde;  // 3 M^4 K^4 + 6
  double c3;        // sqrt(1+M^2K^2) e^{(1/2+4ML)T} (e^{4MLT}-1)/(4ML)
  double c3_tilde;  // (12 + 3 M^4 K^4) T
  double c2;        // max(2 c4, 2 sqrt(T) sqrt(1+M^2K^2) e^{(1/2+4ML)T})
  double c4;        // 2 (1+H_g) e^{2 T L_G}
  double l_g;       // max(H_mean, L)
};

ErrorBoundConstants error_bound_constants(double K, double L, double M, double T,
                                          double holder_g, double holder_mean);

/** Exceedance frequency of a scalar statistic with an exact binomial bound. */
struct TailReport {
  int trials = 0;
  int exceed_count = 0;
  double rate = 0.0;
  double ci_upper = 0.0;  // one-sided exact 95% upper confidence bound
  double threshold = 0.0;
  double bound = 0.0;     // theoretical tail bound for the report
};

// sampler(trial) must return the statistic of an independent replication.
TailReport tail_frequency(const std::function<double(int)>& sampler, int trials,
                          double threshold, double bound);

// One-sided upper confidence bound for a binomial proportion at the given
// level, exact (Clopper-Pearson).
double binomial_upper_ci(int trials, int count, double level = 0.95);

/** Least-squares line through (log x, log y). */
struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace wrg
