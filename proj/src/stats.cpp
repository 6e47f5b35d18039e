#include "wrg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wrg {

namespace {

// int wbar(x, y) D(u(y) - u(x)) dy by the rectangle rule on the grid of u.
double mean_interaction_integral(const GraphLaw& law, const GridFunction& u, double x,
                                 double ux, const Interaction& d) {
  const int m = u.m;
  double s = 0.0;
  for (int c = 0; c < m; ++c) s += law.mean(x, midcell(c, m)) * d(u.values[c] - ux);
  return s / m;
}

double logsumexp_add(double acc, double term) {
  if (acc == -HUGE_VAL) return term;
  if (term == -HUGE_VAL) return acc;
  const double hi = std::max(acc, term), lo = std::min(acc, term);
  return hi + std::log1p(std::exp(lo - hi));
}

// P[X <= x] for X binomial(n, p), exact in log space.
double binomial_cdf(int n, int x, double p) {
  if (x < 0) return 0.0;
  if (x >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  const double lp = std::log(p), lq = std::log1p(-p);
  double acc = -HUGE_VAL;
  for (int k = 0; k <= x; ++k) {
    const double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    acc = logsumexp_add(acc, lc + k * lp + (n - k) * lq);
  }
  return std::min(1.0, std::exp(acc));
}

}  // namespace

ConcentrationStats concentration_stats(const WeightMatrix& xi) {
  if (xi.n <= 0) throw std::invalid_argument("weight matrix is empty");
  const int n = xi.n;
  double sq = 0.0, max_row = -HUGE_VAL;
  for (int i = 0; i < n; ++i) {
    const double* row = xi.row(i);
    double rs = 0.0, rsq = 0.0;
    for (int j = 0; j < n; ++j) {
      rs += row[j];
      rsq += row[j] * row[j];
    }
    sq += rsq;
    max_row = std::max(max_row, rs / n);
  }
  return {std::sqrt(sq / (static_cast<double>(n) * n)), max_row};
}

std::vector<double> interaction_residual(const WeightMatrix& xi, const NodeSet& nodes,
                                         const GridFunction& u_ref, const GraphLaw& law,
                                         const Interaction& d) {
  const int n = nodes.size();
  if (xi.n != n) throw std::invalid_argument("matrix and node set sizes differ");
  std::vector<double> ux(n);
  for (int i = 0; i < n; ++i) ux[i] = u_ref.eval(nodes.coords[i]);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const double* row = xi.row(i);
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += row[j] * d(ux[j] - ux[i]);
    out[i] = s / n - mean_interaction_integral(law, u_ref, nodes.coords[i], ux[i], d);
  }
  return out;
}

namespace {

double fluctuation_variance_impl(const GraphLaw& law, const GridFunction& u,
                                 const Interaction& d, bool second_moment_kernel) {
  const int m = u.m;
  if (m <= 0) throw std::invalid_argument("reference profile is empty");
  double term1 = 0.0, term2 = 0.0;
  for (int a = 0; a < m; ++a) {
    const double xa = midcell(a, m), ua = u.values[a];
    double first = 0.0, inner = 0.0;
    for (int b = 0; b < m; ++b) {
      const double xb = midcell(b, m);
      const double dv = d(u.values[b] - ua);
      first += (second_moment_kernel ? law.moment(xa, xb, 2) : law.mean(xa, xb)) * dv * dv;
      inner += law.mean(xa, xb) * dv;
    }
    term1 += first / m;
    inner /= m;
    term2 += inner * inner;
  }
  return term1 / m - term2 / m;
}

}  // namespace

double fluctuation_variance(const GraphLaw& law, const GridFunction& u_ref,
                            const Interaction& d) {
  return fluctuation_variance_impl(law, u_ref, d, true);
}

double fluctuation_variance_mean_kernel(const GraphLaw& law, const GridFunction& u_ref,
                                        const Interaction& d) {
  return fluctuation_variance_impl(law, u_ref, d, false);
}

ResidualMomentReport residual_moment_check(const GraphLaw& law, int n,
                                           const GridFunction& u_ref, const Interaction& d,
                                           int trials, std::uint64_t seed) {
  if (n <= 0 || trials <= 1) throw std::invalid_argument("need n > 0 and trials > 1");
  ResidualMomentReport rep;
  rep.trials = trials;
  rep.sigma2 = fluctuation_variance(law, u_ref, d);
  if (rep.sigma2 < 1e-12) {
    rep.degenerate = true;
    return rep;
  }
  double s2 = 0.0, s4 = 0.0, s8 = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = stream_key({seed, kTrialStream, static_cast<std::uint64_t>(t)});
    const NodeSet nodes = make_nodes_random(n, trial_seed);
    const std::vector<double> row = sample_weight_row(law, nodes, 0, trial_seed, 0);
    const double x0 = nodes.coords[0];
    const double u0 = u_ref.eval(x0);
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += row[j] * d(u_ref.eval(nodes.coords[j]) - u0);
    const double z = s / n - mean_interaction_integral(law, u_ref, x0, u0, d);
    const double y2 = static_cast<double>(n) * z * z;
    const double y4 = y2 * y2;
    s2 += y2;
    s4 += y4;
    s8 += y4 * y4;
  }
  const double m2 = s2 / trials, m4 = s4 / trials, m8 = s8 / trials;
  const double var_y2 = std::max(0.0, m4 - m2 * m2);
  const double var_y4 = std::max(0.0, m8 - m4 * m4);
  rep.ratio2 = m2 / rep.sigma2;
  rep.ratio4 = m4 / (3.0 * rep.sigma2 * rep.sigma2);
  rep.se2 = std::sqrt(var_y2 / trials) / rep.sigma2;
  rep.se4 = std::sqrt(var_y4 / trials) / (3.0 * rep.sigma2 * rep.sigma2);
  return rep;
}

ErrorBoundConstants error_bound_constants(double K, double L, double M, double T,
                                          double holder_g, double holder_mean) {
  if (!(K > 0.0 && L > 0.0 && M > 0.0 && T > 0.0))
    throw std::invalid_argument("constants K, L, M, T must be positive");
  ErrorBoundConstants c{};
  const double mk = M * K;
  const double growth = std::exp((0.5 + 4.0 * M * L) * T);
  c.l_g = std::max(holder_mean, L);
  c.c4 = 2.0 * (1.0 + holder_g) * std::exp(2.0 * T * c.l_g);
  c.c1 = std::sqrt(T) * std::sqrt(1.0 + mk * mk) * growth;
  c.c1_tilde = 3.0 * mk * mk * mk * mk + 6.0;
  c.c3 = std::sqrt(1.0 + mk * mk) * growth * std::expm1(4.0 * M * L * T) / (4.0 * M * L);
  c.c3_tilde = (12.0 + 3.0 * mk * mk * mk * mk) * T;
  c.c2 = std::max(2.0 * c.c4, 2.0 * std::sqrt(T) * std::sqrt(1.0 + mk * mk) * growth);
  return c;
}

TailReport tail_frequency(const std::function<double(int)>& sampler, int trials,
                          double threshold, double bound) {
  if (!sampler) throw std::invalid_argument("sampler must be callable");
  if (trials <= 0) throw std::invalid_argument("trials must be positive");
  TailReport rep;
  rep.trials = trials;
  rep.threshold = threshold;
  rep.bound = bound;
  for (int t = 0; t < trials; ++t)
    if (sampler(t) >= threshold) ++rep.exceed_count;
  rep.rate = static_cast<double>(rep.exceed_count) / trials;
  rep.ci_upper = binomial_upper_ci(trials, rep.exceed_count);
  return rep;
}

double binomial_upper_ci(int trials, int count, double level) {
  if (trials <= 0 || count < 0 || count > trials)
    throw std::invalid_argument("invalid binomial counts");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must be in (0,1)");
  if (count >= trials) return 1.0;
  const double alpha = 1.0 - level;
  double lo = static_cast<double>(count) / trials, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_cdf(trials, count, mid) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("need two or more points");
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("power-law fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("all abscissae coincide");
  PowerLawFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace wrg
