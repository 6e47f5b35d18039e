#include "wrg/law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wrg {

namespace {

constexpr int kBoundGrid = 256;  // evaluation grid for numeric kernel bounds

void check_order(int k) {
  if (k < 1 || k > 4) throw std::invalid_argument("moment order must be in 1..4");
}

void check_coord(double x, double y) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
    throw std::domain_error("node coordinates must lie in [0,1]");
}

double grid_point(int i) { return static_cast<double>(i) / (kBoundGrid - 1); }

// sup over an inclusive grid of f(x,y); used where no closed-form sup exists.
template <class F>
double grid_sup(F f) {
  double s = 0.0;
  for (int i = 0; i < kBoundGrid; ++i)
    for (int j = 0; j < kBoundGrid; ++j) s = std::max(s, f(grid_point(i), grid_point(j)));
  return s;
}

// Per-axis Lipschitz and range estimates for a kernel, from adjacent grid
// differences. Feeds the 1/2-Holder estimate sqrt(2 * lip * range).
template <class F>
double holder_estimate(F f) {
  const double h = 1.0 / (kBoundGrid - 1);
  double lip = 0.0, lo = f(0.0, 0.0), hi = lo;
  for (int i = 0; i < kBoundGrid; ++i) {
    for (int j = 0; j < kBoundGrid; ++j) {
      const double v = f(grid_point(i), grid_point(j));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (i + 1 < kBoundGrid)
        lip = std::max(lip, std::fabs(f(grid_point(i + 1), grid_point(j)) - v) / h);
      if (j + 1 < kBoundGrid)
        lip = std::max(lip, std::fabs(f(grid_point(i), grid_point(j + 1)) - v) / h);
    }
  }
  return std::sqrt(2.0 * lip * (hi - lo));
}

double geometric_draw(double p, RngStream& rng) {
  if (p <= 0.0) return 0.0;
  const double u = rng.next_unit_pos();
  return std::floor(std::log(u) / std::log(p)) + 0.0;  // +0.0 clears negative zero
}

class BernoulliGraphon final : public GraphLaw {
 public:
  explicit BernoulliGraphon(Kernel2D W) : W_(std::move(W)) {
    if (!W_) throw std::invalid_argument("graphon must be callable");
    holder_ = holder_estimate([this](double x, double y) { return value(x, y); });
  }

  double sample(double x, double y, RngStream& rng) const override {
    return rng.next_unit() < value(x, y) ? 1.0 : 0.0;
  }

  double moment(double x, double y, int k) const override {
    check_order(k);
    return value(x, y);
  }

  double moment_bound() const override { return 1.0; }
  double mean_holder() const override { return holder_; }
  std::string describe() const override { return "bernoulli_graphon"; }

 private:
  double value(double x, double y) const {
    check_coord(x, y);
    const double w = W_(x, y);
    if (!(w >= 0.0 && w <= 1.0)) throw std::domain_error("graphon value outside [0,1]");
    return w;
  }

  Kernel2D W_;
  double holder_;
};

class GarlaschelliConst final : public GraphLaw {
 public:
  explicit GarlaschelliConst(double p) : p_(p) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("parameter p must lie in [0,1)");
  }

  double sample(double x, double y, RngStream& rng) const override {
    check_coord(x, y);
    return geometric_draw(p_, rng);
  }

  double moment(double x, double y, int k) const override {
    check_coord(x, y);
    return geometric_moment(p_, k);
  }

  double moment_bound() const override { return std::pow(geometric_moment(p_, 4), 0.25); }
  double mean_holder() const override { return 0.0; }
  std::string describe() const override { return "garlaschelli(p=" + std::to_string(p_) + ")"; }

 private:
  double p_;
};

class GarlaschelliXY final : public GraphLaw {
 public:
  GarlaschelliXY() {
    bound_ = 1.01 * grid_sup([](double x, double y) {
               return std::pow(geometric_moment(x * y / 2.0, 4), 0.25);
             });
  }

  double sample(double x, double y, RngStream& rng) const override {
    check_coord(x, y);
    return geometric_draw(x * y / 2.0, rng);
  }

  double moment(double x, double y, int k) const override {
    check_coord(x, y);
    return geometric_moment(x * y / 2.0, k);
  }

  double moment_bound() const override { return bound_; }

  // Mean xy/(2-xy): per-axis slope bounded by 2, range 1.
  double mean_holder() const override { return 2.0; }

  std::string describe() const override { return "garlaschelli_xy"; }

 private:
  double bound_;
};

class ExponentialLaw final : public GraphLaw {
 public:
  explicit ExponentialLaw(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("rate lambda must be positive");
  }

  double sample(double x, double y, RngStream& rng) const override {
    check_coord(x, y);
    return -std::log(rng.next_unit_pos()) / lambda_;
  }

  double moment(double x, double y, int k) const override {
    check_coord(x, y);
    check_order(k);
    static const double factorial[5] = {1.0, 1.0, 2.0, 6.0, 24.0};
    return factorial[k] / std::pow(lambda_, k);
  }

  double moment_bound() const override { return std::pow(24.0, 0.25) / lambda_; }
  double mean_holder() const override { return 0.0; }
  std::string describe() const override {
    return "exponential(lambda=" + std::to_string(lambda_) + ")";
  }

 private:
  double lambda_;
};

class SmallWorld final : public GraphLaw {
 public:
  explicit SmallWorld(double r) : r_(r) {
    if (!(r > 0.0 && r <= 0.5))
      throw std::invalid_argument("small-world radius must lie in (0, 1/2]");
  }

  double sample(double x, double y, RngStream& rng) const override {
    check_coord(x, y);
    const double rho = ring_distance(x, y);
    if (rho <= r_) {
      if (rng.next_unit() < rho / r_) return rng.next_unit();
      return 1.0;
    }
    return rng.next_unit();
  }

  double moment(double x, double y, int k) const override {
    check_coord(x, y);
    check_order(k);
    const double uniform = 1.0 / (k + 1);  // k-th moment of U[0,1]
    const double rho = ring_distance(x, y);
    if (rho <= r_) {
      const double a = rho / r_;
      return a * uniform + (1.0 - a);
    }
    return uniform;
  }

  double moment_bound() const override { return 1.0; }

  // Mean is 1 - rho/(2r) within the radius: slope 1/(2r), range 1/2.
  double mean_holder() const override { return std::sqrt(1.0 / (2.0 * r_)); }

  std::string describe() const override { return "small_world(r=" + std::to_string(r_) + ")"; }

 private:
  double r_;
};

class DeltaLaw final : public GraphLaw {
 public:
  explicit DeltaLaw(Kernel2D wbar) : wbar_(std::move(wbar)) {
    if (!wbar_) throw std::invalid_argument("mean kernel must be callable");
    bound_ = 1.01 * grid_sup([this](double x, double y) { return value(x, y); });
    holder_ = holder_estimate([this](double x, double y) { return value(x, y); });
  }

  double sample(double x, double y, RngStream&) const override { return value(x, y); }

  double moment(double x, double y, int k) const override {
    check_order(k);
    return std::pow(value(x, y), k);
  }

  double moment_bound() const override { return bound_; }
  double mean_holder() const override { return holder_; }
  bool deterministic() const override { return true; }
  std::string describe() const override { return "delta"; }

 private:
  double value(double x, double y) const {
    check_coord(x, y);
    const double w = wbar_(x, y);
    if (!(w >= 0.0)) throw std::domain_error("mean kernel must be nonnegative");
    return w;
  }

  Kernel2D wbar_;
  double bound_;
  double holder_;
};

}  // namespace

double ring_distance(double x, double y) {
  return std::min({std::fabs(x - y), std::fabs(x - y - 1.0), std::fabs(y - x - 1.0)});
}

double geometric_moment(double p, int k) {
  check_order(k);
  if (p == 0.0) return 0.0;
  const double q = 1.0 - p;
  switch (k) {
    case 1: return p / q;
    case 2: return p * (1.0 + p) / (q * q);
    case 3: return p * (1.0 + p * (4.0 + p)) / (q * q * q);
    default: return p * (1.0 + p * (11.0 + p * (11.0 + p))) / (q * q * q * q);
  }
}

LawPtr make_bernoulli_graphon(Kernel2D W) {
  return std::make_shared<BernoulliGraphon>(std::move(W));
}

LawPtr make_garlaschelli_const(double p) { return std::make_shared<GarlaschelliConst>(p); }

LawPtr make_garlaschelli_xy() { return std::make_shared<GarlaschelliXY>(); }

LawPtr make_exponential(double lambda) { return std::make_shared<ExponentialLaw>(lambda); }

LawPtr make_small_world(double r) { return std::make_shared<SmallWorld>(r); }

LawPtr make_delta(Kernel2D wbar) { return std::make_shared<DeltaLaw>(std::move(wbar)); }

}  // namespace wrg
