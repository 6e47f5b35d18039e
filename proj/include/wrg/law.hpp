#pragma once

#include <functional>
#include <memory>
#include <string>

#include "wrg/rng.hpp"

namespace wrg {

using Kernel2D = std::function<double(double, double)>;

/**
 * Edge-weight distribution q(x,y;dw) on [0,inf), indexed by a pair of node
 * coordinates in [0,1]. Implementations are immutable; sampling draws all
 * randomness from the caller-supplied stream.
 */
class GraphLaw {
 public:
  virtual ~GraphLaw() = default;

  // One weight draw for the coordinate pair (x,y).
  virtual double sample(double x, double y, RngStream& rng) const = 0;

  // Raw moment E[w^k] of q(x,y;.), k in 1..4.
  virtual double moment(double x, double y, int k) const = 0;

  // Uniform bound M with moment(x,y,k)^(1/k) <= M for k in 1..4 and all (x,y).
  virtual double moment_bound() const = 0;

  // Upper estimate of the 1/2-Holder constant of the mean kernel.
  // Feeds error envelopes only, never an assertion.
  virtual double mean_holder() const = 0;

  // True when sample() is a point mass determined by (x,y) alone.
  virtual bool deterministic() const { return false; }

  virtual std::string describe() const = 0;

  // First moment, the kernel of the averaged and limit dynamics.
  double mean(double x, double y) const { return moment(x, y, 1); }
};

using LawPtr = std::shared_ptr<const GraphLaw>;

// Bernoulli weights: 1 with probability W(x,y), else 0. W must map into [0,1].
LawPtr make_bernoulli_graphon(Kernel2D W);

// Geometric weights P[w=i] = (1-p) p^i, i >= 0, with constant parameter p in [0,1).
LawPtr make_garlaschelli_const(double p);

// Geometric weights with coordinate-dependent parameter p(x,y) = xy/2.
LawPtr make_garlaschelli_xy();

// Exponential weights with rate lambda > 0.
LawPtr make_exponential(double lambda);

// Ring lattice with distance-proportional rewiring, radius r in (0, 1/2].
// Inside radius: uniform [0,1] with probability rho/r, else weight 1.
// Outside: uniform [0,1].
LawPtr make_small_world(double r);

// Point mass at wbar(x,y) >= 0; sampling consumes no randomness.
LawPtr make_delta(Kernel2D wbar);

// Shortest distance on the unit circle: min(|x-y|, |x-y-1|, |y-x-1|).
double ring_distance(double x, double y);

// Moments of the geometric distribution on {0,1,2,...} with parameter p.
double geometric_moment(double p, int k);

}  // namespace wrg
