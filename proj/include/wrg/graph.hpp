#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wrg/law.hpp"

namespace wrg {

// Midpoint of cell i in a uniform partition of [0,1] into m cells.
inline double midcell(int i, int m) { return (2.0 * i + 1.0) / (2.0 * m); }

/** Node coordinates in [0,1], either i.i.d. uniform or mid-cell. */
struct NodeSet {
  std::vector<double> coords;
  bool deterministic = false;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(coords.size()); }
};

// i.i.d. uniform coordinates; coordinate i is keyed by (seed, i), so the
// draw for a given index never depends on n.
NodeSet make_nodes_random(int n, std::uint64_t seed);

// Mid-cell coordinates (2i-1)/(2n), i = 1..n.
NodeSet make_nodes_deterministic(int n);

/** Dense weight matrix with its sampling provenance. */
struct WeightMatrix {
  int n = 0;
  std::vector<double> w;  // row-major n*n
  std::string law_id;
  std::uint64_t master_seed = 0;
  std::int64_t interval = 0;

  double at(int i, int j) const { return w[static_cast<std::size_t>(i) * n + j]; }
  double* row(int i) { return w.data() + static_cast<std::size_t>(i) * n; }
  const double* row(int i) const { return w.data() + static_cast<std::size_t>(i) * n; }
};

// Draw every entry xi_ij from law(coords[i], coords[j]). Entry (i,j) is keyed
// by (master_seed, interval, i, j): results are independent of evaluation
// order and thread count, and the diagonal is drawn like any other pair.
WeightMatrix sample_weight_matrix(const GraphLaw& law, const NodeSet& nodes,
                                  std::uint64_t master_seed, std::int64_t interval = 0);

// Same draw into an existing buffer; reallocates only on size change.
void resample_weight_matrix(WeightMatrix& xi, const GraphLaw& law, const NodeSet& nodes,
                            std::uint64_t master_seed, std::int64_t interval);

// One row of the same draw: entry j equals row i of sample_weight_matrix.
std::vector<double> sample_weight_row(const GraphLaw& law, const NodeSet& nodes, int i,
                                      std::uint64_t master_seed, std::int64_t interval = 0);

// Matrix of mean weights wbar(coords[i], coords[j]).
WeightMatrix expected_weight_matrix(const GraphLaw& law, const NodeSet& nodes);

}  // namespace wrg
