#include "wrg/graph.hpp"

#include <stdexcept>

namespace wrg {

namespace {

void check_size(int n) {
  if (n <= 0) throw std::invalid_argument("node count must be positive");
}

std::uint64_t edge_base(std::uint64_t master_seed) {
  return mix64(master_seed ^ kEdgeStream);
}

}  // namespace

NodeSet make_nodes_random(int n, std::uint64_t seed) {
  check_size(n);
  NodeSet nodes;
  nodes.seed = seed;
  nodes.coords.resize(n);
  const std::uint64_t base = mix64(seed ^ kNodeStream);
  for (int i = 0; i < n; ++i) {
    RngStream rng(stream_key({base, static_cast<std::uint64_t>(i)}));
    nodes.coords[i] = rng.next_unit();
  }
  return nodes;
}

NodeSet make_nodes_deterministic(int n) {
  check_size(n);
  NodeSet nodes;
  nodes.deterministic = true;
  nodes.coords.resize(n);
  for (int i = 0; i < n; ++i) nodes.coords[i] = midcell(i, n);
  return nodes;
}

void resample_weight_matrix(WeightMatrix& xi, const GraphLaw& law, const NodeSet& nodes,
                            std::uint64_t master_seed, std::int64_t interval) {
  const int n = nodes.size();
  xi.n = n;
  xi.w.resize(static_cast<std::size_t>(n) * n);
  xi.law_id = law.describe();
  xi.master_seed = master_seed;
  xi.interval = interval;
  const std::uint64_t base = edge_base(master_seed);
  const std::uint64_t k = static_cast<std::uint64_t>(interval);
#pragma omp parallel for schedule(static) if (n >= 256)
  for (int i = 0; i < n; ++i) {
    double* row = xi.row(i);
    const double x = nodes.coords[i];
    for (int j = 0; j < n; ++j) {
      RngStream rng(stream_key({base, k, static_cast<std::uint64_t>(i),
                                static_cast<std::uint64_t>(j)}));
      row[j] = law.sample(x, nodes.coords[j], rng);
    }
  }
}

WeightMatrix sample_weight_matrix(const GraphLaw& law, const NodeSet& nodes,
                                  std::uint64_t master_seed, std::int64_t interval) {
  WeightMatrix xi;
  resample_weight_matrix(xi, law, nodes, master_seed, interval);
  return xi;
}

std::vector<double> sample_weight_row(const GraphLaw& law, const NodeSet& nodes, int i,
                                      std::uint64_t master_seed, std::int64_t interval) {
  const int n = nodes.size();
  if (i < 0 || i >= n) throw std::invalid_argument("row index out of range");
  std::vector<double> row(n);
  const std::uint64_t base = edge_base(master_seed);
  const std::uint64_t k = static_cast<std::uint64_t>(interval);
  const double x = nodes.coords[i];
  for (int j = 0; j < n; ++j) {
    RngStream rng(stream_key({base, k, static_cast<std::uint64_t>(i),
                              static_cast<std::uint64_t>(j)}));
    row[j] = law.sample(x, nodes.coords[j], rng);
  }
  return row;
}

WeightMatrix expected_weight_matrix(const GraphLaw& law, const NodeSet& nodes) {
  const int n = nodes.size();
  WeightMatrix wbar;
  wbar.n = n;
  wbar.w.resize(static_cast<std::size_t>(n) * n);
  wbar.law_id = law.describe() + ":mean";
#pragma omp parallel for schedule(static) if (n >= 256)
  for (int i = 0; i < n; ++i) {
    double* row = wbar.row(i);
    const double x = nodes.coords[i];
    for (int j = 0; j < n; ++j) row[j] = law.mean(x, nodes.coords[j]);
  }
  return wbar;
}

}  // namespace wrg
