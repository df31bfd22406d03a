#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gridot/sketch.hpp"

namespace gridot {

struct Arc {
  std::int32_t from = 0;
  std::int32_t to = 0;
  std::int64_t cost = 0;
  std::int64_t capacity = 0;

  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Layered min-cost flow instance for grid W2^2 between two histograms.
///
/// Layer l (0..d) holds one node per multi-index; a layer-l node stands for
/// the mixed index (b_1..b_l, a_{l+1}..a_d), i.e. the first l coordinates
/// already moved to the target. Arcs l -> l+1 rewrite coordinate l+1 and cost
/// (a - b)^2, which is L^2 times that axis' share of the squared distance
/// between cell centers. Node ids are layer * L^d + rank(index); the arcs of
/// node u occupy ids u*L .. u*L + L-1, ordered by the new coordinate value.
class FlowNetwork {
 public:
  FlowNetwork() = default;
  FlowNetwork(GridSpec grid, std::int64_t k, std::vector<Arc> arcs, std::vector<std::int64_t> supply);

  const GridSpec& grid() const { return grid_; }
  std::int64_t k() const { return k_; }
  std::int32_t num_nodes() const { return static_cast<std::int32_t>(supply_.size()); }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<std::int64_t>& supply() const { return supply_; }

  int layer_of(std::int32_t node) const;
  MultiIndex node_index(std::int32_t node) const;
  std::int32_t node_id(int layer, std::span<const int> idx) const;

  /// Id of the arc leaving `node` (layer < d) that sets the switched
  /// coordinate to `value`.
  std::int64_t arc_id(std::int32_t node, int value) const;

 private:
  GridSpec grid_;
  std::int64_t k_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::int64_t> supply_;
};

/// Largest k * d * (L-1)^2 accepted by build_partite (one bit of int64 headroom).
constexpr std::int64_t kMaxTotalCost = std::int64_t{1} << 62;

/// Scaled integral instance: supplies are counts (mass * k), arc costs are
/// squared coordinate differences (cost * L^2), capacity k on every arc.
FlowNetwork build_partite(const GridHistogram& hp, const GridHistogram& hq);

/// Sum of arc costs on the layered path a -> b that switches coordinate l at
/// layer l, read from the network's arcs.
std::int64_t path_cost_identity_check(const FlowNetwork& net, std::span<const int> a, std::span<const int> b);

/// opt / (k L^2).
double descale(std::int64_t opt_int, std::int64_t k, std::int64_t L);

/// DIMACS min-cost flow text ("p min", "n", "a" lines, 1-based node ids).
void write_dimacs(std::ostream& os, const FlowNetwork& net);

}  // namespace gridot
