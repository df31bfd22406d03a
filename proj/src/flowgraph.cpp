#include "gridot/flowgraph.hpp"

#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gridot {

FlowNetwork::FlowNetwork(GridSpec grid, std::int64_t k, std::vector<Arc> arcs, std::vector<std::int64_t> supply)
    : grid_(grid), k_(k), arcs_(std::move(arcs)), supply_(std::move(supply)) {
  if (static_cast<std::int64_t>(supply_.size()) != (grid_.d + 1) * grid_.cells()) {
    throw std::invalid_argument("FlowNetwork: supply size must be (d+1) L^d");
  }
  if (std::accumulate(supply_.begin(), supply_.end(), std::int64_t{0}) != 0) {
    throw std::invalid_argument("FlowNetwork: supplies do not balance");
  }
}

int FlowNetwork::layer_of(std::int32_t node) const { return static_cast<int>(node / grid_.cells()); }

MultiIndex FlowNetwork::node_index(std::int32_t node) const { return grid_.unrank(node % grid_.cells()); }

std::int32_t FlowNetwork::node_id(int layer, std::span<const int> idx) const {
  if (layer < 0 || layer > grid_.d || !grid_.in_bounds(idx)) throw std::out_of_range("node_id: bad layer or index");
  return static_cast<std::int32_t>(layer * grid_.cells() + grid_.rank(idx));
}

std::int64_t FlowNetwork::arc_id(std::int32_t node, int value) const {
  if (layer_of(node) >= grid_.d) throw std::out_of_range("arc_id: sink-layer nodes have no outgoing arcs");
  return static_cast<std::int64_t>(node) * grid_.L + value;
}

FlowNetwork build_partite(const GridHistogram& hp, const GridHistogram& hq) {
  if (!(hp.grid() == hq.grid())) throw std::invalid_argument("build_partite: grid mismatch");
  if (hp.k() != hq.k()) throw std::invalid_argument("build_partite: total mass k differs between histograms");

  const GridSpec g = hp.grid();
  const std::int64_t k = hp.k();
  const std::int64_t span = static_cast<std::int64_t>(g.L - 1) * (g.L - 1);
  // k * d * (L-1)^2 must stay below 2^62.
  if (span > 0 && k > kMaxTotalCost / (static_cast<std::int64_t>(g.d) * span)) {
    std::ostringstream os;
    os << "build_partite: overflow guard violated for k=" << k << ", L=" << g.L << ", d=" << g.d;
    throw std::overflow_error(os.str());
  }
  const std::int64_t cells = g.cells();
  const std::int64_t nodes = (g.d + 1) * cells;
  const std::int64_t arc_count = g.d * cells * g.L;
  if (nodes > std::numeric_limits<std::int32_t>::max() || arc_count > std::numeric_limits<std::int32_t>::max()) {
    throw std::overflow_error("build_partite: graph too large for 32-bit node ids");
  }

  std::vector<std::int64_t> supply(static_cast<std::size_t>(nodes), 0);
  for (std::int64_t r = 0; r < cells; ++r) {
    supply[static_cast<std::size_t>(r)] = hp.counts()[static_cast<std::size_t>(r)];
    supply[static_cast<std::size_t>(g.d * cells + r)] -= hq.counts()[static_cast<std::size_t>(r)];
  }

  std::vector<Arc> arcs;
  arcs.reserve(static_cast<std::size_t>(arc_count));
  std::int64_t stride = cells;
  for (int layer = 0; layer < g.d; ++layer) {
    stride /= g.L;  // weight of coordinate `layer` in the rank
    const std::int64_t base = layer * cells;
    for (std::int64_t r = 0; r < cells; ++r) {
      const auto current = static_cast<int>((r / stride) % g.L);
      for (int value = 0; value < g.L; ++value) {
        const std::int64_t target = r + (value - current) * stride;
        const std::int64_t diff = value - current;
        arcs.push_back(Arc{static_cast<std::int32_t>(base + r), static_cast<std::int32_t>(base + cells + target),
                           diff * diff, k});
      }
    }
  }
  return FlowNetwork(g, k, std::move(arcs), std::move(supply));
}

std::int64_t path_cost_identity_check(const FlowNetwork& net, std::span<const int> a, std::span<const int> b) {
  const GridSpec& g = net.grid();
  if (!g.in_bounds(a) || !g.in_bounds(b)) throw std::out_of_range("path_cost_identity_check: index out of bounds");
  MultiIndex mixed(a.begin(), a.end());
  std::int32_t node = net.node_id(0, mixed);
  std::int64_t total = 0;
  for (int layer = 0; layer < g.d; ++layer) {
    const auto& arc = net.arcs()[static_cast<std::size_t>(net.arc_id(node, b[static_cast<std::size_t>(layer)]))];
    total += arc.cost;
    node = arc.to;
  }
  if (node != net.node_id(g.d, b)) throw std::logic_error("path_cost_identity_check: path did not reach target");
  return total;
}

double descale(std::int64_t opt_int, std::int64_t k, std::int64_t L) {
  if (k <= 0 || L <= 0) throw std::invalid_argument("descale: k and L must be positive");
  if (opt_int < 0) throw std::invalid_argument("descale: negative optimum");
  return static_cast<double>(opt_int) / (static_cast<double>(k) * static_cast<double>(L) * static_cast<double>(L));
}

void write_dimacs(std::ostream& os, const FlowNetwork& net) {
  os << "c grid W2^2 layered instance d=" << net.grid().d << " L=" << net.grid().L << " k=" << net.k() << "\n";
  os << "p min " << net.num_nodes() << " " << net.arcs().size() << "\n";
  for (std::size_t v = 0; v < net.supply().size(); ++v) {
    if (net.supply()[v] != 0) os << "n " << v + 1 << " " << net.supply()[v] << "\n";
  }
  for (const auto& arc : net.arcs()) {
    os << "a " << arc.from + 1 << " " << arc.to + 1 << " 0 " << arc.capacity << " " << arc.cost << "\n";
  }
}

}  // namespace gridot
