#include "gridot/mcf.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace gridot {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// Residual graph: edge 2i is the forward copy of arc i, 2i+1 its reverse.
// The super source and sink are the last two nodes.
class Residual {
 public:
  explicit Residual(const FlowNetwork& net) : real_nodes_(net.num_nodes()) {
    const std::int32_t n = real_nodes_ + 2;
    source_ = real_nodes_;
    sink_ = real_nodes_ + 1;
    std::size_t edge_count = 2 * net.arcs().size();
    for (auto s : net.supply()) edge_count += s != 0 ? 2 : 0;
    to_.reserve(edge_count);
    cap_.reserve(edge_count);
    cost_.reserve(edge_count);
    for (const auto& arc : net.arcs()) add(arc.from, arc.to, arc.capacity, arc.cost);
    for (std::int32_t v = 0; v < real_nodes_; ++v) {
      const auto s = net.supply()[static_cast<std::size_t>(v)];
      if (s > 0) add(source_, v, s, 0);
      if (s < 0) add(v, sink_, -s, 0);
      total_supply_ += std::max<std::int64_t>(s, 0);
    }
    // CSR adjacency in edge-id order.
    head_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (std::size_t e = 0; e < to_.size(); ++e) ++head_[static_cast<std::size_t>(from(e)) + 1];
    for (std::size_t v = 0; v < static_cast<std::size_t>(n); ++v) head_[v + 1] += head_[v];
    adj_.resize(to_.size());
    std::vector<std::size_t> fill(head_.begin(), head_.end() - 1);
    for (std::size_t e = 0; e < to_.size(); ++e) adj_[fill[static_cast<std::size_t>(from(e))]++] = e;
    pot_.assign(static_cast<std::size_t>(n), 0);
  }

  std::int32_t nodes() const { return real_nodes_ + 2; }
  std::int32_t from(std::size_t e) const { return to_[e ^ 1]; }
  std::int64_t reduced(std::size_t e) const {
    return cost_[e] + pot_[static_cast<std::size_t>(from(e))] - pot_[static_cast<std::size_t>(to_[e])];
  }

  // Exact shortest distances from the source on the initial (DAG) graph:
  // arcs are stored in topological order of their tails, so one sweep suffices.
  void init_potentials() {
    std::vector<std::int64_t> dist(static_cast<std::size_t>(nodes()), kInf);
    dist[static_cast<std::size_t>(source_)] = 0;
    auto relax = [&](std::size_t e) {
      const auto u = static_cast<std::size_t>(from(e));
      const auto v = static_cast<std::size_t>(to_[e]);
      if (cap_[e] > 0 && dist[u] < kInf && dist[u] + cost_[e] < dist[v]) dist[v] = dist[u] + cost_[e];
    };
    // Source arcs first, then real arcs (already tail-ordered by layer), then sink arcs.
    for (std::size_t e = 2 * real_arcs(); e < to_.size(); e += 2) {
      if (from(e) == source_) relax(e);
    }
    for (std::size_t e = 0; e < 2 * real_arcs(); e += 2) relax(e);
    for (std::size_t e = 2 * real_arcs(); e < to_.size(); e += 2) {
      if (to_[e] == sink_) relax(e);
    }
    // Unreachable nodes keep potential zero; the largest finite distance
    // bounds them so every reduced cost stays nonnegative.
    std::int64_t cap_dist = 0;
    for (auto d : dist) {
      if (d < kInf) cap_dist = std::max(cap_dist, d);
    }
    for (std::size_t v = 0; v < dist.size(); ++v) pot_[v] = dist[v] < kInf ? dist[v] : cap_dist;
  }

  // Dijkstra on reduced costs; returns false when the sink is unreachable.
  bool shortest_paths() {
    const auto n = static_cast<std::size_t>(nodes());
    dist_.assign(n, kInf);
    using Entry = std::pair<std::int64_t, std::int32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist_[static_cast<std::size_t>(source_)] = 0;
    heap.emplace(0, source_);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d != dist_[static_cast<std::size_t>(u)]) continue;
      for (std::size_t i = head_[static_cast<std::size_t>(u)]; i < head_[static_cast<std::size_t>(u) + 1]; ++i) {
        const std::size_t e = adj_[i];
        if (cap_[e] == 0) continue;
        const auto v = static_cast<std::size_t>(to_[e]);
        const std::int64_t nd = d + reduced(e);
        if (nd < dist_[v]) {
          dist_[v] = nd;
          heap.emplace(nd, static_cast<std::int32_t>(v));
        }
      }
    }
    const std::int64_t dt = dist_[static_cast<std::size_t>(sink_)];
    if (dt >= kInf) return false;
    for (std::size_t v = 0; v < n; ++v) pot_[v] += std::min(dist_[v], dt);
    return true;
  }

  // Blocking flows on the admissible subgraph (positive residual, zero
  // reduced cost) until no admissible source-sink path remains.
  std::int64_t saturate_admissible(std::int64_t& augmentations) {
    const auto n = static_cast<std::size_t>(nodes());
    std::int64_t pushed = 0;
    std::vector<std::int32_t> level(n);
    std::vector<std::size_t> cursor(n);
    std::vector<std::size_t> path;
    for (;;) {
      std::fill(level.begin(), level.end(), -1);
      std::queue<std::int32_t> bfs;
      level[static_cast<std::size_t>(source_)] = 0;
      bfs.push(source_);
      while (!bfs.empty()) {
        const auto u = bfs.front();
        bfs.pop();
        for (std::size_t i = head_[static_cast<std::size_t>(u)]; i < head_[static_cast<std::size_t>(u) + 1]; ++i) {
          const std::size_t e = adj_[i];
          const auto v = static_cast<std::size_t>(to_[e]);
          if (cap_[e] > 0 && level[v] < 0 && reduced(e) == 0) {
            level[v] = level[static_cast<std::size_t>(u)] + 1;
            bfs.push(to_[e]);
          }
        }
      }
      if (level[static_cast<std::size_t>(sink_)] < 0) return pushed;

      for (std::size_t v = 0; v < n; ++v) cursor[v] = head_[v];
      path.clear();
      std::int32_t u = source_;
      for (;;) {
        if (u == sink_) {
          std::int64_t bottleneck = kInf;
          for (auto e : path) bottleneck = std::min(bottleneck, cap_[e]);
          std::size_t first_saturated = path.size();
          for (std::size_t i = 0; i < path.size(); ++i) {
            cap_[path[i]] -= bottleneck;
            cap_[path[i] ^ 1] += bottleneck;
            if (cap_[path[i]] == 0 && first_saturated == path.size()) first_saturated = i;
          }
          pushed += bottleneck;
          ++augmentations;
          path.resize(first_saturated);
          u = path.empty() ? source_ : to_[path.back()];
          continue;
        }
        const auto uu = static_cast<std::size_t>(u);
        bool advanced = false;
        for (; cursor[uu] < head_[uu + 1]; ++cursor[uu]) {
          const std::size_t e = adj_[cursor[uu]];
          const auto v = static_cast<std::size_t>(to_[e]);
          if (cap_[e] > 0 && level[v] == level[uu] + 1 && reduced(e) == 0) {
            path.push_back(e);
            u = to_[e];
            advanced = true;
            break;
          }
        }
        if (advanced) continue;
        if (u == source_) break;
        level[uu] = -1;
        const std::size_t back = path.back();
        path.pop_back();
        u = from(back);
        ++cursor[static_cast<std::size_t>(u)];
      }
    }
  }

  std::size_t real_arcs() const { return real_arc_count_; }
  void set_real_arcs(std::size_t m) { real_arc_count_ = m; }
  std::int64_t total_supply() const { return total_supply_; }
  std::int64_t residual(std::size_t e) const { return cap_[e]; }
  std::int64_t potential(std::int32_t v) const { return pot_[static_cast<std::size_t>(v)]; }
  std::int32_t sink() const { return sink_; }

 private:
  void add(std::int32_t u, std::int32_t v, std::int64_t cap, std::int64_t cost) {
    to_.push_back(v);
    cap_.push_back(cap);
    cost_.push_back(cost);
    to_.push_back(u);
    cap_.push_back(0);
    cost_.push_back(-cost);
  }

  std::int32_t real_nodes_;
  std::int32_t source_ = 0;
  std::int32_t sink_ = 0;
  std::size_t real_arc_count_ = 0;
  std::int64_t total_supply_ = 0;
  std::vector<std::int32_t> to_;
  std::vector<std::int64_t> cap_;
  std::vector<std::int64_t> cost_;
  std::vector<std::size_t> head_;
  std::vector<std::size_t> adj_;
  std::vector<std::int64_t> pot_;
  std::vector<std::int64_t> dist_;
};

}  // namespace

FlowSolution solve_mcf(const FlowNetwork& net, const SolveOptions& options) {
  Residual graph(net);
  graph.set_real_arcs(net.arcs().size());
  graph.init_potentials();

  FlowSolution sol;
  std::int64_t routed = 0;
  std::int64_t running_cost = 0;
  while (routed < graph.total_supply()) {
    if (!graph.shortest_paths()) {
      throw std::logic_error("solve_mcf: instance infeasible; the layered network should always route k units");
    }
    ++sol.phases;
    const std::int64_t unit_cost = graph.potential(graph.sink()) - graph.potential(net.num_nodes());
    const std::int64_t pushed = graph.saturate_admissible(sol.augmentations);
    if (pushed == 0) throw std::logic_error("solve_mcf: shortest-path phase made no progress");
    routed += pushed;
    running_cost += pushed * unit_cost;
    if (options.trace != nullptr) {
      *options.trace << "phase " << sol.phases << " pushed " << pushed << " routed " << routed << " cost "
                     << running_cost << "\n";
    }
  }

  sol.flow.resize(net.arcs().size());
  for (std::size_t i = 0; i < net.arcs().size(); ++i) {
    sol.flow[i] = graph.residual(2 * i + 1);
    sol.opt_cost += sol.flow[i] * net.arcs()[i].cost;
  }
  if (sol.opt_cost != running_cost) throw std::logic_error("solve_mcf: cost bookkeeping mismatch");
  sol.potentials.resize(static_cast<std::size_t>(net.num_nodes()));
  for (std::int32_t v = 0; v < net.num_nodes(); ++v) sol.potentials[static_cast<std::size_t>(v)] = graph.potential(v);
  return sol;
}

OptimalityReport verify_optimality(const FlowNetwork& net, const FlowSolution& sol) {
  auto fail = [](const std::string& why) { return OptimalityReport{false, why}; };
  const auto& arcs = net.arcs();
  if (sol.flow.size() != arcs.size()) return fail("flow vector size differs from arc count");
  if (sol.potentials.size() != static_cast<std::size_t>(net.num_nodes())) {
    return fail("potential vector size differs from node count");
  }

  std::vector<std::int64_t> net_out(static_cast<std::size_t>(net.num_nodes()), 0);
  std::int64_t cost = 0;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const auto& arc = arcs[i];
    const std::int64_t f = sol.flow[i];
    if (f < 0 || f > arc.capacity) {
      std::ostringstream os;
      os << "arc " << i << " flow " << f << " outside [0, " << arc.capacity << "]";
      return fail(os.str());
    }
    net_out[static_cast<std::size_t>(arc.from)] += f;
    net_out[static_cast<std::size_t>(arc.to)] -= f;
    cost += f * arc.cost;
    const std::int64_t reduced = arc.cost + sol.potentials[static_cast<std::size_t>(arc.from)] -
                                 sol.potentials[static_cast<std::size_t>(arc.to)];
    if (f < arc.capacity && reduced < 0) {
      std::ostringstream os;
      os << "forward residual of arc " << i << " has reduced cost " << reduced;
      return fail(os.str());
    }
    if (f > 0 && reduced > 0) {
      std::ostringstream os;
      os << "backward residual of arc " << i << " has reduced cost " << -reduced;
      return fail(os.str());
    }
  }
  for (std::size_t v = 0; v < net_out.size(); ++v) {
    if (net_out[v] != net.supply()[v]) {
      std::ostringstream os;
      os << "conservation violated at node " << v << ": net outflow " << net_out[v] << ", supply "
         << net.supply()[v];
      return fail(os.str());
    }
  }
  if (cost != sol.opt_cost) {
    std::ostringstream os;
    os << "reported cost " << sol.opt_cost << " differs from recomputed " << cost;
    return fail(os.str());
  }
  return {true, "optimal"};
}

}  // namespace gridot
