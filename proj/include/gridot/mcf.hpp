#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridot/flowgraph.hpp"

namespace gridot {

/// Optimal integral flow with the node potentials that certify it.
struct FlowSolution {
  std::vector<std::int64_t> flow;        // per arc of the network
  std::vector<std::int64_t> potentials;  // per node; reduced cost = cost + pi(from) - pi(to)
  std::int64_t opt_cost = 0;
  std::int64_t phases = 0;               // shortest-path rounds
  std::int64_t augmentations = 0;

  friend bool operator==(const FlowSolution&, const FlowSolution&) = default;
};

struct SolveOptions {
  // Per-phase trace (phase, pushed amount, running cost); null disables it.
  std::ostream* trace = nullptr;
};

/// Successive shortest paths with node potentials.
///
/// Initial potentials come from one forward sweep over the layered DAG. Each
/// phase runs Dijkstra on reduced costs (ties broken by lowest node id),
/// lifts the potentials, then saturates every shortest augmenting path via
/// blocking flow on the zero-reduced-cost residual subgraph. All arithmetic is
/// 64-bit integer.
FlowSolution solve_mcf(const FlowNetwork& net, const SolveOptions& options = {});

struct OptimalityReport {
  bool ok = false;
  std::string diagnostic;

  explicit operator bool() const { return ok; }
};

/// Complementary-slackness audit: conservation, capacity bounds, reported
/// cost, and nonnegative reduced cost on every residual arc.
OptimalityReport verify_optimality(const FlowNetwork& net, const FlowSolution& sol);

}  // namespace gridot
