#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "gridot/flowgraph.hpp"
#include "gridot/harness.hpp"
#include "gridot/mcf.hpp"
#include "gridot/oracle.hpp"
#include "test_oracles.hpp"

using namespace gridot;

namespace {

// Random histogram with total k over a few cells.
GridHistogram random_small(const GridSpec& g, std::int64_t k, Rng& rng) { return random_histogram(g, k, rng); }

// Routes an oracle transport plan through the canonical layered paths and
// recovers potentials by Bellman-Ford on the resulting residual graph.
FlowSolution solution_from_plan(const FlowNetwork& net, const GridMeasure& p, const GridMeasure& q) {
  // Optimal assignment of unit atoms by brute force.
  std::vector<MultiIndex> pa;
  std::vector<MultiIndex> qa;
  for (std::size_t i = 0; i < p.support.size(); ++i) {
    for (std::int64_t u = 0; u < p.masses[i]; ++u) pa.push_back(p.support[i]);
  }
  for (std::size_t i = 0; i < q.support.size(); ++i) {
    for (std::int64_t u = 0; u < q.masses[i]; ++u) qa.push_back(q.support[i]);
  }
  std::vector<std::size_t> perm(pa.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::vector<std::size_t> best = perm;
  std::int64_t best_cost = -1;
  do {
    std::int64_t c = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      for (std::size_t a = 0; a < pa[i].size(); ++a) {
        const std::int64_t diff = pa[i][a] - qa[perm[i]][a];
        c += diff * diff;
      }
    }
    if (best_cost < 0 || c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  FlowSolution sol;
  sol.flow.assign(net.arcs().size(), 0);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    MultiIndex cur = pa[i];
    std::int32_t node = net.node_id(0, cur);
    for (int layer = 0; layer < net.grid().d; ++layer) {
      const auto arc = net.arc_id(node, qa[best[i]][static_cast<std::size_t>(layer)]);
      ++sol.flow[static_cast<std::size_t>(arc)];
      node = net.arcs()[static_cast<std::size_t>(arc)].to;
    }
  }
  for (std::size_t e = 0; e < net.arcs().size(); ++e) sol.opt_cost += sol.flow[e] * net.arcs()[e].cost;

  std::vector<gridot::testing::ResidualArc> residual;
  for (std::size_t e = 0; e < net.arcs().size(); ++e) {
    const auto& a = net.arcs()[e];
    if (sol.flow[e] < a.capacity) residual.push_back({a.from, a.to, a.cost});
    if (sol.flow[e] > 0) residual.push_back({a.to, a.from, -a.cost});
  }
  REQUIRE(gridot::testing::bellman_ford_potentials(net.num_nodes(), residual, sol.potentials));
  return sol;
}

}  // namespace

TEST_CASE("solve_mcf: identical histograms cost zero") {
  Rng rng = make_rng(1, 0);
  for (int d = 1; d <= 3; ++d) {
    const GridSpec g(d, 4);
    const auto h = random_small(g, 30, rng);
    const auto net = build_partite(h, h);
    const auto sol = solve_mcf(net);
    CHECK(sol.opt_cost == 0);
    CHECK(verify_optimality(net, sol).ok);
  }
}

TEST_CASE("solve_mcf: one unit across one cell") {
  const GridSpec g(1, 2);
  const auto net = build_partite(GridHistogram(g, {1, 0}), GridHistogram(g, {0, 1}));
  const auto sol = solve_mcf(net);
  CHECK(sol.opt_cost == 1);
  CHECK(descale(sol.opt_cost, 1, 2) == 0.25);
  CHECK(sol.flow == std::vector<std::int64_t>{0, 1, 0, 0});
}

TEST_CASE("solve_mcf: 200 random instances equal the cycle-canceling oracle") {
  Rng rng = make_rng(20240611, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 3;
    const int L = 1 + static_cast<int>(uniform_open01(rng) * 4);
    const std::int64_t k = 1 + static_cast<std::int64_t>(uniform_open01(rng) * 12);
    const GridSpec g(d, L);
    const auto hp = random_small(g, k, rng);
    const auto hq = random_small(g, k, rng);
    const auto net = build_partite(hp, hq);
    const auto sol = solve_mcf(net);
    INFO("trial " << trial << " d=" << d << " L=" << L << " k=" << k);
    REQUIRE(verify_optimality(net, sol).ok);
    const Rational oracle = ot_cycle_cancel(GridMeasure::from_histogram(hp), GridMeasure::from_histogram(hq));
    CHECK(Rational(sol.opt_cost, k * L * L) == oracle);
    for (auto f : sol.flow) REQUIRE(f >= 0);
  }
}

TEST_CASE("verify_optimality: accepts certified solutions, rejects perturbations") {
  Rng rng = make_rng(77, 0);
  const GridSpec g(2, 3);
  const auto hp = random_small(g, 6, rng);
  const auto hq = random_small(g, 6, rng);
  const auto net = build_partite(hp, hq);
  const auto sol = solve_mcf(net);
  REQUIRE(verify_optimality(net, sol).ok);

  // Move one unit from a used arc to its sibling: breaks conservation.
  auto broken = sol;
  std::size_t used = 0;
  while (broken.flow[used] == 0) ++used;
  const std::size_t sibling = used % 3 == 0 ? used + 1 : used - 1;
  --broken.flow[used];
  ++broken.flow[sibling];
  broken.opt_cost += net.arcs()[sibling].cost - net.arcs()[used].cost;
  const auto report = verify_optimality(net, broken);
  CHECK_FALSE(report.ok);
  CHECK(report.diagnostic.find("conservation") != std::string::npos);

  // Feasible flow, but zero potentials do not certify a positive-cost optimum.
  auto wrong_pot = sol;
  for (auto& p : wrong_pot.potentials) p = 0;
  if (sol.opt_cost > 0) CHECK_FALSE(verify_optimality(net, wrong_pot).ok);

  auto wrong_cost = sol;
  wrong_cost.opt_cost += 1;
  CHECK_FALSE(verify_optimality(net, wrong_cost).ok);

  auto over = sol;
  over.flow[0] = net.arcs()[0].capacity + 1;
  CHECK_FALSE(verify_optimality(net, over).ok);
}

TEST_CASE("verify_optimality: suboptimal feasible routing is rejected") {
  // d=1, L=3: mass at 0 and 2 must go to 1 and 2. Routing 0->2, 2->1 costs 5; optimum 0->1, 2->2 costs 1.
  const GridSpec g(1, 3);
  const auto net = build_partite(GridHistogram(g, {1, 0, 1}), GridHistogram(g, {0, 1, 1}));
  FlowSolution bad;
  bad.flow.assign(net.arcs().size(), 0);
  bad.flow[static_cast<std::size_t>(net.arc_id(0, 2))] = 1;
  bad.flow[static_cast<std::size_t>(net.arc_id(2, 1))] = 1;
  bad.opt_cost = 5;
  bad.potentials.assign(static_cast<std::size_t>(net.num_nodes()), 0);
  // The residual graph has a negative cycle, so no potentials exist.
  std::vector<gridot::testing::ResidualArc> residual;
  for (std::size_t e = 0; e < net.arcs().size(); ++e) {
    const auto& a = net.arcs()[e];
    if (bad.flow[e] < a.capacity) residual.push_back({a.from, a.to, a.cost});
    if (bad.flow[e] > 0) residual.push_back({a.to, a.from, -a.cost});
  }
  std::vector<std::int64_t> pi;
  CHECK_FALSE(gridot::testing::bellman_ford_potentials(net.num_nodes(), residual, pi));
  CHECK_FALSE(verify_optimality(net, bad).ok);
  CHECK(solve_mcf(net).opt_cost == 1);
}

TEST_CASE("verify_optimality: oracle plan with Bellman-Ford potentials passes") {
  Rng rng = make_rng(31337, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + trial % 3;
    const GridSpec g(d, 3);
    const std::int64_t k = 1 + trial % 6;
    const auto hp = random_small(g, k, rng);
    const auto hq = random_small(g, k, rng);
    const auto net = build_partite(hp, hq);
    const auto sol = solution_from_plan(net, GridMeasure::from_histogram(hp), GridMeasure::from_histogram(hq));
    const auto report = verify_optimality(net, sol);
    INFO(report.diagnostic);
    CHECK(report.ok);
    CHECK(sol.opt_cost == solve_mcf(net).opt_cost);
  }
}

TEST_CASE("solve_mcf: deterministic and traceable") {
  Rng rng = make_rng(5, 5);
  const GridSpec g(2, 8);
  const auto hp = random_small(g, 500, rng);
  const auto hq = random_small(g, 500, rng);
  const auto net = build_partite(hp, hq);
  std::ostringstream trace;
  SolveOptions opts;
  opts.trace = &trace;
  const auto a = solve_mcf(net, opts);
  const auto b = solve_mcf(net);
  CHECK(a == b);
  CHECK(trace.str().find("phase 1 ") == 0);
  CHECK(a.phases > 0);
  CHECK(verify_optimality(net, a).ok);
}

TEST_CASE("solve_mcf: large k stays exact") {
  const GridSpec g(2, 6);
  const auto hp = sketch_analytic(g, ProductDensity({Factor1D::holder_cusp(0.5, 0.3, 0.5), Factor1D::uniform()}),
                                  100000000);
  const auto hq = sketch_analytic(g, ProductDensity({Factor1D::uniform(), Factor1D::smooth_sine(0.6, 1)}),
                                  100000000);
  const auto net = build_partite(hp, hq);
  const auto sol = solve_mcf(net);
  CHECK(verify_optimality(net, sol).ok);
  CHECK(sol.opt_cost > 0);
}
