#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "gridot/flowgraph.hpp"

using namespace gridot;

namespace {

GridHistogram constant_histogram(const GridSpec& g, std::int64_t per_cell) {
  return GridHistogram(g, std::vector<std::int64_t>(static_cast<std::size_t>(g.cells()), per_cell));
}

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

TEST_CASE("build_partite: node and arc counts") {
  for (int d = 1; d <= 3; ++d) {
    for (int L = 1; L <= 8; ++L) {
      const GridSpec g(d, L);
      const auto net = build_partite(constant_histogram(g, 1), constant_histogram(g, 1));
      CHECK(net.num_nodes() == (d + 1) * ipow(L, d));
      CHECK(static_cast<std::int64_t>(net.arcs().size()) == d * ipow(L, d + 1));
    }
  }
  const auto n24 = build_partite(constant_histogram(GridSpec(2, 4), 1), constant_histogram(GridSpec(2, 4), 1));
  CHECK(n24.num_nodes() == 48);
  CHECK(n24.arcs().size() == 128);
  const auto n33 = build_partite(constant_histogram(GridSpec(3, 3), 1), constant_histogram(GridSpec(3, 3), 1));
  CHECK(n33.num_nodes() == 108);
  CHECK(n33.arcs().size() == 243);

  const auto n12 = build_partite(constant_histogram(GridSpec(1, 2), 1), constant_histogram(GridSpec(1, 2), 1));
  std::vector<std::int64_t> costs;
  for (const auto& a : n12.arcs()) costs.push_back(a.cost);
  CHECK(costs == std::vector<std::int64_t>{0, 1, 1, 0});
}

TEST_CASE("build_partite: arc structure, supplies, capacities") {
  const GridSpec g(3, 4);
  std::vector<std::int64_t> cp(static_cast<std::size_t>(g.cells()), 0);
  std::vector<std::int64_t> cq(static_cast<std::size_t>(g.cells()), 0);
  cp[3] = 5;
  cp[40] = 2;
  cq[0] = 1;
  cq[63] = 6;
  const GridHistogram hp(g, cp);
  const GridHistogram hq(g, cq);
  const auto net = build_partite(hp, hq);

  std::int64_t positive = 0;
  std::int64_t total = 0;
  for (auto s : net.supply()) {
    total += s;
    if (s > 0) positive += s;
  }
  CHECK(total == 0);
  CHECK(positive == 7);
  CHECK(net.supply()[3] == 5);
  CHECK(net.supply()[static_cast<std::size_t>(3 * g.cells() + 63)] == -6);

  for (std::size_t i = 0; i < net.arcs().size(); ++i) {
    const auto& arc = net.arcs()[i];
    const int layer = net.layer_of(arc.from);
    REQUIRE(net.layer_of(arc.to) == layer + 1);
    const auto a = net.node_index(arc.from);
    const auto b = net.node_index(arc.to);
    int differing = 0;
    for (int c = 0; c < g.d; ++c) {
      if (c != layer) REQUIRE(a[static_cast<std::size_t>(c)] == b[static_cast<std::size_t>(c)]);
      differing += a[static_cast<std::size_t>(c)] != b[static_cast<std::size_t>(c)];
    }
    REQUIRE(differing <= 1);
    const std::int64_t diff = a[static_cast<std::size_t>(layer)] - b[static_cast<std::size_t>(layer)];
    REQUIRE(arc.cost == diff * diff);
    REQUIRE(arc.cost <= (g.L - 1) * (g.L - 1));
    REQUIRE(arc.capacity == 7);
    REQUIRE(net.arc_id(arc.from, b[static_cast<std::size_t>(layer)]) == static_cast<std::int64_t>(i));
  }
  // Deterministic order: nondecreasing tails.
  CHECK(std::is_sorted(net.arcs().begin(), net.arcs().end(),
                       [](const Arc& x, const Arc& y) { return x.from < y.from; }));
}

TEST_CASE("path_cost_identity_check: layered paths reproduce L^2 squared center distance") {
  for (int d = 1; d <= 3; ++d) {
    for (int L = 1; L <= 5; ++L) {
      const GridSpec g(d, L);
      const auto net = build_partite(constant_histogram(g, 1), constant_histogram(g, 1));
      for (std::int64_t ra = 0; ra < g.cells(); ++ra) {
        const auto a = g.unrank(ra);
        for (std::int64_t rb = 0; rb < g.cells(); ++rb) {
          const auto b = g.unrank(rb);
          // 4 L^2 |center(a) - center(b)|^2 = sum ((2a+1) - (2b+1))^2, exact in integers.
          std::int64_t four_l2_dist = 0;
          for (int c = 0; c < d; ++c) {
            const std::int64_t diff = (2 * a[static_cast<std::size_t>(c)] + 1) - (2 * b[static_cast<std::size_t>(c)] + 1);
            four_l2_dist += diff * diff;
          }
          REQUIRE(4 * path_cost_identity_check(net, a, b) == four_l2_dist);
        }
      }
    }
  }
  const GridSpec g(2, 4);
  const auto net = build_partite(constant_histogram(g, 1), constant_histogram(g, 1));
  const int a[] = {0, 0};
  const int b[] = {3, 1};
  CHECK(path_cost_identity_check(net, a, b) == 10);
  CHECK(path_cost_identity_check(net, a, a) == 0);
}

TEST_CASE("descale") {
  CHECK(descale(0, 5, 7) == 0.0);
  CHECK(descale(1, 1, 2) == 0.25);
  CHECK(descale(1, 1, 2) == (0.75 - 0.25) * (0.75 - 0.25));
  CHECK(descale(6, 3, 1) == 2.0);
  CHECK_THROWS_AS(descale(1, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(descale(1, 2, 0), std::invalid_argument);
}

TEST_CASE("build_partite: errors") {
  const GridSpec g(2, 3);
  CHECK_THROWS_AS(build_partite(constant_histogram(g, 1), constant_histogram(GridSpec(2, 4), 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_partite(constant_histogram(g, 1), constant_histogram(g, 2)), std::invalid_argument);

  // k * d * (L-1)^2 above 2^62 trips the guard.
  const GridSpec big(1, 3);
  const std::int64_t k = (std::int64_t{1} << 62) / 4 + 1;
  std::vector<std::int64_t> c{k, 0, 0};
  std::vector<std::int64_t> c2{0, 0, k};
  CHECK_THROWS_AS(build_partite(GridHistogram(big, c), GridHistogram(big, c2)), std::overflow_error);
  c[0] = k - 1;
  c2[2] = k - 1;
  CHECK_NOTHROW(build_partite(GridHistogram(big, c), GridHistogram(big, c2)));
}

TEST_CASE("write_dimacs") {
  const GridSpec g(1, 2);
  const auto net = build_partite(GridHistogram(g, {1, 0}), GridHistogram(g, {0, 1}));
  std::ostringstream os;
  write_dimacs(os, net);
  const std::string text = os.str();
  CHECK(text.find("p min 4 4\n") != std::string::npos);
  CHECK(text.find("n 1 1\n") != std::string::npos);
  CHECK(text.find("n 4 -1\n") != std::string::npos);
  CHECK(text.find("a 1 3 0 1 0\n") != std::string::npos);
  CHECK(text.find("a 1 4 0 1 1\n") != std::string::npos);
}
