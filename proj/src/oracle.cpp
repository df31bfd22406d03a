#include "gridot/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace gridot {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

std::int64_t DiscreteMeasure::total() const { return std::accumulate(masses.begin(), masses.end(), std::int64_t{0}); }

std::int64_t GridMeasure::total() const { return std::accumulate(masses.begin(), masses.end(), std::int64_t{0}); }

GridMeasure GridMeasure::from_histogram(const GridHistogram& h) {
  GridMeasure m;
  m.grid = h.grid();
  for (const auto& [r, c] : h.nonzero()) {
    m.support.push_back(h.grid().unrank(r));
    m.masses.push_back(c);
  }
  return m;
}

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("oracle: atom dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

std::int64_t squared_index_distance(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) throw std::invalid_argument("oracle: index dimension mismatch");
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

template <typename Cost>
Cost enumerate_min(std::size_t n, std::span<const Cost> cost) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Cost best = std::numeric_limits<Cost>::max();
  do {
    Cost total = 0;
    for (std::size_t i = 0; i < n; ++i) total += cost[i * n + perm[i]];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void check_enumerate_sizes(std::size_t np, std::size_t nq) {
  if (np != nq) throw std::invalid_argument("ot_enumerate: measures must have the same number of atoms");
  if (np == 0) throw std::invalid_argument("ot_enumerate: empty measure");
  if (np > kMaxEnumerateAtoms) throw std::invalid_argument("ot_enumerate: at most 8 atoms supported");
}

// Transportation simplex over the bipartite basis tree. Rows are 0..m-1,
// columns m..m+n-1. Each basic cell is a tree edge.
template <typename Cost>
class TransportCycleCanceler {
 public:
  TransportCycleCanceler(std::span<const std::int64_t> supply, std::span<const std::int64_t> demand,
                         std::span<const Cost> cost)
      : m_(supply.size()), n_(demand.size()), cost_(cost.begin(), cost.end()) {
    if (m_ == 0 || n_ == 0) throw std::invalid_argument("transport: empty side");
    if (cost_.size() != m_ * n_) throw std::invalid_argument("transport: cost matrix shape mismatch");
    if (m_ + n_ > kMaxCycleCancelSupport) throw std::invalid_argument("transport: combined support exceeds 40");
    for (auto s : supply) {
      if (s < 0) throw std::invalid_argument("transport: negative supply");
    }
    for (auto t : demand) {
      if (t < 0) throw std::invalid_argument("transport: negative demand");
    }
    if (std::accumulate(supply.begin(), supply.end(), std::int64_t{0}) !=
        std::accumulate(demand.begin(), demand.end(), std::int64_t{0})) {
      throw std::invalid_argument("transport: supply and demand totals differ");
    }
    Cost scale = 0;
    for (auto c : cost_) scale = std::max<Cost>(scale, c < 0 ? -c : c);
    if constexpr (std::is_floating_point_v<Cost>) tolerance_ = 1e-13 * std::max<Cost>(scale, 1);

    flow_.assign(m_ * n_, 0);
    basic_.assign(m_ * n_, false);
    northwest_corner(supply, demand);
  }

  Cost solve() {
    bool bland = false;
    const std::size_t max_pivots = 100000;
    for (std::size_t pivot = 0; pivot < max_pivots; ++pivot) {
      std::size_t entering = m_ * n_;
      Cost best = 0;
      std::vector<std::size_t> best_cycle;
      for (std::size_t cell = 0; cell < m_ * n_; ++cell) {
        if (basic_[cell]) continue;
        auto cycle = basis_cycle(cell);
        const Cost gain = cycle_cost(cell, cycle);
        if (gain < best - tolerance_) {
          best = gain;
          entering = cell;
          best_cycle = std::move(cycle);
          if (bland) break;
        }
      }
      if (entering == m_ * n_) return objective();
      bland = !pivot_on(entering, best_cycle);
    }
    throw std::logic_error("transport: pivot limit reached");
  }

 private:
  void northwest_corner(std::span<const std::int64_t> supply, std::span<const std::int64_t> demand) {
    std::vector<std::int64_t> s(supply.begin(), supply.end());
    std::vector<std::int64_t> t(demand.begin(), demand.end());
    std::size_t i = 0;
    std::size_t j = 0;
    for (;;) {
      const std::int64_t x = std::min(s[i], t[j]);
      flow_[i * n_ + j] = x;
      basic_[i * n_ + j] = true;
      s[i] -= x;
      t[j] -= x;
      if (i == m_ - 1 && j == n_ - 1) break;
      if ((s[i] == 0 && i < m_ - 1) || j == n_ - 1) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  // Basic cells on the tree path from column j back to row i of `cell`,
  // in order starting at the column end. Signs alternate -, +, -, ...
  std::vector<std::size_t> basis_cycle(std::size_t cell) const {
    const std::size_t row = cell / n_;
    const std::size_t col = cell % n_;
    const std::size_t nodes = m_ + n_;
    std::vector<std::size_t> via(nodes, m_ * n_);
    std::vector<bool> seen(nodes, false);
    std::queue<std::size_t> bfs;
    const std::size_t start = m_ + col;
    seen[start] = true;
    bfs.push(start);
    while (!bfs.empty() && !seen[row]) {
      const std::size_t u = bfs.front();
      bfs.pop();
      if (u < m_) {
        for (std::size_t c = 0; c < n_; ++c) {
          const std::size_t e = u * n_ + c;
          if (basic_[e] && !seen[m_ + c]) {
            seen[m_ + c] = true;
            via[m_ + c] = e;
            bfs.push(m_ + c);
          }
        }
      } else {
        const std::size_t c = u - m_;
        for (std::size_t r = 0; r < m_; ++r) {
          const std::size_t e = r * n_ + c;
          if (basic_[e] && !seen[r]) {
            seen[r] = true;
            via[r] = e;
            bfs.push(r);
          }
        }
      }
    }
    if (!seen[row]) throw std::logic_error("transport: basis is not spanning");
    // Walk back from the row to the start column, then reverse.
    std::vector<std::size_t> path;
    std::size_t u = row;
    while (u != start) {
      const std::size_t e = via[u];
      path.push_back(e);
      u = u < m_ ? m_ + e % n_ : e / n_;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  Cost cycle_cost(std::size_t entering, const std::vector<std::size_t>& path) const {
    Cost total = cost_[entering];
    for (std::size_t i = 0; i < path.size(); ++i) total += (i % 2 == 0 ? -cost_[path[i]] : cost_[path[i]]);
    return total;
  }

  // Returns true when the pivot moved a positive amount.
  bool pivot_on(std::size_t entering, const std::vector<std::size_t>& path) {
    std::int64_t theta = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 0; i < path.size(); i += 2) theta = std::min(theta, flow_[path[i]]);
    std::size_t leaving = m_ * n_;
    for (std::size_t i = 0; i < path.size(); i += 2) {
      if (flow_[path[i]] == theta) leaving = std::min(leaving, path[i]);
    }
    flow_[entering] += theta;
    for (std::size_t i = 0; i < path.size(); ++i) flow_[path[i]] += (i % 2 == 0 ? -theta : theta);
    basic_[entering] = true;
    basic_[leaving] = false;
    return theta > 0;
  }

  Cost objective() const {
    Cost total = 0;
    for (std::size_t cell = 0; cell < m_ * n_; ++cell) total += static_cast<Cost>(flow_[cell]) * cost_[cell];
    return total;
  }

  std::size_t m_;
  std::size_t n_;
  std::vector<Cost> cost_;
  std::vector<std::int64_t> flow_;
  std::vector<bool> basic_;
  Cost tolerance_ = 0;
};

}  // namespace

double ot_enumerate(std::span<const std::vector<double>> p, std::span<const std::vector<double>> q) {
  check_enumerate_sizes(p.size(), q.size());
  const std::size_t n = p.size();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = squared_distance(p[i], q[j]);
  }
  return enumerate_min<double>(n, cost) / static_cast<double>(n);
}

Rational ot_enumerate(const GridSpec& g, std::span<const MultiIndex> p, std::span<const MultiIndex> q) {
  check_enumerate_sizes(p.size(), q.size());
  const std::size_t n = p.size();
  std::vector<std::int64_t> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!g.in_bounds(p[i]) || !g.in_bounds(q[i])) throw std::out_of_range("ot_enumerate: atom outside grid");
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = squared_index_distance(p[i], q[j]);
  }
  const std::int64_t L = g.L;
  return Rational(enumerate_min<std::int64_t>(n, cost), static_cast<std::int64_t>(n) * L * L);
}

std::int64_t transport_cycle_cancel(std::span<const std::int64_t> supply, std::span<const std::int64_t> demand,
                                    std::span<const std::int64_t> cost) {
  return TransportCycleCanceler<std::int64_t>(supply, demand, cost).solve();
}

double transport_cycle_cancel(std::span<const std::int64_t> supply, std::span<const std::int64_t> demand,
                              std::span<const double> cost) {
  return TransportCycleCanceler<double>(supply, demand, cost).solve();
}

double ot_cycle_cancel(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  if (p.support.size() != p.masses.size() || q.support.size() != q.masses.size()) {
    throw std::invalid_argument("ot_cycle_cancel: support and mass lengths differ");
  }
  if (p.support.size() + q.support.size() > kMaxCycleCancelSupport) {
    throw std::invalid_argument("ot_cycle_cancel: combined support exceeds 40");
  }
  std::vector<double> cost(p.support.size() * q.support.size());
  for (std::size_t i = 0; i < p.support.size(); ++i) {
    for (std::size_t j = 0; j < q.support.size(); ++j) {
      cost[i * q.support.size() + j] = squared_distance(p.support[i], q.support[j]);
    }
  }
  return transport_cycle_cancel(p.masses, q.masses, std::span<const double>(cost)) / static_cast<double>(p.total());
}

Rational ot_cycle_cancel(const GridMeasure& p, const GridMeasure& q) {
  if (!(p.grid == q.grid)) throw std::invalid_argument("ot_cycle_cancel: grid mismatch");
  if (p.support.size() != p.masses.size() || q.support.size() != q.masses.size()) {
    throw std::invalid_argument("ot_cycle_cancel: support and mass lengths differ");
  }
  if (p.support.size() + q.support.size() > kMaxCycleCancelSupport) {
    throw std::invalid_argument("ot_cycle_cancel: combined support exceeds 40");
  }
  std::vector<std::int64_t> cost(p.support.size() * q.support.size());
  for (std::size_t i = 0; i < p.support.size(); ++i) {
    for (std::size_t j = 0; j < q.support.size(); ++j) {
      cost[i * q.support.size() + j] = squared_index_distance(p.support[i], q.support[j]);
    }
  }
  const std::int64_t L = p.grid.L;
  const std::int64_t total = transport_cycle_cancel(p.masses, q.masses, std::span<const std::int64_t>(cost));
  return Rational(total, p.total() * L * L);
}

double ot_1d_sorted(std::vector<double> p, std::vector<double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("ot_1d_sorted: length mismatch");
  if (p.empty()) throw std::invalid_argument("ot_1d_sorted: empty input");
  std::sort(p.begin(), p.end());
  std::sort(q.begin(), q.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += (p[i] - q[i]) * (p[i] - q[i]);
  return acc / static_cast<double>(p.size());
}

}  // namespace gridot
