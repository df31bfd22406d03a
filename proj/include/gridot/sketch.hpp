#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gridot/measures.hpp"

namespace gridot {

using MultiIndex = std::vector<int>;

/// Regular grid on (0,1)^d with L cells per axis (edge h = 1/L).
/// All index arithmetic is integral; h is only used for geometry.
struct GridSpec {
  int d = 1;
  int L = 1;

  GridSpec() = default;
  GridSpec(int dim, int divisions);

  double h() const { return 1.0 / static_cast<double>(L); }
  std::int64_t cells() const;

  /// Lexicographic rank of a multi-index, first coordinate most significant.
  std::int64_t rank(std::span<const int> idx) const;
  MultiIndex unrank(std::int64_t r) const;
  bool in_bounds(std::span<const int> idx) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Integer-count histogram on a GridSpec; masses are counts / k.
class GridHistogram {
 public:
  GridHistogram() = default;
  /// Dense counts indexed by GridSpec::rank. k is derived as the sum.
  GridHistogram(GridSpec grid, std::vector<std::int64_t> counts);

  const GridSpec& grid() const { return grid_; }
  std::int64_t k() const { return k_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  std::int64_t count(std::span<const int> idx) const { return counts_[static_cast<std::size_t>(grid_.rank(idx))]; }

  /// (rank, count) pairs for nonzero cells, ascending rank.
  std::vector<std::pair<std::int64_t, std::int64_t>> nonzero() const;

  friend bool operator==(const GridHistogram&, const GridHistogram&) = default;

 private:
  GridSpec grid_;
  std::vector<std::int64_t> counts_;
  std::int64_t k_ = 0;
};

/// Cell containing x; cells are half-open [a/L, (a+1)/L) with the last one closed.
MultiIndex cell_index(const GridSpec& g, std::span<const double> x);

/// Center ((2a+1)/(2L), ...) of a cell.
std::vector<double> cell_center(const GridSpec& g, std::span<const int> idx);

/// Empirical pushforward: one unit of mass per point, k = n.
GridHistogram sketch_sample(const GridSpec& g, const PointCloud& pts);

/// Exact cell masses of a product density apportioned to integer counts
/// summing to k_quant by largest remainder.
GridHistogram sketch_analytic(const GridSpec& g, const ProductDensity& p, std::int64_t k_quant = 100'000'000);

/// Exact cell masses (product of per-axis CDF differences), indexed by rank.
std::vector<double> analytic_cell_masses(const GridSpec& g, const ProductDensity& p);

/// Largest-remainder apportionment of nonnegative weights to integers summing
/// to total. Ties among equal remainders go to the lower position.
std::vector<std::int64_t> apportion_largest_remainder(std::span<const double> weights, std::int64_t total);

}  // namespace gridot
