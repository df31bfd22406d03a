#include "gridot/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gridot {

GridSpec::GridSpec(int dim, int divisions) : d(dim), L(divisions) {
  if (d < 1) throw std::invalid_argument("GridSpec: dimension must be >= 1");
  if (L < 1) throw std::invalid_argument("GridSpec: L must be >= 1");
  std::int64_t c = 1;
  for (int i = 0; i < d; ++i) {
    if (c > std::numeric_limits<std::int32_t>::max() / L) {
      throw std::invalid_argument("GridSpec: L^d exceeds the supported cell count");
    }
    c *= L;
  }
}

std::int64_t GridSpec::cells() const {
  std::int64_t c = 1;
  for (int i = 0; i < d; ++i) c *= L;
  return c;
}

std::int64_t GridSpec::rank(std::span<const int> idx) const {
  std::int64_t r = 0;
  for (int a : idx) r = r * L + a;
  return r;
}

MultiIndex GridSpec::unrank(std::int64_t r) const {
  MultiIndex idx(static_cast<std::size_t>(d));
  for (int i = d - 1; i >= 0; --i) {
    idx[static_cast<std::size_t>(i)] = static_cast<int>(r % L);
    r /= L;
  }
  return idx;
}

bool GridSpec::in_bounds(std::span<const int> idx) const {
  if (idx.size() != static_cast<std::size_t>(d)) return false;
  return std::all_of(idx.begin(), idx.end(), [this](int a) { return a >= 0 && a < L; });
}

GridHistogram::GridHistogram(GridSpec grid, std::vector<std::int64_t> counts)
    : grid_(grid), counts_(std::move(counts)) {
  if (static_cast<std::int64_t>(counts_.size()) != grid_.cells()) {
    throw std::invalid_argument("GridHistogram: counts size must equal L^d");
  }
  for (auto c : counts_) {
    if (c < 0) throw std::invalid_argument("GridHistogram: negative count");
    k_ += c;
  }
  if (k_ <= 0) throw std::invalid_argument("GridHistogram: total mass k must be positive");
}

std::vector<std::pair<std::int64_t, std::int64_t>> GridHistogram::nonzero() const {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (std::size_t r = 0; r < counts_.size(); ++r) {
    if (counts_[r] != 0) out.emplace_back(static_cast<std::int64_t>(r), counts_[r]);
  }
  return out;
}

MultiIndex cell_index(const GridSpec& g, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(g.d)) throw std::invalid_argument("cell_index: dimension mismatch");
  MultiIndex idx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && x[i] < 1.0)) {
      std::ostringstream os;
      os << "cell_index: coordinate " << x[i] << " outside (0,1)";
      throw std::domain_error(os.str());
    }
    const auto a = static_cast<int>(std::floor(x[i] * g.L));
    idx[i] = std::min(a, g.L - 1);
  }
  return idx;
}

std::vector<double> cell_center(const GridSpec& g, std::span<const int> idx) {
  if (!g.in_bounds(idx)) throw std::out_of_range("cell_center: index out of bounds");
  std::vector<double> c(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    c[i] = static_cast<double>(2 * idx[i] + 1) / static_cast<double>(2 * g.L);
  }
  return c;
}

GridHistogram sketch_sample(const GridSpec& g, const PointCloud& pts) {
  if (pts.dim() != g.d) throw std::invalid_argument("sketch_sample: dimension mismatch");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(g.cells()), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto idx = cell_index(g, pts.point(i));
    ++counts[static_cast<std::size_t>(g.rank(idx))];
  }
  return GridHistogram(g, std::move(counts));
}

std::vector<double> analytic_cell_masses(const GridSpec& g, const ProductDensity& p) {
  if (p.dim() != g.d) throw std::invalid_argument("sketch_analytic: dimension mismatch");
  // Per-axis interval masses, then the tensor product in rank order.
  std::vector<std::vector<double>> axis_mass(static_cast<std::size_t>(g.d));
  for (int axis = 0; axis < g.d; ++axis) {
    auto& m = axis_mass[static_cast<std::size_t>(axis)];
    m.resize(static_cast<std::size_t>(g.L));
    const auto& f = p.factor(axis);
    double prev = 0.0;
    for (int a = 0; a < g.L; ++a) {
      const double next = a + 1 == g.L ? 1.0 : f.cdf(static_cast<double>(a + 1) / g.L);
      m[static_cast<std::size_t>(a)] = next - prev;
      prev = next;
    }
  }
  std::vector<double> masses(static_cast<std::size_t>(g.cells()));
  for (std::int64_t r = 0; r < g.cells(); ++r) {
    const auto idx = g.unrank(r);
    double m = 1.0;
    for (int axis = 0; axis < g.d; ++axis) {
      m *= axis_mass[static_cast<std::size_t>(axis)][static_cast<std::size_t>(idx[static_cast<std::size_t>(axis)])];
    }
    masses[static_cast<std::size_t>(r)] = m;
  }
  return masses;
}

std::vector<std::int64_t> apportion_largest_remainder(std::span<const double> weights, std::int64_t total) {
  if (total < 0) throw std::invalid_argument("apportion: negative total");
  long double sum = 0.0L;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("apportion: weights must be nonnegative");
    sum += w;
  }
  if (!(sum > 0.0L)) throw std::invalid_argument("apportion: weights sum to zero");

  std::vector<std::int64_t> out(weights.size());
  std::vector<long double> remainder(weights.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const long double exact = static_cast<long double>(weights[i]) / sum * static_cast<long double>(total);
    const long double base = std::floor(exact);
    out[i] = static_cast<std::int64_t>(base);
    remainder[i] = exact - base;
    assigned += out[i];
  }
  std::int64_t leftover = total - assigned;
  if (leftover < 0 || leftover > static_cast<std::int64_t>(weights.size())) {
    throw std::logic_error("apportion: rounding leftover out of range");
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::int64_t j = 0; j < leftover; ++j) ++out[order[static_cast<std::size_t>(j)]];
  return out;
}

GridHistogram sketch_analytic(const GridSpec& g, const ProductDensity& p, std::int64_t k_quant) {
  if (k_quant < g.cells()) {
    throw std::invalid_argument("sketch_analytic: k_quant must be at least L^d");
  }
  const auto masses = analytic_cell_masses(g, p);
  return GridHistogram(g, apportion_largest_remainder(masses, k_quant));
}

}  // namespace gridot
