#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "gridot/sketch.hpp"

namespace gridot {

/// Reduced fraction of 64-bit integers, denominator > 0.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.num_ << "/" << r.den_; }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Weighted atoms with integer masses; the normalizing denominator is the total.
struct DiscreteMeasure {
  int d = 1;
  std::vector<std::vector<double>> support;
  std::vector<std::int64_t> masses;

  std::int64_t total() const;
};

/// Weighted atoms at grid cell centers; costs are exact integers in units of 1/L^2.
struct GridMeasure {
  GridSpec grid;
  std::vector<MultiIndex> support;
  std::vector<std::int64_t> masses;

  static GridMeasure from_histogram(const GridHistogram& h);
  std::int64_t total() const;
};

/// Maximum number of atoms ot_enumerate accepts per side.
constexpr std::size_t kMaxEnumerateAtoms = 8;
/// Maximum combined support size ot_cycle_cancel accepts.
constexpr std::size_t kMaxCycleCancelSupport = 40;

/// Brute force over all n! matchings of unit atoms: (1/n) min sum |p_i - q_s(i)|^2.
double ot_enumerate(std::span<const std::vector<double>> p, std::span<const std::vector<double>> q);
/// Same on grid-aligned atoms, exact.
Rational ot_enumerate(const GridSpec& g, std::span<const MultiIndex> p, std::span<const MultiIndex> q);

/// Minimum of sum_ij cost(i,j) x_ij over integer transportation plans, found by
/// cycle canceling from the northwest-corner basis.
std::int64_t transport_cycle_cancel(std::span<const std::int64_t> supply, std::span<const std::int64_t> demand,
                                    std::span<const std::int64_t> cost);
double transport_cycle_cancel(std::span<const std::int64_t> supply, std::span<const std::int64_t> demand,
                              std::span<const double> cost);

double ot_cycle_cancel(const DiscreteMeasure& p, const DiscreteMeasure& q);
Rational ot_cycle_cancel(const GridMeasure& p, const GridMeasure& q);

/// Folklore 1D estimator: mean squared gap between order statistics.
double ot_1d_sorted(std::vector<double> p, std::vector<double> q);

}  // namespace gridot
