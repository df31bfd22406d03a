#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridot {

/// Raised when a root or quadrature loop fails to converge. The message
/// carries the parameters of the offending factor.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One-dimensional density on (0,1) with closed-form CDF.
///
/// Three families are supported:
///   Uniform                 f(x) = 1
///   HolderCusp(alpha,a,x0)  f(x) = 1 + a * (|x - x0|^alpha - Z), Z = mean of |x - x0|^alpha
///   SmoothSine(a,m)         f(x) = 1 + a * sin(2 pi m x)
///
/// The cusp family is exactly alpha-Hölder with semi-norm |a|; the sine family
/// is Lipschitz. All densities are bounded in [1/C, C] for the C reported by
/// bound().
class Factor1D {
 public:
  enum class Kind { Uniform, HolderCusp, SmoothSine };

  Factor1D() = default;

  static Factor1D uniform();
  static Factor1D holder_cusp(double alpha, double amplitude, double cusp_at);
  static Factor1D smooth_sine(double amplitude, int frequency);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double amplitude() const { return amplitude_; }
  double cusp_at() const { return cusp_at_; }
  int frequency() const { return frequency_; }

  /// Density at x in (0,1). Throws std::domain_error outside the open interval.
  double density(double x) const;
  /// Exact antiderivative of density() from 0 to t, t in [0,1].
  double cdf(double t) const;
  /// Inverse of cdf() at u in (0,1), accurate to 1e-12 in x.
  double quantile(double u) const;

  double min_density() const;
  double max_density() const;
  /// Smallest C >= 1 with 1/C <= f <= C.
  double bound() const;
  /// Hölder exponent realized by this family (1 for Lipschitz/uniform).
  double holder_exponent() const;
  /// Hölder semi-norm for holder_exponent(); for SmoothSine the Lipschitz constant.
  double holder_seminorm() const;

  /// Points where the quantile function is not smooth (cusp image under the CDF).
  std::vector<double> quantile_kinks() const;

  std::string describe() const;

  friend bool operator==(const Factor1D&, const Factor1D&) = default;

 private:
  Kind kind_ = Kind::Uniform;
  double alpha_ = 1.0;
  double amplitude_ = 0.0;
  double cusp_at_ = 0.5;
  int frequency_ = 1;
  // Normalizer of the cusp term: integral of |x - x0|^alpha over (0,1).
  double cusp_mean_ = 0.0;
};

/// Product density on (0,1)^d.
class ProductDensity {
 public:
  ProductDensity() = default;
  explicit ProductDensity(std::vector<Factor1D> factors);

  static ProductDensity uniform(int d);

  int dim() const { return static_cast<int>(factors_.size()); }
  const std::vector<Factor1D>& factors() const { return factors_; }
  const Factor1D& factor(int axis) const { return factors_.at(static_cast<std::size_t>(axis)); }

  double density(std::span<const double> x) const;
  double bound() const;

  friend bool operator==(const ProductDensity&, const ProductDensity&) = default;

 private:
  std::vector<Factor1D> factors_;
};

/// n points in (0,1)^d stored row-major.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(int d, std::vector<double> coords);

  int dim() const { return d_; }
  std::size_t size() const { return d_ == 0 ? 0 : coords_.size() / static_cast<std::size_t>(d_); }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  const std::vector<double>& coords() const { return coords_; }

 private:
  int d_ = 0;
  std::vector<double> coords_;
};

using Rng = std::mt19937_64;

/// Derives an independent generator for stream `stream` of a base seed.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// Uniform double in the open interval (0,1) with 53 random bits.
double uniform_open01(Rng& rng);

/// Draws n i.i.d. points by per-axis inverse-CDF sampling.
PointCloud sample(const ProductDensity& p, Rng& rng, std::size_t n);

struct QuadratureResult {
  double value = 0.0;
  // |value(N) - value(N/2)| at acceptance.
  double last_change = 0.0;
  std::size_t nodes = 0;
};

/// W2^2 between two 1D factors via the quantile identity, integrated by
/// composite Gauss-Legendre with node doubling until successive estimates
/// agree to 1e-9.
QuadratureResult ref_w2sq_1d_detailed(const Factor1D& f, const Factor1D& g, std::size_t quad_nodes = 64);
double ref_w2sq_1d(const Factor1D& f, const Factor1D& g, std::size_t quad_nodes = 64);

/// Sum of per-axis 1D W2^2 values; exact for product measures.
double ref_w2sq_product(const ProductDensity& p, const ProductDensity& q, std::size_t quad_nodes = 64);

/// Gauss-Legendre nodes and weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace gridot
