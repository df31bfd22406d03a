#include "gridot/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gridot {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kQuantileTol = 1e-12;

void require_open_unit(double x, const char* what) {
  if (!(x > 0.0 && x < 1.0)) {
    std::ostringstream os;
    os << what << ": coordinate " << x << " outside (0,1)";
    throw std::domain_error(os.str());
  }
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

// ---------------------------------------------------------------------------
// Factor1D

Factor1D Factor1D::uniform() { return Factor1D{}; }

Factor1D Factor1D::holder_cusp(double alpha, double amplitude, double cusp_at) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("HolderCusp: alpha must lie in (0,1]");
  }
  if (!(amplitude > -1.0 && amplitude < 1.0)) {
    throw std::invalid_argument("HolderCusp: amplitude must lie in (-1,1)");
  }
  if (!(cusp_at > 0.0 && cusp_at < 1.0)) {
    throw std::invalid_argument("HolderCusp: cusp location must lie in (0,1)");
  }
  Factor1D f;
  f.kind_ = Kind::HolderCusp;
  f.alpha_ = alpha;
  f.amplitude_ = amplitude;
  f.cusp_at_ = cusp_at;
  f.cusp_mean_ = (std::pow(cusp_at, alpha + 1.0) + std::pow(1.0 - cusp_at, alpha + 1.0)) / (alpha + 1.0);
  if (!(f.min_density() > 0.0)) {
    throw std::invalid_argument("HolderCusp: density not bounded away from zero");
  }
  return f;
}

Factor1D Factor1D::smooth_sine(double amplitude, int frequency) {
  if (!(amplitude > -1.0 && amplitude < 1.0)) {
    throw std::invalid_argument("SmoothSine: amplitude must lie in (-1,1)");
  }
  if (frequency < 1) {
    throw std::invalid_argument("SmoothSine: frequency must be a positive integer");
  }
  Factor1D f;
  f.kind_ = Kind::SmoothSine;
  f.amplitude_ = amplitude;
  f.frequency_ = frequency;
  return f;
}

double Factor1D::density(double x) const {
  require_open_unit(x, "density");
  switch (kind_) {
    case Kind::Uniform:
      return 1.0;
    case Kind::HolderCusp:
      return 1.0 + amplitude_ * (std::pow(std::abs(x - cusp_at_), alpha_) - cusp_mean_);
    case Kind::SmoothSine:
      return 1.0 + amplitude_ * std::sin(kTwoPi * frequency_ * x);
  }
  return 1.0;
}

double Factor1D::cdf(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "cdf: argument " << t << " outside [0,1]";
    throw std::domain_error(os.str());
  }
  double value = t;
  switch (kind_) {
    case Kind::Uniform:
      return t;
    case Kind::HolderCusp: {
      const double p = alpha_ + 1.0;
      // Integral of |x - x0|^alpha over [0, t], split at the cusp.
      const double left = std::pow(cusp_at_, p);
      const double partial = t <= cusp_at_ ? (left - std::pow(cusp_at_ - t, p)) / p
                                           : (left + std::pow(t - cusp_at_, p)) / p;
      value = t + amplitude_ * (partial - cusp_mean_ * t);
      break;
    }
    case Kind::SmoothSine: {
      const double w = kTwoPi * frequency_;
      value = t + amplitude_ * (1.0 - std::cos(w * t)) / w;
      break;
    }
  }
  return std::clamp(value, 0.0, 1.0);
}

double Factor1D::quantile(double u) const {
  require_open_unit(u, "quantile");
  if (kind_ == Kind::Uniform) return u;

  // Safeguarded Newton: keep a bracket [lo, hi] around the root and fall back
  // to bisection whenever the Newton step leaves it.
  double lo = 0.0;
  double hi = 1.0;
  double x = u;
  for (int iter = 0; iter < 200; ++iter) {
    const double fx = cdf(x) - u;
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= kQuantileTol) {
      return std::clamp(lo + 0.5 * (hi - lo), std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
    }
    const double step = fx / density(x);
    const double next = x - step;
    if (next > lo && next < hi) {
      x = next;
      if (std::abs(step) <= 1e-2 * kQuantileTol) return x;
    } else {
      x = lo + 0.5 * (hi - lo);
    }
  }
  throw NumericError("quantile inversion did not converge for " + describe() + " at u=" +
                     std::to_string(u));
}

double Factor1D::min_density() const {
  switch (kind_) {
    case Kind::Uniform:
      return 1.0;
    case Kind::HolderCusp: {
      const double top = std::pow(std::max(cusp_at_, 1.0 - cusp_at_), alpha_);
      return std::min(1.0 - amplitude_ * cusp_mean_, 1.0 + amplitude_ * (top - cusp_mean_));
    }
    case Kind::SmoothSine:
      return 1.0 - std::abs(amplitude_);
  }
  return 1.0;
}

double Factor1D::max_density() const {
  switch (kind_) {
    case Kind::Uniform:
      return 1.0;
    case Kind::HolderCusp: {
      const double top = std::pow(std::max(cusp_at_, 1.0 - cusp_at_), alpha_);
      return std::max(1.0 - amplitude_ * cusp_mean_, 1.0 + amplitude_ * (top - cusp_mean_));
    }
    case Kind::SmoothSine:
      return 1.0 + std::abs(amplitude_);
  }
  return 1.0;
}

double Factor1D::bound() const { return std::max(max_density(), 1.0 / min_density()); }

double Factor1D::holder_exponent() const { return kind_ == Kind::HolderCusp ? alpha_ : 1.0; }

double Factor1D::holder_seminorm() const {
  switch (kind_) {
    case Kind::Uniform:
      return 0.0;
    case Kind::HolderCusp:
      // |x - x0|^alpha has alpha-Hölder semi-norm exactly 1 for alpha <= 1.
      return std::abs(amplitude_);
    case Kind::SmoothSine:
      return kTwoPi * frequency_ * std::abs(amplitude_);
  }
  return 0.0;
}

std::vector<double> Factor1D::quantile_kinks() const {
  if (kind_ == Kind::HolderCusp && amplitude_ != 0.0) return {cdf(cusp_at_)};
  return {};
}

std::string Factor1D::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Uniform:
      os << "Uniform";
      break;
    case Kind::HolderCusp:
      os << "HolderCusp(alpha=" << alpha_ << ", a=" << amplitude_ << ", x0=" << cusp_at_ << ")";
      break;
    case Kind::SmoothSine:
      os << "SmoothSine(a=" << amplitude_ << ", m=" << frequency_ << ")";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// ProductDensity / PointCloud

ProductDensity::ProductDensity(std::vector<Factor1D> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("ProductDensity: dimension must be >= 1");
}

ProductDensity ProductDensity::uniform(int d) {
  if (d < 1) throw std::invalid_argument("ProductDensity: dimension must be >= 1");
  return ProductDensity(std::vector<Factor1D>(static_cast<std::size_t>(d), Factor1D::uniform()));
}

double ProductDensity::density(std::span<const double> x) const {
  if (x.size() != factors_.size()) throw std::invalid_argument("density: point dimension mismatch");
  double value = 1.0;
  for (std::size_t i = 0; i < factors_.size(); ++i) value *= factors_[i].density(x[i]);
  return value;
}

double ProductDensity::bound() const {
  double c = 1.0;
  for (const auto& f : factors_) c *= f.bound();
  return c;
}

PointCloud::PointCloud(int d, std::vector<double> coords) : d_(d), coords_(std::move(coords)) {
  if (d < 1) throw std::invalid_argument("PointCloud: dimension must be >= 1");
  if (coords_.size() % static_cast<std::size_t>(d) != 0) {
    throw std::invalid_argument("PointCloud: coordinate count not a multiple of d");
  }
  for (double c : coords_) require_open_unit(c, "PointCloud");
}

// ---------------------------------------------------------------------------
// Sampling

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed;
  std::uint64_t mixed = splitmix64(state);
  state = mixed ^ (stream * 0xD1B54A32D192ED03ULL);
  return Rng(splitmix64(state));
}

double uniform_open01(Rng& rng) {
  for (;;) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

PointCloud sample(const ProductDensity& p, Rng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
  const auto d = static_cast<std::size_t>(p.dim());
  std::vector<double> coords(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t axis = 0; axis < d; ++axis) {
      coords[i * d + axis] = p.factors()[axis].quantile(uniform_open01(rng));
    }
  }
  return PointCloud(p.dim(), std::move(coords));
}

// ---------------------------------------------------------------------------
// Quadrature oracle

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

namespace {

constexpr int kPanelOrder = 16;
constexpr std::size_t kMaxQuadNodes = std::size_t{1} << 22;
constexpr double kQuadratureTol = 1e-9;

double composite_quantile_gap(const Factor1D& f, const Factor1D& g, const std::vector<double>& breaks,
                              std::size_t panels_per_piece, const std::vector<double>& gl_x,
                              const std::vector<double>& gl_w) {
  double total = 0.0;
  for (std::size_t piece = 0; piece + 1 < breaks.size(); ++piece) {
    const double a = breaks[piece];
    const double width = (breaks[piece + 1] - a) / static_cast<double>(panels_per_piece);
    for (std::size_t panel = 0; panel < panels_per_piece; ++panel) {
      const double left = a + width * static_cast<double>(panel);
      double acc = 0.0;
      for (std::size_t j = 0; j < gl_x.size(); ++j) {
        const double u = left + 0.5 * width * (gl_x[j] + 1.0);
        const double gap = f.quantile(u) - g.quantile(u);
        acc += gl_w[j] * gap * gap;
      }
      total += 0.5 * width * acc;
    }
  }
  return total;
}

}  // namespace

QuadratureResult ref_w2sq_1d_detailed(const Factor1D& f, const Factor1D& g, std::size_t quad_nodes) {
  if (quad_nodes < 64) throw std::invalid_argument("ref_w2sq_1d: quad_nodes must be >= 64");
  if (f == g) return {0.0, 0.0, 0};

  std::vector<double> breaks{0.0, 1.0};
  for (double k : f.quantile_kinks()) breaks.push_back(k);
  for (double k : g.quantile_kinks()) breaks.push_back(k);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(), [](double a, double b) { return b - a < 1e-15; }),
               breaks.end());
  breaks.back() = 1.0;
  const std::size_t pieces = breaks.size() - 1;

  std::vector<double> gl_x;
  std::vector<double> gl_w;
  gauss_legendre(kPanelOrder, gl_x, gl_w);

  std::size_t panels = std::max<std::size_t>(1, quad_nodes / (kPanelOrder * pieces));
  double previous = composite_quantile_gap(f, g, breaks, panels, gl_x, gl_w);
  for (;;) {
    panels *= 2;
    const std::size_t nodes = panels * pieces * kPanelOrder;
    if (nodes > kMaxQuadNodes) {
      throw NumericError("ref_w2sq_1d: quadrature did not stabilize for " + f.describe() + " vs " +
                         g.describe());
    }
    const double current = composite_quantile_gap(f, g, breaks, panels, gl_x, gl_w);
    const double change = std::abs(current - previous);
    if (change < kQuadratureTol) return {current, change, nodes};
    previous = current;
  }
}

double ref_w2sq_1d(const Factor1D& f, const Factor1D& g, std::size_t quad_nodes) {
  return ref_w2sq_1d_detailed(f, g, quad_nodes).value;
}

double ref_w2sq_product(const ProductDensity& p, const ProductDensity& q, std::size_t quad_nodes) {
  if (p.dim() != q.dim()) throw std::invalid_argument("ref_w2sq_product: dimension mismatch");
  double total = 0.0;
  for (int axis = 0; axis < p.dim(); ++axis) total += ref_w2sq_1d(p.factor(axis), q.factor(axis), quad_nodes);
  return total;
}

}  // namespace gridot
