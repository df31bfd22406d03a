#include "gridot/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gridot {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ceil() of a schedule value; values within 1e-12 relative of an integer are
// treated as that integer so eps = 0.05 gives n = 400, not 401.
std::int64_t schedule_ceil(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-12 * std::max(1.0, std::abs(x))) return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::ceil(x));
}

}  // namespace

void CsrConfig::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("CsrConfig: epsilon must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("CsrConfig: alpha must lie in (0,1]");
  if (d < 1) throw std::invalid_argument("CsrConfig: d must be >= 1");
  if (!(c_n > 0.0) || !(c_L > 0.0)) throw std::invalid_argument("CsrConfig: schedule constants must be positive");
  if (trials < 1) throw std::invalid_argument("CsrConfig: trials must be >= 1");
}

std::int64_t CsrConfig::n() const {
  const double exponent = std::max(2.0, d / 2.0);
  return std::max<std::int64_t>(1, schedule_ceil(c_n * std::pow(epsilon, -exponent)));
}

int CsrConfig::L() const {
  return static_cast<int>(std::max<std::int64_t>(1, schedule_ceil(c_L * std::pow(epsilon, -1.0 / (1.0 + alpha)))));
}

GridOtResult grid_w2sq(const GridHistogram& hp, const GridHistogram& hq, const SolveOptions& options) {
  GridOtResult out;
  auto start = Clock::now();
  const FlowNetwork net = build_partite(hp, hq);
  out.wall_time_build = seconds_since(start);
  start = Clock::now();
  const FlowSolution sol = solve_mcf(net, options);
  out.wall_time_solve = seconds_since(start);
  out.opt_cost = sol.opt_cost;
  out.w2sq = descale(sol.opt_cost, hp.k(), hp.grid().L);
  out.certificate = verify_optimality(net, sol);
  return out;
}

ExperimentRecord csr_estimate(const ProductDensity& p, const ProductDensity& q, const CsrConfig& cfg, int trial,
                              std::optional<double> reference, OptimalityReport* certificate) {
  cfg.validate();
  if (p.dim() != cfg.d || q.dim() != cfg.d) throw std::invalid_argument("csr_estimate: dimension mismatch");

  ExperimentRecord rec;
  rec.epsilon = cfg.epsilon;
  rec.n = cfg.n();
  rec.L = cfg.L();
  rec.seed = cfg.seed;
  rec.trial = trial;

  auto start = Clock::now();
  Rng rng_p = make_rng(cfg.seed, 2 * static_cast<std::uint64_t>(trial));
  Rng rng_q = make_rng(cfg.seed, 2 * static_cast<std::uint64_t>(trial) + 1);
  const PointCloud sp = sample(p, rng_p, static_cast<std::size_t>(rec.n));
  const PointCloud sq = sample(q, rng_q, static_cast<std::size_t>(rec.n));
  rec.wall_time_sample = seconds_since(start);

  const GridSpec grid(cfg.d, rec.L);
  GridOtResult solved;
  try {
    solved = grid_w2sq(sketch_sample(grid, sp), sketch_sample(grid, sq));
  } catch (const std::overflow_error& e) {
    std::ostringstream os;
    os << e.what() << " (n=" << rec.n << ", L=" << rec.L << ")";
    throw std::overflow_error(os.str());
  }
  rec.estimate = solved.w2sq;
  rec.wall_time_build = solved.wall_time_build;
  rec.wall_time_solve = solved.wall_time_solve;
  if (reference) {
    rec.reference = reference;
    rec.abs_error = std::abs(rec.estimate - *reference);
  }
  if (certificate != nullptr) *certificate = solved.certificate;
  return rec;
}

CsrRun csr_run(const ProductDensity& p, const ProductDensity& q, const CsrConfig& cfg,
               std::optional<double> reference) {
  cfg.validate();
  CsrRun run;
  const auto trials = static_cast<std::size_t>(cfg.trials);
  run.records.resize(trials);
  run.certificates.resize(trials);

  std::size_t workers = cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, trials);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(trials);
  auto work = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      try {
        run.records[t] = csr_estimate(p, q, cfg, static_cast<int>(t), reference, &run.certificates[t]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  double sum = 0.0;
  for (const auto& r : run.records) sum += r.estimate;
  run.mean_estimate = sum / static_cast<double>(trials);
  if (reference) {
    double err_sum = 0.0;
    for (const auto& r : run.records) err_sum += *r.abs_error;
    const double mean = err_sum / static_cast<double>(trials);
    double var = 0.0;
    for (const auto& r : run.records) var += (*r.abs_error - mean) * (*r.abs_error - mean);
    run.mean_abs_error = mean;
    run.stderr_abs_error = trials > 1 ? std::sqrt(var / static_cast<double>(trials - 1) / static_cast<double>(trials))
                                      : 0.0;
  }
  return run;
}

double quantization_slack(int d, int L, std::int64_t k) {
  return static_cast<double>(d) * std::pow(static_cast<double>(L), d) / static_cast<double>(k);
}

std::vector<ExperimentRecord> discretization_sweep(const ProductDensity& p, const ProductDensity& q,
                                                   std::span<const int> levels, std::int64_t k_quant) {
  if (p.dim() != q.dim()) throw std::invalid_argument("discretization_sweep: dimension mismatch");
  if (!std::is_sorted(levels.begin(), levels.end())) {
    throw std::invalid_argument("discretization_sweep: levels must be ascending");
  }
  const double reference = ref_w2sq_product(p, q);
  std::vector<ExperimentRecord> out;
  int index = 0;
  for (int L : levels) {
    const GridSpec grid(p.dim(), L);
    auto start = Clock::now();
    const GridHistogram hp = sketch_analytic(grid, p, k_quant);
    const GridHistogram hq = sketch_analytic(grid, q, k_quant);
    const double sketch_time = seconds_since(start);
    const GridOtResult solved = grid_w2sq(hp, hq);
    if (!solved.certificate) {
      throw std::logic_error("discretization_sweep: solver certificate failed: " + solved.certificate.diagnostic);
    }
    ExperimentRecord rec;
    rec.n = k_quant;
    rec.L = L;
    rec.estimate = solved.w2sq;
    rec.reference = reference;
    rec.abs_error = std::abs(solved.w2sq - reference);
    rec.wall_time_build = solved.wall_time_build;
    rec.wall_time_solve = solved.wall_time_solve;
    rec.wall_time_sample = sketch_time;
    rec.trial = index++;
    out.push_back(rec);
  }
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 paired points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::domain_error("loglog_slope: values must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

NonsmoothCheck nonsmooth_bound_details(const ProductDensity& p, const ProductDensity& q, int L,
                                       std::int64_t k_quant) {
  if (p.dim() != q.dim()) throw std::invalid_argument("nonsmooth_bound_check: dimension mismatch");
  const GridSpec grid(p.dim(), L);
  NonsmoothCheck out;
  out.reference_w2sq = ref_w2sq_product(p, q);
  const GridOtResult solved = grid_w2sq(sketch_analytic(grid, p, k_quant), sketch_analytic(grid, q, k_quant));
  out.grid_w2sq = solved.w2sq;
  out.gap = std::abs(std::sqrt(out.grid_w2sq) - std::sqrt(out.reference_w2sq));
  out.bound = 2.0 * std::sqrt(static_cast<double>(p.dim())) * grid.h() +
              std::sqrt(quantization_slack(p.dim(), L, k_quant));
  out.ok = solved.certificate.ok && out.gap <= out.bound;
  return out;
}

bool nonsmooth_bound_check(const ProductDensity& p, const ProductDensity& q, int L, std::int64_t k_quant) {
  return nonsmooth_bound_details(p, q, L, k_quant).ok;
}

GridHistogram random_histogram(const GridSpec& g, std::int64_t k, Rng& rng) {
  if (k < 1) throw std::invalid_argument("random_histogram: k must be >= 1");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(g.cells()), 0);
  const auto cells = static_cast<std::uint64_t>(g.cells());
  for (std::int64_t i = 0; i < k; ++i) {
    const auto cell = static_cast<std::size_t>(uniform_open01(rng) * static_cast<double>(cells));
    ++counts[std::min<std::size_t>(cell, static_cast<std::size_t>(cells - 1))];
  }
  return GridHistogram(g, std::move(counts));
}

BenchTable bench_scaling(int d, std::span<const int> levels, std::int64_t k, std::uint64_t seed) {
  BenchTable table;
  table.d = d;
  table.k = k;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const GridSpec grid(d, levels[i]);
    Rng rng = make_rng(seed, i);
    const GridHistogram hp = random_histogram(grid, k, rng);
    const GridHistogram hq = random_histogram(grid, k, rng);

    BenchRow row;
    row.L = levels[i];
    auto start = Clock::now();
    const FlowNetwork net = build_partite(hp, hq);
    row.wall_time_build = seconds_since(start);
    start = Clock::now();
    const FlowSolution sol = solve_mcf(net);
    row.wall_time_solve = seconds_since(start);
    row.nodes = net.num_nodes();
    row.arcs = static_cast<std::int64_t>(net.arcs().size());
    row.expected_arcs = static_cast<std::int64_t>(d) * grid.cells() * grid.L;
    row.opt_cost = sol.opt_cost;
    row.certified = verify_optimality(net, sol).ok;
    table.rows.push_back(row);
    if (row.wall_time_solve > 0.0) {
      xs.push_back(static_cast<double>(row.L));
      ys.push_back(row.wall_time_solve);
    }
  }
  table.fitted_exponent = xs.size() >= 2 ? loglog_slope(xs, ys) : 0.0;
  return table;
}

std::vector<ProductDensity> distribution_zoo(int d) {
  const std::vector<Factor1D> factors{
      Factor1D::uniform(),
      Factor1D::smooth_sine(0.5, 1),
      Factor1D::smooth_sine(-0.7, 2),
      Factor1D::holder_cusp(0.5, 0.3, 0.5),
      Factor1D::holder_cusp(0.25, -0.6, 0.2),
      Factor1D::holder_cusp(0.75, 0.8, 0.8),
  };
  std::vector<ProductDensity> zoo;
  if (d == 1) {
    for (const auto& f : factors) zoo.emplace_back(std::vector<Factor1D>{f});
    return zoo;
  }
  if (d == 2) {
    const int pairs[][2] = {{0, 0}, {1, 0}, {0, 3}, {3, 2}, {4, 5}, {2, 1}};
    for (const auto& pr : pairs) zoo.emplace_back(std::vector<Factor1D>{factors[pr[0]], factors[pr[1]]});
    return zoo;
  }
  // Higher dimensions: cycle through the factor list.
  for (std::size_t shift = 0; shift < factors.size(); ++shift) {
    std::vector<Factor1D> fs;
    for (int axis = 0; axis < d; ++axis) fs.push_back(factors[(shift + static_cast<std::size_t>(axis)) % factors.size()]);
    zoo.emplace_back(std::move(fs));
  }
  return zoo;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_records_csv(std::ostream& os, std::span<const ExperimentRecord> records, bool include_timings) {
  os << "epsilon,n,L,estimate,reference,abs_error,wall_time_build,wall_time_solve,wall_time_sample,seed,trial\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : records) {
    os << opt(r.epsilon) << ',' << r.n << ',' << r.L << ',' << format_double(r.estimate) << ',' << opt(r.reference)
       << ',' << opt(r.abs_error) << ',';
    if (include_timings) {
      os << format_double(r.wall_time_build) << ',' << format_double(r.wall_time_solve) << ','
         << format_double(r.wall_time_sample);
    } else {
      os << ",,";
    }
    os << ',' << r.seed << ',' << r.trial << '\n';
  }
}

}  // namespace gridot
