#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridot/flowgraph.hpp"
#include "gridot/mcf.hpp"
#include "gridot/measures.hpp"
#include "gridot/sketch.hpp"

namespace gridot {

/// Parameter schedule of the sample-sketch-solve estimator:
///   n = ceil(c_n * eps^-max(2, d/2)),  L = ceil(c_L * eps^(-1/(1+alpha))).
struct CsrConfig {
  double epsilon = 0.1;
  double alpha = 1.0;
  int d = 1;
  double c_n = 1.0;
  double c_L = 1.0;
  std::uint64_t seed = 0;
  int trials = 20;
  // Worker threads for independent trials; 0 picks the hardware concurrency.
  int threads = 0;

  void validate() const;
  std::int64_t n() const;
  int L() const;
};

struct ExperimentRecord {
  std::optional<double> epsilon;
  std::int64_t n = 0;
  int L = 0;
  double estimate = 0.0;
  std::optional<double> reference;
  std::optional<double> abs_error;
  double wall_time_build = 0.0;
  double wall_time_solve = 0.0;
  double wall_time_sample = 0.0;
  std::uint64_t seed = 0;
  int trial = 0;
};

/// Exact W2^2 between two grid histograms with the solver's certificate.
struct GridOtResult {
  double w2sq = 0.0;
  std::int64_t opt_cost = 0;  // k L^2 W2^2
  OptimalityReport certificate;
  double wall_time_build = 0.0;
  double wall_time_solve = 0.0;
};

GridOtResult grid_w2sq(const GridHistogram& hp, const GridHistogram& hq, const SolveOptions& options = {});

/// One CSR trial: sample n points from each measure, sketch onto the L-grid,
/// solve exactly. The trial's generators are derived from (cfg.seed, trial).
ExperimentRecord csr_estimate(const ProductDensity& p, const ProductDensity& q, const CsrConfig& cfg, int trial = 0,
                              std::optional<double> reference = std::nullopt,
                              OptimalityReport* certificate = nullptr);

struct CsrRun {
  std::vector<ExperimentRecord> records;  // ordered by trial id
  std::vector<OptimalityReport> certificates;
  double mean_estimate = 0.0;
  std::optional<double> mean_abs_error;
  std::optional<double> stderr_abs_error;
};

/// cfg.trials independent trials, run concurrently, summarized by trial means.
CsrRun csr_run(const ProductDensity& p, const ProductDensity& q, const CsrConfig& cfg,
               std::optional<double> reference = std::nullopt);

/// d * L^d / k: bound on the W2^2 perturbation from rounding cell masses to multiples of 1/k.
double quantization_slack(int d, int L, std::int64_t k);

/// Analytic sketches at each L, solved exactly and compared with the product reference.
/// Records carry n = k_quant and no epsilon.
std::vector<ExperimentRecord> discretization_sweep(const ProductDensity& p, const ProductDensity& q,
                                                   std::span<const int> levels,
                                                   std::int64_t k_quant = 100'000'000);

/// Least-squares slope of log(y) on log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct NonsmoothCheck {
  bool ok = false;
  double gap = 0.0;    // |W2(grid) - W2(reference)|
  double bound = 0.0;  // 2 sqrt(d) h + sqrt(quantization slack)
  double grid_w2sq = 0.0;
  double reference_w2sq = 0.0;
};

NonsmoothCheck nonsmooth_bound_details(const ProductDensity& p, const ProductDensity& q, int L,
                                       std::int64_t k_quant = 100'000'000);
bool nonsmooth_bound_check(const ProductDensity& p, const ProductDensity& q, int L,
                           std::int64_t k_quant = 100'000'000);

struct BenchRow {
  int L = 0;
  std::int64_t nodes = 0;
  std::int64_t arcs = 0;
  std::int64_t expected_arcs = 0;
  double wall_time_build = 0.0;
  double wall_time_solve = 0.0;
  std::int64_t opt_cost = 0;
  bool certified = false;
};

struct BenchTable {
  int d = 0;
  std::int64_t k = 0;
  std::vector<BenchRow> rows;
  double fitted_exponent = 0.0;  // slope of log solve time on log L
};

/// Random multinomial histograms of total k on each grid, solved and timed.
BenchTable bench_scaling(int d, std::span<const int> levels, std::int64_t k, std::uint64_t seed);

/// Uniform-over-cells multinomial histogram with k units.
GridHistogram random_histogram(const GridSpec& g, std::int64_t k, Rng& rng);

/// Fixed family of product densities used for universal bound checks.
std::vector<ProductDensity> distribution_zoo(int d);

/// CSV with header
/// epsilon,n,L,estimate,reference,abs_error,wall_time_build,wall_time_solve,wall_time_sample,seed,trial.
/// With include_timings=false the three timing fields are left empty so the
/// output is byte-reproducible.
void write_records_csv(std::ostream& os, std::span<const ExperimentRecord> records, bool include_timings = true);

std::string format_double(double v);

}  // namespace gridot
