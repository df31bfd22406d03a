// gridot: command-line front end for the grid W2^2 estimator.
//
//   gridot estimate        --dist-p P.json --dist-q Q.json --epsilon 0.05 --alpha 0.9 [--out run.csv]
//   gridot grid-ot         --hist-p A.json --hist-q B.json [--emit-dimacs net.dimacs]
//   gridot convergence     --dist-p P.json --dist-q Q.json --levels 4,8,16 [--out sweep.csv]
//   gridot nonsmooth-check [--dist-p P.json --dist-q Q.json | --d 2] --levels 2,4,8
//   gridot bench           --d 2 --levels 8,16,32 --k 10000 [--out bench.csv]
//   gridot oracle          --hist-p A.json --hist-q B.json
//   gridot sketch          --dist P.json --L 8 (--n 1000 --seed 1 | --k-quant 100000000) --out A.json

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridot/flowgraph.hpp"
#include "gridot/harness.hpp"
#include "gridot/io.hpp"
#include "gridot/mcf.hpp"
#include "gridot/oracle.hpp"

namespace {

using nlohmann::json;
using namespace gridot;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

struct EstimateArgs {
  std::string config;
  std::string dist_p;
  std::string dist_q;
  double epsilon = 0.1;
  double alpha = 1.0;
  int d = 0;
  double c_n = 1.0;
  double c_L = 1.0;
  std::uint64_t seed = 0;
  int trials = 20;
  int threads = 0;
  bool no_reference = false;
  bool no_timings = false;
  std::string out;
};

int run_estimate(const EstimateArgs& a, const CLI::App& cmd) {
  CsrConfig cfg;
  json dist_p;
  json dist_q;
  if (!a.config.empty()) {
    const json c = read_json_file(a.config);
    cfg.epsilon = c.value("epsilon", cfg.epsilon);
    cfg.alpha = c.value("alpha", cfg.alpha);
    cfg.c_n = c.value("c_n", cfg.c_n);
    cfg.c_L = c.value("c_L", cfg.c_L);
    cfg.seed = c.value("seed", cfg.seed);
    cfg.trials = c.value("trials", cfg.trials);
    if (c.contains("dist_p")) dist_p = c.at("dist_p");
    if (c.contains("dist_q")) dist_q = c.at("dist_q");
  }
  // Explicit flags override the config file.
  if (cmd.count("--epsilon") > 0 || a.config.empty()) cfg.epsilon = a.epsilon;
  if (cmd.count("--alpha") > 0 || a.config.empty()) cfg.alpha = a.alpha;
  if (cmd.count("--c-n") > 0 || a.config.empty()) cfg.c_n = a.c_n;
  if (cmd.count("--c-l") > 0 || a.config.empty()) cfg.c_L = a.c_L;
  if (cmd.count("--seed") > 0 || a.config.empty()) cfg.seed = a.seed;
  if (cmd.count("--trials") > 0 || a.config.empty()) cfg.trials = a.trials;
  if (!a.dist_p.empty()) dist_p = read_json_file(a.dist_p);
  if (!a.dist_q.empty()) dist_q = read_json_file(a.dist_q);
  if (dist_p.is_null() || dist_q.is_null()) throw CLI::ValidationError("estimate", "both --dist-p and --dist-q are required");

  const ProductDensity p = density_from_json(dist_p);
  const ProductDensity q = density_from_json(dist_q);
  cfg.d = a.d > 0 ? a.d : p.dim();
  cfg.threads = a.threads;

  std::optional<double> reference;
  if (!a.no_reference) reference = ref_w2sq_product(p, q);
  const CsrRun run = csr_run(p, q, cfg, reference);
  for (std::size_t t = 0; t < run.certificates.size(); ++t) {
    if (!run.certificates[t].ok) {
      std::cerr << "trial " << t << ": optimality certificate failed: " << run.certificates[t].diagnostic << "\n";
      return 2;
    }
  }

  if (ends_with(a.out, ".csv")) {
    std::ostringstream os;
    write_records_csv(os, run.records, !a.no_timings);
    emit(a.out, os.str());
    std::cerr << "n=" << cfg.n() << " L=" << cfg.L() << " mean_estimate=" << format_double(run.mean_estimate);
    if (run.mean_abs_error) {
      std::cerr << " mean_abs_error=" << format_double(*run.mean_abs_error)
                << " stderr=" << format_double(*run.stderr_abs_error);
    }
    std::cerr << "\n";
    return 0;
  }
  json records = json::array();
  for (const auto& r : run.records) {
    json j = to_json(r);
    if (a.no_timings) {
      j.erase("wall_time_build");
      j.erase("wall_time_solve");
      j.erase("wall_time_sample");
    }
    records.push_back(std::move(j));
  }
  json doc{{"n", cfg.n()},
           {"L", cfg.L()},
           {"epsilon", cfg.epsilon},
           {"alpha", cfg.alpha},
           {"d", cfg.d},
           {"c_n", cfg.c_n},
           {"c_L", cfg.c_L},
           {"seed", cfg.seed},
           {"trials", cfg.trials},
           {"mean_estimate", run.mean_estimate},
           {"mean_abs_error", run.mean_abs_error ? json(*run.mean_abs_error) : json(nullptr)},
           {"stderr_abs_error", run.stderr_abs_error ? json(*run.stderr_abs_error) : json(nullptr)},
           {"records", records}};
  emit(a.out, doc.dump(2) + "\n");
  return 0;
}

int run_grid_ot(const std::string& hist_p, const std::string& hist_q, const std::string& dimacs, bool trace,
                const std::string& out) {
  const GridHistogram hp = histogram_from_json(read_json_file(hist_p));
  const GridHistogram hq = histogram_from_json(read_json_file(hist_q));
  const FlowNetwork net = build_partite(hp, hq);
  if (!dimacs.empty()) {
    std::ofstream os(dimacs);
    if (!os) throw std::runtime_error("cannot write " + dimacs);
    write_dimacs(os, net);
  }
  SolveOptions options;
  if (trace) options.trace = &std::cerr;
  const FlowSolution sol = solve_mcf(net, options);
  const OptimalityReport report = verify_optimality(net, sol);
  const json doc{{"d", hp.grid().d},
                 {"L", hp.grid().L},
                 {"k", hp.k()},
                 {"nodes", net.num_nodes()},
                 {"arcs", net.arcs().size()},
                 {"opt_cost", sol.opt_cost},
                 {"w2sq", descale(sol.opt_cost, hp.k(), hp.grid().L)},
                 {"certified", report.ok},
                 {"phases", sol.phases}};
  emit(out, doc.dump(2) + "\n");
  return report.ok ? 0 : 2;
}

int run_convergence(const std::string& dist_p, const std::string& dist_q, const std::vector<int>& levels,
                    std::int64_t k_quant, bool no_timings, const std::string& out) {
  const ProductDensity p = density_from_json(read_json_file(dist_p));
  const ProductDensity q = density_from_json(read_json_file(dist_q));
  const auto records = discretization_sweep(p, q, levels, k_quant);
  std::ostringstream os;
  write_records_csv(os, records, !no_timings);
  emit(out, os.str());
  std::vector<double> h;
  std::vector<double> err;
  for (const auto& r : records) {
    if (*r.abs_error > 0.0) {
      h.push_back(1.0 / r.L);
      err.push_back(*r.abs_error);
    }
  }
  if (h.size() >= 2) std::cerr << "fitted slope of error vs h: " << format_double(loglog_slope(h, err)) << "\n";
  return 0;
}

int run_nonsmooth(const std::string& dist_p, const std::string& dist_q, int d, const std::vector<int>& levels,
                  std::int64_t k_quant) {
  std::vector<std::pair<ProductDensity, ProductDensity>> pairs;
  if (!dist_p.empty() || !dist_q.empty()) {
    pairs.emplace_back(density_from_json(read_json_file(dist_p)), density_from_json(read_json_file(dist_q)));
  } else {
    const auto zoo = distribution_zoo(d);
    for (const auto& p : zoo) {
      for (const auto& q : zoo) pairs.emplace_back(p, q);
    }
  }
  int failures = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (int L : levels) {
      const auto r = nonsmooth_bound_details(pairs[i].first, pairs[i].second, L, k_quant);
      std::cout << "pair " << i << " L=" << L << " gap=" << format_double(r.gap) << " bound=" << format_double(r.bound)
                << (r.ok ? " ok" : " FAIL") << "\n";
      failures += r.ok ? 0 : 1;
    }
  }
  std::cout << (failures == 0 ? "all bounds hold" : std::to_string(failures) + " violations") << "\n";
  return failures == 0 ? 0 : 1;
}

int run_bench(int d, const std::vector<int>& levels, std::int64_t k, std::uint64_t seed, const std::string& out) {
  const BenchTable table = bench_scaling(d, levels, k, seed);
  std::ostringstream os;
  os << "d,L,k,nodes,arcs,expected_arcs,wall_time_build,wall_time_solve,opt_cost,certified\n";
  for (const auto& r : table.rows) {
    os << d << ',' << r.L << ',' << k << ',' << r.nodes << ',' << r.arcs << ',' << r.expected_arcs << ','
       << format_double(r.wall_time_build) << ',' << format_double(r.wall_time_solve) << ',' << r.opt_cost << ','
       << (r.certified ? 1 : 0) << '\n';
  }
  os << "# fitted_exponent," << format_double(table.fitted_exponent) << "\n";
  emit(out, os.str());
  return 0;
}

int run_oracle(const std::string& hist_p, const std::string& hist_q) {
  const GridHistogram hp = histogram_from_json(read_json_file(hist_p));
  const GridHistogram hq = histogram_from_json(read_json_file(hist_q));
  const GridMeasure mp = GridMeasure::from_histogram(hp);
  const GridMeasure mq = GridMeasure::from_histogram(hq);
  const Rational cycle = ot_cycle_cancel(mp, mq);
  const GridOtResult pipeline = grid_w2sq(hp, hq);
  const std::int64_t L = hp.grid().L;
  const Rational flow(pipeline.opt_cost, hp.k() * L * L);
  json doc{{"cycle_cancel", {{"num", cycle.num()}, {"den", cycle.den()}, {"value", cycle.to_double()}}},
           {"pipeline", {{"num", flow.num()}, {"den", flow.den()}, {"value", flow.to_double()}}},
           {"agree", cycle == flow}};
  if (static_cast<std::size_t>(hp.k()) <= kMaxEnumerateAtoms) {
    std::vector<MultiIndex> ap;
    std::vector<MultiIndex> aq;
    for (std::size_t i = 0; i < mp.support.size(); ++i) ap.insert(ap.end(), static_cast<std::size_t>(mp.masses[i]), mp.support[i]);
    for (std::size_t i = 0; i < mq.support.size(); ++i) aq.insert(aq.end(), static_cast<std::size_t>(mq.masses[i]), mq.support[i]);
    const Rational brute = ot_enumerate(hp.grid(), ap, aq);
    doc["enumerate"] = {{"num", brute.num()}, {"den", brute.den()}, {"value", brute.to_double()}};
    doc["agree"] = doc["agree"].get<bool>() && brute == flow;
  }
  std::cout << doc.dump(2) << "\n";
  return doc["agree"].get<bool>() ? 0 : 1;
}

int run_sketch(const std::string& dist, int L, std::int64_t n, std::uint64_t seed, std::int64_t k_quant,
               const std::string& out) {
  const ProductDensity p = density_from_json(read_json_file(dist));
  const GridSpec grid(p.dim(), L);
  GridHistogram h;
  if (k_quant > 0) {
    h = sketch_analytic(grid, p, k_quant);
  } else {
    Rng rng = make_rng(seed, 0);
    h = sketch_sample(grid, sample(p, rng, static_cast<std::size_t>(n)));
  }
  emit(out, to_json(h).dump() + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid-sketched exact W2^2 estimation"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "sample, sketch and solve; emits per-trial records");
  estimate->add_option("--config", est.config, "JSON run config (epsilon, alpha, c_n, c_L, seed, trials, dist_p, dist_q)");
  estimate->add_option("--dist-p", est.dist_p, "distribution JSON for P");
  estimate->add_option("--dist-q", est.dist_q, "distribution JSON for Q");
  estimate->add_option("--epsilon", est.epsilon, "target additive error")->check(CLI::PositiveNumber);
  estimate->add_option("--alpha", est.alpha, "assumed Hölder exponent in (0,1]");
  estimate->add_option("--d", est.d, "dimension (defaults to the distribution's)");
  estimate->add_option("--c-n", est.c_n, "sample-count constant");
  estimate->add_option("--c-l", est.c_L, "grid-resolution constant");
  estimate->add_option("--seed", est.seed, "base seed");
  estimate->add_option("--trials", est.trials, "independent trials");
  estimate->add_option("--threads", est.threads, "worker threads (0 = hardware)");
  estimate->add_flag("--no-reference", est.no_reference, "skip the product-measure reference");
  estimate->add_flag("--no-timings", est.no_timings, "leave timing fields empty (byte-reproducible output)");
  estimate->add_option("--out", est.out, "output path (.csv for CSV, otherwise JSON); default stdout");

  std::string hist_p;
  std::string hist_q;
  std::string dimacs;
  std::string out;
  bool trace = false;
  auto* grid_ot = app.add_subcommand("grid-ot", "exact W2^2 between two histogram files");
  grid_ot->add_option("--hist-p", hist_p, "histogram JSON for P")->required();
  grid_ot->add_option("--hist-q", hist_q, "histogram JSON for Q")->required();
  grid_ot->add_option("--emit-dimacs", dimacs, "write the flow instance in DIMACS format");
  grid_ot->add_flag("--trace", trace, "per-phase solver trace on stderr");
  grid_ot->add_option("--out", out, "output JSON path; default stdout");

  std::string dist_p;
  std::string dist_q;
  std::vector<int> levels{4, 8, 16, 32};
  std::int64_t k_quant = 100'000'000;
  bool no_timings = false;
  auto* convergence = app.add_subcommand("convergence", "discretization error sweep over grid levels");
  convergence->add_option("--dist-p", dist_p)->required();
  convergence->add_option("--dist-q", dist_q)->required();
  convergence->add_option("--levels", levels, "ascending L values")->delimiter(',');
  convergence->add_option("--k-quant", k_quant, "integer mass resolution for analytic sketches");
  convergence->add_flag("--no-timings", no_timings);
  convergence->add_option("--out", out, "CSV path; default stdout");

  int d = 2;
  std::vector<int> ns_levels{2, 4, 8};
  auto* nonsmooth = app.add_subcommand("nonsmooth-check", "check |W2(grid) - W2| <= 2 sqrt(d) h");
  nonsmooth->add_option("--dist-p", dist_p);
  nonsmooth->add_option("--dist-q", dist_q);
  nonsmooth->add_option("--d", d, "zoo dimension when no distributions are given");
  nonsmooth->add_option("--levels", ns_levels)->delimiter(',');
  nonsmooth->add_option("--k-quant", k_quant);

  std::vector<int> bench_levels{8, 16, 32};
  std::int64_t bench_k = 10000;
  std::uint64_t seed = 0;
  auto* bench = app.add_subcommand("bench", "solver timing on random histograms");
  bench->add_option("--d", d);
  bench->add_option("--levels", bench_levels)->delimiter(',');
  bench->add_option("--k", bench_k, "total mass per histogram");
  bench->add_option("--seed", seed);
  bench->add_option("--out", out, "CSV path; default stdout");

  auto* oracle = app.add_subcommand("oracle", "cross-check the pipeline against the reference solvers");
  oracle->add_option("--hist-p", hist_p)->required();
  oracle->add_option("--hist-q", hist_q)->required();

  std::string dist;
  int L = 8;
  std::int64_t n = 1000;
  std::int64_t sketch_k = 0;
  auto* sketch = app.add_subcommand("sketch", "write a histogram file from a distribution");
  sketch->add_option("--dist", dist)->required();
  sketch->add_option("--L", L)->required();
  sketch->add_option("--n", n, "sample size (sampled sketch)");
  sketch->add_option("--seed", seed);
  sketch->add_option("--k-quant", sketch_k, "analytic sketch with this total instead of sampling");
  sketch->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*estimate) return run_estimate(est, *estimate);
    if (*grid_ot) return run_grid_ot(hist_p, hist_q, dimacs, trace, out);
    if (*convergence) return run_convergence(dist_p, dist_q, levels, k_quant, no_timings, out);
    if (*nonsmooth) return run_nonsmooth(dist_p, dist_q, d, ns_levels, k_quant);
    if (*bench) return run_bench(d, bench_levels, bench_k, seed, out);
    if (*oracle) return run_oracle(hist_p, hist_q);
    if (*sketch) return run_sketch(dist, L, n, seed, sketch_k, out);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
