// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gridot/flowgraph.hpp"
#include "gridot/harness.hpp"
#include "gridot/io.hpp"
#include "gridot/mcf.hpp"
#include "gridot/oracle.hpp"

using namespace gridot;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<MultiIndex> expand(const GridMeasure& m) {
  std::vector<MultiIndex> atoms;
  for (std::size_t i = 0; i < m.support.size(); ++i) {
    for (std::int64_t u = 0; u < m.masses[i]; ++u) atoms.push_back(m.support[i]);
  }
  return atoms;
}

// Certificates collected by criteria 1 and 5 for criterion 3.
std::vector<OptimalityReport> g_certificates;
std::size_t g_c1_certificates = 0;
std::size_t g_c5_certificates = 0;

Outcome criterion1() {
  Rng rng = make_rng(8675309, 0);
  const int instances = 240;
  int mismatches = 0;
  int enumerated = 0;
  for (int t = 0; t < instances; ++t) {
    const int d = 1 + t % 3;
    const int L = 2 + (t / 3) % 3;
    const std::int64_t k = 1 + static_cast<std::int64_t>(uniform_open01(rng) * 12);
    const GridSpec g(d, L);
    const auto hp = random_histogram(g, k, rng);
    const auto hq = random_histogram(g, k, rng);
    const auto net = build_partite(hp, hq);
    const auto sol = solve_mcf(net);
    g_certificates.push_back(verify_optimality(net, sol));
    ++g_c1_certificates;
    const Rational flow(sol.opt_cost, k * L * L);
    const auto mp = GridMeasure::from_histogram(hp);
    const auto mq = GridMeasure::from_histogram(hq);
    if (!(flow == ot_cycle_cancel(mp, mq))) {
      ++mismatches;
      std::cerr << "  c1 mismatch vs cycle cancel: instance " << t << " d=" << d << " L=" << L << " k=" << k << "\n";
    }
    if (k <= static_cast<std::int64_t>(kMaxEnumerateAtoms)) {
      ++enumerated;
      if (!(flow == ot_enumerate(g, expand(mp), expand(mq)))) {
        ++mismatches;
        std::cerr << "  c1 mismatch vs enumeration: instance " << t << "\n";
      }
    }
  }
  return {mismatches == 0, std::to_string(instances) + " instances exact vs cycle cancel, " +
                               std::to_string(enumerated) + " also vs enumeration, " + std::to_string(mismatches) +
                               " mismatches"};
}

Outcome criterion2() {
  int failures = 0;
  int pairs = 0;
  for (int d = 1; d <= 3; ++d) {
    for (int L = 1; L <= 8; ++L) {
      const GridSpec g(d, L);
      std::vector<std::int64_t> counts(static_cast<std::size_t>(g.cells()), 0);
      counts[0] = 1;
      const GridHistogram h(g, counts);
      const auto net = build_partite(h, h);
      const auto Ld = static_cast<std::int64_t>(std::pow(L, d));
      if (net.num_nodes() != (d + 1) * Ld || static_cast<std::int64_t>(net.arcs().size()) != d * Ld * L) ++failures;
      if (L > 5) continue;
      for (std::int64_t ra = 0; ra < g.cells(); ++ra) {
        for (std::int64_t rb = 0; rb < g.cells(); ++rb) {
          const auto a = g.unrank(ra);
          const auto b = g.unrank(rb);
          std::int64_t centers = 0;  // squared center distance times 4 L^2
          for (int i = 0; i < d; ++i) {
            const std::int64_t diff = (2 * a[static_cast<std::size_t>(i)] + 1) - (2 * b[static_cast<std::size_t>(i)] + 1);
            centers += diff * diff;
          }
          ++pairs;
          if (4 * path_cost_identity_check(net, a, b) != centers) ++failures;
        }
      }
    }
  }
  return {failures == 0, "24 (d,L) shapes, " + std::to_string(pairs) + " cell pairs, " + std::to_string(failures) +
                             " failures"};
}

Outcome criterion3() {
  std::size_t bad = 0;
  for (const auto& c : g_certificates) {
    if (!c.ok) {
      ++bad;
      std::cerr << "  c3: " << c.diagnostic << "\n";
    }
  }
  const bool complete = g_c1_certificates > 0 && g_c5_certificates > 0;
  return {complete && bad == 0, std::to_string(g_certificates.size() - bad) + "/" +
                                    std::to_string(g_certificates.size()) + " certificates pass (" +
                                    std::to_string(g_c1_certificates) + " from criterion 1, " +
                                    std::to_string(g_c5_certificates) + " from criterion 5)"};
}

Outcome criterion4() {
  const ProductDensity p({Factor1D::holder_cusp(0.5, 0.3, 0.5), Factor1D::uniform()});
  const ProductDensity q({Factor1D::uniform(), Factor1D::holder_cusp(0.5, -0.3, 0.5)});
  const int levels[] = {4, 8, 16, 32, 64};
  const auto recs = discretization_sweep(p, q, levels);
  std::vector<double> h;
  std::vector<double> err;
  std::ostringstream errs;
  for (const auto& r : recs) {
    h.push_back(1.0 / r.L);
    err.push_back(*r.abs_error);
    errs << " L=" << r.L << ":" << fmt(*r.abs_error);
  }
  const double slope = loglog_slope(h, err);
  const double tail = loglog_slope(std::span(h).last(3), std::span(err).last(3));
  return {slope >= 1.25, "slope " + fmt(slope) + " (need >= 1.25; slope over L=16..64 is " + fmt(tail) +
                             "); errors" + errs.str()};
}

CsrConfig c5_config(ProductDensity& p, ProductDensity& q) {
  const auto doc = read_json_file(std::string(GRIDOT_CONFIG_DIR) + "/csr_d2.json");
  CsrConfig cfg;
  cfg.epsilon = doc.at("epsilon").get<double>();
  cfg.alpha = doc.at("alpha").get<double>();
  cfg.c_n = doc.at("c_n").get<double>();
  cfg.c_L = doc.at("c_L").get<double>();
  cfg.seed = doc.at("seed").get<std::uint64_t>();
  cfg.trials = doc.at("trials").get<int>();
  p = density_from_json(doc.at("dist_p"));
  q = density_from_json(doc.at("dist_q"));
  cfg.d = p.dim();
  return cfg;
}

Outcome criterion5() {
  ProductDensity p;
  ProductDensity q;
  const CsrConfig cfg = c5_config(p, q);
  const double ref = ref_w2sq_product(p, q);
  const auto run = csr_run(p, q, cfg, ref);
  g_certificates.insert(g_certificates.end(), run.certificates.begin(), run.certificates.end());
  g_c5_certificates += run.certificates.size();
  const double mae = *run.mean_abs_error;
  return {mae <= cfg.epsilon && cfg.trials == 20 && cfg.d == 2,
          "d=2 eps=" + fmt(cfg.epsilon) + " alpha=" + fmt(cfg.alpha) + " n=" + std::to_string(cfg.n()) +
              " L=" + std::to_string(cfg.L()) + " trials=" + std::to_string(cfg.trials) + ": mean |err| " +
              fmt(mae) + " +/- " + fmt(*run.stderr_abs_error) + " (stderr), reference " + fmt(ref)};
}

Outcome criterion6() {
  int checks = 0;
  int failures = 0;
  double worst = 0.0;
  for (int d = 1; d <= 2; ++d) {
    const auto zoo = distribution_zoo(d);
    for (std::size_t i = 0; i < zoo.size(); ++i) {
      for (std::size_t j = 0; j < zoo.size(); ++j) {
        for (int L : {2, 4, 8}) {
          const auto r = nonsmooth_bound_details(zoo[i], zoo[j], L);
          ++checks;
          worst = std::max(worst, r.gap / r.bound);
          if (!r.ok) {
            ++failures;
            std::cerr << "  c6: d=" << d << " pair " << i << "," << j << " L=" << L << " gap " << r.gap << " bound "
                      << r.bound << "\n";
          }
        }
      }
    }
  }
  return {failures == 0, std::to_string(checks) + " checks, " + std::to_string(failures) +
                             " violations, worst gap/bound " + fmt(worst)};
}

Outcome criterion7() {
  const ProductDensity p({Factor1D::holder_cusp(0.5, 0.3, 0.5)});
  const ProductDensity q({Factor1D::smooth_sine(0.6, 2)});
  const GridSpec g(1, 20);
  int failures = 0;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    Rng rp = make_rng(4242, 2 * static_cast<std::uint64_t>(t));
    Rng rq = make_rng(4242, 2 * static_cast<std::uint64_t>(t) + 1);
    const auto sp = sample(p, rp, 400);
    const auto sq = sample(q, rq, 400);
    const double grid = grid_w2sq(sketch_sample(g, sp), sketch_sample(g, sq)).w2sq;
    const double sorted = ot_1d_sorted(sp.coords(), sq.coords());
    const double gap = std::abs(std::sqrt(grid) - std::sqrt(sorted));
    worst = std::max(worst, gap);
    if (gap > 2.0 * g.h()) ++failures;
  }
  return {failures == 0, "50 trials n=400 L=20: max |sqrt(grid) - sqrt(sorted)| " + fmt(worst) + " vs 2h = " +
                             fmt(2.0 * g.h())};
}

Outcome criterion8() {
  ProductDensity p;
  ProductDensity q;
  const CsrConfig cfg = c5_config(p, q);
  const double ref = ref_w2sq_product(p, q);
  std::ostringstream a;
  std::ostringstream b;
  write_records_csv(a, csr_run(p, q, cfg, ref).records, false);
  write_records_csv(b, csr_run(p, q, cfg, ref).records, false);
  return {a.str() == b.str() && !a.str().empty(),
          "two runs, " + std::to_string(a.str().size()) + " bytes each, identical: " + (a.str() == b.str() ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));
  if (wanted.count(3) != 0) {
    wanted.insert(1);
    wanted.insert(5);
  }
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1}, {2, criterion2}, {5, criterion5}, {3, criterion3},
      {4, criterion4}, {6, criterion6}, {7, criterion7}, {8, criterion8}};
  std::vector<std::pair<int, Outcome>> results;
  for (const auto& [id, fn] : criteria) {
    if (!wanted.empty() && wanted.count(id) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.detail += " [" + fmt(secs) + " s]";
    results.emplace_back(id, o);
  }
  std::sort(results.begin(), results.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  bool all = true;
  for (const auto& [id, o] : results) {
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << "\n";
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
