#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gridot/flowgraph.hpp"
#include "gridot/harness.hpp"
#include "gridot/io.hpp"
#include "gridot/mcf.hpp"
#include "gridot/oracle.hpp"

namespace py = pybind11;
using namespace gridot;

namespace {

py::dict record_dict(const ExperimentRecord& r) {
  py::dict d;
  d["epsilon"] = r.epsilon ? py::cast(*r.epsilon) : py::none();
  d["n"] = r.n;
  d["L"] = r.L;
  d["estimate"] = r.estimate;
  d["reference"] = r.reference ? py::cast(*r.reference) : py::none();
  d["abs_error"] = r.abs_error ? py::cast(*r.abs_error) : py::none();
  d["wall_time_build"] = r.wall_time_build;
  d["wall_time_solve"] = r.wall_time_solve;
  d["wall_time_sample"] = r.wall_time_sample;
  d["seed"] = r.seed;
  d["trial"] = r.trial;
  return d;
}

py::list records_list(const std::vector<ExperimentRecord>& records) {
  py::list out;
  for (const auto& r : records) out.append(record_dict(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_gridot, m) {
  m.doc() = "Grid-sketched exact W2^2 estimation";

  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<Factor1D>(m, "Factor1D")
      .def_static("uniform", &Factor1D::uniform)
      .def_static("holder_cusp", &Factor1D::holder_cusp, py::arg("alpha"), py::arg("a"), py::arg("x0") = 0.5)
      .def_static("smooth_sine", &Factor1D::smooth_sine, py::arg("a"), py::arg("m") = 1)
      .def("density", &Factor1D::density)
      .def("cdf", &Factor1D::cdf)
      .def("quantile", &Factor1D::quantile)
      .def("bound", &Factor1D::bound)
      .def("holder_exponent", &Factor1D::holder_exponent)
      .def("holder_seminorm", &Factor1D::holder_seminorm)
      .def(py::self == py::self)
      .def("__repr__", [](const Factor1D& f) { return to_json(f).dump(); });

  py::class_<ProductDensity>(m, "ProductDensity")
      .def(py::init<std::vector<Factor1D>>())
      .def_static("uniform", &ProductDensity::uniform)
      .def_static("from_json", [](const std::string& s) { return density_from_json(nlohmann::json::parse(s)); })
      .def("to_json", [](const ProductDensity& p) { return to_json(p).dump(); })
      .def_property_readonly("dim", &ProductDensity::dim)
      .def("density", [](const ProductDensity& p, const std::vector<double>& x) { return p.density(x); })
      .def("bound", &ProductDensity::bound)
      .def("sample",
           [](const ProductDensity& p, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
             Rng rng = make_rng(seed, stream);
             const PointCloud pts = sample(p, rng, n);
             std::vector<std::vector<double>> rows;
             for (std::size_t i = 0; i < pts.size(); ++i) {
               const auto row = pts.point(i);
               rows.emplace_back(row.begin(), row.end());
             }
             return rows;
           },
           py::arg("n"), py::arg("seed") = 0, py::arg("stream") = 0);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<int, int>(), py::arg("d"), py::arg("L"))
      .def_readonly("d", &GridSpec::d)
      .def_readonly("L", &GridSpec::L)
      .def_property_readonly("h", &GridSpec::h)
      .def("cells", &GridSpec::cells)
      .def("rank", [](const GridSpec& g, const MultiIndex& idx) { return g.rank(idx); })
      .def("unrank", &GridSpec::unrank);

  py::class_<GridHistogram>(m, "GridHistogram")
      .def(py::init<GridSpec, std::vector<std::int64_t>>())
      .def_static("from_json", [](const std::string& s) { return histogram_from_json(nlohmann::json::parse(s)); })
      .def("to_json", [](const GridHistogram& h) { return to_json(h).dump(); })
      .def_property_readonly("grid", &GridHistogram::grid)
      .def_property_readonly("k", &GridHistogram::k)
      .def_property_readonly("counts", &GridHistogram::counts)
      .def(py::self == py::self);

  m.def("sketch_points",
        [](const GridSpec& g, const std::vector<std::vector<double>>& points) {
          std::vector<double> flat;
          for (const auto& p : points) {
            if (static_cast<int>(p.size()) != g.d) throw std::invalid_argument("point dimension does not match grid");
            flat.insert(flat.end(), p.begin(), p.end());
          }
          return sketch_sample(g, PointCloud(g.d, std::move(flat)));
        });
  m.def("sketch_analytic", &sketch_analytic, py::arg("grid"), py::arg("p"), py::arg("k_quant") = 100'000'000);

  m.def(
      "grid_w2sq",
      [](const GridHistogram& hp, const GridHistogram& hq) {
        const GridOtResult r = grid_w2sq(hp, hq);
        py::dict d;
        d["w2sq"] = r.w2sq;
        d["opt_cost"] = r.opt_cost;
        d["certified"] = r.certificate.ok;
        d["wall_time_build"] = r.wall_time_build;
        d["wall_time_solve"] = r.wall_time_solve;
        return d;
      },
      "Exact W2^2 between two histograms of equal total.");
  m.def("to_dimacs", [](const GridHistogram& hp, const GridHistogram& hq) {
    std::ostringstream os;
    write_dimacs(os, build_partite(hp, hq));
    return os.str();
  });
  m.def("cycle_cancel_w2sq", [](const GridHistogram& hp, const GridHistogram& hq) {
    const Rational r = ot_cycle_cancel(GridMeasure::from_histogram(hp), GridMeasure::from_histogram(hq));
    return py::make_tuple(r.num(), r.den());
  });
  m.def("sorted_w2sq_1d", &ot_1d_sorted);

  m.def("ref_w2sq_1d", &ref_w2sq_1d, py::arg("f"), py::arg("g"), py::arg("quad_nodes") = 64);
  m.def("ref_w2sq_product", &ref_w2sq_product, py::arg("p"), py::arg("q"), py::arg("quad_nodes") = 64);

  py::class_<CsrConfig>(m, "CsrConfig")
      .def(py::init<>())
      .def_readwrite("epsilon", &CsrConfig::epsilon)
      .def_readwrite("alpha", &CsrConfig::alpha)
      .def_readwrite("d", &CsrConfig::d)
      .def_readwrite("c_n", &CsrConfig::c_n)
      .def_readwrite("c_L", &CsrConfig::c_L)
      .def_readwrite("seed", &CsrConfig::seed)
      .def_readwrite("trials", &CsrConfig::trials)
      .def_readwrite("threads", &CsrConfig::threads)
      .def_property_readonly("n", &CsrConfig::n)
      .def_property_readonly("L", &CsrConfig::L);

  m.def(
      "csr_run",
      [](const ProductDensity& p, const ProductDensity& q, const CsrConfig& cfg, std::optional<double> reference) {
        CsrRun run;
        {
          py::gil_scoped_release release;
          run = csr_run(p, q, cfg, reference);
        }
        py::dict d;
        d["records"] = records_list(run.records);
        bool certified = true;
        for (const auto& c : run.certificates) certified = certified && c.ok;
        d["certified"] = certified;
        d["mean_estimate"] = run.mean_estimate;
        d["mean_abs_error"] = run.mean_abs_error ? py::cast(*run.mean_abs_error) : py::none();
        d["stderr_abs_error"] = run.stderr_abs_error ? py::cast(*run.stderr_abs_error) : py::none();
        return d;
      },
      py::arg("p"), py::arg("q"), py::arg("cfg"), py::arg("reference") = py::none());
  m.def(
      "discretization_sweep",
      [](const ProductDensity& p, const ProductDensity& q, const std::vector<int>& levels, std::int64_t k_quant) {
        return records_list(discretization_sweep(p, q, levels, k_quant));
      },
      py::arg("p"), py::arg("q"), py::arg("levels"), py::arg("k_quant") = 100'000'000);
  m.def("nonsmooth_bound_check", &nonsmooth_bound_check, py::arg("p"), py::arg("q"), py::arg("L"),
        py::arg("k_quant") = 100'000'000);
  m.def("loglog_slope", [](const std::vector<double>& x, const std::vector<double>& y) { return loglog_slope(x, y); });
  m.def("distribution_zoo", &distribution_zoo);
  m.def("records_csv", [](const py::list& records, bool include_timings) {
    std::vector<ExperimentRecord> recs;
    for (const auto& item : records) {
      const auto d = item.cast<py::dict>();
      ExperimentRecord r;
      if (!d["epsilon"].is_none()) r.epsilon = d["epsilon"].cast<double>();
      r.n = d["n"].cast<std::int64_t>();
      r.L = d["L"].cast<int>();
      r.estimate = d["estimate"].cast<double>();
      if (!d["reference"].is_none()) r.reference = d["reference"].cast<double>();
      if (!d["abs_error"].is_none()) r.abs_error = d["abs_error"].cast<double>();
      r.wall_time_build = d["wall_time_build"].cast<double>();
      r.wall_time_solve = d["wall_time_solve"].cast<double>();
      r.wall_time_sample = d["wall_time_sample"].cast<double>();
      r.seed = d["seed"].cast<std::uint64_t>();
      r.trial = d["trial"].cast<int>();
      recs.push_back(r);
    }
    std::ostringstream os;
    write_records_csv(os, recs, include_timings);
    return os.str();
  }, py::arg("records"), py::arg("include_timings") = true);
}
