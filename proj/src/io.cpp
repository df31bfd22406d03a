#include "gridot/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gridot {

using nlohmann::json;

json to_json(const Factor1D& f) {
  switch (f.kind()) {
    case Factor1D::Kind::Uniform:
      return {{"kind", "Uniform"}};
    case Factor1D::Kind::HolderCusp:
      return {{"kind", "HolderCusp"}, {"alpha", f.alpha()}, {"a", f.amplitude()}, {"x0", f.cusp_at()}};
    case Factor1D::Kind::SmoothSine:
      return {{"kind", "SmoothSine"}, {"a", f.amplitude()}, {"m", f.frequency()}};
  }
  return {};
}

Factor1D factor_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "Uniform") return Factor1D::uniform();
  if (kind == "HolderCusp") {
    return Factor1D::holder_cusp(j.at("alpha").get<double>(), j.at("a").get<double>(), j.value("x0", 0.5));
  }
  if (kind == "SmoothSine") return Factor1D::smooth_sine(j.at("a").get<double>(), j.value("m", 1));
  throw std::invalid_argument("unknown factor kind '" + kind + "'");
}

json to_json(const ProductDensity& p) {
  json factors = json::array();
  for (const auto& f : p.factors()) factors.push_back(to_json(f));
  return {{"d", p.dim()}, {"factors", factors}};
}

ProductDensity density_from_json(const json& j) {
  std::vector<Factor1D> factors;
  for (const auto& f : j.at("factors")) factors.push_back(factor_from_json(f));
  if (j.contains("d") && j.at("d").get<int>() != static_cast<int>(factors.size())) {
    throw std::invalid_argument("distribution: 'd' does not match the number of factors");
  }
  return ProductDensity(std::move(factors));
}

json to_json(const GridHistogram& h) {
  json counts = json::array();
  for (const auto& [r, c] : h.nonzero()) {
    json row = h.grid().unrank(r);
    row.push_back(c);
    counts.push_back(std::move(row));
  }
  return {{"d", h.grid().d}, {"L", h.grid().L}, {"k", h.k()}, {"counts", counts}};
}

GridHistogram histogram_from_json(const json& j) {
  const GridSpec grid(j.at("d").get<int>(), j.at("L").get<int>());
  std::vector<std::int64_t> counts(static_cast<std::size_t>(grid.cells()), 0);
  for (const auto& row : j.at("counts")) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(grid.d) + 1) {
      throw std::invalid_argument("histogram: each counts entry must be [a1..ad, count]");
    }
    MultiIndex idx(static_cast<std::size_t>(grid.d));
    for (int i = 0; i < grid.d; ++i) idx[static_cast<std::size_t>(i)] = row.at(static_cast<std::size_t>(i)).get<int>();
    if (!grid.in_bounds(idx)) throw std::out_of_range("histogram: cell index out of bounds");
    counts[static_cast<std::size_t>(grid.rank(idx))] += row.back().get<std::int64_t>();
  }
  GridHistogram h(grid, std::move(counts));
  if (j.contains("k") && j.at("k").get<std::int64_t>() != h.k()) {
    throw std::invalid_argument("histogram: 'k' does not equal the sum of counts");
  }
  return h;
}

json to_json(const ExperimentRecord& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"epsilon", opt(r.epsilon)},
          {"n", r.n},
          {"L", r.L},
          {"estimate", r.estimate},
          {"reference", opt(r.reference)},
          {"abs_error", opt(r.abs_error)},
          {"wall_time_build", r.wall_time_build},
          {"wall_time_solve", r.wall_time_solve},
          {"wall_time_sample", r.wall_time_sample},
          {"seed", r.seed},
          {"trial", r.trial}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace gridot
