#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gridot/harness.hpp"
#include "gridot/measures.hpp"
#include "gridot/sketch.hpp"

namespace gridot {

// Distribution documents: {"d": 2, "factors": [{"kind": "HolderCusp", "alpha": 0.5, "a": 0.3, "x0": 0.5}, ...]}
// Factor kinds: "Uniform", "HolderCusp" (alpha, a, x0), "SmoothSine" (a, m).
nlohmann::json to_json(const Factor1D& f);
Factor1D factor_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProductDensity& p);
ProductDensity density_from_json(const nlohmann::json& j);

// Histogram documents: {"d": 2, "L": 4, "k": 10, "counts": [[a1, a2, count], ...]}
// Sparse, nonzero cells only, indices ascending lexicographic.
nlohmann::json to_json(const GridHistogram& h);
GridHistogram histogram_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentRecord& r);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace gridot
