#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "emp/model.hpp"

namespace emp {

// {"n", "d", "edges": [[i,j],...], "vertex_costs": [[...d],...n],
//  "edge_costs": [[[...d],...d],...|E|]}; edge rows index the lower vertex.
Model model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const Model& model);

/// Reads and parses a model file. Malformed input raises ErrorKind::parse; the
/// model is not validated here.
Model load_model(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace emp
