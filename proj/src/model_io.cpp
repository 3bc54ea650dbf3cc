#include "emp/model_io.hpp"

#include <fstream>
#include <sstream>

#include "emp/error.hpp"

namespace emp {

namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key))
    throw Error(ErrorKind::parse, std::string("missing field '") + key + "'");
  return doc.at(key);
}

void expect_size(const json& node, std::size_t size, const std::string& what) {
  if (!node.is_array() || node.size() != size)
    throw Error(ErrorKind::dimension_mismatch,
                what + " must be an array of length " + std::to_string(size));
}

}  // namespace

Model model_from_json(const json& doc) {
  try {
    const auto n = require(doc, "n").get<std::size_t>();
    const auto d = require(doc, "d").get<std::size_t>();

    std::vector<Edge> edges;
    const auto& edge_list = require(doc, "edges");
    if (!edge_list.is_array()) throw Error(ErrorKind::parse, "'edges' must be an array");
    for (const auto& pair : edge_list) {
      expect_size(pair, 2, "edge");
      edges.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
    }

    Model model{GraphTopology(n, d, std::move(edges)), {}};
    model.costs = PotentialVector(model.topology);

    const auto& vertex_costs = require(doc, "vertex_costs");
    expect_size(vertex_costs, n, "vertex_costs");
    for (std::size_t v = 0; v < n; ++v) {
      expect_size(vertex_costs[v], d, "vertex_costs[" + std::to_string(v) + "]");
      for (std::size_t x = 0; x < d; ++x) model.costs.vertex(v)[x] = vertex_costs[v][x].get<double>();
    }

    const auto& edge_costs = require(doc, "edge_costs");
    const std::size_t m = model.topology.num_edges();
    expect_size(edge_costs, m, "edge_costs");
    for (std::size_t e = 0; e < m; ++e) {
      expect_size(edge_costs[e], d, "edge_costs[" + std::to_string(e) + "]");
      for (std::size_t xi = 0; xi < d; ++xi) {
        expect_size(edge_costs[e][xi], d, "edge_costs row");
        for (std::size_t xj = 0; xj < d; ++xj)
          model.costs.at(e, xi, xj) = edge_costs[e][xi][xj].get<double>();
      }
    }
    return model;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::parse, ex.what());
  }
}

json model_to_json(const Model& model) {
  const auto& g = model.topology;
  const std::size_t d = g.num_labels();
  json doc;
  doc["n"] = g.num_vertices();
  doc["d"] = d;
  doc["edges"] = json::array();
  for (const auto& [i, j] : g.edges()) doc["edges"].push_back({i, j});
  doc["vertex_costs"] = json::array();
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    const auto block = model.costs.vertex(v);
    doc["vertex_costs"].push_back(std::vector<double>(block.begin(), block.end()));
  }
  doc["edge_costs"] = json::array();
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    json rows = json::array();
    for (std::size_t xi = 0; xi < d; ++xi) {
      json row = json::array();
      for (std::size_t xj = 0; xj < d; ++xj) row.push_back(model.costs.at(e, xi, xj));
      rows.push_back(std::move(row));
    }
    doc["edge_costs"].push_back(std::move(rows));
  }
  return doc;
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw Error(ErrorKind::parse, path.string() + ": " + ex.what());
  }
  return model_from_json(doc);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::io, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace emp
