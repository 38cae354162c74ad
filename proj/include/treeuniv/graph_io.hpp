#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "treeuniv/error.hpp"
#include "treeuniv/graph.hpp"

namespace treeuniv {

// Text format:
//   # <provenance json>      (optional, any number of '#' lines)
//   n m
//   u v                      (m lines, u < v, lexicographic order)
//
// JSON format: {"edges":[[u,v],...],"n":N} with optional "provenance".
struct GraphFile {
  Graph graph;
  nlohmann::json provenance;  // null when absent
};

inline std::string write_graph_text(const Graph& g, const nlohmann::json& provenance = nullptr) {
  std::ostringstream os;
  if (!provenance.is_null()) os << "# " << provenance.dump() << '\n';
  os << g.order() << ' ' << g.size() << '\n';
  for (const auto& [u, v] : g.edges()) os << u << ' ' << v << '\n';
  return os.str();
}

inline std::string write_graph_json(const Graph& g, const nlohmann::json& provenance = nullptr) {
  nlohmann::json j;
  j["n"] = g.order();
  j["edges"] = nlohmann::json::array();
  for (const auto& [u, v] : g.edges()) j["edges"].push_back({u, v});
  if (!provenance.is_null()) j["provenance"] = provenance;
  return j.dump() + "\n";
}

namespace detail {

inline Graph checked_graph(long long n, const std::vector<Edge>& edges) {
  if (n < 0) throw InputError("negative vertex count");
  for (const auto& [u, v] : edges) {
    if (u >= v) throw InputError("edge lines must satisfy u < v");
  }
  return Graph::from_edges(static_cast<std::size_t>(n), edges);
}

}  // namespace detail

inline GraphFile parse_graph_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  GraphFile out;
  long long n = -1;
  long long m = -1;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(line.find_first_not_of("# "));
      if (out.provenance.is_null()) {
        try {
          out.provenance = nlohmann::json::parse(body);
        } catch (const nlohmann::json::parse_error&) {
          out.provenance = body;
        }
      }
      continue;
    }
    std::istringstream fields(line);
    if (n < 0) {
      if (!(fields >> n >> m)) throw InputError("graph header must be 'n m'");
      continue;
    }
    long long u = 0;
    long long v = 0;
    if (!(fields >> u >> v)) throw InputError("bad edge line: " + line);
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  if (n < 0) throw InputError("missing graph header");
  if (static_cast<long long>(edges.size()) != m) {
    throw InputError("header announces " + std::to_string(m) + " edges, found " + std::to_string(edges.size()));
  }
  out.graph = detail::checked_graph(n, edges);
  return out;
}

inline GraphFile parse_graph_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("graph json: ") + e.what());
  }
  if (!j.contains("n") || !j.contains("edges")) throw InputError("graph json needs 'n' and 'edges'");
  std::vector<Edge> edges;
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2) throw InputError("graph json: edges must be [u,v] pairs");
    edges.emplace_back(e[0].get<Vertex>(), e[1].get<Vertex>());
  }
  GraphFile out;
  out.graph = detail::checked_graph(j["n"].get<long long>(), edges);
  if (j.contains("provenance")) out.provenance = j["provenance"];
  return out;
}

inline bool looks_like_json(const std::string& text) {
  const auto pos = text.find_first_not_of(" \t\r\n");
  return pos != std::string::npos && text[pos] == '{';
}

inline GraphFile parse_graph(const std::string& text) {
  return looks_like_json(text) ? parse_graph_json(text) : parse_graph_text(text);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out << content;
  if (!out) throw InputError("write failed: " + path);
}

inline GraphFile load_graph(const std::string& path) { return parse_graph(read_file(path)); }

}  // namespace treeuniv
