// Instance file format: UTF-8 JSON with a top-level type tag, version 1.
// Weights and payoffs are written as decimals with 17 significant digits so
// files round-trip losslessly and byte-identically across reruns.
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "relax/csp.hpp"
#include "relax/detail/sha256.hpp"
#include "relax/graph.hpp"
#include "relax/unique_game.hpp"

namespace relax {

namespace detail {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline std::string graph_to_json(const NormalizedGraph& g) {
  std::ostringstream os;
  os << "{\"type\":\"graph\",\"version\":1,\"n\":" << g.n() << ",\"edges\":[";
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const auto& e = g.edges()[i];
    os << (i ? "," : "") << "[" << e.u << "," << e.v << "," << detail::fmt17(e.w) << "]";
  }
  os << "]";
  if (g.has_coords()) {
    os << ",\"coords\":[";
    for (int i = 0; i < g.n(); ++i) {
      os << (i ? "," : "") << "[";
      for (int j = 0; j < g.coords()[i].size(); ++j)
        os << (j ? "," : "") << detail::fmt17(g.coords()[i](j));
      os << "]";
    }
    os << "]";
  }
  os << "}";
  return os.str();
}

inline std::string csp_to_json(const CspInstance& csp) {
  std::ostringstream os;
  os << "{\"type\":\"csp\",\"version\":1,\"n\":" << csp.n() << ",\"q\":" << csp.q()
     << ",\"k\":" << csp.k() << ",\"constraints\":[";
  for (std::size_t c = 0; c < csp.constraints().size(); ++c) {
    const auto& con = csp.constraints()[c];
    os << (c ? "," : "") << "{\"scope\":[";
    for (std::size_t i = 0; i < con.scope.size(); ++i) os << (i ? "," : "") << con.scope[i];
    os << "],\"table\":[";
    for (std::size_t i = 0; i < con.table.size(); ++i)
      os << (i ? "," : "") << detail::fmt17(con.table[i]);
    os << "]}";
  }
  os << "]}";
  return os.str();
}

inline std::string unique_game_to_json(const UniqueGame& game) {
  if (!game.is_simple())
    throw std::invalid_argument("only simple unique games have a file representation");
  std::ostringstream os;
  os << "{\"type\":\"unique_game\",\"version\":1,\"n\":" << game.n()
     << ",\"R\":" << game.label_count() << ",\"edges\":[";
  for (std::size_t i = 0; i < game.constraints().size(); ++i) {
    const auto& c = game.constraints()[i];
    os << (i ? "," : "") << "[" << c.u << "," << c.v << "," << detail::fmt17(c.w) << "]";
  }
  os << "],\"perms\":{";
  bool first = true;
  for (const auto& c : game.constraints()) {
    auto emit = [&](int a, int b, const std::vector<int>& p) {
      os << (first ? "" : ",") << "\"" << a << "," << b << "\":[";
      for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
      os << "]";
      first = false;
    };
    emit(c.u, c.v, c.perm);
    emit(c.v, c.u, inverse_perm(c.perm));
  }
  os << "}}";
  return os.str();
}

inline NormalizedGraph graph_from_json(const nlohmann::json& j) {
  if (j.at("type") != "graph") throw std::invalid_argument("not a graph instance");
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges"))
    edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
  std::vector<Eigen::VectorXd> coords;
  if (j.contains("coords")) {
    for (const auto& c : j.at("coords")) {
      Eigen::VectorXd v(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) v(i) = c.at(i).get<double>();
      coords.push_back(std::move(v));
    }
  }
  return NormalizedGraph(j.at("n").get<int>(), std::move(edges), std::move(coords));
}

inline CspInstance csp_from_json(const nlohmann::json& j) {
  if (j.at("type") != "csp") throw std::invalid_argument("not a csp instance");
  std::vector<Constraint> cs;
  for (const auto& c : j.at("constraints")) {
    Constraint con;
    for (const auto& v : c.at("scope")) con.scope.push_back(v.get<int>());
    for (const auto& t : c.at("table")) con.table.push_back(t.get<double>());
    cs.push_back(std::move(con));
  }
  return CspInstance(j.at("n").get<int>(), j.at("q").get<int>(), j.at("k").get<int>(),
                     std::move(cs), /*allow_scaled=*/true);
}

inline UniqueGame unique_game_from_json(const nlohmann::json& j) {
  if (j.at("type") != "unique_game") throw std::invalid_argument("not a unique game instance");
  const int r = j.at("R").get<int>();
  const auto& perms = j.at("perms");
  std::vector<UgConstraint> cs;
  for (const auto& e : j.at("edges")) {
    const int u = e.at(0).get<int>(), v = e.at(1).get<int>();
    std::string key = std::to_string(u) + "," + std::to_string(v);
    std::string rkey = std::to_string(v) + "," + std::to_string(u);
    std::vector<int> perm;
    for (const auto& p : perms.at(key)) perm.push_back(p.get<int>());
    std::vector<int> rperm;
    for (const auto& p : perms.at(rkey)) rperm.push_back(p.get<int>());
    if (inverse_perm(perm) != rperm)
      throw std::invalid_argument("perms are not inverse-consistent on edge " + key);
    cs.push_back({u, v, e.at(2).get<double>(), perm});
  }
  return UniqueGame(j.at("n").get<int>(), r, std::move(cs));
}

using Instance = std::variant<NormalizedGraph, CspInstance, UniqueGame>;

inline Instance instance_from_json_text(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  const std::string type = j.at("type").get<std::string>();
  if (type == "graph") return graph_from_json(j);
  if (type == "csp") return csp_from_json(j);
  if (type == "unique_game") return unique_game_from_json(j);
  throw std::invalid_argument("unknown instance type: " + type);
}

inline std::string instance_to_json(const Instance& inst) {
  if (std::holds_alternative<NormalizedGraph>(inst))
    return graph_to_json(std::get<NormalizedGraph>(inst));
  if (std::holds_alternative<CspInstance>(inst)) return csp_to_json(std::get<CspInstance>(inst));
  return unique_game_to_json(std::get<UniqueGame>(inst));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

inline Instance load_instance(const std::string& path) {
  return instance_from_json_text(read_file(path));
}

inline std::string instance_sha(const Instance& inst) {
  return detail::sha256_hex(instance_to_json(inst));
}

}  // namespace relax
