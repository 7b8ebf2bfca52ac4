#include "pdlkit/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pdl {

namespace {
std::set<std::string> names(const Json& j, const char* what) {
  std::set<std::string> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
  for (const auto& e : j) out.insert(e.get<std::string>());
  return out;
}
}  // namespace

Vocabulary vocabulary_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("vocabulary must be a JSON object");
  Vocabulary v{names(j.value("props", Json()), "props"), names(j.value("programs", Json()), "programs")};
  v.validate();
  return v;
}

Json to_json(const Vocabulary& v) {
  return Json{{"props", Json(v.props)}, {"programs", Json(v.programs)}};
}

KripkeStructure kripke_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("worlds"))
    throw std::invalid_argument("structure must be an object with a \"worlds\" array");
  auto worlds = j.at("worlds").get<std::vector<std::string>>();
  Vocabulary vocab;
  const Json props = j.value("props", Json::object());
  const Json programs = j.value("programs", Json::object());
  for (const auto& [p, _] : props.items()) vocab.props.insert(p);
  for (const auto& [a, _] : programs.items()) vocab.programs.insert(a);
  KripkeStructure k(std::move(worlds), vocab);
  for (const auto& [p, ws] : props.items())
    for (const auto& w : ws) k.set_true(p, k.world(w.get<std::string>()));
  for (const auto& [a, pairs] : programs.items()) {
    for (const auto& e : pairs) {
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("edges of '" + a + "' must be [from, to] pairs");
      k.add_edge(a, k.world(e[0].get<std::string>()), k.world(e[1].get<std::string>()));
    }
  }
  return k;
}

Json to_json(const KripkeStructure& k) {
  Json j;
  j["worlds"] = k.world_names();
  j["props"] = Json::object();
  for (const auto& [p, m] : k.valuations()) {
    Json ws = Json::array();
    for (World w = 0; w < k.size(); ++w)
      if ((m >> w) & 1U) ws.push_back(k.world_name(w));
    j["props"][p] = ws;
  }
  j["programs"] = Json::object();
  for (const auto& [a, r] : k.all_edges()) {
    Json es = Json::array();
    for (auto [u, v] : r.pairs()) es.push_back({k.world_name(u), k.world_name(v)});
    j["programs"][a] = es;
  }
  return j;
}

Json to_json(const WitnessGraph& g, const KripkeStructure& k) {
  Json nodes = Json::array();
  for (World w = 0; w < k.size(); ++w)
    if ((g.nodes >> w) & 1U) nodes.push_back(k.world_name(w));
  Json edges = Json::array();
  for (const auto& e : g.edges) edges.push_back({k.world_name(e.from), e.program, k.world_name(e.to)});
  return Json{{"source", k.world_name(g.source)},
              {"target", k.world_name(g.target)},
              {"nodes", nodes},
              {"edges", edges}};
}

WitnessGraph witness_from_json(const Json& j, const KripkeStructure& k) {
  WitnessGraph g;
  g.source = k.world(j.at("source").get<std::string>());
  g.target = k.world(j.at("target").get<std::string>());
  for (const auto& n : j.at("nodes")) g.nodes |= bit(k.world(n.get<std::string>()));
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 3)
      throw std::invalid_argument("witness edges must be [from, program, to] triples");
    g.edges.insert({k.world(e[0].get<std::string>()), e[1].get<std::string>(),
                    k.world(e[2].get<std::string>())});
  }
  g.nodes |= bit(g.source) | bit(g.target);
  return g;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) { return Json::parse(read_text_file(path)); }

}  // namespace pdl
