#include "fedbai/io.hpp"

#include <fstream>
#include <sstream>

#include "fedbai/errors.hpp"

namespace fedbai {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

json instance_to_json(const ProblemInstance& inst) {
  json sets = json::array();
  for (const auto& set : inst.arm_sets()) {
    json arms = json::array();
    for (const auto& a : set)
      arms.push_back({{"kind", a.kind == ArmModel::Kind::Bernoulli ? "bernoulli" : "point_mass"},
                      {"mean", a.mean}});
    sets.push_back(arms);
  }
  json groups = json::object();
  for (int j = 0; j < inst.num_sets(); ++j) groups[std::to_string(j)] = inst.group(j);
  return {{"arm_sets", sets}, {"groups", groups}, {"delta", inst.delta()}, {"H", inst.comm_period()}};
}

namespace {

std::vector<std::vector<int>> groups_from_json(const json& g, std::size_t expected) {
  std::vector<std::vector<int>> groups(expected);
  if (!g.is_object()) throw Error(ErrorCode::Io, "'groups' must be an object keyed by set index");
  for (const auto& [key, ids] : g.items()) {
    std::size_t idx = 0;
    try {
      idx = std::stoul(key);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Io, "group key '" + key + "' is not a set index");
    }
    if (idx >= expected) throw Error(ErrorCode::Io, "group key '" + key + "' out of range");
    groups[idx] = ids.get<std::vector<int>>();
  }
  return groups;
}

int parse_group_key(const std::string& key) {
  try {
    return std::stoi(key);
  } catch (const std::exception&) {
    throw Error(ErrorCode::Io, "group key '" + key + "' is not a set index");
  }
}

}  // namespace

ProblemInstance instance_from_json(const json& j) {
  try {
    std::vector<std::vector<ArmModel>> sets;
    for (const auto& s : j.at("arm_sets")) {
      std::vector<ArmModel> arms;
      for (const auto& a : s) {
        const auto kind = a.value("kind", std::string("bernoulli"));
        const double mean = a.at("mean").get<double>();
        if (kind == "bernoulli") arms.push_back(ArmModel::bernoulli(mean));
        else if (kind == "point_mass") arms.push_back(ArmModel::point_mass(mean));
        else throw Error(ErrorCode::Io, "unknown arm kind '" + kind + "'");
      }
      sets.push_back(std::move(arms));
    }
    auto groups = groups_from_json(j.at("groups"), sets.size());
    return ProblemInstance(std::move(sets), std::move(groups), j.value("delta", 0.1),
                           j.value("H", 20));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("instance JSON: ") + e.what());
  }
}

json graph_to_json(const DirectedGraph& g) {
  json edges = json::array();
  for (auto [u, v] : g.edges()) edges.push_back({u, v});
  json groups = json::object();
  for (const auto& [j, ids] : g.groups()) groups[std::to_string(j)] = ids;
  return {{"vertices", g.vertices()}, {"edges", edges}, {"groups", groups}};
}

DirectedGraph graph_from_json(const json& j) {
  try {
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    std::map<int, std::vector<int>> groups;
    if (j.contains("groups"))
      for (const auto& [key, ids] : j.at("groups").items())
        groups[parse_group_key(key)] = ids.get<std::vector<int>>();
    return DirectedGraph(j.at("vertices").get<std::vector<int>>(), edges, groups);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("graph JSON: ") + e.what());
  }
}

json theory_to_json(const TheoryReport& r) {
  json sets = json::array();
  for (const auto& s : r.sets)
    sets.push_back({{"set", s.set},
                    {"cbar", s.cbar},
                    {"local_gap", s.local_gap},
                    {"cross_gap", s.cross_gap},
                    {"sigma_to_best", s.sigma_to_best},
                    {"sigma_from_best", s.sigma_from_best},
                    {"rounds_to_best", s.rounds_to_best},
                    {"rounds_from_best", s.rounds_from_best},
                    {"rounds", s.rounds},
                    {"arm_pull_bounds", s.arm_pull_bounds},
                    {"phase1_pull_bound", s.phase1_pull_bound}});
  return {{"best_set", r.best_set},
          {"H", r.comm_period},
          {"c", r.c},
          {"min_cross_gap", r.min_cross_gap},
          {"bits_bound", r.bits_bound},
          {"single_round_regime", r.single_round_regime},
          {"rounds_bound", r.rounds_bound},
          {"sets", sets}};
}

}  // namespace fedbai
