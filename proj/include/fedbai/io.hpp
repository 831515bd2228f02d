#pragma once

#include <string>

#include <json.hpp>

#include "fedbai/instance.hpp"
#include "fedbai/network.hpp"
#include "fedbai/theory.hpp"

namespace fedbai {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// {"arm_sets": [[{"kind": "bernoulli"|"point_mass", "mean": x}, ...], ...],
//  "groups": {"0": [client ids], ...}, "delta": d, "H": h}
nlohmann::json instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const nlohmann::json& j);

// {"vertices": [...], "edges": [[u, v], ...], "groups": {"0": [ids], ...}}
nlohmann::json graph_to_json(const DirectedGraph& g);
DirectedGraph graph_from_json(const nlohmann::json& j);

nlohmann::json theory_to_json(const TheoryReport& r);

}  // namespace fedbai
