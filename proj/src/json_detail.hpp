#pragma once

// Internal json conversion helpers shared by io.cpp and experiment.cpp.

#include "brl/batch.hpp"
#include "brl/classes.hpp"
#include "brl/mdp.hpp"

#include "json.hpp"

namespace brl::detail {

nlohmann::json table_to_json(const StateActionTable& t);
StateActionTable table_from_json(const nlohmann::json& j);

nlohmann::json mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const nlohmann::json& j);

nlohmann::json q_class_to_json(const QClass& cls);
QClass q_class_from_json(const nlohmann::json& j, const TabularMdp& mdp);

nlohmann::json w_class_to_json(const WClass& cls);
WClass w_class_from_json(const nlohmann::json& j, const TabularMdp& mdp,
                         const DataDistribution* mu);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const nlohmann::json& j, const std::string& path);

} // namespace brl::detail
