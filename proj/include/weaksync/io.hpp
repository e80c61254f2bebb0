#pragma once

#include "weaksync/agents.hpp"
#include "weaksync/analysis.hpp"
#include "weaksync/generator.hpp"
#include "weaksync/graph.hpp"
#include "weaksync/kernel_structure.hpp"
#include "weaksync/simulate.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace weaksync {

/// 17 significant digits: enough for a bit-faithful double round trip.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Graph files. JSON: {"n": ..., "edges": [{"from", "to", "weight"}]} with
// 1-based node ids and weight defaulting to 1. Plain text: one "from to
// weight" line per edge, 1-based, weight optional, '#' starts a comment.
DirectedWeightedGraph graph_from_json(const nlohmann::json& j);
nlohmann::ordered_json graph_to_json(const DirectedWeightedGraph& g);
DirectedWeightedGraph graph_from_edge_list(std::istream& in);
/// Dispatches on extension: .json is JSON, anything else the edge list.
DirectedWeightedGraph load_graph(const std::string& path);

// Dense matrices as arrays of row arrays.
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& field);
nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m);

AgentModel model_from_json(const nlohmann::json& j);
nlohmann::ordered_json model_to_json(const AgentModel& m);
DynamicProtocol protocol_from_json(const nlohmann::json& j);
StructuredGraphSpec structured_spec_from_json(const nlohmann::json& j);

/// CSV with header t,x[0..],y[0..],zeta[0..], one row per sample, doubles
/// printed with 17 significant digits.
std::string trajectory_to_csv(const Trajectory& tr);
/// Reads back the numeric payload. Agent/output counts are not part of the
/// format; the caller sets n_agents/p/r if it wants to analyze the result.
Trajectory trajectory_from_csv(std::istream& in);

/// Structural report for the analyze command.
nlohmann::ordered_json analysis_report_json(const DirectedWeightedGraph& g,
                                            const LaplacianMatrix& L,
                                            const BicomponentDecomposition& d,
                                            const KernelStructure& ks);

nlohmann::ordered_json sync_report_json(const SyncReport& rep);

} // namespace weaksync
