#pragma once

#include "weaksync/agents.hpp"
#include "weaksync/analysis.hpp"
#include "weaksync/generator.hpp"
#include "weaksync/graph.hpp"
#include "weaksync/simulate.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace weaksync {

/// One experiment: a graph source, one agent/protocol assignment per node,
/// simulation settings and convergence criteria.
struct ExperimentConfig {
    std::optional<std::string> graph_file;
    std::optional<nlohmann::json> graph_inline;
    std::optional<StructuredGraphSpec> graph_generator;
    std::uint64_t seed = 1;

    struct Assignment {
        bool all_nodes = false;
        std::vector<int> nodes; ///< 0-based
        std::optional<std::string> model_name;
        std::optional<AgentModel> model;
        std::optional<DynamicProtocol> protocol;
        struct DirectBlocks {
            Eigen::MatrixXd A_t, B_t, C_t, H_t;
        };
        std::optional<DirectBlocks> direct;
    };
    std::vector<Assignment> agents;

    TimeDomain time_domain = TimeDomain::Continuous;
    std::optional<double> step;
    std::optional<double> horizon;
    int sample_stride = 10;
    std::optional<std::vector<double>> initial_state;
    std::optional<std::array<double, 2>> initial_state_uniform;

    std::optional<double> epsilon;
    double window_fraction = 0.2;

    bool out_csv = false;
    bool out_report = false;
    bool out_plots = false;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const std::string& base_dir);

/// Command-line overrides applied on top of the config.
struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> epsilon;
    std::optional<double> horizon;
    std::optional<double> step;
    std::string out_dir;
    std::string trajectory_format = "csv"; ///< "csv" or "json"
};

struct ExperimentOutcome {
    DirectedWeightedGraph graph;
    BicomponentDecomposition decomposition;
    KernelStructure kernel;
    Trajectory trajectory;
    SyncReport report;
    /// The verdicts plus an "analysis" section with the graph structure,
    /// beta matrix and kernel basis; written as report.json when requested.
    nlohmann::ordered_json report_json;
    std::vector<std::string> files_written;
};

/// Graph analysis, closed-loop assembly, simulation and verification in one
/// pass; writes the requested artifacts into the output directory.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOverrides& overrides);

/// Default simulation settings per time domain: continuous runs use step
/// 0.01 up to t = 50, discrete runs take 500 steps. Epsilon defaults to 1e-4
/// (continuous) or 1e-6 (discrete).
double default_horizon(TimeDomain domain);
double default_epsilon(TimeDomain domain);

/// Resolution order for the output directory: explicit --out-dir flag, then
/// the WEAKSYNC_OUT environment variable, then "weaksync-out".
std::string resolve_out_dir(const std::string& flag_value);

} // namespace weaksync
