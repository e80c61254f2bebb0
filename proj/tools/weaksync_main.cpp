#include "weaksync/agents.hpp"
#include "weaksync/analysis.hpp"
#include "weaksync/errors.hpp"
#include "weaksync/experiment.hpp"
#include "weaksync/generator.hpp"
#include "weaksync/graph.hpp"
#include "weaksync/io.hpp"
#include "weaksync/kernel_structure.hpp"
#include "weaksync/plot.hpp"
#include "weaksync/rng.hpp"
#include "weaksync/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitVerdictFail = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct CommonFlags {
    std::uint64_t seed = 0;
    bool seed_set = false;
    double epsilon = 0.0;
    bool epsilon_set = false;
    double horizon = 0.0;
    bool horizon_set = false;
    double step = 0.0;
    bool step_set = false;
    std::string out_dir;
    std::string format = "csv";
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--seed", flags.seed, "Generator / initial-state seed")
        ->each([&](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--epsilon", flags.epsilon, "Convergence tolerance")
        ->each([&](const std::string&) { flags.epsilon_set = true; });
    cmd->add_option("--horizon", flags.horizon, "Final time (continuous) or step count")
        ->each([&](const std::string&) { flags.horizon_set = true; });
    cmd->add_option("--step", flags.step, "Integration step")
        ->each([&](const std::string&) { flags.step_set = true; });
    cmd->add_option("--out-dir", flags.out_dir,
                    "Output directory (default: $WEAKSYNC_OUT or ./weaksync-out)");
    cmd->add_option("--format", flags.format, "Trajectory file format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

weaksync::RunOverrides to_overrides(const CommonFlags& flags) {
    weaksync::RunOverrides ov;
    if (flags.seed_set)
        ov.seed = flags.seed;
    if (flags.epsilon_set)
        ov.epsilon = flags.epsilon;
    if (flags.horizon_set)
        ov.horizon = flags.horizon;
    if (flags.step_set)
        ov.step = flags.step;
    ov.out_dir = flags.out_dir;
    ov.trajectory_format = flags.format;
    return ov;
}

json load_json_file(const std::string& path) {
    try {
        return json::parse(weaksync::read_file(path));
    } catch (const json::parse_error& e) {
        throw weaksync::ValidationError("cannot parse " + path + ": " + e.what());
    }
}

int cmd_analyze(const std::string& graph_path) {
    const auto graph = weaksync::load_graph(graph_path);
    const auto laplacian = weaksync::build_laplacian(graph);
    const auto decomposition = weaksync::decompose_bicomponents(graph);
    const weaksync::CanonicalLaplacian canonical(laplacian, decomposition);
    const auto kernel = weaksync::compute_kernel_structure(canonical);
    std::cout << weaksync::analysis_report_json(graph, laplacian, decomposition, kernel).dump(2)
              << "\n";
    return kExitPass;
}

int cmd_generate(const std::string& spec_path, const std::string& out_path,
                 const CommonFlags& flags) {
    const auto spec = weaksync::structured_spec_from_json(load_json_file(spec_path));
    const std::uint64_t seed = flags.seed_set ? flags.seed : 1;
    const auto graph = weaksync::generate_structured(spec, seed);
    const std::string dump = weaksync::graph_to_json(graph).dump(2) + "\n";
    if (out_path.empty() || out_path == "-")
        std::cout << dump;
    else
        weaksync::write_file(out_path, dump);
    return kExitPass;
}

int cmd_run(const std::string& config_path, const CommonFlags& flags, bool force_trajectory,
            bool print_report) {
    const std::string base_dir =
        std::filesystem::absolute(config_path).parent_path().string();
    auto cfg = weaksync::experiment_config_from_json(load_json_file(config_path), base_dir);
    if (force_trajectory)
        cfg.out_csv = true;
    const auto outcome = weaksync::run_experiment(cfg, to_overrides(flags));
    if (print_report)
        std::cout << outcome.report_json.dump(2) << "\n";
    for (const auto& f : outcome.files_written)
        std::cerr << "wrote " << f << "\n";
    return outcome.report.all_pass() ? kExitPass : kExitVerdictFail;
}

// The bundled fault scenario: basic components of 30, 8 and 4 single
// integrators with u = -zeta feeding non-basic components of 10, 6 and 10.
// Expected pattern: the network signals die out, each basic component
// synchronizes internally, the global network does not (the groups settle on
// different consensus values), and every non-basic agent lands on its convex
// combination of the group limits.
int cmd_demo(const CommonFlags& flags) {
    using namespace weaksync;
    const std::uint64_t seed = flags.seed_set ? flags.seed : 1;

    const auto spec = fault_scenario_spec();
    const auto graph = generate_structured(spec, seed);
    const auto laplacian = build_laplacian(graph);
    const auto decomposition = decompose_bicomponents(graph);
    const CanonicalLaplacian canonical(laplacian, decomposition);
    const auto kernel = compute_kernel_structure(canonical);

    std::vector<ClosedLoopAgent> agents;
    for (int v = 0; v < graph.size(); ++v)
        agents.push_back(direct_closed_loop(Eigen::MatrixXd::Zero(1, 1),
                                            -Eigen::MatrixXd::Ones(1, 1),
                                            Eigen::MatrixXd::Ones(1, 1),
                                            Eigen::MatrixXd::Ones(1, 1)));
    const auto sys = assemble_network(std::move(agents), laplacian);

    SimConfig sim;
    sim.time_domain = TimeDomain::Continuous;
    sim.step = flags.step_set ? flags.step : 0.01;
    sim.horizon = flags.horizon_set ? flags.horizon : 50.0;
    Rng rng(seed ^ 0x1d1a7e5ULL);
    sim.initial_state.resize(sys.total_states);
    for (int i = 0; i < sys.total_states; ++i)
        sim.initial_state(i) = rng.uniform(-5.0, 5.0);

    ConvergenceCriterion criterion;
    criterion.epsilon = flags.epsilon_set ? flags.epsilon : 1e-4;

    const Trajectory tr = simulate(sys, sim);
    const SyncReport rep = build_sync_report(tr, decomposition, kernel, criterion);

    const std::string out_dir = resolve_out_dir(flags.out_dir);
    std::filesystem::create_directories(out_dir);
    ordered_json report_json = sync_report_json(rep);
    report_json["analysis"] = analysis_report_json(graph, laplacian, decomposition, kernel);
    write_file(out_dir + "/report.json", report_json.dump(2) + "\n");
    write_file(out_dir + "/trajectory.csv", trajectory_to_csv(tr));
    emit_plots(tr, rep, out_dir);

    std::printf("graph: %d nodes, %d basic bicomponents, %d non-basic nodes\n", graph.size(),
                decomposition.k(), decomposition.m0);
    std::printf("network stability (weak synchronization): %s\n",
                rep.network_stable ? "pass" : "FAIL");
    for (const auto& g : rep.groups)
        std::printf("  basic bicomponent %d (%zu nodes): output sync %s (tail %.3g)\n",
                    g.bicomponent + 1, g.nodes.size(), g.verdict.pass ? "pass" : "FAIL",
                    g.verdict.tail_disagreement);
    std::printf("global output sync: %s (tail %.3g, expected to fail without a spanning "
                "tree)\n",
                rep.global.pass ? "pass" : "fail", rep.global.tail_disagreement);
    if (rep.convex_checked) {
        double worst = 0.0;
        bool all = true;
        for (const auto& r : rep.convex) {
            worst = std::max(worst, r.residual);
            all = all && r.pass;
        }
        std::printf("convex-combination limits: %s (worst residual %.3g over %zu non-basic "
                    "agents)\n",
                    all ? "pass" : "FAIL", worst, rep.convex.size());
    } else {
        std::printf("convex-combination limits: skipped (preconditions failed)\n");
    }
    std::printf("outputs written to %s\n", out_dir.c_str());

    const bool expected_pattern = rep.all_pass() && !rep.global.pass;
    return expected_pattern ? kExitPass : kExitVerdictFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weaksync: bicomponent structure, kernel coefficients and synchronization "
                 "verdicts for multi-agent networks"};
    app.require_subcommand(1);

    std::string graph_path, spec_path, out_path, config_path, demo_name;

    auto* analyze = app.add_subcommand("analyze", "Decompose a graph and report its kernel "
                                                  "structure as JSON");
    analyze->add_option("graph", graph_path, "Graph file (.json or edge list)")->required();

    CommonFlags gen_flags;
    auto* generate = app.add_subcommand("generate", "Generate a graph with a prescribed "
                                                    "bicomponent structure");
    generate->add_option("spec", spec_path, "Generator spec JSON file")->required();
    generate->add_option("-o,--output", out_path, "Output file (default stdout)");
    add_common_flags(generate, gen_flags);

    CommonFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Run an experiment config and write the "
                                                    "trajectory");
    simulate->add_option("config", config_path, "Experiment config JSON file")->required();
    add_common_flags(simulate, sim_flags);

    CommonFlags verify_flags;
    auto* verify = app.add_subcommand("verify", "Run an experiment config and print the "
                                                "synchronization report");
    verify->add_option("config", config_path, "Experiment config JSON file")->required();
    add_common_flags(verify, verify_flags);

    CommonFlags demo_flags;
    auto* demo = app.add_subcommand("demo", "Run a bundled scenario");
    demo->add_option("name", demo_name, "Scenario name (fig4)")->required();
    add_common_flags(demo, demo_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (*analyze)
            return cmd_analyze(graph_path);
        if (*generate)
            return cmd_generate(spec_path, out_path, gen_flags);
        if (*simulate)
            return cmd_run(config_path, sim_flags, true, false);
        if (*verify)
            return cmd_run(config_path, verify_flags, false, true);
        if (*demo) {
            if (demo_name != "fig4") {
                std::cerr << "error: unknown demo '" << demo_name << "' (available: fig4)\n";
                return kExitConfigError;
            }
            return cmd_demo(demo_flags);
        }
    } catch (const weaksync::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitConfigError;
}
