#include "weaksync/experiment.hpp"

#include "weaksync/errors.hpp"
#include "weaksync/io.hpp"
#include "weaksync/plot.hpp"
#include "weaksync/rng.hpp"

#include <cstdlib>
#include <filesystem>

namespace weaksync {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kInitialStateSalt = 0x1d1a7e5ULL;

ExperimentConfig::Assignment assignment_from_json(const json& j, int index) {
    const std::string where = "agents[" + std::to_string(index) + "]";
    if (!j.is_object())
        throw ValidationError(where + " must be an object");
    ExperimentConfig::Assignment a;

    if (!j.contains("nodes"))
        throw ValidationError(where + ".nodes is required ('all' or a list of 1-based ids)");
    const auto& nodes = j.at("nodes");
    if (nodes.is_string() && nodes.get<std::string>() == "all") {
        a.all_nodes = true;
    } else if (nodes.is_array()) {
        for (const auto& v : nodes) {
            if (!v.is_number_integer() || v.get<int>() < 1)
                throw ValidationError(where + ".nodes entries must be 1-based integers");
            a.nodes.push_back(v.get<int>() - 1);
        }
    } else {
        throw ValidationError(where + ".nodes must be 'all' or an array");
    }

    const bool has_direct = j.contains("direct");
    const bool has_model = j.contains("model");
    if (has_direct == has_model)
        throw ValidationError(where + " needs exactly one of 'model' or 'direct'");

    if (has_direct) {
        const auto& d = j.at("direct");
        if (!d.is_object() || !d.contains("A_t") || !d.contains("B_t") || !d.contains("C_t") ||
            !d.contains("H_t"))
            throw ValidationError(where + ".direct must contain A_t, B_t, C_t and H_t");
        ExperimentConfig::Assignment::DirectBlocks blocks;
        blocks.A_t = matrix_from_json(d.at("A_t"), where + ".direct.A_t");
        blocks.B_t = matrix_from_json(d.at("B_t"), where + ".direct.B_t");
        blocks.C_t = matrix_from_json(d.at("C_t"), where + ".direct.C_t");
        blocks.H_t = matrix_from_json(d.at("H_t"), where + ".direct.H_t");
        a.direct = std::move(blocks);
        return a;
    }

    const auto& model = j.at("model");
    if (model.is_string())
        a.model_name = model.get<std::string>();
    else
        a.model = model_from_json(model);
    if (!j.contains("protocol"))
        throw ValidationError(where + ".protocol is required when a model is given");
    a.protocol = protocol_from_json(j.at("protocol"));
    return a;
}

} // namespace

double default_horizon(TimeDomain domain) {
    return domain == TimeDomain::Continuous ? 50.0 : 500.0;
}

double default_epsilon(TimeDomain domain) {
    return domain == TimeDomain::Continuous ? 1e-4 : 1e-6;
}

std::string resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty())
        return flag_value;
    if (const char* env = std::getenv("WEAKSYNC_OUT"); env && *env)
        return env;
    return "weaksync-out";
}

ExperimentConfig experiment_config_from_json(const json& j, const std::string& base_dir) {
    if (!j.is_object())
        throw ValidationError("experiment config must be a JSON object");
    ExperimentConfig cfg;

    if (!j.contains("graph"))
        throw ValidationError("config field 'graph' is required");
    const auto& jg = j.at("graph");
    if (jg.is_object() && jg.contains("file")) {
        std::filesystem::path p = jg.at("file").get<std::string>();
        if (p.is_relative())
            p = std::filesystem::path(base_dir) / p;
        cfg.graph_file = p.string();
    } else if (jg.is_object() && jg.contains("generator")) {
        cfg.graph_generator = structured_spec_from_json(jg.at("generator"));
    } else if (jg.is_object() && jg.contains("n")) {
        cfg.graph_inline = jg;
    } else {
        throw ValidationError("config field 'graph' must contain 'file', 'generator' or an "
                              "inline graph with 'n'");
    }

    if (j.contains("seed"))
        cfg.seed = j.at("seed").get<std::uint64_t>();
    else if (cfg.graph_generator)
        throw ValidationError("config field 'seed' is required when a generator is used");

    if (!j.contains("agents") || !j.at("agents").is_array() || j.at("agents").empty())
        throw ValidationError("config field 'agents' must be a non-empty array");
    int idx = 0;
    for (const auto& ja : j.at("agents"))
        cfg.agents.push_back(assignment_from_json(ja, idx++));

    if (j.contains("sim")) {
        const auto& js = j.at("sim");
        if (!js.is_object())
            throw ValidationError("config field 'sim' must be an object");
        if (js.contains("time_domain")) {
            const std::string domain = js.at("time_domain").get<std::string>();
            if (domain == "continuous")
                cfg.time_domain = TimeDomain::Continuous;
            else if (domain == "discrete")
                cfg.time_domain = TimeDomain::Discrete;
            else
                throw ValidationError("sim.time_domain must be 'continuous' or 'discrete'");
        }
        if (js.contains("step"))
            cfg.step = js.at("step").get<double>();
        if (js.contains("horizon"))
            cfg.horizon = js.at("horizon").get<double>();
        if (js.contains("sample_stride"))
            cfg.sample_stride = js.at("sample_stride").get<int>();
        if (js.contains("initial_state")) {
            const auto& ji = js.at("initial_state");
            if (ji.is_array()) {
                cfg.initial_state = ji.get<std::vector<double>>();
            } else if (ji.is_object() && ji.contains("random_uniform")) {
                const auto range = ji.at("random_uniform").get<std::vector<double>>();
                if (range.size() != 2 || !(range[0] < range[1]))
                    throw ValidationError("sim.initial_state.random_uniform must be [lo, hi] "
                                          "with lo < hi");
                cfg.initial_state_uniform = {range[0], range[1]};
            } else {
                throw ValidationError("sim.initial_state must be an array or "
                                      "{\"random_uniform\": [lo, hi]}");
            }
        }
    }

    if (j.contains("criteria")) {
        const auto& jc = j.at("criteria");
        if (jc.contains("epsilon"))
            cfg.epsilon = jc.at("epsilon").get<double>();
        if (jc.contains("window_fraction"))
            cfg.window_fraction = jc.at("window_fraction").get<double>();
    }

    if (j.contains("outputs")) {
        for (const auto& o : j.at("outputs")) {
            const std::string name = o.get<std::string>();
            if (name == "csv")
                cfg.out_csv = true;
            else if (name == "report")
                cfg.out_report = true;
            else if (name == "plots")
                cfg.out_plots = true;
            else
                throw ValidationError("unknown output kind '" + name +
                                      "'; expected csv, report or plots");
        }
    }
    return cfg;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOverrides& overrides) {
    const std::uint64_t seed = overrides.seed.value_or(cfg.seed);

    DirectedWeightedGraph graph = [&] {
        if (cfg.graph_file)
            return load_graph(*cfg.graph_file);
        if (cfg.graph_generator)
            return generate_structured(*cfg.graph_generator, seed);
        return graph_from_json(*cfg.graph_inline);
    }();
    const int n = graph.size();

    // Resolve one closed-loop agent per node: explicit node lists first and
    // they must not overlap, then at most one 'all' entry fills the rest.
    auto build_agent = [&](const ExperimentConfig::Assignment& a,
                           std::size_t ai) -> ClosedLoopAgent {
        if (a.direct)
            return direct_closed_loop(a.direct->A_t, a.direct->B_t, a.direct->C_t,
                                      a.direct->H_t);
        AgentModel model = a.model ? *a.model : builtin_model(*a.model_name);
        if (model.time_domain != cfg.time_domain)
            throw ValidationError("agents[" + std::to_string(ai) +
                                  "]: model domain disagrees with sim.time_domain");
        return assemble_closed_loop(model, *a.protocol);
    };

    std::vector<std::optional<ClosedLoopAgent>> per_node(n);
    bool have_catch_all = false;
    for (std::size_t ai = 0; ai < cfg.agents.size(); ++ai) {
        const auto& a = cfg.agents[ai];
        if (a.all_nodes) {
            if (have_catch_all)
                throw ValidationError("more than one agents entry with nodes = 'all'");
            have_catch_all = true;
            continue;
        }
        const ClosedLoopAgent agent = build_agent(a, ai);
        for (int v : a.nodes) {
            if (v < 0 || v >= n)
                throw ValidationError("agents[" + std::to_string(ai) + "] assigns node " +
                                      std::to_string(v + 1) + " but the graph has " +
                                      std::to_string(n) + " nodes");
            if (per_node[v])
                throw ValidationError("node " + std::to_string(v + 1) +
                                      " has more than one agent assignment");
            per_node[v] = agent;
        }
    }
    for (std::size_t ai = 0; ai < cfg.agents.size(); ++ai) {
        const auto& a = cfg.agents[ai];
        if (!a.all_nodes)
            continue;
        const ClosedLoopAgent agent = build_agent(a, ai);
        for (int v = 0; v < n; ++v)
            if (!per_node[v])
                per_node[v] = agent;
    }
    for (int v = 0; v < n; ++v)
        if (!per_node[v])
            throw ValidationError("node " + std::to_string(v + 1) + " has no agent assignment");

    const LaplacianMatrix L = build_laplacian(graph);
    std::vector<ClosedLoopAgent> agents;
    agents.reserve(n);
    for (int v = 0; v < n; ++v)
        agents.push_back(std::move(*per_node[v]));
    NetworkSystem sys = assemble_network(std::move(agents), L);

    const BicomponentDecomposition d = decompose_bicomponents(graph);
    const CanonicalLaplacian canonical(L, d);
    const KernelStructure ks = compute_kernel_structure(canonical);

    SimConfig sim;
    sim.time_domain = cfg.time_domain;
    sim.step = overrides.step.value_or(cfg.step.value_or(0.01));
    sim.horizon = overrides.horizon.value_or(cfg.horizon.value_or(default_horizon(cfg.time_domain)));
    sim.sample_stride = cfg.sample_stride;
    if (cfg.initial_state) {
        if (static_cast<int>(cfg.initial_state->size()) != sys.total_states)
            throw ValidationError("sim.initial_state has " +
                                  std::to_string(cfg.initial_state->size()) +
                                  " entries but the network has " +
                                  std::to_string(sys.total_states) + " states");
        sim.initial_state =
            Eigen::Map<const Eigen::VectorXd>(cfg.initial_state->data(),
                                              static_cast<int>(cfg.initial_state->size()));
    } else {
        const auto range = cfg.initial_state_uniform.value_or(std::array<double, 2>{-5.0, 5.0});
        Rng rng(seed ^ kInitialStateSalt);
        sim.initial_state.resize(sys.total_states);
        for (int i = 0; i < sys.total_states; ++i)
            sim.initial_state(i) = rng.uniform(range[0], range[1]);
    }

    ConvergenceCriterion criterion;
    criterion.epsilon =
        overrides.epsilon.value_or(cfg.epsilon.value_or(default_epsilon(cfg.time_domain)));
    criterion.window_fraction = cfg.window_fraction;
    criterion.validate();

    Trajectory tr = simulate(sys, sim);
    SyncReport rep = build_sync_report(tr, d, ks, criterion);
    ordered_json report_json = sync_report_json(rep);
    report_json["analysis"] = analysis_report_json(graph, L, d, ks);

    std::vector<std::string> written;
    if (cfg.out_csv || cfg.out_report || cfg.out_plots) {
        const std::string out_dir = resolve_out_dir(overrides.out_dir);
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec)
            throw std::runtime_error("cannot create output directory " + out_dir + ": " +
                                     ec.message());
        if (cfg.out_csv) {
            if (overrides.trajectory_format == "json") {
                ordered_json jt;
                jt["times"] = tr.times;
                jt["states"] = matrix_to_json(tr.states);
                jt["outputs"] = matrix_to_json(tr.outputs);
                jt["signals"] = matrix_to_json(tr.signals);
                const std::string path = out_dir + "/trajectory.json";
                write_file(path, jt.dump(2) + "\n");
                written.push_back(path);
            } else {
                const std::string path = out_dir + "/trajectory.csv";
                write_file(path, trajectory_to_csv(tr));
                written.push_back(path);
            }
        }
        if (cfg.out_report) {
            const std::string path = out_dir + "/report.json";
            write_file(path, report_json.dump(2) + "\n");
            written.push_back(path);
        }
        if (cfg.out_plots) {
            const auto plots = emit_plots(tr, rep, out_dir);
            written.insert(written.end(), plots.begin(), plots.end());
        }
    }

    return ExperimentOutcome{std::move(graph), d, ks, std::move(tr), std::move(rep),
                             std::move(report_json), written};
}

} // namespace weaksync
