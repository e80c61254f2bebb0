#include "weaksync/io.hpp"

#include "weaksync/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace weaksync {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

DirectedWeightedGraph graph_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("n"))
        throw ValidationError("graph JSON must be an object with an 'n' field");
    const int n = j.at("n").get<int>();
    std::vector<Edge> edges;
    if (j.contains("edges")) {
        if (!j.at("edges").is_array())
            throw ValidationError("graph field 'edges' must be an array");
        int idx = 0;
        for (const auto& e : j.at("edges")) {
            if (!e.is_object() || !e.contains("from") || !e.contains("to"))
                throw ValidationError("edges[" + std::to_string(idx) +
                                      "] must be an object with 'from' and 'to'");
            Edge edge;
            edge.from = e.at("from").get<int>() - 1;
            edge.to = e.at("to").get<int>() - 1;
            edge.weight = e.value("weight", 1.0);
            edges.push_back(edge);
            ++idx;
        }
    }
    return DirectedWeightedGraph(n, edges);
}

nlohmann::ordered_json graph_to_json(const DirectedWeightedGraph& g) {
    ordered_json j;
    j["n"] = g.size();
    j["edges"] = ordered_json::array();
    for (const Edge& e : g.edges()) {
        ordered_json je;
        je["from"] = e.from + 1;
        je["to"] = e.to + 1;
        je["weight"] = e.weight;
        j["edges"].push_back(je);
    }
    return j;
}

DirectedWeightedGraph graph_from_edge_list(std::istream& in) {
    std::vector<Edge> edges;
    int max_node = 0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ss(line);
        int from = 0, to = 0;
        double weight = 1.0;
        if (!(ss >> from))
            continue; // blank line
        if (!(ss >> to))
            throw ValidationError("edge list line " + std::to_string(line_no) +
                                  ": expected 'from to [weight]'");
        ss >> weight;
        if (from < 1 || to < 1)
            throw ValidationError("edge list line " + std::to_string(line_no) +
                                  ": node ids are 1-based");
        edges.push_back({from - 1, to - 1, weight});
        max_node = std::max({max_node, from, to});
    }
    if (max_node == 0)
        throw ValidationError("edge list contains no edges; use the JSON format for "
                              "edgeless graphs");
    return DirectedWeightedGraph(max_node, edges);
}

DirectedWeightedGraph load_graph(const std::string& path) {
    const std::string text = read_file(path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ValidationError("cannot parse " + path + ": " + e.what());
        }
        return graph_from_json(j);
    }
    std::istringstream ss(text);
    return graph_from_edge_list(ss);
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw ValidationError(field + " must be a non-empty array of row arrays");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j.front().size());
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const auto& row = j.at(i);
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ValidationError(field + " row " + std::to_string(i + 1) + " has " +
                                  std::to_string(row.size()) + " entries, expected " +
                                  std::to_string(cols));
        for (int k = 0; k < cols; ++k) {
            if (!row.at(k).is_number())
                throw ValidationError(field + "(" + std::to_string(i + 1) + "," +
                                      std::to_string(k + 1) + ") is not a number");
            m(i, k) = row.at(k).get<double>();
        }
    }
    return m;
}

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

AgentModel model_from_json(const nlohmann::json& j) {
    AgentModel m;
    if (!j.is_object() || !j.contains("A") || !j.contains("B") || !j.contains("C"))
        throw ValidationError("agent model must be an object with A, B and C");
    m.A = matrix_from_json(j.at("A"), "A");
    m.B = matrix_from_json(j.at("B"), "B");
    m.C = matrix_from_json(j.at("C"), "C");
    if (j.contains("C_m"))
        m.C_m = matrix_from_json(j.at("C_m"), "C_m");
    const std::string domain = j.value("time_domain", "continuous");
    if (domain == "continuous")
        m.time_domain = TimeDomain::Continuous;
    else if (domain == "discrete")
        m.time_domain = TimeDomain::Discrete;
    else
        throw ValidationError("time_domain must be 'continuous' or 'discrete', got '" +
                              domain + "'");
    m.validate();
    return m;
}

nlohmann::ordered_json model_to_json(const AgentModel& m) {
    ordered_json j;
    j["A"] = matrix_to_json(m.A);
    j["B"] = matrix_to_json(m.B);
    j["C"] = matrix_to_json(m.C);
    if (m.C_m)
        j["C_m"] = matrix_to_json(*m.C_m);
    j["time_domain"] = m.time_domain == TimeDomain::Continuous ? "continuous" : "discrete";
    return j;
}

DynamicProtocol protocol_from_json(const nlohmann::json& j) {
    DynamicProtocol pr;
    if (!j.is_object() || !j.contains("K") || !j.contains("G_zeta") || !j.contains("M"))
        throw ValidationError("protocol must be an object with K, G_zeta and M");
    pr.K = matrix_from_json(j.at("K"), "K");
    pr.G_zeta = matrix_from_json(j.at("G_zeta"), "G_zeta");
    pr.M = matrix_from_json(j.at("M"), "M");
    if (j.contains("G_eta"))
        pr.G_eta = matrix_from_json(j.at("G_eta"), "G_eta");
    if (j.contains("G_meas"))
        pr.G_meas = matrix_from_json(j.at("G_meas"), "G_meas");
    if (j.contains("N"))
        pr.N = matrix_from_json(j.at("N"), "N");
    return pr;
}

StructuredGraphSpec structured_spec_from_json(const nlohmann::json& j) {
    StructuredGraphSpec spec;
    if (!j.is_object() || !j.contains("basic_sizes"))
        throw ValidationError("generator spec must be an object with 'basic_sizes'");
    spec.basic_sizes = j.at("basic_sizes").get<std::vector<int>>();
    if (j.contains("nonbasic_sizes"))
        spec.nonbasic_sizes = j.at("nonbasic_sizes").get<std::vector<int>>();
    if (j.contains("inter_edge_density"))
        spec.inter_edge_density = j.at("inter_edge_density").get<double>();
    if (j.contains("weight_range")) {
        const auto range = j.at("weight_range").get<std::vector<double>>();
        if (range.size() != 2)
            throw ValidationError("weight_range must be [lo, hi]");
        spec.weight_range = {range[0], range[1]};
    }
    spec.validate();
    return spec;
}

std::string trajectory_to_csv(const Trajectory& tr) {
    std::ostringstream out;
    out << "t";
    for (int i = 0; i < tr.states.rows(); ++i)
        out << ",x[" << i << "]";
    for (int i = 0; i < tr.outputs.rows(); ++i)
        out << ",y[" << i << "]";
    for (int i = 0; i < tr.signals.rows(); ++i)
        out << ",zeta[" << i << "]";
    out << "\n";
    for (int s = 0; s < tr.samples(); ++s) {
        out << format_double(tr.times[s]);
        for (int i = 0; i < tr.states.rows(); ++i)
            out << "," << format_double(tr.states(i, s));
        for (int i = 0; i < tr.outputs.rows(); ++i)
            out << "," << format_double(tr.outputs(i, s));
        for (int i = 0; i < tr.signals.rows(); ++i)
            out << "," << format_double(tr.signals(i, s));
        out << "\n";
    }
    return out.str();
}

Trajectory trajectory_from_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header))
        throw ValidationError("trajectory CSV is empty");

    int n_x = 0, n_y = 0, n_zeta = 0;
    {
        std::istringstream hs(header);
        std::string tok;
        bool first = true;
        while (std::getline(hs, tok, ',')) {
            if (first) {
                if (tok != "t")
                    throw ValidationError("trajectory CSV must start with a 't' column");
                first = false;
                continue;
            }
            if (tok.rfind("x[", 0) == 0)
                ++n_x;
            else if (tok.rfind("y[", 0) == 0)
                ++n_y;
            else if (tok.rfind("zeta[", 0) == 0)
                ++n_zeta;
            else
                throw ValidationError("unknown trajectory CSV column '" + tok + "'");
        }
    }

    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ValidationError("trajectory CSV line " + std::to_string(line_no) +
                                      ": '" + cell + "' is not a number");
            }
        }
        if (static_cast<int>(row.size()) != 1 + n_x + n_y + n_zeta)
            throw ValidationError("trajectory CSV line " + std::to_string(line_no) + " has " +
                                  std::to_string(row.size()) + " cells, expected " +
                                  std::to_string(1 + n_x + n_y + n_zeta));
        rows.push_back(std::move(row));
    }

    Trajectory tr;
    const int s_count = static_cast<int>(rows.size());
    tr.times.resize(s_count);
    tr.states.resize(n_x, s_count);
    tr.outputs.resize(n_y, s_count);
    tr.signals.resize(n_zeta, s_count);
    tr.eta_signals.resize(0, s_count);
    for (int s = 0; s < s_count; ++s) {
        tr.times[s] = rows[s][0];
        for (int i = 0; i < n_x; ++i)
            tr.states(i, s) = rows[s][1 + i];
        for (int i = 0; i < n_y; ++i)
            tr.outputs(i, s) = rows[s][1 + n_x + i];
        for (int i = 0; i < n_zeta; ++i)
            tr.signals(i, s) = rows[s][1 + n_x + n_y + i];
    }
    return tr;
}

nlohmann::ordered_json analysis_report_json(const DirectedWeightedGraph& g,
                                            const LaplacianMatrix& L,
                                            const BicomponentDecomposition& d,
                                            const KernelStructure& ks) {
    ordered_json j;
    j["n"] = g.size();
    j["k"] = d.k();
    j["m0"] = d.m0;
    j["spanning_tree"] = has_directed_spanning_tree(d);
    j["components"] = ordered_json::array();
    for (std::size_t c = 0; c < d.components.size(); ++c) {
        ordered_json jc;
        ordered_json nodes = ordered_json::array();
        for (int v : d.components[c])
            nodes.push_back(v + 1);
        jc["nodes"] = nodes;
        jc["basic"] = static_cast<bool>(d.basic[c]);
        j["components"].push_back(jc);
    }
    ordered_json order = ordered_json::array();
    for (int v : d.canonical_order)
        order.push_back(v + 1);
    j["canonical_order"] = order;
    j["beta"] = matrix_to_json(ks.beta);
    j["kernel_basis"] = matrix_to_json(ks.kernel_basis);

    j["reductions"] = ordered_json::array();
    for (int i = 0; i < ks.k(); ++i) {
        const ScaledReduction red = scaled_reduction(L, d, ks, i);
        ordered_json jr;
        jr["bicomponent"] = i + 1;
        ordered_json support = ordered_json::array();
        for (int v : red.support)
            support.push_back(v + 1);
        jr["support"] = support;
        jr["size"] = static_cast<int>(red.support.size());
        jr["rank"] = matrix_rank(red.reduced);
        jr["max_row_sum"] = red.reduced.rowwise().sum().cwiseAbs().maxCoeff();
        j["reductions"].push_back(jr);
    }
    return j;
}

nlohmann::ordered_json sync_report_json(const SyncReport& rep) {
    ordered_json j;
    j["epsilon"] = rep.criterion.epsilon;
    j["window_fraction"] = rep.criterion.window_fraction;
    j["network_stable"] = rep.network_stable;
    j["stability"] = ordered_json::array();
    for (const AgentStabilityVerdict& v : rep.stability) {
        ordered_json jv;
        jv["agent"] = v.agent + 1;
        jv["pass"] = v.pass;
        jv["tail_norm"] = v.tail_norm;
        j["stability"].push_back(jv);
    }
    j["groups"] = ordered_json::array();
    for (const SyncReport::Group& g : rep.groups) {
        ordered_json jg;
        jg["bicomponent"] = g.bicomponent + 1;
        ordered_json nodes = ordered_json::array();
        for (int v : g.nodes)
            nodes.push_back(v + 1);
        jg["nodes"] = nodes;
        jg["pass"] = g.verdict.pass;
        jg["tail_disagreement"] = g.verdict.tail_disagreement;
        ordered_json final = ordered_json::array();
        for (int c = 0; c < g.y_sync.rows(); ++c)
            final.push_back(g.y_sync(c, g.y_sync.cols() - 1));
        jg["y_sync_final"] = final;
        j["groups"].push_back(jg);
    }
    ordered_json global;
    global["pass"] = rep.global.pass;
    global["tail_disagreement"] = rep.global.tail_disagreement;
    j["global_output_sync"] = global;

    ordered_json convex;
    convex["checked"] = rep.convex_checked;
    convex["residuals"] = ordered_json::array();
    for (const ConvexLimitResidual& r : rep.convex) {
        ordered_json jr;
        jr["node"] = r.node + 1;
        jr["pass"] = r.pass;
        jr["residual"] = r.residual;
        convex["residuals"].push_back(jr);
    }
    j["convex_limits"] = convex;

    if (!rep.eta_tail_norms.empty())
        j["eta_tail_norms"] = rep.eta_tail_norms;
    j["all_pass"] = rep.all_pass();
    return j;
}

} // namespace weaksync
