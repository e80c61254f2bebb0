#include "weaksync/agents.hpp"

#include "weaksync/errors.hpp"

#include <string>

namespace weaksync {

namespace {

std::string shape(const Eigen::MatrixXd& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require(bool ok, const std::string& msg) {
    if (!ok)
        throw ValidationError(msg);
}

} // namespace

void AgentModel::validate() const {
    require(A.rows() >= 1 && A.rows() == A.cols(), "agent A must be square, got " + shape(A));
    require(B.rows() == A.rows(),
            "agent B is " + shape(B) + " but A is " + shape(A) + "; expected B rows = A rows");
    require(C.cols() == A.rows() && C.rows() >= 1,
            "agent C is " + shape(C) + " but A is " + shape(A) + "; expected C cols = A rows");
    if (C_m)
        require(C_m->cols() == A.rows() && C_m->rows() >= 1,
                "agent C_m is " + shape(*C_m) + " but A is " + shape(A) +
                    "; expected C_m cols = A rows");
}

ClosedLoopAgent assemble_closed_loop(const AgentModel& model, const DynamicProtocol& protocol) {
    model.validate();
    const int n = model.state_dim();
    const int m = model.input_dim();
    const int p = model.output_dim();
    const int q = protocol.order();

    require(protocol.K.rows() == protocol.K.cols(), "protocol K must be square, got " +
                                                        shape(protocol.K));
    require(protocol.M.rows() == m && protocol.M.cols() == q,
            "protocol M is " + shape(protocol.M) + " but agent B is " + shape(model.B) +
                " and K is " + shape(protocol.K) + "; expected M to be " + std::to_string(m) +
                "x" + std::to_string(q));
    require(protocol.G_zeta.rows() == q && protocol.G_zeta.cols() == p,
            "protocol G_zeta is " + shape(protocol.G_zeta) + " but agent C is " +
                shape(model.C) + " and K is " + shape(protocol.K) + "; expected G_zeta to be " +
                std::to_string(q) + "x" + std::to_string(p));

    const bool has_eta_in = protocol.G_eta.size() > 0;
    const bool has_eta_out = protocol.N.size() > 0;
    int r = 0;
    if (has_eta_out) {
        require(protocol.N.cols() == q, "protocol N is " + shape(protocol.N) + " but K is " +
                                            shape(protocol.K) + "; expected N cols = " +
                                            std::to_string(q));
        r = static_cast<int>(protocol.N.rows());
    }
    if (has_eta_in) {
        require(protocol.G_eta.rows() == q,
                "protocol G_eta is " + shape(protocol.G_eta) + " but K is " + shape(protocol.K) +
                    "; expected G_eta rows = " + std::to_string(q));
        if (has_eta_out)
            require(protocol.G_eta.cols() == r,
                    "protocol G_eta is " + shape(protocol.G_eta) + " but N is " +
                        shape(protocol.N) + "; eta dimensions disagree");
        else
            r = static_cast<int>(protocol.G_eta.cols());
    }

    const bool has_meas = protocol.G_meas.size() > 0;
    if (has_meas) {
        require(model.C_m.has_value(), "protocol G_meas is " + shape(protocol.G_meas) +
                                           " but the agent has no measurement matrix C_m");
        require(protocol.G_meas.rows() == q && protocol.G_meas.cols() == model.C_m->rows(),
                "protocol G_meas is " + shape(protocol.G_meas) + " but C_m is " +
                    shape(*model.C_m) + "; expected G_meas to be " + std::to_string(q) + "x" +
                    std::to_string(model.C_m->rows()));
    }

    ClosedLoopAgent cl;
    cl.A_t = Eigen::MatrixXd::Zero(n + q, n + q);
    cl.A_t.topLeftCorner(n, n) = model.A;
    cl.A_t.topRightCorner(n, q) = model.B * protocol.M;
    if (has_meas)
        cl.A_t.bottomLeftCorner(q, n) = protocol.G_meas * (*model.C_m);
    cl.A_t.bottomRightCorner(q, q) = protocol.K;

    cl.B_t = Eigen::MatrixXd::Zero(n + q, p + r);
    cl.B_t.block(n, 0, q, p) = protocol.G_zeta;
    if (has_eta_in)
        cl.B_t.block(n, p, q, r) = protocol.G_eta;

    cl.C_t = Eigen::MatrixXd::Zero(p, n + q);
    cl.C_t.leftCols(n) = model.C;

    cl.H_t = Eigen::MatrixXd::Zero(p + r, n + q);
    cl.H_t.topRows(p) = cl.C_t;
    if (has_eta_out)
        cl.H_t.block(p, n, r, q) = protocol.N;
    return cl;
}

ClosedLoopAgent direct_closed_loop(Eigen::MatrixXd A_t, Eigen::MatrixXd B_t,
                                   Eigen::MatrixXd C_t, Eigen::MatrixXd H_t) {
    require(A_t.rows() >= 1 && A_t.rows() == A_t.cols(),
            "A_t must be square, got " + shape(A_t));
    const int d = static_cast<int>(A_t.rows());
    require(B_t.rows() == d, "B_t is " + shape(B_t) + " but A_t is " + shape(A_t) +
                                 "; expected B_t rows = " + std::to_string(d));
    require(C_t.cols() == d && C_t.rows() >= 1,
            "C_t is " + shape(C_t) + " but A_t is " + shape(A_t) + "; expected C_t cols = " +
                std::to_string(d));
    require(H_t.cols() == d && H_t.rows() >= C_t.rows(),
            "H_t is " + shape(H_t) + " but C_t is " + shape(C_t) +
                "; expected H_t cols = " + std::to_string(d) + " and H_t rows >= C_t rows");
    require(B_t.cols() == H_t.rows(),
            "B_t is " + shape(B_t) + " but H_t is " + shape(H_t) +
                "; expected B_t cols = H_t rows (the coupling width p + r)");
    require(H_t.topRows(C_t.rows()) == C_t,
            "H_t top block row must equal C_t; both expose the agent output");

    ClosedLoopAgent cl;
    cl.A_t = std::move(A_t);
    cl.B_t = std::move(B_t);
    cl.C_t = std::move(C_t);
    cl.H_t = std::move(H_t);
    return cl;
}

NetworkSystem assemble_network(std::vector<ClosedLoopAgent> agents, const LaplacianMatrix& L) {
    const int n_agents = static_cast<int>(agents.size());
    require(n_agents == L.size(), "got " + std::to_string(n_agents) + " agents but L is " +
                                      std::to_string(L.size()) + "x" + std::to_string(L.size()));

    NetworkSystem sys;
    sys.p = agents[0].p();
    sys.r = agents[0].r();
    for (int i = 0; i < n_agents; ++i) {
        require(agents[i].p() == sys.p,
                "agent " + std::to_string(i + 1) + " has output dimension " +
                    std::to_string(agents[i].p()) + " but agent 1 has " + std::to_string(sys.p));
        require(agents[i].r() == sys.r,
                "agent " + std::to_string(i + 1) + " has eta dimension " +
                    std::to_string(agents[i].r()) + " but agent 1 has " + std::to_string(sys.r));
        sys.state_offsets.push_back(sys.total_states);
        sys.total_states += agents[i].state_dim();
    }
    sys.n_agents = n_agents;
    sys.laplacian = L.matrix();

    const int d = sys.total_states;
    const int pr = sys.p + sys.r;
    sys.system_matrix = Eigen::MatrixXd::Zero(d, d);
    sys.output_map = Eigen::MatrixXd::Zero(n_agents * sys.p, d);
    sys.signal_map = Eigen::MatrixXd::Zero(n_agents * pr, d);

    for (int i = 0; i < n_agents; ++i) {
        const int oi = sys.state_offsets[i];
        const int di = agents[i].state_dim();
        sys.system_matrix.block(oi, oi, di, di) = agents[i].A_t;
        sys.output_map.block(i * sys.p, oi, sys.p, di) = agents[i].C_t;
        for (int j = 0; j < n_agents; ++j) {
            const double lij = sys.laplacian(i, j);
            if (lij == 0.0)
                continue;
            const int oj = sys.state_offsets[j];
            const int dj = agents[j].state_dim();
            sys.system_matrix.block(oi, oj, di, dj) += lij * (agents[i].B_t * agents[j].H_t);
            sys.signal_map.block(i * pr, oj, pr, dj) = lij * agents[j].H_t;
        }
    }

    sys.agents = std::move(agents);
    return sys;
}

namespace {

AgentModel make_model(std::initializer_list<std::initializer_list<double>> a,
                      std::initializer_list<std::initializer_list<double>> b,
                      std::initializer_list<double> c,
                      std::initializer_list<double> c_m, TimeDomain domain) {
    AgentModel m;
    m.A.resize(static_cast<int>(a.size()), static_cast<int>(a.begin()->size()));
    int i = 0;
    for (const auto& row : a) {
        int j = 0;
        for (double v : row)
            m.A(i, j++) = v;
        ++i;
    }
    m.B.resize(static_cast<int>(b.size()), static_cast<int>(b.begin()->size()));
    i = 0;
    for (const auto& row : b) {
        int j = 0;
        for (double v : row)
            m.B(i, j++) = v;
        ++i;
    }
    m.C.resize(1, static_cast<int>(c.size()));
    int j = 0;
    for (double v : c)
        m.C(0, j++) = v;
    if (c_m.size() > 0) {
        Eigen::MatrixXd cm(1, static_cast<int>(c_m.size()));
        j = 0;
        for (double v : c_m)
            cm(0, j++) = v;
        m.C_m = cm;
    }
    m.time_domain = domain;
    m.validate();
    return m;
}

} // namespace

const std::vector<std::string>& builtin_model_names() {
    static const std::vector<std::string> names = {"ct1", "ct2", "ct3", "ct-target",
                                                   "dt1", "dt2", "dt3", "dt4", "dt-target"};
    return names;
}

AgentModel builtin_model(const std::string& name) {
    const auto ct = TimeDomain::Continuous;
    const auto dt = TimeDomain::Discrete;
    if (name == "ct1")
        return make_model({{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}},
                          {{0, 1}, {0, 0}, {1, 0}, {0, 1}}, {1, 0, 0, 0}, {1, 1, 0, 0}, ct);
    if (name == "ct2")
        return make_model({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}, {{0}, {0}, {1}}, {1, 0, 0},
                          {1, 1, 0}, ct);
    if (name == "ct3")
        return make_model({{-1, 0, 0, -1, 0},
                           {0, 0, 1, 1, 0},
                           {0, 1, -1, 1, 0},
                           {0, 0, 0, 1, 1},
                           {-1, 1, 0, 1, 1}},
                          {{0, 0}, {0, 0}, {0, 1}, {0, 0}, {1, 0}}, {0, 0, 0, 1, 0},
                          {1, 1, 0, 0, 0}, ct);
    if (name == "ct-target")
        return make_model({{0, 1, 0}, {0, 0, 1}, {0, -1, 0}}, {{0}, {0}, {1}}, {1, 0, 0}, {},
                          ct);
    if (name == "dt1")
        return make_model({{0, 1, 0, 0}, {0, 0, 1, 0}, {-1, 0, 0, -1}, {0, -1, 0, 0}},
                          {{0, 0}, {0, 0}, {0, 1}, {1, 0}}, {0, 0, 0, 1}, {0, -1, 0, 1}, dt);
    if (name == "dt2")
        return make_model({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}, {{0}, {0}, {1}}, {1, 0, 0},
                          {1, 1, 0}, dt);
    if (name == "dt3")
        return make_model({{0, 1}, {0, 0}}, {{0}, {1}}, {1, 0}, {1, 1}, dt);
    if (name == "dt4")
        return make_model({{0, 1}, {-2, -2}}, {{0}, {1}}, {1, 0}, {1, 1}, dt);
    if (name == "dt-target")
        return make_model({{0, 1, 0}, {0, 0, 1}, {1, -2, 2}}, {{0}, {0}, {1}}, {1, 0, 0}, {},
                          dt);
    throw ValidationError("unknown builtin model '" + name + "'");
}

} // namespace weaksync
