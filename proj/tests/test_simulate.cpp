#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"
#include "weaksync/agents.hpp"
#include "weaksync/analysis.hpp"
#include "weaksync/errors.hpp"
#include "weaksync/graph.hpp"
#include "weaksync/simulate.hpp"

#include <cmath>

using namespace weaksync;

namespace {

ClosedLoopAgent integrator() {
    return direct_closed_loop(Eigen::MatrixXd::Zero(1, 1), -Eigen::MatrixXd::Ones(1, 1),
                              Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1));
}

ClosedLoopAgent scalar_agent(double a) {
    return direct_closed_loop(Eigen::MatrixXd::Constant(1, 1, a),
                              -Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1),
                              Eigen::MatrixXd::Ones(1, 1));
}

/// Uncoupled system whose matrix is exactly `a` (single node, zero Laplacian).
NetworkSystem lone_system(const Eigen::MatrixXd& a) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, a.rows());
    c(0, 0) = 1.0;
    const auto agent = direct_closed_loop(a, Eigen::MatrixXd::Zero(a.rows(), 1), c, c);
    const DirectedWeightedGraph g(Eigen::MatrixXd::Zero(1, 1));
    return assemble_network({agent}, build_laplacian(g));
}

NetworkSystem integrator_network(const DirectedWeightedGraph& g) {
    std::vector<ClosedLoopAgent> agents(g.size(), integrator());
    return assemble_network(std::move(agents), build_laplacian(g));
}

} // namespace

TEST_CASE("scalar decay reaches exp(-1) after one unit of time", "[simulate]") {
    const NetworkSystem sys = lone_system(Eigen::MatrixXd::Constant(1, 1, -1.0));
    SimConfig cfg;
    cfg.step = 0.01;
    cfg.horizon = 1.0;
    cfg.initial_state = Eigen::VectorXd::Ones(1);
    const Trajectory tr = simulate(sys, cfg);
    REQUIRE(tr.times.back() == Catch::Approx(1.0));
    REQUIRE_THAT(tr.states(0, tr.samples() - 1),
                 Catch::Matchers::WithinAbs(std::exp(-1.0), 1e-6));
}

TEST_CASE("zero dynamics hold the state constant", "[simulate]") {
    const NetworkSystem sys = lone_system(Eigen::MatrixXd::Zero(1, 1));
    SimConfig cfg;
    cfg.horizon = 5.0;
    cfg.initial_state = Eigen::VectorXd::Constant(1, 3.25);
    const Trajectory tr = simulate(sys, cfg);
    for (int s = 0; s < tr.samples(); ++s)
        REQUIRE(tr.states(0, s) == 3.25);
}

TEST_CASE("coupled pair follows the closed-form decay", "[simulate]") {
    const DirectedWeightedGraph g(2, {{0, 1, 1.0}});
    const NetworkSystem sys = integrator_network(g);
    SimConfig cfg;
    cfg.step = 0.01;
    cfg.horizon = 10.0;
    cfg.initial_state = (Eigen::VectorXd(2) << 0.0, 1.0).finished();
    const Trajectory tr = simulate(sys, cfg);
    for (int s = 0; s < tr.samples(); ++s) {
        REQUIRE(tr.signals(0, s) == 0.0);
        REQUIRE_THAT(tr.signals(1, s),
                     Catch::Matchers::WithinAbs(std::exp(-tr.times[s]), 1e-6));
    }
}

TEST_CASE("halving the step shrinks the error by the fourth-order factor", "[simulate]") {
    Rng rng(41);
    Eigen::MatrixXd raw(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            raw(i, j) = rng.uniform(-1.0, 1.0);
    Eigen::EigenSolver<Eigen::MatrixXd> es(raw);
    const double shift = es.eigenvalues().real().maxCoeff() + 0.5;
    const Eigen::MatrixXd a = raw - shift * Eigen::MatrixXd::Identity(4, 4);

    Eigen::VectorXd x0(4);
    for (int i = 0; i < 4; ++i)
        x0(i) = rng.uniform(-1.0, 1.0);
    const Eigen::VectorXd exact = testutil::expm_reference(a, x0, 1.0);

    const NetworkSystem sys = lone_system(a);
    auto final_error = [&](double h) {
        SimConfig cfg;
        cfg.step = h;
        cfg.horizon = 1.0;
        cfg.sample_stride = 1;
        cfg.initial_state = x0;
        const Trajectory tr = simulate(sys, cfg);
        return (tr.states.col(tr.samples() - 1) - exact).norm();
    };
    const double ratio = final_error(0.05) / final_error(0.025);
    REQUIRE(ratio >= 12.0);
    REQUIRE(ratio <= 20.0);
}

TEST_CASE("discrete stepping is bitwise repeated multiplication", "[simulate]") {
    Rng rng(42);
    Eigen::MatrixXd m(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m(i, j) = rng.uniform(-0.5, 0.5);
    Eigen::VectorXd x0(3);
    for (int i = 0; i < 3; ++i)
        x0(i) = rng.uniform(-1.0, 1.0);

    const NetworkSystem sys = lone_system(m);
    SimConfig cfg;
    cfg.time_domain = TimeDomain::Discrete;
    cfg.horizon = 40;
    cfg.sample_stride = 1;
    cfg.initial_state = x0;
    const Trajectory tr = simulate(sys, cfg);

    // oracle: the same row-by-row dot products, ascending column order
    Eigen::VectorXd x = x0;
    for (int step = 0; step <= 40; ++step) {
        for (int i = 0; i < 3; ++i)
            REQUIRE(tr.states(i, step) == x(i));
        Eigen::VectorXd next(3);
        for (int i = 0; i < 3; ++i) {
            double acc = 0.0;
            for (int j = 0; j < 3; ++j)
                acc += m(i, j) * x(j);
            next(i) = acc;
        }
        x = next;
    }
}

TEST_CASE("serial and parallel policies produce identical trajectories", "[simulate]") {
    Rng rng(43);
    const auto g = testutil::random_graph(rng, 6, 0.4);
    const NetworkSystem sys = integrator_network(g);
    SimConfig cfg;
    cfg.horizon = 5.0;
    cfg.initial_state = Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);
    cfg.policy = kernels::ExecutionPolicy::Serial;
    const Trajectory serial = simulate(sys, cfg);
    cfg.policy = kernels::ExecutionPolicy::Parallel;
    const Trajectory parallel = simulate(sys, cfg);
    REQUIRE(serial.states == parallel.states);
    REQUIRE(serial.signals == parallel.signals);
}

TEST_CASE("sampling covers step zero, the stride grid and the final step", "[simulate]") {
    const NetworkSystem sys = lone_system(Eigen::MatrixXd::Zero(1, 1));
    SimConfig cfg;
    cfg.step = 0.1;
    cfg.horizon = 10.5; // 105 steps
    cfg.sample_stride = 10;
    cfg.initial_state = Eigen::VectorXd::Ones(1);
    const Trajectory tr = simulate(sys, cfg);
    REQUIRE(tr.samples() == 12);
    REQUIRE(tr.times.front() == 0.0);
    REQUIRE(tr.times[1] == Catch::Approx(1.0));
    REQUIRE(tr.times.back() == Catch::Approx(10.5));
}

TEST_CASE("divergence guard reports the first offending time", "[simulate]") {
    const NetworkSystem sys = lone_system(Eigen::MatrixXd::Constant(1, 1, 1.0));
    SimConfig cfg;
    cfg.step = 0.01;
    cfg.horizon = 50.0;
    cfg.initial_state = Eigen::VectorXd::Ones(1);
    REQUIRE_THROWS_MATCHES(simulate(sys, cfg), DivergenceError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("diverged at t")));
    try {
        simulate(sys, cfg);
    } catch (const DivergenceError& e) {
        // exp(t) crosses 1e12 near t = 27.6
        REQUIRE(e.time() > 27.0);
        REQUIRE(e.time() < 28.5);
    }
}

TEST_CASE("signals equal the Kronecker Laplacian applied to outputs",
          "[simulate][property]") {
    Rng rng(44);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_index(5));
        const auto g = testutil::random_graph(rng, n, 0.4);
        const NetworkSystem sys = integrator_network(g);
        SimConfig cfg;
        cfg.horizon = 3.0;
        cfg.initial_state = Eigen::VectorXd::NullaryExpr(
            n, [&](Eigen::Index) { return rng.uniform(-2.0, 2.0); });
        const Trajectory tr = simulate(sys, cfg);
        const Eigen::MatrixXd lkron =
            testutil::kronecker(sys.laplacian, Eigen::MatrixXd::Identity(1, 1));
        for (int s = 0; s < tr.samples(); ++s)
            REQUIRE((tr.signals.col(s) - lkron * tr.outputs.col(s)).cwiseAbs().maxCoeff() <
                    1e-12);
    }
}

TEST_CASE("eta exchange rows are recorded separately from zeta", "[simulate]") {
    // integrators with the protocol xi' = -xi + zeta - zeta_hat, u = -xi,
    // eta = xi: the disagreement obeys (e, n)' = [[0,-1],[2,-3]](e, n)
    AgentModel model;
    model.A = Eigen::MatrixXd::Zero(1, 1);
    model.B = Eigen::MatrixXd::Ones(1, 1);
    model.C = Eigen::MatrixXd::Ones(1, 1);
    DynamicProtocol pr;
    pr.K = Eigen::MatrixXd::Constant(1, 1, -1.0);
    pr.G_zeta = Eigen::MatrixXd::Ones(1, 1);
    pr.G_eta = Eigen::MatrixXd::Constant(1, 1, -1.0);
    pr.M = Eigen::MatrixXd::Constant(1, 1, -1.0);
    pr.N = Eigen::MatrixXd::Ones(1, 1);
    const ClosedLoopAgent agent = assemble_closed_loop(model, pr);
    REQUIRE(agent.r() == 1);

    const DirectedWeightedGraph g(2, {{0, 1, 1.0}, {1, 0, 1.0}});
    const NetworkSystem sys = assemble_network({agent, agent}, build_laplacian(g));
    SimConfig cfg;
    cfg.horizon = 50.0;
    cfg.initial_state = (Eigen::VectorXd(4) << 1.0, 0.0, -1.0, 0.0).finished();
    const Trajectory tr = simulate(sys, cfg);

    REQUIRE(tr.r == 1);
    REQUIRE(tr.eta_signals.rows() == 2);
    REQUIRE(tr.signals.rows() == 2);
    // both exchanged signals die out
    const int last = tr.samples() - 1;
    REQUIRE(std::abs(tr.signals(0, last)) < 1e-8);
    REQUIRE(std::abs(tr.eta_signals(0, last)) < 1e-8);
    // at the start they are distinct signals: zeta_1 = 2, zeta_hat_1 = 0
    REQUIRE_THAT(tr.signals(0, 0), Catch::Matchers::WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(tr.eta_signals(0, 0), Catch::Matchers::WithinAbs(0.0, 1e-12));

    const auto d = decompose_bicomponents(g);
    const auto ks = compute_kernel_structure(CanonicalLaplacian(build_laplacian(g), d));
    const auto rep = build_sync_report(tr, d, ks, {1e-4, 0.2});
    REQUIRE(rep.network_stable);
    REQUIRE(rep.global.pass);
    REQUIRE(rep.eta_tail_norms.size() == 2);
    REQUIRE(rep.eta_tail_norms[0] < 1e-4);
}

TEST_CASE("superposition split follows the smallest-feeder rule", "[simulate]") {
    const DirectedWeightedGraph hub(3, {{0, 2, 1.0}, {1, 2, 3.0}});
    const NetworkSystem sys = integrator_network(hub);
    const auto d = decompose_bicomponents(hub);
    const CanonicalLaplacian cl(build_laplacian(hub), d);
    const auto ks = compute_kernel_structure(cl);

    const Eigen::VectorXd x0 = (Eigen::VectorXd(3) << 2.0, 6.0, 5.0).finished();
    const auto splits = superposition_split(x0, d, ks, sys);
    REQUIRE(splits.size() == 2);
    // node 3 is reachable from both basic components; the smallest index wins
    REQUIRE(splits[0] == (Eigen::VectorXd(3) << 2.0, 0.0, 5.0).finished());
    REQUIRE(splits[1] == (Eigen::VectorXd(3) << 0.0, 6.0, 0.0).finished());

    Eigen::VectorXd sum = splits[0] + splits[1];
    REQUIRE(sum == x0);
}

TEST_CASE("superposition split degenerates correctly", "[simulate]") {
    // k = 1: the single split is the full state
    const DirectedWeightedGraph chain(2, {{0, 1, 1.0}});
    const NetworkSystem chain_sys = integrator_network(chain);
    const auto dc = decompose_bicomponents(chain);
    const auto kc = compute_kernel_structure(CanonicalLaplacian(build_laplacian(chain), dc));
    const Eigen::VectorXd x0 = (Eigen::VectorXd(2) << 1.5, -2.0).finished();
    const auto splits = superposition_split(x0, dc, kc, chain_sys);
    REQUIRE(splits.size() == 1);
    REQUIRE(splits[0] == x0);

    // m0 = 0: pure block partition
    const DirectedWeightedGraph cycles(4,
                                       {{0, 1, 1.0}, {1, 0, 1.0}, {2, 3, 1.0}, {3, 2, 1.0}});
    const NetworkSystem cyc_sys = integrator_network(cycles);
    const auto dy = decompose_bicomponents(cycles);
    const auto ky = compute_kernel_structure(CanonicalLaplacian(build_laplacian(cycles), dy));
    const Eigen::VectorXd y0 = (Eigen::VectorXd(4) << 1, 2, 3, 4).finished();
    const auto parts = superposition_split(y0, dy, ky, cyc_sys);
    REQUIRE(parts.size() == 2);
    REQUIRE(parts[0] == (Eigen::VectorXd(4) << 1, 2, 0, 0).finished());
    REQUIRE(parts[1] == (Eigen::VectorXd(4) << 0, 0, 3, 4).finished());
}

TEST_CASE("superposition reconstructs the full trajectory", "[simulate][property]") {
    SECTION("k = 1 gives exactly zero deviation") {
        const DirectedWeightedGraph chain(2, {{0, 1, 1.0}});
        const NetworkSystem sys = integrator_network(chain);
        const auto d = decompose_bicomponents(chain);
        const auto ks = compute_kernel_structure(CanonicalLaplacian(build_laplacian(chain), d));
        SimConfig cfg;
        cfg.horizon = 10.0;
        cfg.initial_state = (Eigen::VectorXd(2) << 0.0, 1.0).finished();
        const auto splits = superposition_split(cfg.initial_state, d, ks, sys);
        REQUIRE(verify_superposition(sys, cfg, splits) == 0.0);
    }

    SECTION("hub integrators stay under 1e-10") {
        const DirectedWeightedGraph hub(3, {{0, 2, 1.0}, {1, 2, 3.0}});
        const NetworkSystem sys = integrator_network(hub);
        const auto d = decompose_bicomponents(hub);
        const auto ks = compute_kernel_structure(CanonicalLaplacian(build_laplacian(hub), d));
        SimConfig cfg;
        cfg.horizon = 50.0;
        cfg.initial_state = (Eigen::VectorXd(3) << 2.0, 6.0, -1.0).finished();
        const auto splits = superposition_split(cfg.initial_state, d, ks, sys);
        REQUIRE(verify_superposition(sys, cfg, splits) < 1e-10);
    }

    SECTION("random stable systems stay under 1e-9") {
        Rng rng(45);
        for (int trial = 0; trial < 10; ++trial) {
            const int n = 2 + static_cast<int>(rng.uniform_index(5));
            const auto g = testutil::random_graph(rng, n, 0.3);
            std::vector<ClosedLoopAgent> agents;
            for (int i = 0; i < n; ++i)
                agents.push_back(scalar_agent(-rng.uniform(0.5, 1.5)));
            const NetworkSystem sys = assemble_network(std::move(agents), build_laplacian(g));
            const auto d = decompose_bicomponents(g);
            const auto ks =
                compute_kernel_structure(CanonicalLaplacian(build_laplacian(g), d));
            SimConfig cfg;
            cfg.horizon = 20.0;
            cfg.initial_state = Eigen::VectorXd::NullaryExpr(
                n, [&](Eigen::Index) { return rng.uniform(-3.0, 3.0); });
            const auto splits = superposition_split(cfg.initial_state, d, ks, sys);
            REQUIRE(verify_superposition(sys, cfg, splits) < 1e-9);
        }
    }
}
