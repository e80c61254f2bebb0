#include "weaksync/simulate.hpp"

#include "weaksync/errors.hpp"

#include <cmath>
#include <string>

namespace weaksync {

namespace {

long long step_count(const SimConfig& cfg) {
    if (cfg.horizon <= 0.0)
        throw ValidationError("horizon must be positive, got " + std::to_string(cfg.horizon));
    if (cfg.time_domain == TimeDomain::Discrete)
        return std::llround(cfg.horizon);
    if (cfg.step <= 0.0)
        throw ValidationError("step must be positive, got " + std::to_string(cfg.step));
    const long long n = std::llround(cfg.horizon / cfg.step);
    return std::max<long long>(n, 1);
}

void guard_finite(const Eigen::VectorXd& x, double t) {
    for (int i = 0; i < x.size(); ++i) {
        const double a = std::abs(x(i));
        if (!std::isfinite(a) || a > kDivergenceGuard)
            throw DivergenceError("state diverged at t = " + std::to_string(t) +
                                      " (|x| reached " + std::to_string(a) + ")",
                                  t);
    }
}

} // namespace

Trajectory simulate(const NetworkSystem& sys, const SimConfig& cfg) {
    const int d = sys.total_states;
    if (cfg.initial_state.size() != d)
        throw ValidationError("initial state has length " +
                              std::to_string(cfg.initial_state.size()) + " but the system has " +
                              std::to_string(d) + " states");
    if (cfg.sample_stride < 1)
        throw ValidationError("sample_stride must be >= 1, got " +
                              std::to_string(cfg.sample_stride));

    const long long nsteps = step_count(cfg);
    const bool discrete = cfg.time_domain == TimeDomain::Discrete;
    const double h = discrete ? 1.0 : cfg.step;

    std::vector<long long> sample_steps;
    for (long long s = 0; s <= nsteps; s += cfg.sample_stride)
        sample_steps.push_back(s);
    if (sample_steps.back() != nsteps)
        sample_steps.push_back(nsteps);
    const int n_samples = static_cast<int>(sample_steps.size());

    Trajectory tr;
    tr.n_agents = sys.n_agents;
    tr.p = sys.p;
    tr.r = sys.r;
    tr.times.resize(n_samples);
    tr.states.resize(d, n_samples);
    tr.outputs.resize(sys.n_agents * sys.p, n_samples);
    tr.signals.resize(sys.n_agents * sys.p, n_samples);
    tr.eta_signals.resize(sys.n_agents * sys.r, n_samples);

    const kernels::RowMajorMatrix m(sys.system_matrix);
    const int pr = sys.p + sys.r;
    Eigen::VectorXd x = cfg.initial_state;
    Eigen::VectorXd k1(d), k2(d), k3(d), k4(d), xt(d);
    Eigen::VectorXd stacked(sys.n_agents * pr);

    auto record = [&](int slot, long long step) {
        const double t = step * h;
        tr.times[slot] = t;
        tr.states.col(slot) = x;
        tr.outputs.col(slot) = sys.output_map * x;
        stacked = sys.signal_map * x;
        for (int i = 0; i < sys.n_agents; ++i) {
            tr.signals.col(slot).segment(i * sys.p, sys.p) = stacked.segment(i * pr, sys.p);
            if (sys.r > 0)
                tr.eta_signals.col(slot).segment(i * sys.r, sys.r) =
                    stacked.segment(i * pr + sys.p, sys.r);
        }
    };

    int slot = 0;
    guard_finite(x, 0.0);
    record(slot++, 0);

    for (long long step = 1; step <= nsteps; ++step) {
        if (discrete) {
            kernels::matvec(m, x.data(), k1.data(), cfg.policy);
            x.swap(k1);
        } else {
            kernels::matvec(m, x.data(), k1.data(), cfg.policy);
            xt = x + (h / 2.0) * k1;
            kernels::matvec(m, xt.data(), k2.data(), cfg.policy);
            xt = x + (h / 2.0) * k2;
            kernels::matvec(m, xt.data(), k3.data(), cfg.policy);
            xt = x + h * k3;
            kernels::matvec(m, xt.data(), k4.data(), cfg.policy);
            x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        guard_finite(x, step * h);
        if (step == sample_steps[slot])
            record(slot++, step);
    }
    return tr;
}

std::vector<Eigen::VectorXd> superposition_split(const Eigen::VectorXd& x0,
                                                 const BicomponentDecomposition& d,
                                                 const KernelStructure& ks,
                                                 const NetworkSystem& sys) {
    if (x0.size() != sys.total_states)
        throw ValidationError("initial state has length " + std::to_string(x0.size()) +
                              " but the system has " + std::to_string(sys.total_states) +
                              " states");
    const int k = ks.k();
    std::vector<Eigen::VectorXd> splits(k, Eigen::VectorXd::Zero(sys.total_states));

    for (int v = 0; v < sys.n_agents; ++v) {
        const int comp = d.component_of[v];
        int target = -1;
        if (d.basic[comp]) {
            for (int i = 0; i < k; ++i)
                if (d.basic_components[i] == comp) {
                    target = i;
                    break;
                }
        } else {
            const int row = d.canonical_position[v];
            for (int i = 0; i < k; ++i)
                if (ks.beta(row, i) > kSupportTolerance) {
                    target = i;
                    break;
                }
        }
        if (target < 0)
            throw StructuralError("agent " + std::to_string(v + 1) +
                                  " is reachable from no basic component; kernel bug");
        const int off = sys.state_offsets[v];
        const int dim = sys.agents[v].state_dim();
        splits[target].segment(off, dim) = x0.segment(off, dim);
    }
    return splits;
}

double verify_superposition(const NetworkSystem& sys, const SimConfig& cfg,
                            const std::vector<Eigen::VectorXd>& splits) {
    const Trajectory full = simulate(sys, cfg);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(full.states.rows(), full.states.cols());
    for (const Eigen::VectorXd& x0 : splits) {
        SimConfig part = cfg;
        part.initial_state = x0;
        sum += simulate(sys, part).states;
    }
    return (sum - full.states).cwiseAbs().maxCoeff();
}

} // namespace weaksync
