#pragma once

#include "weaksync/agents.hpp"
#include "weaksync/graph.hpp"
#include "weaksync/kernel_structure.hpp"
#include "weaksync/kernels.hpp"

#include <Eigen/Dense>
#include <vector>

namespace weaksync {

/// Simulation states above this magnitude abort with DivergenceError.
inline constexpr double kDivergenceGuard = 1e12;

struct SimConfig {
    TimeDomain time_domain = TimeDomain::Continuous;
    /// Integration step (seconds). Ignored for discrete time.
    double step = 0.01;
    /// Final time for continuous time; step count for discrete time.
    double horizon = 50.0;
    /// Record every sample_stride-th step (step 0 and the final step always).
    int sample_stride = 10;
    Eigen::VectorXd initial_state;
    kernels::ExecutionPolicy policy = kernels::ExecutionPolicy::Auto;
};

/// Sampled simulation record. One column per sample. signals holds the
/// stacked relative-output measurements zeta (N p rows); eta_signals holds
/// the extra exchange rows when r > 0, else it has zero rows.
struct Trajectory {
    std::vector<double> times;
    Eigen::MatrixXd states;
    Eigen::MatrixXd outputs;
    Eigen::MatrixXd signals;
    Eigen::MatrixXd eta_signals;
    int n_agents = 0;
    int p = 0;
    int r = 0;

    int samples() const { return static_cast<int>(times.size()); }

    /// Rows of outputs belonging to one agent.
    Eigen::Block<const Eigen::MatrixXd> agent_outputs(int i) const {
        return outputs.block(i * p, 0, p, outputs.cols());
    }
    /// Rows of signals (zeta) belonging to one agent.
    Eigen::Block<const Eigen::MatrixXd> agent_signals(int i) const {
        return signals.block(i * p, 0, p, signals.cols());
    }
};

/// Fixed-step integration of x+ = M x: classical fourth-order Runge-Kutta in
/// continuous time, the literal recursion in discrete time.
Trajectory simulate(const NetworkSystem& sys, const SimConfig& cfg);

/// Splits an initial state into k per-bicomponent initial states: the block
/// of an agent inside basic component i goes to split i, the block of a
/// non-basic agent to the smallest i whose beta entry is nonzero. The splits
/// sum to the original state exactly.
std::vector<Eigen::VectorXd> superposition_split(const Eigen::VectorXd& x0,
                                                 const BicomponentDecomposition& d,
                                                 const KernelStructure& ks,
                                                 const NetworkSystem& sys);

/// Simulates every split plus the full state under the same config and
/// returns max_t ||sum_i x^i(t) - x(t)||_inf.
double verify_superposition(const NetworkSystem& sys, const SimConfig& cfg,
                            const std::vector<Eigen::VectorXd>& splits);

} // namespace weaksync
