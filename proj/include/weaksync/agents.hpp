#pragma once

#include "weaksync/graph.hpp"

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace weaksync {

enum class TimeDomain { Continuous, Discrete };

/// Heterogeneous LTI agent: x+ = A x + B u, y = C x, with an optional local
/// measurement y_m = C_m x for introspective agents.
struct AgentModel {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    std::optional<Eigen::MatrixXd> C_m;
    TimeDomain time_domain = TimeDomain::Continuous;

    int state_dim() const { return static_cast<int>(A.rows()); }
    int input_dim() const { return static_cast<int>(B.cols()); }
    int output_dim() const { return static_cast<int>(C.rows()); }

    void validate() const;
};

/// Dynamic protocol
///   xi+ = K xi + G_zeta zeta + G_eta zeta_hat + G_meas y_m
///   u   = M xi
///   eta = N xi
/// G_eta/N empty means no extra eta exchange (r = 0); G_meas empty means the
/// agent is non-introspective.
struct DynamicProtocol {
    Eigen::MatrixXd K;
    Eigen::MatrixXd G_zeta;
    Eigen::MatrixXd G_eta;
    Eigen::MatrixXd G_meas;
    Eigen::MatrixXd M;
    Eigen::MatrixXd N;

    int order() const { return static_cast<int>(K.rows()); }
};

/// Agent and protocol merged into one block:
///   x_e+ = A_t x_e + B_t coupling,  y = C_t x_e,  z = H_t x_e
/// where coupling for agent i is sum_j l(i,j) z_j. C_t is always the top
/// block row of H_t (both expose y).
struct ClosedLoopAgent {
    Eigen::MatrixXd A_t;
    Eigen::MatrixXd B_t;
    Eigen::MatrixXd C_t;
    Eigen::MatrixXd H_t;

    int state_dim() const { return static_cast<int>(A_t.rows()); }
    int p() const { return static_cast<int>(C_t.rows()); }
    int r() const { return static_cast<int>(H_t.rows() - C_t.rows()); }
};

ClosedLoopAgent assemble_closed_loop(const AgentModel& model, const DynamicProtocol& protocol);

/// Wraps caller-supplied blocks unchanged; admits static couplings such as
/// u = -zeta that the strictly proper protocol form cannot express.
ClosedLoopAgent direct_closed_loop(Eigen::MatrixXd A_t, Eigen::MatrixXd B_t,
                                   Eigen::MatrixXd C_t, Eigen::MatrixXd H_t);

/// The network closed loop x_e+ = [A + B(L (x) H)] x_e assembled blockwise:
/// block (i,j) of system_matrix is A_i delta_ij + l(i,j) B_i H_j, which is
/// the literal meaning of the Kronecker coupling when agents have different
/// state dimensions.
struct NetworkSystem {
    std::vector<ClosedLoopAgent> agents;
    Eigen::MatrixXd laplacian;
    Eigen::MatrixXd system_matrix;
    Eigen::MatrixXd output_map; ///< (N p) x states, stacked C_t blocks
    Eigen::MatrixXd signal_map; ///< (N (p+r)) x states, row block i = sum_j l(i,j) H_t_j
    std::vector<int> state_offsets;
    int total_states = 0;
    int n_agents = 0;
    int p = 0;
    int r = 0;
};

NetworkSystem assemble_network(std::vector<ClosedLoopAgent> agents, const LaplacianMatrix& L);

/// Library of the built-in benchmark models:
/// ct1 ct2 ct3 ct-target dt1 dt2 dt3 dt4 dt-target.
AgentModel builtin_model(const std::string& name);
const std::vector<std::string>& builtin_model_names();

} // namespace weaksync
