#pragma once

#include "weaksync/graph.hpp"
#include "weaksync/kernel_structure.hpp"
#include "weaksync/simulate.hpp"

#include <Eigen/Dense>
#include <vector>

namespace weaksync {

/// Finite-horizon surrogate for "goes to zero": the sup-norm over the
/// trailing window_fraction of samples must stay below epsilon.
struct ConvergenceCriterion {
    double epsilon = 1e-4;
    double window_fraction = 0.2;

    void validate() const;
};

/// First sample index of the tail window.
int tail_start(int samples, double window_fraction);

struct AgentStabilityVerdict {
    int agent = 0; ///< 0-based
    bool pass = false;
    double tail_norm = 0.0; ///< max ||zeta_i(t)||_inf over the tail
};

struct GroupSyncVerdict {
    bool pass = false;
    double tail_disagreement = 0.0; ///< max pairwise ||y_a - y_b||_inf over the tail
};

struct ConvexLimitResidual {
    int node = 0; ///< 0-based, a non-basic agent
    bool pass = false;
    double residual = 0.0; ///< tail max ||y_j - sum_i beta(j,i) y_s^i||_inf
};

/// Network stability: every agent's received signal zeta_i dies out.
std::vector<AgentStabilityVerdict> check_network_stability(const Trajectory& tr,
                                                           const ConvergenceCriterion& c);
bool network_stable(const std::vector<AgentStabilityVerdict>& verdicts);

/// Output synchronization within a node group.
GroupSyncVerdict check_output_sync(const Trajectory& tr, const std::vector<int>& group,
                                   const ConvergenceCriterion& c);

/// Per-sample mean output over a node group (the synchronized-trajectory
/// estimator y_s; any representative is equivalent in the limit, the mean
/// averages out residual disagreement).
Eigen::MatrixXd sync_trajectory(const Trajectory& tr, const std::vector<int>& group);

/// Checks that each non-basic agent's output lands on the convex combination
/// of the basic components' synchronized trajectories with its beta weights.
/// Refuses (PreconditionError) unless the network is stable and every basic
/// component passed output sync, since the residuals would be meaningless.
std::vector<ConvexLimitResidual> check_convex_limits(const Trajectory& tr,
                                                     const BicomponentDecomposition& d,
                                                     const KernelStructure& ks,
                                                     const ConvergenceCriterion& c);

/// Normalized positive left null vector of a strongly connected Laplacian
/// block: w^T L = 0, w^T 1 = 1, w > 0. Errors unless the rank deficiency is
/// exactly one.
Eigen::VectorXd left_null_vector(const Eigen::MatrixXd& L_sub);

/// Independent consensus oracle for single integrators on a strongly
/// connected component: the trajectories settle on w^T x0 per channel.
Eigen::VectorXd consensus_value(const Eigen::MatrixXd& L_sub, const Eigen::MatrixXd& x0_sub);

enum class WitnessStatus {
    Separated,              ///< two basic components settle on distinguishable limits
    IndistinguishableLimits ///< the limits coincide; no witness exists
};

struct LimitSeparationWitness {
    WitnessStatus status = WitnessStatus::IndistinguishableLimits;
    int node_a = -1;
    int node_b = -1;
    double difference = 0.0;
};

/// Looks for two agents in different basic components whose outputs stay
/// apart, which certifies that global output synchronization fails. Requires
/// k >= 2, a stable network, and at least one non-trivial synchronized limit.
LimitSeparationWitness limit_separation_witness(const Trajectory& tr,
                                                const BicomponentDecomposition& d,
                                                const KernelStructure& ks,
                                                const ConvergenceCriterion& c);

/// Aggregated verdicts for one run.
struct SyncReport {
    struct Group {
        int bicomponent = 0; ///< 0-based basic component index
        std::vector<int> nodes;
        GroupSyncVerdict verdict;
        Eigen::MatrixXd y_sync; ///< p x samples
    };

    std::vector<AgentStabilityVerdict> stability;
    bool network_stable = false;
    std::vector<Group> groups;
    GroupSyncVerdict global;
    std::vector<ConvexLimitResidual> convex;
    bool convex_checked = false;
    /// Tail norms of the eta exchange rows, reported separately; they do not
    /// enter the stability verdict.
    std::vector<double> eta_tail_norms;
    ConvergenceCriterion criterion;

    /// Stability, per-group sync, and convex limits (when applicable) all
    /// pass. Global output sync is reported but never gates: it is expected
    /// to fail without a spanning tree.
    bool all_pass() const;
};

SyncReport build_sync_report(const Trajectory& tr, const BicomponentDecomposition& d,
                             const KernelStructure& ks, const ConvergenceCriterion& c);

} // namespace weaksync
