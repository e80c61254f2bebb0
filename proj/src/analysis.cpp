#include "weaksync/analysis.hpp"

#include "weaksync/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace weaksync {

void ConvergenceCriterion::validate() const {
    if (!(epsilon > 0.0))
        throw ValidationError("epsilon must be positive, got " + std::to_string(epsilon));
    if (!(window_fraction > 0.0) || window_fraction > 1.0)
        throw ValidationError("window_fraction must lie in (0, 1], got " +
                              std::to_string(window_fraction));
}

int tail_start(int samples, double window_fraction) {
    const int window =
        std::max(1, static_cast<int>(std::ceil(samples * window_fraction)));
    return std::max(0, samples - window);
}

namespace {

void check_trajectory(const Trajectory& tr) {
    if (tr.samples() == 0 || tr.n_agents == 0 || tr.p == 0)
        throw ValidationError("trajectory is empty");
}

void check_group(const Trajectory& tr, const std::vector<int>& group) {
    if (group.empty())
        throw ValidationError("node group is empty");
    for (int v : group)
        if (v < 0 || v >= tr.n_agents)
            throw ValidationError("unknown node index " + std::to_string(v + 1) +
                                  "; trajectory has " + std::to_string(tr.n_agents) + " agents");
}

} // namespace

std::vector<AgentStabilityVerdict> check_network_stability(const Trajectory& tr,
                                                           const ConvergenceCriterion& c) {
    check_trajectory(tr);
    c.validate();
    const int start = tail_start(tr.samples(), c.window_fraction);
    std::vector<AgentStabilityVerdict> verdicts(tr.n_agents);
    for (int i = 0; i < tr.n_agents; ++i) {
        double worst = 0.0;
        for (int s = start; s < tr.samples(); ++s)
            worst = std::max(worst, tr.agent_signals(i).col(s).cwiseAbs().maxCoeff());
        verdicts[i] = {i, worst <= c.epsilon, worst};
    }
    return verdicts;
}

bool network_stable(const std::vector<AgentStabilityVerdict>& verdicts) {
    return std::all_of(verdicts.begin(), verdicts.end(),
                       [](const AgentStabilityVerdict& v) { return v.pass; });
}

GroupSyncVerdict check_output_sync(const Trajectory& tr, const std::vector<int>& group,
                                   const ConvergenceCriterion& c) {
    check_trajectory(tr);
    check_group(tr, group);
    c.validate();
    const int start = tail_start(tr.samples(), c.window_fraction);
    double worst = 0.0;
    for (std::size_t a = 0; a < group.size(); ++a) {
        for (std::size_t b = a + 1; b < group.size(); ++b) {
            for (int s = start; s < tr.samples(); ++s) {
                const double diff = (tr.agent_outputs(group[a]).col(s) -
                                     tr.agent_outputs(group[b]).col(s))
                                        .cwiseAbs()
                                        .maxCoeff();
                worst = std::max(worst, diff);
            }
        }
    }
    return {worst <= c.epsilon, worst};
}

Eigen::MatrixXd sync_trajectory(const Trajectory& tr, const std::vector<int>& group) {
    check_trajectory(tr);
    check_group(tr, group);
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(tr.p, tr.samples());
    for (int v : group)
        mean += tr.agent_outputs(v);
    mean /= static_cast<double>(group.size());
    return mean;
}

std::vector<ConvexLimitResidual> check_convex_limits(const Trajectory& tr,
                                                     const BicomponentDecomposition& d,
                                                     const KernelStructure& ks,
                                                     const ConvergenceCriterion& c) {
    check_trajectory(tr);
    c.validate();
    if (!network_stable(check_network_stability(tr, c)))
        throw PreconditionError("convex-limit check requires a stable network");
    const int k = ks.k();
    std::vector<Eigen::MatrixXd> sync(k);
    for (int i = 0; i < k; ++i) {
        const auto& group = d.components[d.basic_components[i]];
        if (!check_output_sync(tr, group, c).pass)
            throw PreconditionError("convex-limit check requires output sync within basic "
                                    "component " +
                                    std::to_string(i + 1));
        sync[i] = sync_trajectory(tr, group);
    }

    const int start = tail_start(tr.samples(), c.window_fraction);
    std::vector<ConvexLimitResidual> out;
    for (int row = 0; row < ks.m0; ++row) {
        const int node = d.canonical_order[row];
        double worst = 0.0;
        for (int s = start; s < tr.samples(); ++s) {
            Eigen::VectorXd expect = Eigen::VectorXd::Zero(tr.p);
            for (int i = 0; i < k; ++i)
                expect += ks.beta(row, i) * sync[i].col(s);
            worst = std::max(worst,
                             (tr.agent_outputs(node).col(s) - expect).cwiseAbs().maxCoeff());
        }
        out.push_back({node, worst <= c.epsilon, worst});
    }
    return out;
}

Eigen::VectorXd left_null_vector(const Eigen::MatrixXd& L_sub) {
    if (L_sub.rows() != L_sub.cols() || L_sub.rows() < 1)
        throw ValidationError("Laplacian block must be square, got " +
                              std::to_string(L_sub.rows()) + "x" + std::to_string(L_sub.cols()));
    const int n = static_cast<int>(L_sub.rows());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(L_sub, Eigen::ComputeFullU);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double tol = rank_tolerance(sv(0));
    int deficiency = 0;
    for (int i = 0; i < n; ++i)
        if (sv(i) <= tol)
            ++deficiency;
    if (deficiency != 1)
        throw ValidationError("block has rank deficiency " + std::to_string(deficiency) +
                              ", expected exactly 1 (strongly connected component)");

    Eigen::VectorXd w = svd.matrixU().col(n - 1);
    const double total = w.sum();
    if (total == 0.0)
        throw StructuralError("left null vector has zero sum; cannot normalize");
    w /= total;
    if (w.minCoeff() <= 0.0)
        throw StructuralError("left null vector is not strictly positive; block is not a "
                              "strongly connected Laplacian");
    return w;
}

Eigen::VectorXd consensus_value(const Eigen::MatrixXd& L_sub, const Eigen::MatrixXd& x0_sub) {
    if (x0_sub.rows() != L_sub.rows())
        throw ValidationError("initial block has " + std::to_string(x0_sub.rows()) +
                              " rows but the Laplacian block is " + std::to_string(L_sub.rows()) +
                              "x" + std::to_string(L_sub.cols()));
    const Eigen::VectorXd w = left_null_vector(L_sub);
    return (w.transpose() * x0_sub).transpose();
}

LimitSeparationWitness limit_separation_witness(const Trajectory& tr,
                                                const BicomponentDecomposition& d,
                                                const KernelStructure& ks,
                                                const ConvergenceCriterion& c) {
    check_trajectory(tr);
    c.validate();
    const int k = ks.k();
    if (k < 2)
        throw PreconditionError("separation witness needs k >= 2 basic components");
    if (!network_stable(check_network_stability(tr, c)))
        throw PreconditionError("separation witness requires a stable network");

    const int start = tail_start(tr.samples(), c.window_fraction);
    bool nontrivial = false;
    for (int i = 0; i < k && !nontrivial; ++i) {
        const Eigen::MatrixXd ys =
            sync_trajectory(tr, d.components[d.basic_components[i]]);
        for (int s = start; s < tr.samples(); ++s)
            if (ys.col(s).cwiseAbs().maxCoeff() > c.epsilon) {
                nontrivial = true;
                break;
            }
    }
    if (!nontrivial)
        throw PreconditionError("separation witness requires at least one non-trivial "
                                "synchronized limit");

    LimitSeparationWitness best;
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            for (int a : d.components[d.basic_components[i]]) {
                for (int b : d.components[d.basic_components[j]]) {
                    double diff = 0.0;
                    for (int s = start; s < tr.samples(); ++s)
                        diff = std::max(diff, (tr.agent_outputs(a).col(s) -
                                               tr.agent_outputs(b).col(s))
                                                  .cwiseAbs()
                                                  .maxCoeff());
                    if (diff > best.difference) {
                        best.difference = diff;
                        best.node_a = a;
                        best.node_b = b;
                    }
                }
            }
        }
    }
    best.status = best.difference > c.epsilon ? WitnessStatus::Separated
                                              : WitnessStatus::IndistinguishableLimits;
    return best;
}

bool SyncReport::all_pass() const {
    if (!network_stable)
        return false;
    for (const Group& g : groups)
        if (!g.verdict.pass)
            return false;
    if (!convex_checked)
        return false;
    for (const ConvexLimitResidual& r : convex)
        if (!r.pass)
            return false;
    return true;
}

SyncReport build_sync_report(const Trajectory& tr, const BicomponentDecomposition& d,
                             const KernelStructure& ks, const ConvergenceCriterion& c) {
    SyncReport rep;
    rep.criterion = c;
    rep.stability = check_network_stability(tr, c);
    rep.network_stable = weaksync::network_stable(rep.stability);

    for (int i = 0; i < ks.k(); ++i) {
        SyncReport::Group g;
        g.bicomponent = i;
        g.nodes = d.components[d.basic_components[i]];
        g.verdict = check_output_sync(tr, g.nodes, c);
        g.y_sync = sync_trajectory(tr, g.nodes);
        rep.groups.push_back(std::move(g));
    }

    std::vector<int> all(tr.n_agents);
    for (int i = 0; i < tr.n_agents; ++i)
        all[i] = i;
    rep.global = check_output_sync(tr, all, c);

    try {
        rep.convex = check_convex_limits(tr, d, ks, c);
        rep.convex_checked = true;
    } catch (const PreconditionError&) {
        rep.convex_checked = false;
    }

    if (tr.r > 0) {
        const int start = tail_start(tr.samples(), c.window_fraction);
        rep.eta_tail_norms.resize(tr.n_agents, 0.0);
        for (int i = 0; i < tr.n_agents; ++i) {
            double worst = 0.0;
            for (int s = start; s < tr.samples(); ++s)
                worst = std::max(worst, tr.eta_signals.col(s)
                                            .segment(i * tr.r, tr.r)
                                            .cwiseAbs()
                                            .maxCoeff());
            rep.eta_tail_norms[i] = worst;
        }
    }
    return rep;
}

} // namespace weaksync
