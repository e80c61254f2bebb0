#pragma once

#include <Eigen/Dense>
#include <vector>

namespace weaksync {

/// Relative threshold used for all rank and nonsingularity decisions.
inline double rank_tolerance(double largest_singular_value) {
    return 1e-9 * std::max(1.0, largest_singular_value);
}

/// Rank of a dense matrix by singular values against rank_tolerance().
int matrix_rank(const Eigen::MatrixXd& m);

struct Edge {
    int from = 0; ///< 0-based source node
    int to = 0;   ///< 0-based target node
    double weight = 1.0;
};

/// Weighted digraph on nodes 0..n-1. weight(i, j) is the weight of the edge
/// j -> i, so row i collects what node i receives. No self-loops, no negative
/// weights.
class DirectedWeightedGraph {
public:
    explicit DirectedWeightedGraph(Eigen::MatrixXd weights);
    DirectedWeightedGraph(int n, const std::vector<Edge>& edges);

    int size() const { return static_cast<int>(weights_.rows()); }
    const Eigen::MatrixXd& weights() const { return weights_; }
    double weight(int to, int from) const { return weights_(to, from); }
    bool has_edge(int from, int to) const { return weights_(to, from) > 0.0; }

    /// Edges in deterministic (to-major, then from) order.
    std::vector<Edge> edges() const;

private:
    Eigen::MatrixXd weights_;
};

/// Laplacian of a weighted digraph: diagonal entries are row sums of the
/// adjacency matrix, off-diagonal entries their negatives. Row sums are zero
/// by construction.
class LaplacianMatrix {
public:
    explicit LaplacianMatrix(Eigen::MatrixXd entries);

    int size() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd& matrix() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

private:
    Eigen::MatrixXd entries_;
};

LaplacianMatrix build_laplacian(const DirectedWeightedGraph& g);

/// Partition of the node set into maximal strongly connected components,
/// their classification into basic (no incoming edge from outside) and
/// non-basic, and the node ordering that puts the Laplacian into
/// block-triangular form: all non-basic nodes first, then one diagonal block
/// per basic component.
struct BicomponentDecomposition {
    /// Maximal SCCs; members sorted ascending, list ordered by smallest member.
    std::vector<std::vector<int>> components;
    /// Per component: true iff no edge enters it from another component.
    std::vector<bool> basic;
    /// node -> index into components.
    std::vector<int> component_of;
    /// canonical position -> node. Non-basic nodes first (reverse topological
    /// order of the condensation, so the grounded block is upper
    /// block-triangular), then the basic components.
    std::vector<int> canonical_order;
    /// node -> canonical position.
    std::vector<int> canonical_position;
    /// Number of nodes outside every basic component (M0).
    int m0 = 0;
    /// Sizes M1..Mk of the basic components, in canonical block order.
    std::vector<int> basic_sizes;
    /// Component ids (indices into components) of the basic blocks, canonical order.
    std::vector<int> basic_components;
    /// Component ids of the non-basic blocks, canonical order.
    std::vector<int> nonbasic_components;

    int k() const { return static_cast<int>(basic_sizes.size()); }
    int size() const { return static_cast<int>(canonical_order.size()); }
};

BicomponentDecomposition decompose_bicomponents(const DirectedWeightedGraph& g);

/// True iff the graph has a single basic component, which is equivalent to
/// the existence of a directed spanning tree.
bool has_directed_spanning_tree(const BicomponentDecomposition& d);

/// The Laplacian permuted into canonical block-triangular form, with
/// addressable views of the grounded block L0, the coupling blocks L0i, and
/// the basic diagonal blocks Li.
class CanonicalLaplacian {
public:
    CanonicalLaplacian(const LaplacianMatrix& L, const BicomponentDecomposition& d);

    const std::vector<int>& order() const { return order_; }
    const Eigen::MatrixXd& permuted() const { return permuted_; }
    int m0() const { return m0_; }
    int k() const { return static_cast<int>(basic_sizes_.size()); }
    const std::vector<int>& basic_sizes() const { return basic_sizes_; }

    /// L0: m0 x m0 principal block on the non-basic nodes.
    Eigen::Block<const Eigen::MatrixXd> grounded() const;
    /// L0i: m0 x Mi coupling block from basic component i (0-based) into L0.
    Eigen::Block<const Eigen::MatrixXd> coupling(int i) const;
    /// Li: Mi x Mi diagonal block of basic component i (0-based).
    Eigen::Block<const Eigen::MatrixXd> basic_block(int i) const;

private:
    std::vector<int> order_;
    Eigen::MatrixXd permuted_;
    int m0_ = 0;
    std::vector<int> basic_sizes_;
    std::vector<int> block_offsets_;
};

} // namespace weaksync
