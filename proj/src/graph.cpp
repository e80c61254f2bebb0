#include "weaksync/graph.hpp"

#include "weaksync/errors.hpp"

#include <algorithm>
#include <string>

namespace weaksync {

namespace {

void validate_weights(const Eigen::MatrixXd& w) {
    if (w.rows() < 1 || w.rows() != w.cols())
        throw ValidationError("adjacency matrix must be square with n >= 1, got " +
                              std::to_string(w.rows()) + "x" + std::to_string(w.cols()));
    for (int i = 0; i < w.rows(); ++i) {
        for (int j = 0; j < w.cols(); ++j) {
            const double v = w(i, j);
            if (!std::isfinite(v) || v < 0.0)
                throw ValidationError("adjacency(" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + ") = " + std::to_string(v) +
                                      " is not a finite non-negative weight");
            if (i == j && v != 0.0)
                throw ValidationError("adjacency(" + std::to_string(i + 1) + "," +
                                      std::to_string(i + 1) + ") = " + std::to_string(v) +
                                      " but self-loops are not allowed");
        }
    }
}

std::vector<std::vector<int>> successor_lists(const DirectedWeightedGraph& g) {
    const int n = g.size();
    std::vector<std::vector<int>> succ(n);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (g.weights()(v, u) > 0.0)
                succ[u].push_back(v);
    return succ;
}

// Iterative Tarjan. Emits components sinks-first (reverse topological order
// of the condensation).
std::vector<std::vector<int>> tarjan_sccs(const std::vector<std::vector<int>>& succ) {
    const int n = static_cast<int>(succ.size());
    constexpr int kUnvisited = -1;
    std::vector<int> index(n, kUnvisited);
    std::vector<int> lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    std::vector<std::vector<int>> sccs;
    int next_index = 0;

    struct Frame {
        int node;
        std::size_t next_child;
    };
    std::vector<Frame> call_stack;

    for (int root = 0; root < n; ++root) {
        if (index[root] != kUnvisited)
            continue;
        call_stack.push_back({root, 0});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!call_stack.empty()) {
            Frame& fr = call_stack.back();
            const int u = fr.node;
            if (fr.next_child < succ[u].size()) {
                const int v = succ[u][fr.next_child++];
                if (index[v] == kUnvisited) {
                    index[v] = lowlink[v] = next_index++;
                    stack.push_back(v);
                    on_stack[v] = true;
                    call_stack.push_back({v, 0});
                } else if (on_stack[v]) {
                    lowlink[u] = std::min(lowlink[u], index[v]);
                }
            } else {
                if (lowlink[u] == index[u]) {
                    std::vector<int> comp;
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp.push_back(w);
                    } while (w != u);
                    sccs.push_back(std::move(comp));
                }
                call_stack.pop_back();
                if (!call_stack.empty())
                    lowlink[call_stack.back().node] =
                        std::min(lowlink[call_stack.back().node], lowlink[u]);
            }
        }
    }
    return sccs;
}

} // namespace

int matrix_rank(const Eigen::MatrixXd& m) {
    if (m.rows() == 0 || m.cols() == 0)
        return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double tol = rank_tolerance(sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol)
            ++rank;
    return rank;
}

DirectedWeightedGraph::DirectedWeightedGraph(Eigen::MatrixXd weights)
    : weights_(std::move(weights)) {
    validate_weights(weights_);
}

DirectedWeightedGraph::DirectedWeightedGraph(int n, const std::vector<Edge>& edges)
    : weights_(Eigen::MatrixXd::Zero(std::max(n, 0), std::max(n, 0))) {
    if (n < 1)
        throw ValidationError("node count must be >= 1, got " + std::to_string(n));
    for (const Edge& e : edges) {
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
            throw ValidationError("edge (" + std::to_string(e.from + 1) + " -> " +
                                  std::to_string(e.to + 1) + ") outside node range 1.." +
                                  std::to_string(n));
        weights_(e.to, e.from) = e.weight;
    }
    validate_weights(weights_);
}

std::vector<Edge> DirectedWeightedGraph::edges() const {
    std::vector<Edge> out;
    for (int to = 0; to < size(); ++to)
        for (int from = 0; from < size(); ++from)
            if (weights_(to, from) > 0.0)
                out.push_back({from, to, weights_(to, from)});
    return out;
}

LaplacianMatrix::LaplacianMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
        throw ValidationError("Laplacian must be square with n >= 1");
    const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
    for (int i = 0; i < entries_.rows(); ++i) {
        for (int j = 0; j < entries_.cols(); ++j) {
            const double v = entries_(i, j);
            if (i == j ? v < 0.0 : v > 0.0)
                throw ValidationError("Laplacian(" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + ") = " + std::to_string(v) +
                                      " breaks the sign pattern");
        }
        if (std::abs(entries_.row(i).sum()) > 1e-9 * scale)
            throw ValidationError("Laplacian row " + std::to_string(i + 1) +
                                  " does not sum to zero");
    }
}

LaplacianMatrix build_laplacian(const DirectedWeightedGraph& g) {
    const Eigen::MatrixXd& a = g.weights();
    Eigen::MatrixXd l = -a;
    for (int i = 0; i < a.rows(); ++i)
        l(i, i) = a.row(i).sum();
    return LaplacianMatrix(std::move(l));
}

BicomponentDecomposition decompose_bicomponents(const DirectedWeightedGraph& g) {
    const int n = g.size();
    const auto succ = successor_lists(g);
    auto sccs = tarjan_sccs(succ);

    BicomponentDecomposition d;
    d.component_of.assign(n, -1);

    // Components listed by smallest member; members ascending.
    for (auto& comp : sccs)
        std::sort(comp.begin(), comp.end());
    std::sort(sccs.begin(), sccs.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) { return a[0] < b[0]; });
    for (auto& comp : sccs)
        d.components.push_back(std::move(comp));
    for (std::size_t c = 0; c < d.components.size(); ++c)
        for (int v : d.components[c])
            d.component_of[v] = static_cast<int>(c);

    // Basic iff no edge enters the component from outside.
    const int nc = static_cast<int>(d.components.size());
    d.basic.assign(nc, true);
    for (int u = 0; u < n; ++u)
        for (int v : succ[u])
            if (d.component_of[u] != d.component_of[v])
                d.basic[d.component_of[v]] = false;

    // Condensation successors between distinct components.
    std::vector<std::vector<int>> comp_succ(nc);
    for (int u = 0; u < n; ++u)
        for (int v : succ[u]) {
            const int cu = d.component_of[u];
            const int cv = d.component_of[v];
            if (cu != cv)
                comp_succ[cu].push_back(cv);
        }
    for (auto& s : comp_succ) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }

    // Non-basic blocks in reverse topological order of the condensation
    // (receivers before senders), so the grounded block comes out upper
    // block-triangular. Kahn's algorithm on unplaced successor counts,
    // tie-broken by smallest member for determinism.
    std::vector<int> pending(nc, 0);
    for (int c = 0; c < nc; ++c)
        if (!d.basic[c])
            for (int s : comp_succ[c])
                if (!d.basic[s])
                    ++pending[c];
    // pending[c] currently counts non-basic successors; a component is
    // placeable once all of those are placed.
    std::vector<std::vector<int>> nonbasic_preds(nc);
    for (int c = 0; c < nc; ++c)
        if (!d.basic[c])
            for (int s : comp_succ[c])
                if (!d.basic[s])
                    nonbasic_preds[s].push_back(c);

    std::vector<bool> placed(nc, false);
    const int nonbasic_count =
        static_cast<int>(std::count(d.basic.begin(), d.basic.end(), false));
    while (static_cast<int>(d.nonbasic_components.size()) < nonbasic_count) {
        int pick = -1;
        for (int c = 0; c < nc; ++c) {
            if (d.basic[c] || placed[c] || pending[c] != 0)
                continue;
            if (pick == -1 || d.components[c][0] < d.components[pick][0])
                pick = c;
        }
        if (pick == -1)
            throw StructuralError("condensation ordering stalled; cycle among components");
        placed[pick] = true;
        d.nonbasic_components.push_back(pick);
        for (int p : nonbasic_preds[pick])
            --pending[p];
    }

    for (int c = 0; c < nc; ++c)
        if (d.basic[c])
            d.basic_components.push_back(c);

    for (int c : d.nonbasic_components) {
        d.m0 += static_cast<int>(d.components[c].size());
        for (int v : d.components[c])
            d.canonical_order.push_back(v);
    }
    for (int c : d.basic_components) {
        d.basic_sizes.push_back(static_cast<int>(d.components[c].size()));
        for (int v : d.components[c])
            d.canonical_order.push_back(v);
    }

    d.canonical_position.assign(n, -1);
    for (int pos = 0; pos < n; ++pos)
        d.canonical_position[d.canonical_order[pos]] = pos;

    if (d.basic_components.empty())
        throw StructuralError("no basic component found; decomposition bug");
    return d;
}

bool has_directed_spanning_tree(const BicomponentDecomposition& d) {
    return d.k() == 1;
}

CanonicalLaplacian::CanonicalLaplacian(const LaplacianMatrix& L,
                                       const BicomponentDecomposition& d)
    : order_(d.canonical_order), m0_(d.m0), basic_sizes_(d.basic_sizes) {
    const int n = L.size();
    if (n != d.size())
        throw ValidationError("Laplacian size " + std::to_string(n) +
                              " does not match decomposition size " + std::to_string(d.size()));
    permuted_.resize(n, n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            permuted_(p, q) = L.matrix()(order_[p], order_[q]);

    int off = m0_;
    for (int sz : basic_sizes_) {
        block_offsets_.push_back(off);
        off += sz;
    }

    // The permutation must expose the block-triangular structure: each basic
    // block row is zero outside its diagonal block.
    for (int i = 0; i < k(); ++i) {
        const int o = block_offsets_[i];
        const int sz = basic_sizes_[i];
        for (int p = o; p < o + sz; ++p)
            for (int q = 0; q < n; ++q)
                if ((q < o || q >= o + sz) && permuted_(p, q) != 0.0)
                    throw StructuralError("basic block " + std::to_string(i + 1) +
                                          " has an external coupling entry; decomposition bug");
    }
}

Eigen::Block<const Eigen::MatrixXd> CanonicalLaplacian::grounded() const {
    return permuted_.block(0, 0, m0_, m0_);
}

Eigen::Block<const Eigen::MatrixXd> CanonicalLaplacian::coupling(int i) const {
    return permuted_.block(0, block_offsets_.at(i), m0_, basic_sizes_.at(i));
}

Eigen::Block<const Eigen::MatrixXd> CanonicalLaplacian::basic_block(int i) const {
    return permuted_.block(block_offsets_.at(i), block_offsets_.at(i), basic_sizes_.at(i),
                           basic_sizes_.at(i));
}

} // namespace weaksync
