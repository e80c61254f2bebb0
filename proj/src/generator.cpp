#include "weaksync/generator.hpp"

#include "weaksync/errors.hpp"
#include "weaksync/rng.hpp"

#include <numeric>
#include <string>

namespace weaksync {

int StructuredGraphSpec::node_count() const {
    return std::accumulate(basic_sizes.begin(), basic_sizes.end(), 0) +
           std::accumulate(nonbasic_sizes.begin(), nonbasic_sizes.end(), 0);
}

void StructuredGraphSpec::validate() const {
    if (basic_sizes.empty())
        throw ValidationError("at least one basic component is required");
    for (int s : basic_sizes)
        if (s < 1)
            throw ValidationError("basic component sizes must be >= 1, got " +
                                  std::to_string(s));
    for (int s : nonbasic_sizes)
        if (s < 1)
            throw ValidationError("non-basic component sizes must be >= 1, got " +
                                  std::to_string(s));
    if (!(inter_edge_density > 0.0) || inter_edge_density > 1.0)
        throw ValidationError("inter_edge_density must lie in (0, 1], got " +
                              std::to_string(inter_edge_density));
    if (!(weight_range[0] > 0.0) || weight_range[1] < weight_range[0])
        throw ValidationError("weight range must satisfy 0 < lo <= hi");
}

namespace {

struct Block {
    int first = 0;
    int size = 0;
    bool basic = true;
};

void post_check(const DirectedWeightedGraph& g, const std::vector<Block>& blocks) {
    const BicomponentDecomposition d = decompose_bicomponents(g);
    if (static_cast<int>(d.components.size()) != static_cast<int>(blocks.size()))
        throw StructuralError("generator produced " + std::to_string(d.components.size()) +
                              " components, expected " + std::to_string(blocks.size()));
    for (const Block& b : blocks) {
        const int comp = d.component_of[b.first];
        if (static_cast<int>(d.components[comp].size()) != b.size ||
            d.components[comp].front() != b.first ||
            d.components[comp].back() != b.first + b.size - 1)
            throw StructuralError("generated component starting at node " +
                                  std::to_string(b.first + 1) + " does not match its plan");
        if (d.basic[comp] != b.basic)
            throw StructuralError("generated component starting at node " +
                                  std::to_string(b.first + 1) +
                                  " has the wrong basic classification");
    }
}

} // namespace

DirectedWeightedGraph generate_structured(const StructuredGraphSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);

    std::vector<Block> blocks;
    int next = 0;
    for (int s : spec.basic_sizes) {
        blocks.push_back({next, s, true});
        next += s;
    }
    for (int s : spec.nonbasic_sizes) {
        blocks.push_back({next, s, false});
        next += s;
    }
    const int n = next;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    const auto [lo, hi] = spec.weight_range;

    // Internal structure: a directed Hamiltonian cycle certifies strong
    // connectivity, optional chords thicken it.
    for (const Block& b : blocks) {
        if (b.size == 1)
            continue;
        for (int t = 0; t < b.size; ++t) {
            const int u = b.first + t;
            const int v = b.first + (t + 1) % b.size;
            w(v, u) = rng.uniform(lo, hi);
        }
        for (int a = 0; a < b.size; ++a) {
            for (int c = 0; c < b.size; ++c) {
                if (a == c)
                    continue;
                const int u = b.first + a;
                const int v = b.first + c;
                if (w(v, u) != 0.0)
                    continue;
                if (rng.bernoulli(spec.inter_edge_density))
                    w(v, u) = rng.uniform(lo, hi);
            }
        }
    }

    // Downstream coupling: edges only flow from earlier blocks into later
    // non-basic blocks, so no new cycles can form across components and basic
    // blocks keep their classification.
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
        const Block& b = blocks[bi];
        if (b.basic)
            continue;
        bool incoming = false;
        for (std::size_t ei = 0; ei < bi; ++ei) {
            const Block& e = blocks[ei];
            for (int a = 0; a < e.size; ++a)
                for (int c = 0; c < b.size; ++c)
                    if (rng.bernoulli(spec.inter_edge_density)) {
                        w(b.first + c, e.first + a) = rng.uniform(lo, hi);
                        incoming = true;
                    }
        }
        if (!incoming) {
            const Block& e = blocks[rng.uniform_index(bi)];
            const int u = e.first + static_cast<int>(rng.uniform_index(e.size));
            const int v = b.first + static_cast<int>(rng.uniform_index(b.size));
            w(v, u) = rng.uniform(lo, hi);
        }
    }

    DirectedWeightedGraph g(std::move(w));
    post_check(g, blocks);
    return g;
}

StructuredGraphSpec fault_scenario_spec() {
    StructuredGraphSpec spec;
    spec.basic_sizes = {30, 8, 4};
    spec.nonbasic_sizes = {10, 6, 10};
    return spec;
}

} // namespace weaksync
