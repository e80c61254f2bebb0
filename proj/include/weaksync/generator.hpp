#pragma once

#include "weaksync/graph.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace weaksync {

/// Recipe for a graph with a prescribed bicomponent structure: every listed
/// SCC is built strongly connected, basic SCCs receive no incoming edges,
/// non-basic SCCs at least one. Node ids are assigned blockwise in listing
/// order, basic components first.
struct StructuredGraphSpec {
    std::vector<int> basic_sizes;
    std::vector<int> nonbasic_sizes;
    /// Probability of each optional chord, both inside components and from
    /// earlier components into non-basic ones.
    double inter_edge_density = 0.15;
    std::array<double, 2> weight_range{0.5, 1.5};

    int node_count() const;
    void validate() const;
};

/// Builds the graph and post-checks its decomposition against the spec; a
/// mismatch is a StructuralError, never a silent wrong answer. Deterministic
/// for fixed (spec, seed).
DirectedWeightedGraph generate_structured(const StructuredGraphSpec& spec, std::uint64_t seed);

/// The fault-scenario benchmark structure: basic components of 30, 8 and 4
/// nodes feeding non-basic components of 10, 6 and 10 nodes.
StructuredGraphSpec fault_scenario_spec();

} // namespace weaksync
