#pragma once

#include "weaksync/analysis.hpp"
#include "weaksync/simulate.hpp"

#include <string>
#include <vector>

namespace weaksync {

/// Writes line-plot SVGs into out_dir: zeta.svg with every agent's
/// ||zeta_i(t)|| trace, and one file per basic component combining the
/// pairwise disagreement magnitudes with the synchronized output estimate.
/// Output is deterministic for fixed input. Nothing is written when the
/// trajectory is empty.
std::vector<std::string> emit_plots(const Trajectory& tr, const SyncReport& rep,
                                    const std::string& out_dir);

} // namespace weaksync
