#pragma once

// Brute-force reference implementations used only by tests to validate the
// aggregation rules. Deliberately naive (full distance matrices, repeated
// scans) and written without touching the aggregation module's internals;
// they share only the core types and loss evaluator.

#include <vector>

#include "zeno/aggregation.hpp"
#include "zeno/param_vector.hpp"

namespace zeno::oracles {

// Index chosen by the nearest-neighbour rule, recomputed from the full
// m x m distance table with explicit per-row sorting.
int krum_bruteforce(const GradientSet& g, int b);

// Per-coordinate median via full sort of each coordinate column.
ParamVector median_bruteforce(const GradientSet& g);

// Plain mean recomputed with reverse-order summation.
ParamVector mean_bruteforce(const GradientSet& g);

// Indices of the m - b best-scored candidates, highest first, scoring each
// candidate independently (f_r(x) recomputed per candidate) and selecting by
// repeated scan instead of sorting.
std::vector<int> zeno_bruteforce(const GradientSet& g, int b,
                                 const ParamVector& x,
                                 const ScoreOracle& oracle);

}  // namespace zeno::oracles
