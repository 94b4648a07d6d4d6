#pragma once

#include "netid/graph.hpp"

namespace netid {

struct AccessibilitySpec {
    IndexSet accessible;
    int i = 0, j = 0;
};

struct SelectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full-input selection: every w-in-neighbor of a predicted output becomes a
/// predictor input, disturbance-correlated inputs are absorbed into the
/// outputs, and indirect confounders toward A are blocked through B.
Selection select_full_input(const NetworkSpec& net, int i, int j);

/// Minimum-input selection: smallest D satisfying the parallel path and
/// loop condition; confounded inputs move to the predicted outputs, B stays
/// empty.
Selection select_minimum_input(const NetworkSpec& net, int i, int j);

/// User selection: works within a prior set of accessible nodes. Throws
/// SelectionError when no accessible extension satisfies the parallel path
/// and loop condition.
Selection select_user(const NetworkSpec& net, const AccessibilitySpec& spec);

/// Minimum-cardinality set S (i forced in) passing the parallel path and
/// loop condition; lexicographically smallest among ties.
IndexSet minimal_blocking_set(const NetworkSpec& net, int i, int j);

}  // namespace netid
