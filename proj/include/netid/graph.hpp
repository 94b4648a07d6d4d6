#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netid/network.hpp"

namespace netid {

using IndexSet = std::vector<int>;  // sorted, unique, 1-based

IndexSet make_set(std::vector<int> v);
bool set_contains(const IndexSet& s, int k);
IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet set_minus(const IndexSet& a, const IndexSet& b);
IndexSet set_intersect(const IndexSet& a, const IndexSet& b);
std::string set_to_string(const IndexSet& s);

/// Boolean graph over node signals w and white-noise sources e.
/// Edges come from the nonzero patterns of G and H; delay-free subsets
/// mark edges whose transfer has a nonzero feedthrough term.
struct BoolGraph {
    int L = 0;
    std::vector<std::vector<int>> w_out;             // [1..L], targets of w_k
    std::vector<std::vector<int>> e_out;             // [1..L], w-targets of e_l
    std::vector<std::vector<int>> w_out_delay_free;  // feedthrough != 0
    std::vector<std::vector<int>> e_out_delay_free;

    static BoolGraph from(const NetworkSpec& net);
};

BoolGraph build_graph(const NetworkSpec& net);

/// The index sets of one identification setup. Y = Q u {o}, D = Q u A u B,
/// Z = everything else. o is present exactly when j is not in Q, and then
/// o == j.
struct Selection {
    int j = 0;  // target output node
    int i = 0;  // target input node
    IndexSet Q, A, B;
    std::optional<int> o;

    IndexSet Yset() const;
    IndexSet U() const { return set_union(A, B); }
    IndexSet D() const { return set_union(Q, U()); }
    IndexSet Z(int L) const;
    bool has_o() const { return o.has_value(); }

    void validate(int L) const;  // throws std::invalid_argument on malformed sets
};

/// A path witness: optional e-source followed by the visited w-nodes
/// (endpoints included).
struct PathWitness {
    bool found = false;
    std::optional<int> e_source;
    std::vector<int> w_nodes;
};

/// Directed path query whose intermediate w-nodes must all lie in
/// `interior`. `from_e` selects whether `from` names an e- or a w-node.
PathWitness exists_path(const BoolGraph& g, int from, bool from_e, int to, const IndexSet& interior);

enum class ConfounderKind { Direct, Indirect };

struct ConfounderEntry {
    int e_index;
    ConfounderKind kind;
    PathWitness to_input_side;   // witness path toward X
    PathWitness to_output_side;  // witness path toward Y
};

struct ConfounderReport {
    std::vector<ConfounderEntry> entries;
    bool empty() const { return entries.empty(); }
    bool has(int e_index) const;
};

/// Every e_l with simultaneous paths (direct or Z-interior) into X and into
/// Yset. Direct means both witness paths are single e->w edges.
ConfounderReport find_confounders(const BoolGraph& g, const IndexSet& X, const IndexSet& Yset, const IndexSet& Z);

struct CheckItem {
    std::string label;
    bool passed;
    std::vector<int> witness;  // offending path as node list, when applicable
    std::string detail;
};

struct ConditionReport {
    std::string name;
    std::vector<CheckItem> items;
    bool passed() const {
        for (const auto& it : items)
            if (!it.passed) return false;
        return true;
    }
};

/// Parallel path and loop condition for target (i, j) with predictor set D:
/// every non-direct i->j path and every loop through j must pass through an
/// intermediate node in D.
ConditionReport check_parallel_path_loop(const NetworkSpec& net, int i, int j, const IndexSet& D);

/// Decomposition condition on (A, B): no confounders for A -> Y and A -> B.
ConditionReport check_decomposition(const NetworkSpec& net, const Selection& sel);

/// Full target-invariance conditions: parallel path/loop, decomposition,
/// i in A u Q, and the measured-path condition on B.
ConditionReport check_invariance_conditions(const NetworkSpec& net, const Selection& sel);

/// Per-parameterized-entry delay constraints of the model set: entry (y, d)
/// of the predictor map, true when constrained strictly proper. Rows follow
/// sel.Yset(), columns sel.D().
struct ModelDelayPattern {
    std::vector<std::vector<bool>> strictly_proper;
};

/// Delay conditions for consistency, evaluated on the original network via
/// delay-free reachability plus the parametrized model pattern.
ConditionReport check_delay_conditions(const NetworkSpec& net, const Selection& sel, const ModelDelayPattern& model);

}  // namespace netid
