#include "netid/selection.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace netid {

namespace {

// Enumerates subsets of `candidates` in (size, lexicographic) order and
// returns the first for which accept() is true.
bool first_subset(const IndexSet& candidates, int max_size, const std::function<bool(const IndexSet&)>& accept, IndexSet& out) {
    const int n = static_cast<int>(candidates.size());
    std::vector<int> pick;
    std::function<bool(int, int)> rec = [&](int start, int remaining) {
        if (remaining == 0) {
            IndexSet subset;
            for (int idx : pick) subset.push_back(candidates[idx]);
            if (accept(subset)) {
                out = subset;
                return true;
            }
            return false;
        }
        for (int k = start; k <= n - remaining; ++k) {
            pick.push_back(k);
            if (rec(k + 1, remaining - 1)) return true;
            pick.pop_back();
        }
        return false;
    };
    for (int size = 0; size <= std::min(max_size, n); ++size) {
        if (rec(0, size)) return true;
    }
    return false;
}

// Exact minimum node cut for larger networks: unit-capacity node-split
// max-flow that blocks all non-direct i->j paths and all loops through j.
IndexSet min_cut_blocking_set(const NetworkSpec& net, int i, int j) {
    const int L = net.L;
    // split nodes: in = 2k, out = 2k+1; source feeds i_out and j_out, sink is j_in
    const int nv = 2 * (L + 1) + 2;
    const int source = 0, sink = 1;
    auto node_in = [](int k) { return 2 * k; };
    auto node_out = [](int k) { return 2 * k + 1; };

    struct Edge {
        int to, cap, flow;
    };
    std::vector<Edge> edges;
    std::vector<std::vector<int>> adj(nv);
    auto add_edge = [&](int from, int to, int cap) {
        adj[from].push_back(static_cast<int>(edges.size()));
        edges.push_back({to, cap, 0});
        adj[to].push_back(static_cast<int>(edges.size()));
        edges.push_back({from, 0, 0});
    };

    const int inf = 1 << 28;
    for (int k = 1; k <= L; ++k) {
        if (k == i || k == j) continue;
        add_edge(node_in(k), node_out(k), 1);  // cutting this edge = measuring w_k
    }
    for (int from = 1; from <= L; ++from) {
        for (int to : net.out_neighbors(from)) {
            if (from == i && to == j) continue;  // the target edge itself
            const int head = (to == j) ? sink : node_in(to);
            if (from == i || from == j) continue;  // handled via source
            add_edge(node_out(from), head, inf);
        }
    }
    for (int src : {i, j}) {
        for (int to : net.out_neighbors(src)) {
            if (src == i && to == j) continue;
            add_edge(source, (to == j) ? sink : node_in(to), inf);
        }
    }

    // BFS augmenting paths (unit capacities keep this tiny)
    auto bfs_augment = [&]() -> int {
        std::vector<int> prev_edge(nv, -1);
        std::vector<bool> seen(nv, false);
        std::deque<int> queue{source};
        seen[source] = true;
        while (!queue.empty() && !seen[sink]) {
            const int cur = queue.front();
            queue.pop_front();
            for (int eid : adj[cur]) {
                const Edge& e = edges[eid];
                if (!seen[e.to] && e.cap - e.flow > 0) {
                    seen[e.to] = true;
                    prev_edge[e.to] = eid;
                    queue.push_back(e.to);
                }
            }
        }
        if (!seen[sink]) return 0;
        for (int v = sink; v != source;) {
            const int eid = prev_edge[v];
            edges[eid].flow += 1;
            edges[eid ^ 1].flow -= 1;
            v = edges[eid ^ 1].to;
        }
        return 1;
    };
    while (bfs_augment() > 0) {}

    // min cut = split edges from reachable to unreachable side
    std::vector<bool> seen(nv, false);
    std::deque<int> queue{source};
    seen[source] = true;
    while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        for (int eid : adj[cur]) {
            const Edge& e = edges[eid];
            if (!seen[e.to] && e.cap - e.flow > 0) {
                seen[e.to] = true;
                queue.push_back(e.to);
            }
        }
    }
    IndexSet cut{i};
    for (int k = 1; k <= L; ++k) {
        if (k == i || k == j) continue;
        if (seen[node_in(k)] && !seen[node_out(k)]) cut.push_back(k);
    }
    return make_set(cut);
}

}  // namespace

IndexSet minimal_blocking_set(const NetworkSpec& net, int i, int j) {
    if (!net.has_w_edge(i, j)) throw SelectionError("minimal_blocking_set: target edge is absent");
    IndexSet candidates;
    for (int k = 1; k <= net.L; ++k)
        if (k != i && k != j) candidates.push_back(k);

    if (net.L <= 16) {
        IndexSet extra;
        const bool found = first_subset(candidates, net.L, [&](const IndexSet& subset) {
            return check_parallel_path_loop(net, i, j, set_union({i}, subset)).passed();
        }, extra);
        if (!found) throw SelectionError("minimal_blocking_set: no blocking set exists");  // cannot happen: all nodes always work
        return set_union({i}, extra);
    }
    return min_cut_blocking_set(net, i, j);
}

namespace {

struct Workspace {
    const NetworkSpec& net;
    BoolGraph g;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> phi;
    IndexSet all;

    explicit Workspace(const NetworkSpec& n) : net(n), g(BoolGraph::from(n)), phi(n.noise_correlation_pattern()) {
        for (int k = 1; k <= n.L; ++k) all.push_back(k);
    }

    bool v_correlated(int a, int b) const { return phi(a - 1, b - 1); }
    IndexSet zset(const IndexSet& D, const IndexSet& Y) const { return set_minus(all, set_union(D, Y)); }
};

Selection assemble(int i, int j, const IndexSet& Q, const IndexSet& A, const IndexSet& B) {
    Selection sel;
    sel.i = i;
    sel.j = j;
    sel.Q = Q;
    sel.A = A;
    sel.B = B;
    if (!set_contains(Q, j)) sel.o = j;
    return sel;
}

// Condition 2 + measured-path condition for a candidate (A, B) split.
bool b_choice_ok(const Workspace& ws, int i, int j, const IndexSet& Q, const IndexSet& A, const IndexSet& B, const IndexSet& Y) {
    const IndexSet D = set_union(Q, set_union(A, B));
    const IndexSet Z = ws.zset(D, Y);
    if (!A.empty()) {
        if (!find_confounders(ws.g, A, Y, Z).empty()) return false;
        if (!B.empty() && !find_confounders(ws.g, A, B, Z).empty()) return false;
    }
    for (int b : B) {
        for (int src : {i, j}) {
            if (exists_path(ws.g, src, false, b, Z).found) return false;
        }
    }
    return true;
}

}  // namespace

Selection select_full_input(const NetworkSpec& net, int i, int j) {
    if (!net.has_w_edge(i, j)) throw SelectionError("select_full_input: target edge is absent");
    Workspace ws(net);

    // fixed point: D = in-neighbors of Y (plus i), Q = D-nodes disturbance-
    // correlated with some output
    IndexSet Y = make_set({j});
    IndexSet D, Q;
    for (int round = 0; round <= net.L + 1; ++round) {
        if (round > net.L) throw SelectionError("select_full_input: output extension failed to settle");
        D = {};
        for (int y : Y) D = set_union(D, make_set(net.in_neighbors(y)));
        D = set_union(D, {i});
        Q = {};
        for (int d : D)
            for (int y : Y)
                if (ws.v_correlated(d, y)) {
                    Q = set_union(Q, {d});
                    break;
                }
        const IndexSet grown = set_union(Y, Q);
        if (grown == Y) break;
        Y = grown;
    }

    IndexSet A = set_minus(D, Q);
    IndexSet B;
    for (int round = 0; round <= net.L; ++round) {
        if (b_choice_ok(ws, i, j, Q, A, B, Y)) break;

        // search the smallest blocking extension over unmeasured candidates
        const IndexSet candidates = set_minus(set_minus(ws.all, set_union(D, Y)), B);
        IndexSet extra;
        const bool blocked = first_subset(candidates, static_cast<int>(candidates.size()), [&](const IndexSet& subset) {
            return b_choice_ok(ws, i, j, Q, A, set_union(B, subset), Y);
        }, extra);
        if (blocked) {
            B = set_union(B, extra);
            break;
        }

        // fallback: move the lowest unresolvable A-node to B, else into Y/Q
        const IndexSet Z = ws.zset(set_union(D, B), Y);
        ConfounderReport conf = find_confounders(ws.g, A, set_union(Y, B), Z);
        int offender = 0;
        for (int a : A) {
            for (const auto& e : conf.entries) {
                if (e.to_input_side.found && !e.to_input_side.w_nodes.empty() && e.to_input_side.w_nodes.back() == a) {
                    offender = a;
                    break;
                }
            }
            if (offender) break;
        }
        if (offender == 0 && !A.empty()) offender = A.front();
        if (offender == 0) throw SelectionError("select_full_input: no resolvable decomposition found");

        const IndexSet A_try = set_minus(A, {offender});
        if (offender != i && b_choice_ok(ws, i, j, Q, A_try, set_union(B, {offender}), Y)) {
            A = A_try;
            B = set_union(B, {offender});
        } else {
            // absorb into the outputs and restart the whole construction
            Q = set_union(Q, {offender});
            Y = set_union(Y, {offender});
            for (int inner = 0; inner <= net.L; ++inner) {
                D = {};
                for (int y : Y) D = set_union(D, make_set(net.in_neighbors(y)));
                D = set_union(D, {i});
                IndexSet q2 = Q;
                for (int d : D)
                    for (int y : Y)
                        if (ws.v_correlated(d, y)) {
                            q2 = set_union(q2, {d});
                            break;
                        }
                const IndexSet grown = set_union(Y, q2);
                if (grown == Y && q2 == Q) break;
                Y = grown;
                Q = q2;
            }
            A = set_minus(D, Q);
            B = {};
        }
    }

    Selection sel = assemble(i, j, Q, A, B);
    sel.validate(net.L);
    if (!check_invariance_conditions(net, sel).passed()) throw SelectionError("select_full_input: resulting selection violates the invariance conditions");
    return sel;
}

Selection select_minimum_input(const NetworkSpec& net, int i, int j) {
    if (!net.has_w_edge(i, j)) throw SelectionError("select_minimum_input: target edge is absent");
    Workspace ws(net);

    const IndexSet D = minimal_blocking_set(net, i, j);
    IndexSet Y = make_set({j});
    IndexSet Q;
    bool moved = true;
    while (moved) {
        moved = false;
        const IndexSet Z = ws.zset(D, Y);
        for (int k : set_minus(D, Q)) {
            if (!find_confounders(ws.g, {k}, Y, Z).empty()) {
                Q = set_union(Q, {k});
                Y = set_union(Y, {k});
                moved = true;
                break;  // re-check against the grown output set
            }
        }
    }

    Selection sel = assemble(i, j, Q, set_minus(D, Q), {});
    sel.validate(net.L);
    if (!check_invariance_conditions(net, sel).passed()) throw SelectionError("select_minimum_input: resulting selection violates the invariance conditions");
    return sel;
}

Selection select_user(const NetworkSpec& net, const AccessibilitySpec& spec) {
    const int i = spec.i, j = spec.j;
    if (!net.has_w_edge(i, j)) throw SelectionError("select_user: target edge is absent");
    const IndexSet acc = make_set(spec.accessible);
    if (!set_contains(acc, i) || !set_contains(acc, j)) throw SelectionError("select_user: target nodes must be accessible");
    Workspace ws(net);
    const IndexSet inaccessible = set_minus(ws.all, acc);

    // step 2: smallest accessible extension satisfying the parallel path
    // and loop condition
    IndexSet base{i};
    {
        const IndexSet candidates = set_minus(acc, make_set({i, j}));
        IndexSet extra;
        const bool ok = first_subset(candidates, static_cast<int>(candidates.size()), [&](const IndexSet& subset) {
            return check_parallel_path_loop(net, i, j, set_union(base, subset)).passed();
        }, extra);
        if (!ok) throw SelectionError("select_user: no accessible node set satisfies the parallel path and loop condition");
        base = set_union(base, extra);
    }

    IndexSet D = base;
    IndexSet Y = make_set({j});
    IndexSet Q, A, B;

    // an indirect confounder is blockable when every unmeasured route into
    // the node crosses an accessible node
    auto unblockable_confounder = [&](int node, const IndexSet& Z) {
        const ConfounderReport conf = find_confounders(ws.g, {node}, Y, Z);
        for (const auto& e : conf.entries) {
            if (e.kind == ConfounderKind::Direct) return true;
            const IndexSet hidden = set_minus(Z, acc);
            if (exists_path(ws.g, e.e_index, true, node, hidden).found) return true;
        }
        return false;
    };

    for (int round = 0; round <= 2 * net.L; ++round) {
        // steps 3-4: accessible in-neighbors of Y, and accessible feeders of
        // inaccessible in-neighbors through inaccessible routes
        for (int y : Y) {
            for (int k : net.in_neighbors(y)) {
                if (set_contains(acc, k)) {
                    D = set_union(D, {k});
                    if (set_contains(Y, k)) Q = set_union(Q, {k});
                } else {
                    for (int a : set_minus(acc, make_set({j}))) {
                        if (a != k && exists_path(ws.g, a, false, k, set_minus(inaccessible, {k})).found) D = set_union(D, {a});
                    }
                }
            }
        }

        // step 5: target input absorbed on direct/unblockable confounding
        IndexSet Z = ws.zset(D, Y);
        if (!set_contains(Q, i) && unblockable_confounder(i, Z)) {
            Q = set_union(Q, {i});
            Y = set_union(Y, {i});
            continue;
        }

        // step 6: A membership (nodes already shifted to B stay there)
        Z = ws.zset(D, Y);
        A = {};
        for (int k : set_minus(set_minus(D, Q), B)) {
            if (!unblockable_confounder(k, Z)) A = set_union(A, {k});
        }

        // step 7: direct/unblockable confounded inputs go to B or to the outputs
        bool restart = false;
        for (int k : set_minus(set_minus(set_minus(D, Q), B), A)) {
            if (k == i || set_contains(B, k)) continue;
            const IndexSet B_try = set_union(B, {k});
            if (b_choice_ok(ws, i, j, Q, A, B_try, Y)) {
                B = B_try;
            } else {
                Q = set_union(Q, {k});
                Y = set_union(Y, {k});
                restart = true;
                break;
            }
        }
        if (restart) continue;

        // step 8: remaining blockable indirect confounders on A-nodes are
        // moved to B, blocked by added accessible inputs, or absorbed
        bool resolved_all = true;
        Z = ws.zset(D, Y);
        const IndexSet a_snapshot = A;
        for (int k : a_snapshot) {
            if (find_confounders(ws.g, {k}, Y, Z).empty()) continue;
            const IndexSet A_drop = set_minus(A, {k});
            if (k != i && b_choice_ok(ws, i, j, Q, A_drop, set_union(B, {k}), Y)) {
                A = A_drop;
                B = set_union(B, {k});
                continue;
            }
            const IndexSet candidates = set_minus(set_intersect(acc, Z), make_set({j}));
            IndexSet extra;
            const bool blocked = first_subset(candidates, static_cast<int>(candidates.size()), [&](const IndexSet& subset) {
                if (subset.empty()) return false;
                // classify the added blockers, then require all conditions
                IndexSet A2 = A, B2 = B;
                const IndexSet D2 = set_union(D, subset);
                const IndexSet Z2 = ws.zset(D2, Y);
                for (int s : subset) {
                    if (find_confounders(ws.g, {s}, Y, Z2).empty()) A2 = set_union(A2, {s});
                    else B2 = set_union(B2, {s});
                }
                if (!find_confounders(ws.g, {k}, Y, Z2).empty()) return false;
                return b_choice_ok(ws, i, j, Q, A2, B2, Y);
            }, extra);
            if (blocked) {
                D = set_union(D, extra);
                const IndexSet Z2 = ws.zset(D, Y);
                for (int s : extra) {
                    if (find_confounders(ws.g, {s}, Y, Z2).empty()) A = set_union(A, {s});
                    else B = set_union(B, {s});
                }
                Z = Z2;
                continue;
            }
            Q = set_union(Q, {k});
            Y = set_union(Y, {k});
            A = set_minus(A, {k});
            resolved_all = false;
            break;
        }
        if (!resolved_all) continue;

        Selection sel = assemble(i, j, Q, A, B);
        sel.validate(net.L);
        if (check_invariance_conditions(net, sel).passed()) return sel;
        throw SelectionError("select_user: constructed selection violates the invariance conditions");
    }
    throw SelectionError("select_user: algorithm failed to settle");
}

}  // namespace netid
