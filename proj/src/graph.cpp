#include "netid/graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace netid {

IndexSet make_set(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

bool set_contains(const IndexSet& s, int k) { return std::binary_search(s.begin(), s.end(), k); }

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

IndexSet set_minus(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

IndexSet set_intersect(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::string set_to_string(const IndexSet& s) {
    std::ostringstream os;
    os << "{";
    for (size_t k = 0; k < s.size(); ++k) os << (k ? "," : "") << s[k];
    os << "}";
    return os.str();
}

BoolGraph BoolGraph::from(const NetworkSpec& net) {
    BoolGraph g;
    g.L = net.L;
    g.w_out.assign(net.L + 1, {});
    g.e_out.assign(net.L + 1, {});
    g.w_out_delay_free.assign(net.L + 1, {});
    g.e_out_delay_free.assign(net.L + 1, {});
    for (int from = 1; from <= net.L; ++from) {
        for (int to = 1; to <= net.L; ++to) {
            if (from != to && net.has_w_edge(from, to)) {
                g.w_out[from].push_back(to);
                if (net.g(to, from).feedthrough() != 0.0) g.w_out_delay_free[from].push_back(to);
            }
            if (net.has_e_edge(from, to)) {
                g.e_out[from].push_back(to);
                if (net.h(to, from).feedthrough() != 0.0) g.e_out_delay_free[from].push_back(to);
            }
        }
    }
    return g;
}

BoolGraph build_graph(const NetworkSpec& net) { return BoolGraph::from(net); }

IndexSet Selection::Yset() const { return o ? set_union(Q, {*o}) : Q; }

IndexSet Selection::Z(int L) const {
    IndexSet all(L);
    for (int k = 0; k < L; ++k) all[k] = k + 1;
    return set_minus(all, set_union(D(), Yset()));
}

void Selection::validate(int L) const {
    auto in_range = [L](int k) { return k >= 1 && k <= L; };
    if (!in_range(i) || !in_range(j)) throw std::invalid_argument("Selection: target indices out of range");
    for (const IndexSet* s : {&Q, &A, &B})
        for (int k : *s)
            if (!in_range(k)) throw std::invalid_argument("Selection: node index out of range");
    if (!set_intersect(A, B).empty()) throw std::invalid_argument("Selection: A and B must be disjoint");
    if (!set_intersect(Q, U()).empty()) throw std::invalid_argument("Selection: Q and U must be disjoint");
    const bool j_in_q = set_contains(Q, j);
    if (j_in_q && o) throw std::invalid_argument("Selection: o must be void when j is in Q");
    if (!j_in_q && (!o || *o != j)) throw std::invalid_argument("Selection: o must equal j when j is not in Q");
    if (o && set_contains(D(), *o)) throw std::invalid_argument("Selection: o cannot be a predictor input");
    if (!set_contains(D(), i)) throw std::invalid_argument("Selection: i must be a predictor input");
    if (!set_contains(Yset(), j)) throw std::invalid_argument("Selection: j must be a predicted output");
}

PathWitness exists_path(const BoolGraph& g, int from, bool from_e, int to, const IndexSet& interior) {
    PathWitness out;
    std::vector<int> parent(g.L + 1, 0);
    std::deque<int> queue;

    auto push_start = [&](int w) {
        if (parent[w] != 0) return;
        parent[w] = -1;  // start marker
        queue.push_back(w);
    };

    if (from_e) {
        out.e_source = from;
        for (int w : g.e_out[from]) {
            if (w == to) {
                out.found = true;
                out.w_nodes = {to};
                return out;
            }
            if (set_contains(interior, w)) push_start(w);
        }
    } else {
        for (int w : g.w_out[from]) {
            if (w == to) {
                out.found = true;
                out.w_nodes = {from, to};
                return out;
            }
            if (set_contains(interior, w)) push_start(w);
        }
    }

    while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        for (int nxt : g.w_out[cur]) {
            if (nxt == to) {
                std::vector<int> rev{to};
                for (int n = cur; n != -1; n = parent[n]) rev.push_back(n);
                if (!from_e) rev.push_back(from);
                std::reverse(rev.begin(), rev.end());
                out.found = true;
                out.w_nodes = std::move(rev);
                return out;
            }
            if (parent[nxt] == 0 && set_contains(interior, nxt)) {
                parent[nxt] = cur;
                queue.push_back(nxt);
            }
        }
    }
    return out;
}

ConfounderReport find_confounders(const BoolGraph& g, const IndexSet& X, const IndexSet& Yset, const IndexSet& Z) {
    ConfounderReport rep;
    for (int l = 1; l <= g.L; ++l) {
        PathWitness best_x, best_y;
        bool direct_x = false, direct_y = false;
        for (int x : X) {
            PathWitness w = exists_path(g, l, true, x, Z);
            if (w.found) {
                if (w.w_nodes.size() == 1) direct_x = true;
                if (!best_x.found || w.w_nodes.size() == 1) best_x = w;
            }
            if (direct_x) break;
        }
        if (!best_x.found) continue;
        for (int y : Yset) {
            PathWitness w = exists_path(g, l, true, y, Z);
            if (w.found) {
                if (w.w_nodes.size() == 1) direct_y = true;
                if (!best_y.found || w.w_nodes.size() == 1) best_y = w;
            }
            if (direct_y) break;
        }
        if (!best_y.found) continue;
        ConfounderEntry entry;
        entry.e_index = l;
        entry.kind = (direct_x && direct_y) ? ConfounderKind::Direct : ConfounderKind::Indirect;
        entry.to_input_side = best_x;
        entry.to_output_side = best_y;
        rep.entries.push_back(std::move(entry));
    }
    return rep;
}

bool ConfounderReport::has(int e_index) const {
    for (const auto& e : entries)
        if (e.e_index == e_index) return true;
    return false;
}

ConditionReport check_parallel_path_loop(const NetworkSpec& net, int i, int j, const IndexSet& D) {
    if (i == j) throw std::invalid_argument("check_parallel_path_loop: i and j must differ");
    BoolGraph g = BoolGraph::from(net);
    ConditionReport rep;
    rep.name = "parallel_path_and_loop";

    IndexSet all(net.L);
    for (int k = 0; k < net.L; ++k) all[k] = k + 1;
    // interior nodes a violating path may use: anything not in D, excluding endpoints
    IndexSet open_interior = set_minus(set_minus(all, D), make_set({i, j}));

    // (a) parallel paths: any i -> j path besides the direct edge with >= 1
    // intermediate node must be blocked by D.
    PathWitness par;
    for (int mid : g.w_out[i]) {
        if (mid == j || set_contains(D, mid) || !set_contains(open_interior, mid)) continue;
        PathWitness w = exists_path(g, mid, false, j, open_interior);
        if (w.found) {
            w.w_nodes.insert(w.w_nodes.begin(), i);
            par = std::move(w);
            par.found = true;
            break;
        }
    }
    CheckItem item_a;
    item_a.label = "parallel_paths_blocked";
    item_a.passed = !par.found;
    if (par.found) {
        item_a.witness = par.w_nodes;
        item_a.detail = "unblocked parallel path from w_" + std::to_string(i) + " to w_" + std::to_string(j);
    }
    rep.items.push_back(std::move(item_a));

    // (b) loops through j: some cycle j -> ... -> j with no intermediate in D.
    IndexSet loop_interior = set_minus(set_minus(all, D), make_set({j}));
    PathWitness loop;
    for (int mid : g.w_out[j]) {
        if (set_contains(D, mid)) continue;
        if (mid == j) continue;  // no self-loops in a hollow G
        if (!set_contains(loop_interior, mid)) continue;
        PathWitness w = exists_path(g, mid, false, j, loop_interior);
        if (w.found) {
            w.w_nodes.insert(w.w_nodes.begin(), j);
            loop = std::move(w);
            loop.found = true;
            break;
        }
    }
    CheckItem item_b;
    item_b.label = "loops_through_target_blocked";
    item_b.passed = !loop.found;
    if (loop.found) {
        item_b.witness = loop.w_nodes;
        item_b.detail = "unblocked loop through w_" + std::to_string(j);
    }
    rep.items.push_back(std::move(item_b));
    return rep;
}

namespace {

CheckItem confounder_item(const std::string& label, const ConfounderReport& rep) {
    CheckItem item;
    item.label = label;
    item.passed = rep.empty();
    if (!rep.empty()) {
        const auto& e = rep.entries.front();
        item.witness = e.to_input_side.w_nodes;
        item.detail = "confounding variable e_" + std::to_string(e.e_index) + (e.kind == ConfounderKind::Direct ? " (direct)" : " (indirect)");
    }
    return item;
}

}  // namespace

ConditionReport check_decomposition(const NetworkSpec& net, const Selection& sel) {
    sel.validate(net.L);
    BoolGraph g = BoolGraph::from(net);
    const IndexSet Z = sel.Z(net.L);
    ConditionReport rep;
    rep.name = "decomposition";
    if (sel.A.empty()) {
        rep.items.push_back({"A_to_Y_confounder_free", true, {}, "A is empty"});
        rep.items.push_back({"A_to_B_confounder_free", true, {}, "A is empty"});
        return rep;
    }
    rep.items.push_back(confounder_item("A_to_Y_confounder_free", find_confounders(g, sel.A, sel.Yset(), Z)));
    if (sel.B.empty()) {
        rep.items.push_back({"A_to_B_confounder_free", true, {}, "B is empty"});
    } else {
        rep.items.push_back(confounder_item("A_to_B_confounder_free", find_confounders(g, sel.A, sel.B, Z)));
    }
    return rep;
}

ConditionReport check_invariance_conditions(const NetworkSpec& net, const Selection& sel) {
    sel.validate(net.L);
    BoolGraph g = BoolGraph::from(net);
    ConditionReport rep;
    rep.name = "target_invariance";

    ConditionReport c1 = check_parallel_path_loop(net, sel.i, sel.j, sel.D());
    for (auto& item : c1.items) rep.items.push_back(std::move(item));

    ConditionReport c2 = check_decomposition(net, sel);
    for (auto& item : c2.items) rep.items.push_back(std::move(item));

    CheckItem item_i;
    item_i.label = "i_in_A_or_Q";
    item_i.passed = set_contains(sel.A, sel.i) || set_contains(sel.Q, sel.i);
    if (!item_i.passed) item_i.detail = "target input w_" + std::to_string(sel.i) + " is neither in A nor in Q";
    rep.items.push_back(std::move(item_i));

    // 2c: no direct or Z-interior path from {i, j} to any B node
    CheckItem item_c;
    item_c.label = "paths_to_B_measured";
    item_c.passed = true;
    const IndexSet Z = sel.Z(net.L);
    for (int b : sel.B) {
        for (int src : {sel.i, sel.j}) {
            PathWitness w = exists_path(g, src, false, b, Z);
            if (w.found) {
                item_c.passed = false;
                item_c.witness = w.w_nodes;
                item_c.detail = "unmeasured path from w_" + std::to_string(src) + " to w_" + std::to_string(b);
                break;
            }
        }
        if (!item_c.passed) break;
    }
    rep.items.push_back(std::move(item_c));
    return rep;
}

namespace {

// reachability on an explicit delay-free digraph
bool delay_free_path(const std::vector<std::vector<int>>& adj, int from, int to, int n) {
    std::vector<bool> seen(n + 1, false);
    std::deque<int> queue{from};
    while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        for (int nxt : adj[cur]) {
            if (nxt == to) return true;
            if (!seen[nxt]) {
                seen[nxt] = true;
                queue.push_back(nxt);
            }
        }
    }
    return false;
}

}  // namespace

ConditionReport check_delay_conditions(const NetworkSpec& net, const Selection& sel, const ModelDelayPattern& model) {
    sel.validate(net.L);
    const IndexSet Y = sel.Yset();
    const IndexSet D = sel.D();
    const IndexSet YB = set_union(Y, sel.B);

    if (model.strictly_proper.size() != Y.size()) throw std::invalid_argument("check_delay_conditions: model pattern rows must match |Y|");
    for (const auto& row : model.strictly_proper)
        if (row.size() != D.size()) throw std::invalid_argument("check_delay_conditions: model pattern cols must match |D|");

    BoolGraph g = BoolGraph::from(net);

    // model graph: nodes Y u D, edge d -> y when entry (y, d) is parameterized
    // (not a structural zero) and delay-free when not strictly proper
    std::vector<std::vector<int>> model_df(net.L + 1);
    for (size_t yi = 0; yi < Y.size(); ++yi) {
        for (size_t di = 0; di < D.size(); ++di) {
            if (Y[yi] == D[di]) continue;  // hollow Q block / structural zero
            if (!model.strictly_proper[yi][di]) model_df[D[di]].push_back(Y[yi]);
        }
    }

    ConditionReport rep;
    rep.name = "delay_conditions";

    // (1) delay-free paths / loops from Y u B into Y, in the original network
    CheckItem net_item;
    net_item.label = "network_paths_into_Y_delayed";
    net_item.passed = true;
    for (int src : YB) {
        for (int y : Y) {
            const bool direct_edge_df = [&] {
                for (int t : g.w_out_delay_free[src])
                    if (t == y) return true;
                return false;
            }();
            if ((src != y && (direct_edge_df || delay_free_path(g.w_out_delay_free, src, y, net.L))) ||
                (src == y && delay_free_path(g.w_out_delay_free, src, y, net.L))) {
                net_item.passed = false;
                net_item.witness = {src, y};
                net_item.detail = "delay-free path from w_" + std::to_string(src) + " into w_" + std::to_string(y);
                break;
            }
        }
        if (!net_item.passed) break;
    }
    rep.items.push_back(std::move(net_item));

    // (1') same requirement on the parametrized model
    CheckItem model_item;
    model_item.label = "model_paths_into_Y_delayed";
    model_item.passed = true;
    for (int src : YB) {
        if (!set_contains(D, src) && !set_contains(Y, src)) continue;
        for (int y : Y) {
            if (delay_free_path(model_df, src, y, net.L)) {
                model_item.passed = false;
                model_item.witness = {src, y};
                model_item.detail = "delay-free model path from w_" + std::to_string(src) + " into w_" + std::to_string(y);
                break;
            }
        }
        if (!model_item.passed) break;
    }
    rep.items.push_back(std::move(model_item));

    // (2) per A-node disjunction: network paths Y u B -> a delayed, or all
    // model entries a -> Y strictly proper
    CheckItem a_item;
    a_item.label = "A_node_disjunction";
    a_item.passed = true;
    for (int a : sel.A) {
        bool net_side = true;
        for (int src : YB) {
            if (src == a) continue;
            if (delay_free_path(g.w_out_delay_free, src, a, net.L)) {
                net_side = false;
                break;
            }
        }
        bool model_side = true;
        const auto dit = std::find(D.begin(), D.end(), a);
        const size_t di = static_cast<size_t>(dit - D.begin());
        for (size_t yi = 0; yi < Y.size(); ++yi) {
            if (Y[yi] == a) continue;
            if (!model.strictly_proper[yi][di]) model_side = false;
        }
        if (!net_side && !model_side) {
            a_item.passed = false;
            a_item.witness = {a};
            a_item.detail = "node w_" + std::to_string(a) + " fails both sides of the delay disjunction";
            break;
        }
    }
    rep.items.push_back(std::move(a_item));
    return rep;
}

}  // namespace netid
