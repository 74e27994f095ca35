#include <acpstep/analysis/analysis.hpp>

#include <acpstep/error.hpp>

#include <algorithm>
#include <functional>
#include <queue>

namespace acpstep {

namespace {

AtomSet literal_occurrences(const CAtom& a, bool negated) {
    if (!negated) {
        return pos_occurrences(a);
    }
    if (a.is_elementary()) {
        return {};
    }
    try {
        return pos_occurrences(complement_catom(a));
    } catch (const Error&) {
        return a.domain();
    }
}

template <class Fn>
std::optional<std::vector<std::size_t>> cycle_in(std::size_t n, Fn&& successors) {
    std::vector<int> color(n, 0);
    std::vector<std::size_t> stack;
    std::optional<std::vector<std::size_t>> found;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        color[v] = 1;
        stack.push_back(v);
        for (std::size_t w : successors(v)) {
            if (found) {
                break;
            }
            if (color[w] == 1) {
                auto from = std::find(stack.begin(), stack.end(), w);
                found = std::vector<std::size_t>(from, stack.end());
            } else if (color[w] == 0) {
                visit(w);
            }
        }
        stack.pop_back();
        color[v] = 2;
    };
    for (std::size_t v = 0; v < n && !found; ++v) {
        if (color[v] == 0) {
            visit(v);
        }
    }
    return found;
}

std::vector<std::vector<std::size_t>> adjacency(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& e) {
    std::vector<std::vector<std::size_t>> out(n);
    for (const auto& [a, b] : e) {
        out[a].push_back(b);
    }
    return out;
}

} // namespace

AtomSet head_occurrences(const CRule& r) {
    AtomSet out;
    for (const CAtom& a : r.head()) {
        out = out | pos_occurrences(a);
    }
    return out;
}

AtomSet body_occurrences(const CRule& r) {
    AtomSet out;
    for (const CAtom& a : r.positive_body()) {
        out = out | literal_occurrences(a, false);
    }
    for (const CAtom& a : r.negative_body()) {
        out = out | literal_occurrences(a, true);
    }
    return out;
}

AtomGraph dependency_graph(const GroundProgram& p) {
    AtomGraph g;
    g.vertices = p.domain();
    for (const CRule& r : p) {
        AtomSet body = body_occurrences(r);
        for (Atom a : head_occurrences(r)) {
            for (Atom b : body) {
                g.edges.emplace_back(a, b);
            }
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    return g;
}

RuleGraph rule_dependency_graph(const GroundProgram& p) {
    RuleGraph g;
    g.vertices = p.size();
    std::vector<AtomSet> heads, bodies;
    for (const CRule& r : p) {
        heads.push_back(head_occurrences(r));
        bodies.push_back(body_occurrences(r));
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (bodies[i].intersects(heads[j])) {
                g.edges.emplace_back(i, j);
            }
        }
    }
    return g;
}

std::optional<std::vector<Atom>> find_cycle(const AtomGraph& g) {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (const auto& [a, b] : g.edges) {
        e.emplace_back(g.vertices.position(a), g.vertices.position(b));
    }
    auto adj = adjacency(g.vertices.size(), e);
    auto cycle = cycle_in(g.vertices.size(), [&](std::size_t v) -> const std::vector<std::size_t>& { return adj[v]; });
    if (!cycle) {
        return std::nullopt;
    }
    std::vector<Atom> out;
    for (std::size_t v : *cycle) {
        out.push_back(g.vertices[v]);
    }
    return out;
}

std::optional<std::vector<std::size_t>> find_cycle(const RuleGraph& g) {
    auto adj = adjacency(g.vertices, g.edges);
    return cycle_in(g.vertices, [&](std::size_t v) -> const std::vector<std::size_t>& { return adj[v]; });
}

bool is_absolutely_tight(const GroundProgram& p) { return !find_cycle(dependency_graph(p)); }

std::vector<CRule> topological_rule_order(const GroundProgram& p) {
    RuleGraph g = rule_dependency_graph(p);
    // i depends on j: j must be stepped first.
    std::vector<std::size_t> pending(p.size(), 0);
    std::vector<std::vector<std::size_t>> dependents(p.size());
    for (const auto& [i, j] : g.edges) {
        ++pending[i];
        dependents[j].push_back(i);
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (pending[i] == 0) {
            ready.push(i);
        }
    }
    std::vector<CRule> order;
    while (!ready.empty()) {
        std::size_t j = ready.top();
        ready.pop();
        order.push_back(p[j]);
        for (std::size_t i : dependents[j]) {
            if (--pending[i] == 0) {
                ready.push(i);
            }
        }
    }
    if (order.size() != p.size()) {
        throw Error(ErrorCode::CyclicGraph, "the positive rule dependency graph has a cycle");
    }
    return order;
}

bool literal_convex(const CAtom& a, bool negated, const Caps& caps) {
    if (a.is_elementary()) {
        return true;
    }
    const CAtom& target = negated ? complement_catom(a) : a;
    return classify_catom(target, caps.enumeration) != Monotonicity::Neither;
}

Guarantee stable_guarantee(const GroundProgram& p, const Caps& caps) {
    Guarantee g;
    g.normal = true;
    g.convex = true;
    for (const CRule& r : p) {
        if (g.normal && !r.is_constraint() && !r.is_normal()) {
            g.normal = false;
            g.violation = "not normal: " + r.str();
        }
        if (!g.convex) {
            continue;
        }
        auto check = [&](const CAtom& a, bool negated) {
            if (g.convex && !literal_convex(a, negated, caps)) {
                g.convex = false;
                if (!g.violation) {
                    g.violation = "not convex: " + std::string(negated ? "not " : "") + a.str() + " in " + r.str();
                }
            }
        };
        for (const CAtom& a : r.head()) {
            check(a, false);
        }
        for (const CAtom& a : r.positive_body()) {
            check(a, false);
        }
        for (const CAtom& a : r.negative_body()) {
            check(a, true);
        }
    }
    std::optional<std::vector<Atom>> cycle = find_cycle(dependency_graph(p));
    g.tight = !cycle;
    if (cycle) {
        g.cycle_witness = *cycle;
        if (!g.violation) {
            std::string text;
            for (Atom a : *cycle) {
                text += a.str() + " -> ";
            }
            g.violation = "positive cycle: " + text + cycle->front().str();
        }
    }
    g.stable_guarantee = g.normal && g.convex && g.tight;
    if (g.stable_guarantee) {
        g.order = topological_rule_order(p);
    }
    return g;
}

} // namespace acpstep
