#include "support.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <acpstep/frontend/grounder.hpp>
#include <acpstep/frontend/parser.hpp>
#include <acpstep/stepping/computation.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace acpstep::testing {

GroundProgram program_of(const std::string& text) { return ground_text(text).program; }
CRule rule_of(const std::string& text) { return parse_ground_rule(text); }
AtomSet atoms_of(const std::string& text) { return parse_atom_list(text); }
Atom atom_of(const std::string& text) { return parse_ground_atom(text); }

std::string program_text(const std::vector<std::string>& names) {
    std::string text;
    for (const std::string& name : names) {
        std::ifstream in(std::string(ACPSTEP_PROGRAMS) + "/" + name);
        if (!in) {
            throw std::runtime_error("missing program " + name);
        }
        std::ostringstream out;
        out << in.rdbuf();
        text += out.str();
        text += '\n';
    }
    return text;
}

GroundProgram program_file(const std::vector<std::string>& names) { return program_of(program_text(names)); }

GroundProgram instances(const GroundingResult& g, std::initializer_list<std::size_t> sources) {
    std::vector<CRule> out;
    for (std::size_t id : sources) {
        for (std::size_t i : g.instances_of(id)) {
            out.push_back(g.program[i]);
        }
    }
    return GroundProgram(std::move(out));
}

namespace {

const char* const s4_rules[] = {
    "col(1).", "col(2).", "col(3).", "col(4).", "col(5).",
    "row(1).", "row(2).", "row(3).", "row(4).", "row(5).",
    "wall(3,3).", "empty(3,4).", "entrance(1,2).", "exit(5,4).",
    "maxCol(5) :- col(5), not col(6).", "maxRow(5) :- row(5), not row(6).",
    "border(1,1) :- col(1), row(1).", "border(2,1) :- col(2), row(1).", "border(3,1) :- col(3), row(1).",
    "border(4,1) :- col(4), row(1).", "border(5,1) :- col(5), row(1).", "border(1,2) :- col(1), row(2).",
    "border(5,2) :- row(2), maxCol(5).", "border(1,3) :- col(1), row(3).", "border(5,3) :- row(3), maxCol(5).",
    "border(1,4) :- col(1), row(4).", "border(5,4) :- row(4), maxCol(5).", "border(1,5) :- col(1), row(5).",
    "border(5,1) :- row(1), maxCol(5).", "border(5,5) :- row(5), maxCol(5).", "border(1,5) :- col(1), maxRow(5).",
    "border(2,5) :- col(2), maxRow(5).", "border(3,5) :- col(3), maxRow(5).", "border(4,5) :- col(4), maxRow(5).",
    "border(5,5) :- col(5), maxRow(5).",
};

const char* const i_aux = "col(1), col(2), col(3), col(4), col(5), maxCol(5), row(1), row(2), row(3), row(4), row(5), "
                    "maxRow(5), empty(3,4), wall(3,3), entrance(1,2), exit(5,4), border(1,1), border(2,1), "
                    "border(3,1), border(4,1), border(5,1), border(1,2), border(5,2), border(1,3), border(5,3), "
                    "border(1,4), border(5,4), border(1,5), border(2,5), border(3,5), border(4,5), border(5,5)";

} // namespace

GroundProgram maze_s4_rules() {
    std::vector<CRule> listed;
    for (const char* r : s4_rules) {
        listed.push_back(rule_of(r));
    }
    return GroundProgram(std::move(listed));
}

AtomSet maze_s4_interpretation() { return atoms_of(i_aux); }

MazeWalk maze_walkthrough(const std::vector<std::string>& extra) {
    std::vector<std::string> files{"maze_instance.lp", "maze_guess.lp"};
    files.insert(files.end(), extra.begin(), extra.end());
    MazeWalk w{ground_text(program_text(files)), {empty_state()}};
    auto step = [&](const std::string& rule, const std::string& t, const std::string& f) {
        w.states.push_back(apply_step(w.states.back(), StepDelta{rule_of(rule), atoms_of(t), atoms_of(f)}));
    };
    step("entrance(1,2).", "entrance(1,2)", "");
    step("col(5).", "col(5)", "");
    step("maxCol(5) :- col(5), not col(6).", "maxCol(5)", "col(6)");
    w.states.push_back(apply_jump(w.states.back(), instances(w.grounding, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12})).state);
    std::vector<std::size_t> choice = w.grounding.instances_of(14);
    if (choice.size() != 1) {
        throw std::runtime_error("expected one instance of the wall choice");
    }
    w.states.push_back(apply_step(w.states.back(),
                                  StepDelta{w.grounding.program[choice[0]], atoms_of("wall(3,2)"),
                                            atoms_of("wall(2,2), wall(4,2), wall(2,3), wall(4,3), wall(2,4), "
                                                     "wall(3,4), wall(4,4)")}));
    w.states.push_back(apply_jump(w.states.back(), instances(w.grounding, {13, 15})).state);
    return w;
}

// --- generators -------------------------------------------------------------

AtomSet ProgramGenerator::subset(const AtomSet& of) {
    std::vector<Atom> out;
    for (Atom a : of) {
        if (coin()) {
            out.push_back(a);
        }
    }
    return AtomSet::from_sorted(std::move(out));
}

CAtom ProgramGenerator::catom(const std::vector<Atom>& pool, const GenOptions& opts) {
    auto pick = [&](std::size_t k) {
        std::vector<Atom> out;
        for (std::size_t i = 0; i < k; ++i) {
            out.push_back(pool[below(pool.size())]);
        }
        return AtomSet(std::move(out));
    };
    std::size_t roll = below(10);
    if (opts.elementary_only || roll < 5) {
        return CAtom::elementary(pool[below(pool.size())]);
    }
    if (roll < 7 && !opts.convex_only) {
        AtomSet dom = pick(1 + below(3));
        std::vector<AtomSet> sats;
        for (const AtomSet& x : subsets(dom)) {
            if (coin()) {
                sats.push_back(x);
            }
        }
        return CAtom::explicit_satisfiers(dom, sats);
    }
    if (roll < 9) {
        AtomSet dom = pick(1 + below(3));
        std::optional<std::int64_t> lo, hi;
        if (coin(0.6)) {
            lo = static_cast<std::int64_t>(below(dom.size() + 1));
        }
        if (coin(0.4)) {
            hi = static_cast<std::int64_t>(below(dom.size() + 1));
        }
        if (opts.convex_only && lo && hi && *hi < *lo) {
            std::swap(*lo, *hi);
        }
        CAtom c = CAtom::choice(dom, lo, hi);
        return !opts.convex_only && coin(0.2) ? complement_catom(c) : c;
    }
    std::vector<WeightEntry> entries;
    for (std::size_t i = 0, n = 1 + below(3); i < n; ++i) {
        entries.push_back({pool[below(pool.size())], !opts.convex_only && coin(0.3), double(1 + below(3))});
    }
    double lo = double(below(4));
    double hi = coin(0.5) ? lo + double(below(4)) : std::numeric_limits<double>::infinity();
    CAtom w = CAtom::weight(lo, hi, entries);
    return !opts.convex_only && coin(0.2) ? complement_catom(w) : w;
}

GroundProgram ProgramGenerator::program(const GenOptions& opts) {
    std::size_t n = 1 + below(opts.max_atoms);
    std::vector<Atom> pool;
    for (std::size_t i = 0; i < n; ++i) {
        pool.emplace_back("p" + std::to_string(i));
    }
    std::vector<CRule> rules;
    std::size_t count = 1 + below(opts.max_rules);
    while (rules.size() < count) {
        std::size_t heads = opts.normal_only ? 1 : 1 + below(opts.max_head);
        if (opts.constraints && coin(0.1)) {
            heads = 0;
        }
        if (heads == 0 && !opts.constraints) {
            heads = 1;
        }
        std::vector<CAtom> head, pos, neg;
        for (std::size_t i = 0; i < heads; ++i) {
            head.push_back(catom(pool, opts));
        }
        bool bodyless = heads > 0 && coin(opts.bodyless);
        for (std::size_t i = 0, k = bodyless ? 0 : below(opts.max_body + 1); i < k; ++i) {
            pos.push_back(catom(pool, opts));
        }
        if (opts.negation && !bodyless) {
            for (std::size_t i = 0, k = below(opts.max_body + 1); i < k; ++i) {
                neg.push_back(catom(pool, opts));
            }
        }
        CRule r(head, pos, neg);
        if (r.domain().size() <= opts.max_atoms) {
            rules.push_back(r);
        }
    }
    return GroundProgram(std::move(rules));
}

// --- oracles ----------------------------------------------------------------

std::vector<AtomSet> subsets(const AtomSet& of) {
    std::vector<AtomSet> out;
    std::size_t n = of.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<Atom> x;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask >> i & 1) {
                x.push_back(of[i]);
            }
        }
        out.push_back(AtomSet::from_sorted(std::move(x)));
    }
    return out;
}

bool o_sat(const CAtom& a, const AtomSet& i) {
    switch (a.kind()) {
    case CAtom::Kind::Elementary:
        return i.contains(a.elementary_atom());
    case CAtom::Kind::Explicit: {
        std::vector<AtomSet> sats = a.satisfiers(64);
        return std::find(sats.begin(), sats.end(), i & a.domain()) != sats.end();
    }
    case CAtom::Kind::Choice: {
        auto count = static_cast<std::int64_t>((i & a.domain()).size());
        bool in = (!a.lower_count() || *a.lower_count() <= count) && (!a.upper_count() || count <= *a.upper_count());
        return in != a.complemented();
    }
    case CAtom::Kind::Weight: {
        double sum = 0;
        for (const WeightEntry& e : a.entries()) {
            if (i.contains(e.atom) != e.negated) {
                sum += e.weight;
            }
        }
        bool in = a.lower_weight() <= sum && sum <= a.upper_weight();
        return in != a.complemented();
    }
    }
    return false;
}

bool o_literal(const CAtom& a, bool negated, const AtomSet& i) { return o_sat(a, i) != negated; }

bool o_body(const CRule& r, const AtomSet& i) {
    return std::all_of(r.positive_body().begin(), r.positive_body().end(), [&](const CAtom& a) { return o_sat(a, i); }) &&
           std::none_of(r.negative_body().begin(), r.negative_body().end(), [&](const CAtom& a) { return o_sat(a, i); });
}

bool o_head(const CRule& r, const AtomSet& i) {
    return std::any_of(r.head().begin(), r.head().end(), [&](const CAtom& a) { return o_sat(a, i); });
}

bool o_model(const GroundProgram& p, const AtomSet& i) {
    return std::all_of(p.begin(), p.end(), [&](const CRule& r) { return !o_body(r, i) || o_head(r, i); });
}

GroundProgram o_reduct(const GroundProgram& p, const AtomSet& i) {
    std::vector<CRule> out;
    for (const CRule& r : p) {
        if (o_body(r, i)) {
            out.push_back(r);
        }
    }
    return GroundProgram(std::move(out));
}

std::vector<AtomSet> o_satisfiers(const CAtom& a) {
    std::vector<AtomSet> out;
    for (const AtomSet& x : subsets(a.domain())) {
        if (o_sat(a, x)) {
            out.push_back(x);
        }
    }
    return out;
}

bool o_condition_o(const GroundProgram& p, const AtomSet& i, const AtomSet& smaller) {
    for (const CRule& r : o_reduct(p, i)) {
        if (!o_body(r, smaller)) {
            continue;
        }
        bool ok = std::any_of(r.head().begin(), r.head().end(), [&](const CAtom& a) {
            return o_sat(a, smaller) && (smaller & a.domain()) == (i & a.domain());
        });
        if (!ok) {
            return false;
        }
    }
    return true;
}

bool o_answer_set(const GroundProgram& p, const AtomSet& i) {
    if (!o_model(p, i)) {
        return false;
    }
    for (const AtomSet& smaller : subsets(i)) {
        if (smaller != i && o_condition_o(p, i, smaller)) {
            return false;
        }
    }
    return true;
}

std::vector<AtomSet> o_answer_sets(const GroundProgram& p) {
    std::vector<AtomSet> out;
    for (const AtomSet& i : subsets(p.domain())) {
        if (o_answer_set(p, i)) {
            out.push_back(i);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool o_external_support(const CRule& r, const AtomSet& x, const AtomSet& i) {
    if (!o_body(r, i) || !o_body(r, i - x)) {
        return false;
    }
    bool iii = std::any_of(r.head().begin(), r.head().end(), [&](const CAtom& a) {
        if ((x & a.domain()).empty()) {
            return false;
        }
        AtomSet proj = i & a.domain();
        std::vector<AtomSet> sats = o_satisfiers(a);
        return std::any_of(sats.begin(), sats.end(), [&](const AtomSet& s) { return proj.subset_of(s); });
    });
    bool iv = std::all_of(r.head().begin(), r.head().end(), [&](const CAtom& a) {
        return !o_sat(a, i) || !((x & i) & a.domain()).empty();
    });
    return iii && iv;
}

std::vector<AtomSet> o_unfounded_sets(const GroundProgram& p, const AtomSet& i) {
    std::vector<AtomSet> out;
    for (const AtomSet& x : subsets(i)) {
        if (std::none_of(p.begin(), p.end(), [&](const CRule& r) { return o_external_support(r, x, i); })) {
            out.push_back(x);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<AtomSet> o_gl_answer_sets(const GroundProgram& p) {
    std::vector<AtomSet> out;
    for (const AtomSet& i : subsets(p.domain())) {
        // reduct: drop rules with a negated atom in I, drop negative bodies
        std::vector<std::pair<Atom, std::vector<Atom>>> definite;
        bool constraint_violated = false;
        for (const CRule& r : p) {
            bool blocked = std::any_of(r.negative_body().begin(), r.negative_body().end(),
                                       [&](const CAtom& a) { return i.contains(a.elementary_atom()); });
            if (blocked) {
                continue;
            }
            std::vector<Atom> body;
            for (const CAtom& a : r.positive_body()) {
                body.push_back(a.elementary_atom());
            }
            if (r.is_constraint()) {
                if (std::all_of(body.begin(), body.end(), [&](Atom a) { return i.contains(a); })) {
                    constraint_violated = true;
                }
                continue;
            }
            definite.emplace_back(r.head().front().elementary_atom(), body);
        }
        if (constraint_violated) {
            continue;
        }
        std::set<Atom> least;
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& [head, body] : definite) {
                if (!least.count(head) && std::all_of(body.begin(), body.end(), [&](Atom a) { return least.count(a) > 0; })) {
                    least.insert(head);
                    changed = true;
                }
            }
        }
        if (AtomSet(std::vector<Atom>(least.begin(), least.end())) == i) {
            out.push_back(i);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool o_is_state(const State& s) {
    if (s.pos.intersects(s.neg)) {
        return false;
    }
    for (const CRule& r : s.rules) {
        if (!o_body(r, s.pos) || !o_head(r, s.pos) || !r.domain().subset_of(s.domain())) {
            return false;
        }
    }
    std::vector<AtomSet> family = s.unfounded;
    std::sort(family.begin(), family.end());
    return family == o_unfounded_sets(s.rules, s.pos);
}

std::vector<State> o_successors(const State& s, const CRule& r) {
    std::vector<State> out;
    if (s.rules.contains(r) || !o_body(r, s.pos)) {
        return out;
    }
    AtomSet open = r.domain() - s.domain();
    for (const AtomSet& delta : subsets(open)) {
        AtomSet next_pos = s.pos | delta;
        if (!o_body(r, next_pos) || !o_head(r, next_pos)) {
            continue;
        }
        State next;
        std::vector<CRule> rules(s.rules.begin(), s.rules.end());
        rules.push_back(r);
        next.rules = GroundProgram(std::move(rules));
        next.pos = next_pos;
        next.neg = s.neg | (open - delta);
        next.unfounded.clear();
        for (const AtomSet& x : s.unfounded) {
            for (const AtomSet& part : subsets(delta)) {
                AtomSet candidate = x | part;
                if (!o_external_support(r, candidate, next_pos)) {
                    next.unfounded.push_back(candidate);
                }
            }
        }
        canonicalize(next.unfounded);
        out.push_back(std::move(next));
    }
    return out;
}

bool o_is_successor(const State& s, const State& next) {
    GroundProgram added = next.rules - s.rules;
    if (added.size() != 1) {
        return false;
    }
    std::vector<AtomSet> want = next.unfounded;
    canonicalize(want);
    for (State candidate : o_successors(s, added[0])) {
        if (candidate.pos == next.pos && candidate.neg == next.neg && candidate.rules == next.rules &&
            candidate.unfounded == want) {
            return true;
        }
    }
    return false;
}

bool o_complete(const GroundProgram& p, const State& last) { return o_reduct(p, last.pos).subset_of(last.rules); }

bool o_stuck(const GroundProgram& p, const State& last) {
    if (o_complete(p, last)) {
        return false;
    }
    return std::all_of(p.begin(), p.end(), [&](const CRule& r) { return o_successors(last, r).empty(); });
}

bool o_failed_at(const GroundProgram& p, const State& s) {
    for (const AtomSet& i : o_answer_sets(p)) {
        if (s.pos.subset_of(i) && !s.neg.intersects(i) && s.rules.subset_of(o_reduct(p, i))) {
            return false;
        }
    }
    return true;
}

std::vector<std::vector<State>> o_succeeding_computations(const GroundProgram& p) {
    std::vector<std::vector<State>> out;
    std::vector<State> path{empty_state()};
    std::function<void()> extend = [&] {
        const State last = path.back();
        if (o_complete(p, last) && last.stable()) {
            out.push_back(path);
        }
        for (const CRule& r : p) {
            for (State next : o_successors(last, r)) {
                path.push_back(std::move(next));
                extend();
                path.pop_back();
            }
        }
    };
    extend();
    return out;
}

AtomSet o_pos_occ(const CAtom& a, bool negated) {
    AtomSet out;
    for (const AtomSet& x : subsets(a.domain())) {
        if (o_sat(a, x) != negated) {
            out = out | x;
        }
    }
    return out;
}

bool o_atom_graph_cyclic(const GroundProgram& p) {
    std::map<Atom, std::set<Atom>> edges;
    for (const CRule& r : p) {
        AtomSet head, body;
        for (const CAtom& a : r.head()) {
            head = head | o_pos_occ(a, false);
        }
        for (const CAtom& a : r.positive_body()) {
            body = body | o_pos_occ(a, false);
        }
        for (const CAtom& a : r.negative_body()) {
            body = body | o_pos_occ(a, true);
        }
        for (Atom h : head) {
            edges[h].insert(body.begin(), body.end());
        }
    }
    // a reaches itself through at least one edge
    for (Atom start : p.domain()) {
        std::set<Atom> seen;
        std::vector<Atom> stack(edges[start].begin(), edges[start].end());
        while (!stack.empty()) {
            Atom a = stack.back();
            stack.pop_back();
            if (a == start) {
                return true;
            }
            if (seen.insert(a).second) {
                stack.insert(stack.end(), edges[a].begin(), edges[a].end());
            }
        }
    }
    return false;
}

} // namespace acpstep::testing
