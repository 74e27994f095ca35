#include <acpstep/stepping/state.hpp>

#include <acpstep/error.hpp>
#include <acpstep/semantics/semantics.hpp>

#include <algorithm>
#include <functional>

namespace acpstep {

std::vector<AtomSet> State::nonempty_unfounded() const {
    std::vector<AtomSet> out;
    for (const AtomSet& x : unfounded) {
        if (!x.empty()) {
            out.push_back(x);
        }
    }
    return out;
}

State empty_state() { return State{}; }

const char* to_string(StepCheck::Kind kind) {
    switch (kind) {
    case StepCheck::Kind::Ok: return "ok";
    case StepCheck::Kind::AlreadyConsidered: return "already-considered";
    case StepCheck::Kind::Inactive: return "inactive";
    case StepCheck::Kind::NotUndecided: return "not-undecided";
    case StepCheck::Kind::Overlap: return "overlap";
    case StepCheck::Kind::Incomplete: return "incomplete";
    case StepCheck::Kind::BodyFalsified: return "body-falsified";
    case StepCheck::Kind::HeadUnsatisfied: return "head-unsatisfied";
    }
    return "?";
}

AtomSet undecided_atoms(const State& s, const CRule& r) { return r.domain() - s.pos - s.neg; }

namespace {

StepCheck fail(StepCheck::Kind kind, std::string message) { return StepCheck{kind, std::move(message)}; }

} // namespace

StepCheck validate_assignment(const State& s, const StepDelta& d) {
    const CRule& r = d.rule;
    if (s.rules.contains(r)) {
        return fail(StepCheck::Kind::AlreadyConsidered, "rule " + r.str() + " is already considered");
    }
    for (const CLiteral& l : r.body()) {
        if (!l.satisfied_by(s.pos)) {
            return fail(StepCheck::Kind::Inactive, "body literal " + l.str() + " is false under the current state");
        }
    }
    const AtomSet undecided = undecided_atoms(s, r);
    const AtomSet assigned = d.delta_true | d.delta_false;
    if (AtomSet stray = assigned - undecided; !stray.empty()) {
        return fail(StepCheck::Kind::NotUndecided, "atoms " + stray.str() + " are not undecided atoms of the rule");
    }
    if (AtomSet both = d.delta_true & d.delta_false; !both.empty()) {
        return fail(StepCheck::Kind::Overlap, "atoms " + both.str() + " are assigned both values");
    }
    if (AtomSet missing = undecided - assigned; !missing.empty()) {
        return fail(StepCheck::Kind::Incomplete, "atoms " + missing.str() + " are not assigned");
    }
    const AtomSet next = s.pos | d.delta_true;
    for (const CLiteral& l : r.body()) {
        if (!l.satisfied_by(next)) {
            return fail(StepCheck::Kind::BodyFalsified, "body literal " + l.str() + " becomes false");
        }
    }
    if (!r.head_satisfied(next)) {
        return fail(StepCheck::Kind::HeadUnsatisfied,
                    r.is_constraint() ? "a constraint has no head to satisfy" : "no head c-atom is satisfied");
    }
    return {};
}

State apply_step(const State& s, const StepDelta& d, const Caps& caps) {
    if (StepCheck c = validate_assignment(s, d); !c.ok()) {
        throw Error(ErrorCode::InvalidStep, c.message);
    }
    const AtomSet& delta = d.delta_true;
    if (delta.size() > caps.subset || delta.size() > 62) {
        throw Error(ErrorCode::CapExceeded, "step assigns " + std::to_string(delta.size()) +
                                                " atoms true, beyond the subset cap of " + std::to_string(caps.subset));
    }
    State next;
    next.rules = s.rules | GroundProgram({d.rule});
    next.pos = s.pos | delta;
    next.neg = s.neg | d.delta_false;
    next.unfounded.clear();
    const std::uint64_t subsets = std::uint64_t{1} << delta.size();
    for (const AtomSet& x : s.unfounded) {
        for (std::uint64_t m = 0; m < subsets; ++m) {
            std::vector<Atom> part;
            for (std::size_t i = 0; i < delta.size(); ++i) {
                if ((m >> i) & 1u) {
                    part.push_back(delta[i]);
                }
            }
            AtomSet candidate = x | AtomSet::from_sorted(std::move(part));
            if (!external_support(d.rule, candidate, next.pos)) {
                next.unfounded.push_back(std::move(candidate));
                if (next.unfounded.size() > caps.unfounded) {
                    throw Error(ErrorCode::CapExceeded, "unfounded-tracking overflow: more than " +
                                                            std::to_string(caps.unfounded) + " unfounded sets");
                }
            }
        }
    }
    canonicalize(next.unfounded);
    return next;
}

namespace {

// Depth-first search over the undecided atoms of a rule with three-valued
// pruning on every c-atom of the rule.
class AssignmentSearch {
public:
    AssignmentSearch(const State& s, const CRule& r, const Caps& caps) : rule_(r), budget_(caps.search_nodes) {
        const AtomSet& dom = r.domain();
        values_.assign(dom.size(), Truth::False);
        for (std::size_t i = 0; i < dom.size(); ++i) {
            if (s.pos.contains(dom[i])) {
                values_[i] = Truth::True;
            } else if (!s.neg.contains(dom[i])) {
                values_[i] = Truth::Unknown;
                open_.push_back(i);
            }
        }
        auto add = [&](const CAtom& a, int polarity) {
            Slot slot{&a, polarity, {}};
            for (Atom x : a.domain()) {
                slot.index.push_back(dom.position(x));
            }
            slots_.push_back(std::move(slot));
        };
        for (const CAtom& a : r.positive_body()) {
            add(a, 1);
        }
        for (const CAtom& a : r.negative_body()) {
            add(a, -1);
        }
        for (const CAtom& a : r.head()) {
            add(a, 0);
        }
    }

    std::size_t open_count() const { return open_.size(); }
    Atom open_atom(std::size_t k) const { return rule_.domain()[open_[k]]; }

    void fix(std::size_t k, Truth value) { fixed_.emplace_back(k, value); }
    // Fixes that survive unfix().
    void fix_base(std::size_t k, Truth value) {
        fix(k, value);
        base_ = fixed_.size();
    }
    void unfix() { fixed_.resize(base_); }

    // Visits valid total assignments until the visitor returns false.
    // Returns false if the node budget ran out.
    bool run(const std::function<bool(const std::vector<Truth>&)>& visit) {
        std::vector<Truth> values = values_;
        order_.clear();
        for (const auto& [k, v] : fixed_) {
            values[open_[k]] = v;
        }
        for (std::size_t k = 0; k < open_.size(); ++k) {
            if (values[open_[k]] == Truth::Unknown) {
                order_.push_back(open_[k]);
            }
        }
        stop_ = false;
        exhausted_ = false;
        descend(values, 0, visit);
        return !exhausted_;
    }

private:
    struct Slot {
        const CAtom* atom;
        int polarity;   // 1 positive body, -1 negated body, 0 head
        std::vector<std::size_t> index;
    };

    // False if the partial assignment cannot be completed to a valid one.
    bool viable(const std::vector<Truth>& values) {
        bool head_possible = false;
        std::vector<Truth> local;
        for (const Slot& slot : slots_) {
            local.resize(slot.index.size());
            for (std::size_t i = 0; i < slot.index.size(); ++i) {
                local[i] = values[slot.index[i]];
            }
            Truth t = slot.atom->evaluate(local);
            if (slot.polarity == 1 && t == Truth::False) {
                return false;
            }
            if (slot.polarity == -1 && t == Truth::True) {
                return false;
            }
            if (slot.polarity == 0 && t != Truth::False) {
                head_possible = true;
            }
        }
        return head_possible;
    }

    void descend(std::vector<Truth>& values, std::size_t depth,
                 const std::function<bool(const std::vector<Truth>&)>& visit) {
        if (stop_) {
            return;
        }
        if (budget_ == 0) {
            exhausted_ = true;
            stop_ = true;
            return;
        }
        --budget_;
        if (!viable(values)) {
            return;
        }
        if (depth == order_.size()) {
            if (!visit(values)) {
                stop_ = true;
            }
            return;
        }
        const std::size_t i = order_[depth];
        for (Truth t : {Truth::False, Truth::True}) {
            values[i] = t;
            descend(values, depth + 1, visit);
            if (stop_) {
                break;
            }
        }
        values[i] = Truth::Unknown;
    }

    const CRule& rule_;
    std::size_t budget_;
    std::vector<Truth> values_;
    std::vector<std::size_t> open_;
    std::vector<std::size_t> order_;
    std::vector<std::pair<std::size_t, Truth>> fixed_;
    std::size_t base_ = 0;
    std::vector<Slot> slots_;
    bool stop_ = false;
    bool exhausted_ = false;
};

void require_exact(bool finished) {
    if (!finished) {
        throw Error(ErrorCode::SearchExhausted, "assignment search reached the node cap");
    }
}

} // namespace

bool admits_successor(const State& s, const CRule& r, const Caps& caps) {
    AssignmentSearch search(s, r, caps);
    bool found = false;
    require_exact(search.run([&](const std::vector<Truth>&) {
        found = true;
        return false;
    }));
    return found;
}

AssignmentSpace assignment_space(const State& s, const CRule& r, const Caps& caps, const AtomSet& fix_true,
                                 const AtomSet& fix_false) {
    AssignmentSpace space;
    AssignmentSearch search(s, r, caps);
    for (std::size_t k = 0; k < search.open_count(); ++k) {
        if (fix_true.contains(search.open_atom(k))) {
            search.fix_base(k, Truth::True);
        } else if (fix_false.contains(search.open_atom(k))) {
            search.fix_base(k, Truth::False);
        }
    }
    std::vector<char> seen_true(search.open_count(), 0);
    std::vector<char> seen_false(search.open_count(), 0);
    const AtomSet& dom = r.domain();
    auto record = [&](const std::vector<Truth>& values) {
        space.admissible = true;
        for (std::size_t k = 0; k < search.open_count(); ++k) {
            Truth t = values[dom.position(search.open_atom(k))];
            (t == Truth::True ? seen_true : seen_false)[k] = 1;
        }
        return false;
    };
    bool finished = search.run(record);
    if (!space.admissible) {
        space.exhausted = !finished;
        return space;
    }
    // Each atom not yet seen with some value is probed with that value fixed.
    for (std::size_t k = 0; k < search.open_count(); ++k) {
        Atom a = search.open_atom(k);
        if (fix_true.contains(a) || fix_false.contains(a)) {
            continue;
        }
        for (Truth value : {Truth::True, Truth::False}) {
            std::vector<char>& seen = value == Truth::True ? seen_true : seen_false;
            if (seen[k]) {
                continue;
            }
            search.unfix();
            search.fix(k, value);
            finished = search.run(record) && finished;
        }
    }
    space.exhausted = !finished;
    std::vector<Atom> t, f, both;
    for (std::size_t k = 0; k < search.open_count(); ++k) {
        Atom a = search.open_atom(k);
        if (seen_true[k] && seen_false[k]) {
            both.push_back(a);
        } else if (seen_true[k]) {
            t.push_back(a);
        } else {
            f.push_back(a);
        }
    }
    space.forced_true = AtomSet(std::move(t));
    space.forced_false = AtomSet(std::move(f));
    space.free = AtomSet(std::move(both));
    return space;
}

std::optional<StepDelta> complete_assignment(const State& s, const CRule& r, const AtomSet& want_true,
                                             const AtomSet& want_false, const Caps& caps) {
    AssignmentSearch search(s, r, caps);
    for (std::size_t k = 0; k < search.open_count(); ++k) {
        Atom a = search.open_atom(k);
        if (want_true.contains(a)) {
            search.fix(k, Truth::True);
        } else if (want_false.contains(a)) {
            search.fix(k, Truth::False);
        }
    }
    std::optional<StepDelta> out;
    const AtomSet& dom = r.domain();
    require_exact(search.run([&](const std::vector<Truth>& values) {
        StepDelta d{r, {}, {}};
        std::vector<Atom> t, f;
        for (std::size_t k = 0; k < search.open_count(); ++k) {
            Atom a = search.open_atom(k);
            (values[dom.position(a)] == Truth::True ? t : f).push_back(a);
        }
        d.delta_true = AtomSet(std::move(t));
        d.delta_false = AtomSet(std::move(f));
        out = std::move(d);
        return false;
    }));
    return out;
}

StateCheck check_state(const State& s, const Caps& caps) {
    if (s.pos.intersects(s.neg)) {
        return {false, "I and I- overlap in " + (s.pos & s.neg).str()};
    }
    const AtomSet dom = s.domain();
    for (const CRule& r : s.rules) {
        if (!r.body_satisfied(s.pos)) {
            return {false, "I does not satisfy the body of " + r.str()};
        }
        if (!r.head_satisfied(s.pos)) {
            return {false, "I satisfies no head c-atom of " + r.str()};
        }
        if (!r.domain().subset_of(dom)) {
            return {false, "atoms " + (r.domain() - dom).str() + " of " + r.str() + " are undecided"};
        }
    }
    std::vector<AtomSet> expected = unfounded_sets(s.rules, s.pos, caps);
    std::vector<AtomSet> listed = s.unfounded;
    canonicalize(listed);
    if (expected != listed) {
        return {false, "unfounded sets are " + family_str(expected) + ", not " + family_str(listed)};
    }
    return {};
}

StateCheck check_successor(const State& s, const State& next, const Caps& caps) {
    if (!s.rules.subset_of(next.rules) || next.rules.size() != s.rules.size() + 1) {
        return {false, "the successor must add exactly one rule"};
    }
    const CRule r = (next.rules - s.rules)[0];
    if (!s.pos.subset_of(next.pos) || !s.neg.subset_of(next.neg)) {
        return {false, "the successor must extend I and I-"};
    }
    StepDelta d{r, next.pos - s.pos, next.neg - s.neg};
    StepCheck c = validate_assignment(s, d);
    if (!c.ok()) {
        return {false, c.message};
    }
    State expected = apply_step(s, d, caps);
    std::vector<AtomSet> listed = next.unfounded;
    canonicalize(listed);
    if (expected.unfounded != listed) {
        return {false, "unfounded sets of the successor must be " + family_str(expected.unfounded)};
    }
    return {};
}

} // namespace acpstep
