#include <acpstep/error.hpp>
#include <acpstep/semantics/semantics.hpp>

#include "compiled.hpp"

#include <algorithm>
#include <bit>

namespace acpstep {

std::string Verdict::str() const {
    switch (kind) {
    case Kind::AnswerSet: return "answer set";
    case Kind::ViolatedRule: return "violated rule: " + rule->str();
    case Kind::UnfoundedSet: return "unfounded set: " + witness.str();
    case Kind::SmallerModel: return "smaller model: " + witness.str();
    }
    return {};
}

GroundProgram reduct(const GroundProgram& p, const AtomSet& interpretation) {
    std::vector<CRule> out;
    for (const CRule& r : p) {
        if (r.body_satisfied(interpretation)) {
            out.push_back(r);
        }
    }
    return GroundProgram(std::move(out));
}

bool minimality_condition(const GroundProgram& p, const AtomSet& interpretation, const AtomSet& smaller) {
    for (const CRule& r : p) {
        if (!r.body_satisfied(interpretation) || !r.body_satisfied(smaller)) {
            continue;
        }
        bool ok = std::any_of(r.head().begin(), r.head().end(), [&](const CAtom& a) {
            return a.satisfied_by(smaller) && (smaller & a.domain()) == (interpretation & a.domain());
        });
        if (!ok) {
            return false;
        }
    }
    return true;
}

bool exists_superset(const CAtom& a, const AtomSet& atoms) {
    const AtomSet& dom = a.domain();
    std::vector<Truth> v(dom.size());
    for (std::size_t i = 0; i < dom.size(); ++i) {
        v[i] = atoms.contains(dom[i]) ? Truth::True : Truth::Unknown;
    }
    bool exact = true;
    Truth t = a.evaluate(v, &exact);
    if (t != Truth::Unknown || exact) {
        return t != Truth::False;
    }
    AtomSet fixed = atoms & dom;
    for (const AtomSet& s : a.satisfiers(Caps{}.enumeration)) {
        if (fixed.subset_of(s)) {
            return true;
        }
    }
    return false;
}

bool external_support(const CRule& r, const AtomSet& x, const AtomSet& interpretation) {
    if (!r.body_satisfied(interpretation) || !r.body_satisfied(interpretation - x)) {
        return false;
    }
    bool some = std::any_of(r.head().begin(), r.head().end(), [&](const CAtom& a) {
        return x.intersects(a.domain()) && exists_superset(a, interpretation & a.domain());
    });
    if (!some) {
        return false;
    }
    const AtomSet inside = x & interpretation;
    return std::all_of(r.head().begin(), r.head().end(), [&](const CAtom& a) {
        return !a.satisfied_by(interpretation) || inside.intersects(a.domain());
    });
}

bool is_unfounded(const GroundProgram& p, const AtomSet& x, const AtomSet& interpretation) {
    return std::none_of(p.begin(), p.end(), [&](const CRule& r) { return external_support(r, x, interpretation); });
}

namespace {

// C-atoms evaluated over subsets of a fixed interpretation I, given as bit
// masks over the atoms of I. Atoms outside I are false in every such subset.
struct LocalCAtom {
    const CAtom* atom = nullptr;
    std::vector<int> position;
    std::uint64_t dom_mask = 0;

    bool holds(std::uint64_t m) const {
        return atom->accepts([&](std::size_t i) { return position[i] >= 0 && ((m >> position[i]) & 1u); });
    }
};

struct LocalRule {
    const CRule* rule = nullptr;
    std::vector<LocalCAtom> head;
    std::vector<std::pair<LocalCAtom, bool>> body;
    std::vector<char> upward;       // some satisfier contains I ∩ dom(A)
    std::vector<char> head_holds;   // I ⊨ A
    bool body_holds_full = false;

    bool body_holds(std::uint64_t m) const {
        return std::all_of(body.begin(), body.end(), [&](const auto& l) { return l.first.holds(m) != l.second; });
    }
};

class SubsetView {
public:
    SubsetView(const GroundProgram& p, const AtomSet& interpretation, std::size_t cap)
        : interpretation_(interpretation) {
        if (interpretation.size() > cap || interpretation.size() > 62) {
            throw Error(ErrorCode::CapExceeded, "subset search over " + std::to_string(interpretation.size()) +
                                                    " atoms exceeds the cap of " + std::to_string(cap));
        }
        full_ = (std::uint64_t{1} << interpretation.size()) - 1;
        for (const CRule& r : p) {
            LocalRule lr;
            lr.rule = &r;
            for (const CAtom& a : r.head()) {
                lr.head.push_back(localize(a));
                lr.upward.push_back(exists_superset(a, interpretation & a.domain()));
            }
            for (const CAtom& a : r.positive_body()) {
                lr.body.emplace_back(localize(a), false);
            }
            for (const CAtom& a : r.negative_body()) {
                lr.body.emplace_back(localize(a), true);
            }
            for (const LocalCAtom& h : lr.head) {
                lr.head_holds.push_back(h.holds(full_));
            }
            lr.body_holds_full = lr.body_holds(full_);
            rules_.push_back(std::move(lr));
        }
    }

    std::uint64_t full() const { return full_; }
    const std::vector<LocalRule>& rules() const { return rules_; }

    AtomSet set_of(std::uint64_t m) const {
        std::vector<Atom> out;
        for (std::size_t i = 0; i < interpretation_.size(); ++i) {
            if ((m >> i) & 1u) {
                out.push_back(interpretation_[i]);
            }
        }
        return AtomSet::from_sorted(std::move(out));
    }

    bool supports(const LocalRule& r, std::uint64_t x) const {
        if (!r.body_holds_full || !r.body_holds(full_ & ~x)) {
            return false;
        }
        bool some = false;
        for (std::size_t i = 0; i < r.head.size() && !some; ++i) {
            some = (x & r.head[i].dom_mask) != 0 && r.upward[i];
        }
        if (!some) {
            return false;
        }
        for (std::size_t i = 0; i < r.head.size(); ++i) {
            if (r.head_holds[i] && (x & r.head[i].dom_mask) == 0) {
                return false;
            }
        }
        return true;
    }

    bool unfounded(std::uint64_t x) const {
        return std::none_of(rules_.begin(), rules_.end(), [&](const LocalRule& r) { return supports(r, x); });
    }

    // Masks of nonempty subsets in order of increasing size.
    std::vector<std::uint64_t> nonempty_by_size() const {
        std::vector<std::uint64_t> out;
        for (std::uint64_t m = 1; m <= full_; ++m) {
            out.push_back(m);
        }
        std::stable_sort(out.begin(), out.end(),
                         [](std::uint64_t a, std::uint64_t b) { return std::popcount(a) < std::popcount(b); });
        return out;
    }

private:
    LocalCAtom localize(const CAtom& a) const {
        LocalCAtom c;
        c.atom = &a;
        for (Atom x : a.domain()) {
            std::size_t p = interpretation_.position(x);
            if (p < interpretation_.size()) {
                c.position.push_back(static_cast<int>(p));
                c.dom_mask |= std::uint64_t{1} << p;
            } else {
                c.position.push_back(-1);
            }
        }
        return c;
    }

    const AtomSet& interpretation_;
    std::uint64_t full_ = 0;
    std::vector<LocalRule> rules_;
};

} // namespace

std::vector<AtomSet> unfounded_sets(const GroundProgram& p, const AtomSet& interpretation, const Caps& caps) {
    SubsetView view(p, interpretation, caps.subset);
    std::vector<AtomSet> out;
    for (std::uint64_t m = 0;; ++m) {
        if (view.unfounded(m)) {
            out.push_back(view.set_of(m));
            if (out.size() > std::max<std::size_t>(caps.unfounded, 1) * 256) {
                throw Error(ErrorCode::CapExceeded, "too many unfounded sets");
            }
        }
        if (m == view.full()) {
            break;
        }
    }
    canonicalize(out);
    return out;
}

bool unfounded_check_applicable(const GroundProgram& p, const Caps& caps) {
    for (const CRule& r : p) {
        if (r.is_constraint()) {
            continue;
        }
        if (!r.is_normal()) {
            return false;
        }
        for (const CAtom& a : r.positive_body()) {
            if (classify_catom(a, caps.enumeration) == Monotonicity::Neither) {
                return false;
            }
        }
        for (const CAtom& a : r.negative_body()) {
            if (classify_catom(complement_catom(a), caps.enumeration) == Monotonicity::Neither) {
                return false;
            }
        }
    }
    return true;
}

AtomSet greatest_unfounded_check(const GroundProgram& p, const AtomSet& interpretation, const AtomSet& scope,
                                 const Caps& caps) {
    if (!unfounded_check_applicable(p, caps)) {
        throw Error(ErrorCode::NotApplicable,
                    "greatest unfounded set computation needs a normal program with convex literals");
    }
    AtomSet u = interpretation & scope;
    std::vector<const CRule*> active;
    for (const CRule& r : p) {
        if (!r.is_constraint() && r.body_satisfied(interpretation)) {
            active.push_back(&r);
        }
    }
    bool changed = true;
    while (changed && !u.empty()) {
        changed = false;
        AtomSet rest = interpretation - u;
        for (const CRule* r : active) {
            const CAtom& head = r->head()[0];
            if (!u.intersects(head.domain()) || !exists_superset(head, interpretation & head.domain()) ||
                !r->body_satisfied(rest)) {
                continue;
            }
            u = u - head.domain();
            rest = interpretation - u;
            changed = true;
        }
    }
    return u;
}

std::optional<AtomSet> find_unfounded_set(const GroundProgram& p, const AtomSet& interpretation, const Caps& caps) {
    if (interpretation.empty()) {
        return std::nullopt;
    }
    if (unfounded_check_applicable(p, caps)) {
        AtomSet u = greatest_unfounded_check(p, interpretation, interpretation, caps);
        return u.empty() ? std::nullopt : std::optional<AtomSet>(u);
    }
    detail::CompiledProgram cp(p.rules(), interpretation);
    std::vector<Truth> values(cp.atom_count(), Truth::False);
    for (Atom a : interpretation) {
        values[*cp.index_of(a)] = Truth::True;
    }
    std::vector<char> founded = detail::founded_closure(cp, values);
    std::vector<Atom> outside;
    for (Atom a : interpretation) {
        if (!founded[*cp.index_of(a)]) {
            outside.push_back(a);
        }
    }
    if (!outside.empty()) {
        return AtomSet::from_sorted(std::move(outside));
    }
    SubsetView view(p, interpretation, caps.subset);
    for (std::uint64_t m : view.nonempty_by_size()) {
        if (view.unfounded(m)) {
            return view.set_of(m);
        }
    }
    return std::nullopt;
}

Verdict is_answer_set(const GroundProgram& p, const AtomSet& interpretation, const Caps& caps, Strategy strategy) {
    Verdict v;
    for (const CRule& r : p) {
        if (!rule_satisfied(r, interpretation)) {
            v.kind = Verdict::Kind::ViolatedRule;
            v.rule = r;
            return v;
        }
    }
    if (strategy == Strategy::UnfoundedSets) {
        if (auto x = find_unfounded_set(p, interpretation, caps)) {
            v.kind = Verdict::Kind::UnfoundedSet;
            v.witness = *x;
        }
        return v;
    }
    if (interpretation.size() <= caps.subset) {
        GroundProgram active = reduct(p, interpretation);
        SubsetView view(active, interpretation, caps.subset);
        for (std::uint64_t m = 0; m < view.full(); ++m) {
            bool ok = true;
            for (const LocalRule& r : view.rules()) {
                if (!r.body_holds(m)) {
                    continue;
                }
                bool head_ok = false;
                for (const LocalCAtom& h : r.head) {
                    if (h.holds(m) && (m & h.dom_mask) == h.dom_mask) {
                        head_ok = true;
                        break;
                    }
                }
                if (!head_ok) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                v.kind = Verdict::Kind::SmallerModel;
                v.witness = view.set_of(m);
                return v;
            }
        }
        return v;
    }
    if (auto x = find_unfounded_set(p, interpretation, caps)) {
        AtomSet smaller = interpretation - *x;
        if (!minimality_condition(p, interpretation, smaller)) {
            throw Error(ErrorCode::CapExceeded, "minimal-model check over " + std::to_string(interpretation.size()) +
                                                    " atoms exceeds the subset cap");
        }
        v.kind = Verdict::Kind::SmallerModel;
        v.witness = smaller;
    }
    return v;
}

std::vector<AtomSet> enumerate_answer_sets(const GroundProgram& p, const Caps& caps) {
    const AtomSet& dom = p.domain();
    if (dom.size() > caps.atoms || dom.size() > 62) {
        throw Error(ErrorCode::CapExceeded, "brute-force enumeration over " + std::to_string(dom.size()) +
                                                " atoms exceeds the atom cap of " + std::to_string(caps.atoms));
    }
    SubsetView view(p, dom, 62);
    std::vector<AtomSet> out;
    for (std::uint64_t m = 0;; ++m) {
        bool model = true;
        for (const LocalRule& r : view.rules()) {
            if (!r.body_holds(m)) {
                continue;
            }
            if (std::none_of(r.head.begin(), r.head.end(), [&](const LocalCAtom& h) { return h.holds(m); })) {
                model = false;
                break;
            }
        }
        if (model) {
            AtomSet candidate = view.set_of(m);
            if (!find_unfounded_set(p, candidate, caps)) {
                out.push_back(std::move(candidate));
            }
        }
        if (m == view.full()) {
            break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace acpstep
