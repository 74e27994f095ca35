#include <acpstep/frontend/grounder.hpp>
#include <acpstep/frontend/parser.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace acpstep {

std::string Provenance::str() const {
    std::string out = "r" + std::to_string(source) + " {";
    for (std::size_t i = 0; i < substitution.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += substitution[i].first + "→" + substitution[i].second.str();
    }
    out += '}';
    return out;
}

const RuleAst* GroundingResult::source_rule(std::size_t id) const {
    for (const RuleAst& r : source.rules) {
        if (r.id == id) {
            return &r;
        }
    }
    return nullptr;
}

std::vector<std::size_t> GroundingResult::instances_of(std::size_t source_id) const {
    if (!source_rule(source_id)) {
        throw Error(ErrorCode::UnknownId, "no source rule r" + std::to_string(source_id));
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < provenance.size(); ++i) {
        for (const Provenance& p : provenance[i]) {
            if (p.source == source_id) {
                out.push_back(i);
                break;
            }
        }
    }
    return out;
}

std::string GroundingResult::provenance_str(std::size_t rule_index) const {
    std::string out;
    for (const Provenance& p : provenance[rule_index]) {
        if (!out.empty()) {
            out += "; ";
        }
        out += p.str();
    }
    return out;
}

std::string GroundingResult::annotated() const {
    std::string out;
    for (std::size_t i = 0; i < program.size(); ++i) {
        out += program[i].str() + " % " + provenance_str(i) + '\n';
    }
    return out;
}

namespace {

// Thrown when arithmetic is undefined for an instance; the instance is dropped.
struct Undefined {};

using Bindings = std::vector<std::pair<std::string, Term>>;

const Term* lookup(const Bindings& b, const std::string& name) {
    for (const auto& [var, value] : b) {
        if (var == name) {
            return &value;
        }
    }
    return nullptr;
}

bool ground_under(const TermAst& t, const Bindings& b) {
    if (t.kind == TermAst::Kind::Anonymous) {
        return false;
    }
    if (t.kind == TermAst::Kind::Variable) {
        return lookup(b, t.name) != nullptr;
    }
    return std::all_of(t.children.begin(), t.children.end(), [&](const TermAst& c) { return ground_under(c, b); });
}

bool ground_under(const AtomAst& a, const Bindings& b) {
    return std::all_of(a.args.begin(), a.args.end(), [&](const TermAst& t) { return ground_under(t, b); });
}

bool expands(const TermAst& t) {
    if (t.kind == TermAst::Kind::Pool || t.kind == TermAst::Kind::Range) {
        return true;
    }
    return std::any_of(t.children.begin(), t.children.end(), expands);
}

std::int64_t checked(long double v) {
    if (v > static_cast<long double>(std::numeric_limits<std::int64_t>::max()) ||
        v < static_cast<long double>(std::numeric_limits<std::int64_t>::min())) {
        throw Undefined{};
    }
    return static_cast<std::int64_t>(v);
}

class Instantiator;

std::vector<Term> eval_term(const TermAst& t, const Bindings& b, std::size_t cap) {
    switch (t.kind) {
    case TermAst::Kind::Number:
        return {Term::number(t.number)};
    case TermAst::Kind::Symbol:
        return {Term::symbol(t.name)};
    case TermAst::Kind::Variable: {
        const Term* v = lookup(b, t.name);
        if (v == nullptr) {
            throw Error(ErrorCode::Unsafe, "unbound variable " + t.name);
        }
        return {*v};
    }
    case TermAst::Kind::Anonymous:
        throw Error(ErrorCode::Unsafe, "anonymous variable outside a positive body atom");
    case TermAst::Kind::Unary: {
        std::vector<Term> out;
        for (const Term& x : eval_term(t.children[0], b, cap)) {
            if (!x.is_number()) {
                throw Undefined{};
            }
            out.push_back(Term::number(checked(-static_cast<long double>(x.number()))));
        }
        return out;
    }
    case TermAst::Kind::Binary: {
        std::vector<Term> out;
        std::vector<Term> lhs = eval_term(t.children[0], b, cap);
        std::vector<Term> rhs = eval_term(t.children[1], b, cap);
        for (const Term& x : lhs) {
            for (const Term& y : rhs) {
                if (!x.is_number() || !y.is_number()) {
                    throw Undefined{};
                }
                long double p = x.number();
                long double q = y.number();
                switch (t.op) {
                case '+': out.push_back(Term::number(checked(p + q))); break;
                case '-': out.push_back(Term::number(checked(p - q))); break;
                case '*': out.push_back(Term::number(checked(p * q))); break;
                case '/':
                    if (y.number() == 0) {
                        throw Undefined{};
                    }
                    out.push_back(Term::number(x.number() / y.number()));
                    break;
                default:
                    if (y.number() == 0) {
                        throw Undefined{};
                    }
                    out.push_back(Term::number(x.number() % y.number()));
                    break;
                }
            }
        }
        return out;
    }
    case TermAst::Kind::Range: {
        std::vector<Term> out;
        for (const Term& lo : eval_term(t.children[0], b, cap)) {
            for (const Term& hi : eval_term(t.children[1], b, cap)) {
                if (!lo.is_number() || !hi.is_number()) {
                    throw Undefined{};
                }
                if (hi.number() >= lo.number() &&
                    static_cast<std::uint64_t>(hi.number() - lo.number()) >= cap) {
                    throw Error(ErrorCode::CapExceeded, "range " + t.str() + " exceeds the grounding cap");
                }
                for (std::int64_t i = lo.number(); i <= hi.number(); ++i) {
                    out.push_back(Term::number(i));
                }
            }
        }
        return out;
    }
    case TermAst::Kind::Pool: {
        std::vector<Term> out;
        for (const TermAst& c : t.children) {
            std::vector<Term> part = eval_term(c, b, cap);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }
    }
    return {};
}

Term eval_single(const TermAst& t, const Bindings& b, std::size_t cap) {
    std::vector<Term> values = eval_term(t, b, cap);
    if (values.size() != 1) {
        throw Error(ErrorCode::Grounding, "term " + t.str() + " must denote a single value here");
    }
    return values.front();
}

std::vector<Atom> expand_atom(const AtomAst& a, const Bindings& b, std::size_t cap) {
    std::vector<std::vector<Term>> choices;
    for (const TermAst& t : a.args) {
        choices.push_back(eval_term(t, b, cap));
    }
    std::vector<Atom> out;
    std::vector<Term> args(a.args.size());
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == choices.size()) {
            out.emplace_back(a.predicate, args);
            return;
        }
        for (const Term& t : choices[i]) {
            args[i] = t;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

bool compare(Comparison op, const Term& x, const Term& y) {
    switch (op) {
    case Comparison::Eq: return x == y;
    case Comparison::Ne: return x != y;
    case Comparison::Lt: return x < y;
    case Comparison::Le: return x <= y;
    case Comparison::Gt: return x > y;
    case Comparison::Ge: return x >= y;
    }
    return false;
}

double bound_value(const Term& t, const TermAst& ast) {
    if (!t.is_number()) {
        throw Error(ErrorCode::Grounding, "bound " + ast.str() + " is not a number");
    }
    if (t.number() == std::numeric_limits<std::int64_t>::min()) {
        return -std::numeric_limits<double>::infinity();
    }
    if (t.number() == std::numeric_limits<std::int64_t>::max()) {
        return std::numeric_limits<double>::infinity();
    }
    return static_cast<double>(t.number());
}

class AtomIndex {
public:
    bool contains(Atom a) const { return all_.count(a) > 0; }

    bool add(Atom a) {
        if (!all_.insert(a).second) {
            return false;
        }
        by_predicate_[{a.predicate(), a.arity()}].push_back(a);
        return true;
    }

    const std::vector<Atom>& get(const std::string& predicate, std::size_t arity) const {
        static const std::vector<Atom> none;
        auto it = by_predicate_.find({predicate, arity});
        return it == by_predicate_.end() ? none : it->second;
    }

    std::size_t size() const { return all_.size(); }

private:
    std::unordered_set<Atom, AtomHash> all_;
    std::map<std::pair<std::string, std::size_t>, std::vector<Atom>> by_predicate_;
};

// A positive atom or a comparison to be solved when enumerating bindings.
struct Goal {
    const AtomAst* atom = nullptr;
    const LiteralAst* comparison = nullptr;
    bool source_ground = false;
};

std::size_t unbound_occurrences(const TermAst& t, const Bindings& b) {
    if (t.kind == TermAst::Kind::Variable) {
        return lookup(b, t.name) ? 0 : 1;
    }
    if (t.kind == TermAst::Kind::Anonymous) {
        return 1;
    }
    std::size_t n = 0;
    for (const TermAst& c : t.children) {
        n += unbound_occurrences(c, b);
    }
    return n;
}

// X+1, 2*X-Y with Y bound, -X, ...: one unbound variable that can be solved for.
bool linear_in_one(const TermAst& t, const Bindings& b) {
    if (unbound_occurrences(t, b) != 1) {
        return false;
    }
    switch (t.kind) {
    case TermAst::Kind::Variable:
        return true;
    case TermAst::Kind::Unary:
        return linear_in_one(t.children[0], b);
    case TermAst::Kind::Binary:
        if (t.op != '+' && t.op != '-' && t.op != '*') {
            return false;
        }
        return ground_under(t.children[0], b) ? !expands(t.children[0]) && linear_in_one(t.children[1], b)
                                              : !expands(t.children[1]) && linear_in_one(t.children[0], b);
    default:
        return false;
    }
}

// Binds the single unbound variable of a linear term so that it evaluates to value.
bool solve_linear(const TermAst& t, std::int64_t value, Bindings& b, std::size_t cap) {
    switch (t.kind) {
    case TermAst::Kind::Variable:
        b.emplace_back(t.name, Term::number(value));
        return true;
    case TermAst::Kind::Unary:
        return solve_linear(t.children[0], checked(-static_cast<long double>(value)), b, cap);
    case TermAst::Kind::Binary: {
        bool left_known = ground_under(t.children[0], b);
        Term known = eval_single(t.children[left_known ? 0 : 1], b, cap);
        if (!known.is_number()) {
            return false;
        }
        long double k = known.number();
        long double v = value;
        const TermAst& open = t.children[left_known ? 1 : 0];
        switch (t.op) {
        case '+':
            return solve_linear(open, checked(v - k), b, cap);
        case '-':
            return solve_linear(open, checked(left_known ? k - v : v + k), b, cap);
        default:
            if (known.number() == 0 || value % known.number() != 0) {
                return false;
            }
            return solve_linear(open, value / known.number(), b, cap);
        }
    }
    default:
        return false;
    }
}

bool atom_bindable(const AtomAst& a, const Bindings& b) {
    Bindings plain = b;
    for (const TermAst& t : a.args) {
        if (t.kind == TermAst::Kind::Variable && !lookup(plain, t.name)) {
            plain.emplace_back(t.name, Term{});
        }
    }
    for (const TermAst& t : a.args) {
        if (t.kind == TermAst::Kind::Variable || t.kind == TermAst::Kind::Anonymous) {
            continue;
        }
        if (expands(t)) {
            return false;
        }
        if (!ground_under(t, plain) && !linear_in_one(t, plain)) {
            return false;
        }
    }
    return true;
}

bool match(const AtomAst& pattern, Atom ground, Bindings& b, std::size_t cap) {
    std::span<const Term> args = ground.args();
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        const TermAst& t = pattern.args[i];
        if (t.kind != TermAst::Kind::Variable) {
            continue;
        }
        if (const Term* v = lookup(b, t.name)) {
            if (*v != args[i]) {
                return false;
            }
        } else {
            b.emplace_back(t.name, args[i]);
        }
    }
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        const TermAst& t = pattern.args[i];
        if (t.kind == TermAst::Kind::Variable || t.kind == TermAst::Kind::Anonymous) {
            continue;
        }
        if (!ground_under(t, b)) {
            if (!args[i].is_number() || !solve_linear(t, args[i].number(), b, cap)) {
                return false;
            }
        }
        if (eval_single(t, b, cap) != args[i]) {
            return false;
        }
    }
    return true;
}

bool has_variables(const AtomAst& a) {
    std::set<std::string> vars;
    a.collect_variables(vars);
    if (!vars.empty()) {
        return true;
    }
    for (const TermAst& t : a.args) {
        if (t.kind == TermAst::Kind::Anonymous) {
            return true;
        }
    }
    return false;
}

// Enumerates all bindings extending `base` that satisfy the goals.
class Joiner {
public:
    Joiner(const std::vector<Goal>& goals, const AtomIndex& index, std::size_t cap)
        : goals_(goals), index_(index), cap_(cap), done_(goals.size(), 0) {}

    void run(Bindings& b, const std::function<void(const Bindings&)>& emit) { solve(b, emit); }

private:
    void solve(Bindings& b, const std::function<void(const Bindings&)>& emit) {
        enum class Mode { None, Check, Assign, Join } mode = Mode::None;
        std::size_t pick = 0;
        bool assign_left = true;
        for (std::size_t i = 0; i < goals_.size() && mode == Mode::None; ++i) {
            if (done_[i]) {
                continue;
            }
            const Goal& g = goals_[i];
            bool ready = g.atom ? ground_under(*g.atom, b)
                                : ground_under(g.comparison->lhs, b) && ground_under(g.comparison->rhs, b);
            if (ready) {
                mode = Mode::Check;
                pick = i;
            }
        }
        for (std::size_t i = 0; i < goals_.size() && mode == Mode::None; ++i) {
            const Goal& g = goals_[i];
            if (done_[i] || g.comparison == nullptr || g.comparison->op != Comparison::Eq) {
                continue;
            }
            const LiteralAst& c = *g.comparison;
            if (c.lhs.is_plain_variable() && !lookup(b, c.lhs.name) && ground_under(c.rhs, b)) {
                mode = Mode::Assign;
                pick = i;
                assign_left = true;
            } else if (c.rhs.is_plain_variable() && !lookup(b, c.rhs.name) && ground_under(c.lhs, b)) {
                mode = Mode::Assign;
                pick = i;
                assign_left = false;
            }
        }
        if (mode == Mode::None) {
            std::size_t best = std::numeric_limits<std::size_t>::max();
            for (std::size_t i = 0; i < goals_.size(); ++i) {
                const Goal& g = goals_[i];
                if (done_[i] || g.atom == nullptr || !atom_bindable(*g.atom, b)) {
                    continue;
                }
                std::size_t n = index_.get(g.atom->predicate, g.atom->args.size()).size();
                if (n < best) {
                    best = n;
                    pick = i;
                    mode = Mode::Join;
                }
            }
        }
        if (mode == Mode::None) {
            for (std::size_t i = 0; i < goals_.size(); ++i) {
                if (!done_[i]) {
                    throw Error(ErrorCode::Unsafe, "cannot bind the variables of a body literal");
                }
            }
            emit(b);
            return;
        }
        const Goal& g = goals_[pick];
        done_[pick] = 1;
        try {
            switch (mode) {
            case Mode::Check:
                if (g.atom != nullptr) {
                    bool ok = true;
                    if (!g.source_ground) {
                        for (Atom a : expand_atom(*g.atom, b, cap_)) {
                            ok = ok && index_.contains(a);
                        }
                    }
                    if (ok) {
                        solve(b, emit);
                    }
                } else {
                    const LiteralAst& c = *g.comparison;
                    if (compare(c.op, eval_single(c.lhs, b, cap_), eval_single(c.rhs, b, cap_))) {
                        solve(b, emit);
                    }
                }
                break;
            case Mode::Assign: {
                const LiteralAst& c = *g.comparison;
                const TermAst& var = assign_left ? c.lhs : c.rhs;
                const TermAst& value = assign_left ? c.rhs : c.lhs;
                for (const Term& v : eval_term(value, b, cap_)) {
                    b.emplace_back(var.name, v);
                    solve(b, emit);
                    b.pop_back();
                }
                break;
            }
            case Mode::Join: {
                const std::vector<Atom>& candidates = index_.get(g.atom->predicate, g.atom->args.size());
                for (std::size_t k = 0; k < candidates.size(); ++k) {
                    std::size_t mark = b.size();
                    bool matched = false;
                    try {
                        matched = match(*g.atom, candidates[k], b, cap_);
                    } catch (const Undefined&) {
                        matched = false;
                    }
                    if (matched) {
                        solve(b, emit);
                    }
                    b.resize(mark);
                }
                break;
            }
            case Mode::None:
                break;
            }
        } catch (const Undefined&) {
        }
        done_[pick] = 0;
    }

    const std::vector<Goal>& goals_;
    const AtomIndex& index_;
    std::size_t cap_;
    std::vector<char> done_;
};

// ---------------------------------------------------------------- safety

void bind_from(const std::vector<const LiteralAst*>& literals, std::set<std::string>& bound) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const LiteralAst* l : literals) {
            if (l->kind == LiteralAst::Kind::Atom && !l->negated) {
                for (const TermAst& t : l->atom.args) {
                    if (t.kind == TermAst::Kind::Variable && bound.insert(t.name).second) {
                        changed = true;
                    }
                }
            } else if (l->kind == LiteralAst::Kind::Compare && l->op == Comparison::Eq) {
                auto try_bind = [&](const TermAst& var, const TermAst& value) {
                    if (!var.is_plain_variable() || bound.count(var.name)) {
                        return;
                    }
                    std::set<std::string> needed;
                    value.collect_variables(needed);
                    if (std::includes(bound.begin(), bound.end(), needed.begin(), needed.end())) {
                        bound.insert(var.name);
                        changed = true;
                    }
                };
                try_bind(l->lhs, l->rhs);
                try_bind(l->rhs, l->lhs);
            }
        }
    }
}

[[noreturn]] void unsafe(const RuleAst& r, const std::string& var) {
    throw Error(ErrorCode::Unsafe, "unsafe variable " + var + " in rule r" + std::to_string(r.id), r.span);
}

void require_bound(const RuleAst& r, const std::set<std::string>& vars, const std::set<std::string>& bound) {
    for (const std::string& v : vars) {
        if (!bound.count(v)) {
            unsafe(r, v);
        }
    }
}

bool has_anonymous(const TermAst& t) {
    if (t.kind == TermAst::Kind::Anonymous) {
        return true;
    }
    return std::any_of(t.children.begin(), t.children.end(), has_anonymous);
}

bool has_anonymous(const AtomAst& a) {
    return std::any_of(a.args.begin(), a.args.end(), [](const TermAst& t) { return has_anonymous(t); });
}

void check_element(const RuleAst& r, const AtomAst& atom, bool atom_binds, const std::vector<LiteralAst>& conditions,
                   const std::set<std::string>& global) {
    std::vector<const LiteralAst*> binders;
    for (const LiteralAst& c : conditions) {
        binders.push_back(&c);
    }
    LiteralAst self;
    if (atom_binds) {
        self.kind = LiteralAst::Kind::Atom;
        self.atom = atom;
        binders.push_back(&self);
    }
    std::set<std::string> bound = global;
    bind_from(binders, bound);
    std::set<std::string> vars;
    atom.collect_variables(vars);
    for (const LiteralAst& c : conditions) {
        c.collect_variables(vars);
        if (c.kind != LiteralAst::Kind::Atom && c.kind != LiteralAst::Kind::Compare) {
            throw Error(ErrorCode::Grounding, "conditions must be atoms or comparisons", c.span);
        }
        if ((c.negated || c.kind == LiteralAst::Kind::Compare) &&
            (c.kind == LiteralAst::Kind::Atom ? has_anonymous(c.atom) : has_anonymous(c.lhs) || has_anonymous(c.rhs))) {
            unsafe(r, "_");
        }
    }
    if (!atom_binds && has_anonymous(atom)) {
        unsafe(r, "_");
    }
    require_bound(r, vars, bound);
}

std::set<std::string> check_safety(const RuleAst& r) {
    std::vector<const LiteralAst*> body;
    for (const LiteralAst& l : r.body) {
        body.push_back(&l);
    }
    std::set<std::string> bound;
    bind_from(body, bound);
    std::set<std::string> needed;
    for (const LiteralAst& l : r.body) {
        if (l.kind == LiteralAst::Kind::Aggregate) {
            if (l.aggregate.lower) {
                l.aggregate.lower->collect_variables(needed);
            }
            if (l.aggregate.upper) {
                l.aggregate.upper->collect_variables(needed);
            }
            continue;
        }
        l.collect_variables(needed);
        bool anonymous_ok = l.kind == LiteralAst::Kind::Atom && !l.negated;
        if (!anonymous_ok) {
            bool anon = l.kind == LiteralAst::Kind::Atom      ? has_anonymous(l.atom)
                        : l.kind == LiteralAst::Kind::Compare ? has_anonymous(l.lhs) || has_anonymous(l.rhs)
                                                              : false;
            if (anon) {
                unsafe(r, "_");
            }
        }
    }
    const HeadAst& h = r.head;
    for (const LiteralAst& d : h.disjuncts) {
        if (d.kind == LiteralAst::Kind::Aggregate) {
            if (d.aggregate.lower) {
                d.aggregate.lower->collect_variables(needed);
            }
            if (d.aggregate.upper) {
                d.aggregate.upper->collect_variables(needed);
            }
        } else {
            d.collect_variables(needed);
            if (d.kind == LiteralAst::Kind::Atom && has_anonymous(d.atom)) {
                unsafe(r, "_");
            }
        }
    }
    if (h.lower) {
        h.lower->collect_variables(needed);
    }
    if (h.upper) {
        h.upper->collect_variables(needed);
    }
    require_bound(r, needed, bound);
    for (const ChoiceElementAst& e : h.elements) {
        check_element(r, e.atom, false, e.conditions, bound);
    }
    auto check_aggregate = [&](const AggregateAst& a) {
        for (const AggregateElementAst& e : a.elements) {
            check_element(r, e.atom, !e.negated, e.conditions, bound);
            if (e.weight) {
                std::set<std::string> wv;
                e.weight->collect_variables(wv);
                std::set<std::string> local = bound;
                e.atom.collect_variables(local);
                for (const LiteralAst& c : e.conditions) {
                    c.collect_variables(local);
                }
                require_bound(r, wv, local);
            }
        }
    };
    for (const LiteralAst& l : r.body) {
        if (l.kind == LiteralAst::Kind::Aggregate) {
            check_aggregate(l.aggregate);
        }
    }
    for (const LiteralAst& d : h.disjuncts) {
        if (d.kind == LiteralAst::Kind::Aggregate) {
            check_aggregate(d.aggregate);
        }
    }
    return bound;
}

// ---------------------------------------------------------------- drafts

struct Condition {
    Atom atom;
    bool negated = false;
};

struct ElementDraft {
    Atom atom;
    bool negated = false;
    double weight = 1.0;
    std::vector<Condition> conditions;
};

struct AggregateDraft {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    std::vector<ElementDraft> elements;
};

struct CAtomDraft {
    std::optional<CAtom> ready;
    AggregateDraft aggregate;
};

struct BodyDraft {
    bool negated = false;
    CAtomDraft atom;
};

struct RuleDraft {
    Provenance provenance;
    HeadAst::Kind kind = HeadAst::Kind::Constraint;
    std::vector<CAtomDraft> head;
    std::optional<std::int64_t> lower;
    std::optional<std::int64_t> upper;
    std::vector<ElementDraft> elements;
    std::vector<BodyDraft> body;
};

class Instantiator {
public:
    Instantiator(const ProgramAst& program, const Caps& caps) : program_(program), caps_(caps) {}

    GroundingResult run() {
        for (const RuleAst& r : program_.rules) {
            check_safety(r);
        }
        derive_possible_atoms();
        std::vector<RuleDraft> drafts;
        for (const RuleAst& r : program_.rules) {
            instantiate(r, [&](RuleDraft d) {
                drafts.push_back(std::move(d));
                if (drafts.size() > caps_.grounding) {
                    throw Error(ErrorCode::CapExceeded,
                                "grounding exceeded " + std::to_string(caps_.grounding) + " rule instances");
                }
            });
        }
        well_founded(drafts);
        return assemble(drafts);
    }

private:
    // Atoms derivable when negation and aggregates are disregarded.
    void derive_possible_atoms() {
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<Atom> fresh;
            for (const RuleAst& r : program_.rules) {
                if (r.head.kind == HeadAst::Kind::Constraint) {
                    continue;
                }
                instantiate(r, [&](const RuleDraft& d) {
                    for (const CAtomDraft& h : d.head) {
                        if (h.ready) {
                            for (Atom a : pos_occurrences(*h.ready)) {
                                fresh.push_back(a);
                            }
                        } else {
                            for (const ElementDraft& e : h.aggregate.elements) {
                                fresh.push_back(e.atom);
                            }
                        }
                    }
                    for (const ElementDraft& e : d.elements) {
                        fresh.push_back(e.atom);
                    }
                });
            }
            for (Atom a : fresh) {
                changed = index_.add(a) || changed;
            }
            if (index_.size() > caps_.grounding) {
                throw Error(ErrorCode::CapExceeded,
                            "grounding exceeded " + std::to_string(caps_.grounding) + " atoms");
            }
        }
    }

    static std::vector<Goal> goals_of(const std::vector<const LiteralAst*>& literals) {
        std::vector<Goal> goals;
        for (const LiteralAst* l : literals) {
            if (l->kind == LiteralAst::Kind::Atom && !l->negated) {
                goals.push_back(Goal{&l->atom, nullptr, !has_variables(l->atom)});
            } else if (l->kind == LiteralAst::Kind::Compare) {
                goals.push_back(Goal{nullptr, l, false});
            }
        }
        return goals;
    }

    Substitution substitution_of(const RuleAst& r, const Bindings& b) const {
        std::set<std::string> vars;
        for (const LiteralAst& l : r.body) {
            if (l.kind != LiteralAst::Kind::Aggregate) {
                l.collect_variables(vars);
            }
        }
        Substitution out;
        for (const auto& [var, value] : b) {
            if (vars.count(var)) {
                out.emplace_back(var, value);
            }
        }
        std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    std::vector<Condition> ground_conditions(const std::vector<LiteralAst>& conditions, const Bindings& b) const {
        std::vector<Condition> out;
        for (const LiteralAst& c : conditions) {
            if (c.kind != LiteralAst::Kind::Atom) {
                continue;
            }
            for (Atom a : expand_atom(c.atom, b, caps_.grounding)) {
                out.push_back({a, c.negated});
            }
        }
        return out;
    }

    // Enumerates the ground elements of a conditional element.
    void elements_of(const AtomAst& atom, bool negated, const std::optional<TermAst>& weight,
                     const std::vector<LiteralAst>& conditions, bool atom_binds, Bindings& b,
                     std::vector<ElementDraft>& out) const {
        std::vector<const LiteralAst*> literals;
        for (const LiteralAst& c : conditions) {
            literals.push_back(&c);
        }
        LiteralAst self;
        std::set<std::string> atom_vars;
        atom.collect_variables(atom_vars);
        bool local = std::any_of(atom_vars.begin(), atom_vars.end(), [&](const std::string& v) { return !lookup(b, v); });
        if (atom_binds && (local || has_anonymous(atom))) {
            self.kind = LiteralAst::Kind::Atom;
            self.atom = atom;
            literals.push_back(&self);
        }
        std::vector<Goal> goals = goals_of(literals);
        Joiner(goals, index_, caps_.grounding).run(b, [&](const Bindings& local_b) {
            try {
                double w = 1.0;
                if (weight) {
                    Term t = eval_single(*weight, local_b, caps_.grounding);
                    if (!t.is_number()) {
                        throw Error(ErrorCode::Grounding, "weight " + weight->str() + " is not a number");
                    }
                    w = static_cast<double>(t.number());
                }
                std::vector<Condition> conds = ground_conditions(conditions, local_b);
                for (Atom a : expand_atom(atom, local_b, caps_.grounding)) {
                    out.push_back(ElementDraft{a, negated, w, conds});
                }
            } catch (const Undefined&) {
            }
        });
    }

    AggregateDraft aggregate_of(const AggregateAst& a, Bindings& b) const {
        AggregateDraft d;
        if (a.lower) {
            d.lower = bound_value(eval_single(*a.lower, b, caps_.grounding), *a.lower);
        }
        if (a.upper) {
            d.upper = bound_value(eval_single(*a.upper, b, caps_.grounding), *a.upper);
        }
        for (const AggregateElementAst& e : a.elements) {
            elements_of(e.atom, e.negated, a.weighted ? e.weight : std::nullopt, e.conditions, !e.negated, b,
                        d.elements);
        }
        return d;
    }

    CAtom explicit_of(const ExplicitAst& e, const Bindings& b) const {
        auto single = [&](const AtomAst& a) {
            std::vector<Atom> atoms = expand_atom(a, b, caps_.grounding);
            if (atoms.size() != 1) {
                throw Error(ErrorCode::Grounding, "pooled atoms are not allowed in explicit c-atoms", a.span);
            }
            return atoms.front();
        };
        std::vector<Atom> domain;
        for (const AtomAst& a : e.domain) {
            domain.push_back(single(a));
        }
        std::vector<AtomSet> sats;
        for (const auto& s : e.satisfiers) {
            std::vector<Atom> atoms;
            for (const AtomAst& a : s) {
                atoms.push_back(single(a));
            }
            sats.emplace_back(std::move(atoms));
        }
        return CAtom::explicit_satisfiers(AtomSet(std::move(domain)), std::move(sats));
    }

    template <class Emit>
    void instantiate(const RuleAst& r, Emit&& emit) {
        std::vector<const LiteralAst*> literals;
        for (const LiteralAst& l : r.body) {
            literals.push_back(&l);
        }
        std::vector<Goal> goals = goals_of(literals);
        Bindings b;
        Joiner(goals, index_, caps_.grounding).run(b, [&](const Bindings& found) {
            Bindings local = found;
            try {
                for (RuleDraft& d : drafts_for(r, local)) {
                    emit(std::move(d));
                }
            } catch (const Undefined&) {
            } catch (const Error& e) {
                if (e.span()) {
                    throw;
                }
                throw Error(e.code(), e.what(), r.span);
            }
        });
    }

    std::vector<RuleDraft> drafts_for(const RuleAst& r, Bindings& b) const {
        RuleDraft base;
        base.provenance = Provenance{r.id, substitution_of(r, b)};
        base.kind = r.head.kind;
        for (const LiteralAst& l : r.body) {
            switch (l.kind) {
            case LiteralAst::Kind::Atom:
                for (Atom a : expand_atom(l.atom, b, caps_.grounding)) {
                    base.body.push_back(BodyDraft{l.negated, CAtomDraft{CAtom::elementary(a), {}}});
                }
                break;
            case LiteralAst::Kind::Explicit:
                base.body.push_back(BodyDraft{l.negated, CAtomDraft{explicit_of(l.explicit_atom, b), {}}});
                break;
            case LiteralAst::Kind::Aggregate:
                base.body.push_back(BodyDraft{l.negated, CAtomDraft{std::nullopt, aggregate_of(l.aggregate, b)}});
                break;
            case LiteralAst::Kind::Compare:
                break;
            }
        }
        std::vector<RuleDraft> out;
        const HeadAst& h = r.head;
        if (h.kind == HeadAst::Kind::Choice) {
            auto count_bound = [&](const std::optional<TermAst>& t) -> std::optional<std::int64_t> {
                if (!t) {
                    return std::nullopt;
                }
                double v = bound_value(eval_single(*t, b, caps_.grounding), *t);
                if (std::isinf(v)) {
                    return std::nullopt;
                }
                return static_cast<std::int64_t>(v);
            };
            base.lower = count_bound(h.lower);
            base.upper = count_bound(h.upper);
            for (const ChoiceElementAst& e : h.elements) {
                elements_of(e.atom, false, std::nullopt, e.conditions, false, b, base.elements);
            }
            out.push_back(std::move(base));
            return out;
        }
        if (h.kind == HeadAst::Kind::Constraint) {
            out.push_back(std::move(base));
            return out;
        }
        if (h.disjuncts.size() == 1 && h.disjuncts[0].kind == LiteralAst::Kind::Atom) {
            for (Atom a : expand_atom(h.disjuncts[0].atom, b, caps_.grounding)) {
                RuleDraft d = base;
                d.head.push_back(CAtomDraft{CAtom::elementary(a), {}});
                out.push_back(std::move(d));
            }
            return out;
        }
        for (const LiteralAst& d : h.disjuncts) {
            switch (d.kind) {
            case LiteralAst::Kind::Atom: {
                std::vector<Atom> atoms = expand_atom(d.atom, b, caps_.grounding);
                if (atoms.size() != 1) {
                    throw Error(ErrorCode::Grounding, "pooled atoms are not supported in disjunctive heads", d.span);
                }
                base.head.push_back(CAtomDraft{CAtom::elementary(atoms.front()), {}});
                break;
            }
            case LiteralAst::Kind::Explicit:
                base.head.push_back(CAtomDraft{explicit_of(d.explicit_atom, b), {}});
                break;
            case LiteralAst::Kind::Aggregate:
                base.head.push_back(CAtomDraft{std::nullopt, aggregate_of(d.aggregate, b)});
                break;
            case LiteralAst::Kind::Compare:
                break;
            }
        }
        out.push_back(std::move(base));
        return out;
    }

    // Alternating fixpoint: certain_ only grows, possible_ only shrinks.
    void well_founded(const std::vector<RuleDraft>& drafts) {
        bool needed = false;
        for (const RuleDraft& d : drafts) {
            for (const ElementDraft& e : d.elements) {
                needed = needed || !e.conditions.empty();
            }
            auto scan = [&](const CAtomDraft& c) {
                for (const ElementDraft& e : c.aggregate.elements) {
                    needed = needed || !e.conditions.empty();
                }
            };
            for (const CAtomDraft& c : d.head) {
                scan(c);
            }
            for (const BodyDraft& c : d.body) {
                scan(c.atom);
            }
        }
        if (!needed) {
            return;
        }
        std::unordered_set<Atom, AtomHash> certain;
        std::unordered_set<Atom, AtomHash> possible;
        for (;;) {
            possible = consequences(drafts, certain, false);
            std::unordered_set<Atom, AtomHash> next = consequences(drafts, possible, true);
            if (next == certain) {
                break;
            }
            certain = std::move(next);
        }
        certain_ = std::move(certain);
        possible_ = std::move(possible);
        resolved_ = true;
    }

    // certain=true: least model where negation is checked against `other` (an
    // over-approximation) and only definite rules fire. certain=false: the
    // possible atoms given the certain atoms in `other`.
    static std::unordered_set<Atom, AtomHash> consequences(const std::vector<RuleDraft>& drafts,
                                                           const std::unordered_set<Atom, AtomHash>& other,
                                                           bool certain) {
        std::unordered_set<Atom, AtomHash> out;
        auto holds = [&](Atom a, bool negated) {
            if (!negated) {
                return out.count(a) > 0;
            }
            return other.count(a) == 0;
        };
        bool changed = true;
        while (changed) {
            changed = false;
            for (const RuleDraft& d : drafts) {
                if (d.kind == HeadAst::Kind::Constraint) {
                    continue;
                }
                bool fires = true;
                for (const BodyDraft& l : d.body) {
                    if (!l.atom.ready || !l.atom.ready->is_elementary()) {
                        if (certain) {
                            fires = false;
                        }
                        continue;
                    }
                    fires = fires && holds(l.atom.ready->elementary_atom(), l.negated);
                }
                if (!fires) {
                    continue;
                }
                if (certain) {
                    if (d.kind == HeadAst::Kind::Disjunction && d.head.size() == 1 && d.head[0].ready &&
                        d.head[0].ready->is_elementary()) {
                        changed = out.insert(d.head[0].ready->elementary_atom()).second || changed;
                    }
                    continue;
                }
                for (const CAtomDraft& h : d.head) {
                    if (h.ready) {
                        for (Atom a : pos_occurrences(*h.ready)) {
                            changed = out.insert(a).second || changed;
                        }
                    } else {
                        for (const ElementDraft& e : h.aggregate.elements) {
                            changed = out.insert(e.atom).second || changed;
                        }
                    }
                }
                for (const ElementDraft& e : d.elements) {
                    bool ok = std::all_of(e.conditions.begin(), e.conditions.end(),
                                          [&](const Condition& c) { return holds(c.atom, c.negated); });
                    if (ok) {
                        changed = out.insert(e.atom).second || changed;
                    }
                }
            }
        }
        return out;
    }

    // Drops decided conditions; returns false if the element is eliminated.
    bool resolve(const ElementDraft& e, const Provenance& origin) const {
        for (const Condition& c : e.conditions) {
            bool is_true = certain_.count(c.atom) > 0;
            bool is_possible = possible_.count(c.atom) > 0;
            if (!is_true && is_possible) {
                throw Error(ErrorCode::Grounding,
                            "condition " + std::string(c.negated ? "not " : "") + c.atom.str() + " of element " +
                                e.atom.str() + " in " + origin.str() + " is not decided by the well-founded model");
            }
            if (is_true == c.negated) {
                return false;
            }
        }
        return true;
    }

    CAtom finish(const CAtomDraft& d, const Provenance& origin) const {
        if (d.ready) {
            return *d.ready;
        }
        std::vector<WeightEntry> entries;
        for (const ElementDraft& e : d.aggregate.elements) {
            if (resolve(e, origin)) {
                entries.push_back(WeightEntry{e.atom, e.negated, e.weight});
            }
        }
        return CAtom::weight(d.aggregate.lower, d.aggregate.upper, std::move(entries));
    }

    GroundingResult assemble(const std::vector<RuleDraft>& drafts) const {
        std::unordered_map<std::string, std::size_t> seen;
        std::vector<CRule> rules;
        std::vector<std::vector<Provenance>> provenance;
        for (const RuleDraft& d : drafts) {
            std::vector<CAtom> head;
            std::vector<CAtom> positive;
            std::vector<CAtom> negative;
            for (const CAtomDraft& h : d.head) {
                head.push_back(finish(h, d.provenance));
            }
            if (d.kind == HeadAst::Kind::Choice) {
                std::vector<Atom> atoms;
                for (const ElementDraft& e : d.elements) {
                    if (resolve(e, d.provenance)) {
                        atoms.push_back(e.atom);
                    }
                }
                head.push_back(CAtom::choice(AtomSet(std::move(atoms)), d.lower, d.upper));
            }
            for (const BodyDraft& l : d.body) {
                (l.negated ? negative : positive).push_back(finish(l.atom, d.provenance));
            }
            CRule rule(std::move(head), std::move(positive), std::move(negative));
            auto [it, inserted] = seen.emplace(rule.str(), rules.size());
            if (inserted) {
                rules.push_back(rule);
                provenance.emplace_back();
            }
            provenance[it->second].push_back(d.provenance);
        }
        GroundingResult out;
        out.source = program_;
        out.program = GroundProgram(rules);
        out.provenance.resize(out.program.size());
        for (std::size_t i = 0; i < rules.size(); ++i) {
            std::vector<Provenance>& p = out.provenance[*out.program.index_of(rules[i])];
            p = provenance[i];
            std::sort(p.begin(), p.end());
            p.erase(std::unique(p.begin(), p.end()), p.end());
        }
        return out;
    }

    const ProgramAst& program_;
    Caps caps_;
    AtomIndex index_;
    std::unordered_set<Atom, AtomHash> certain_;
    std::unordered_set<Atom, AtomHash> possible_;
    bool resolved_ = false;
};

} // namespace

GroundingResult ground(const ProgramAst& program, const Caps& caps) {
    return Instantiator(program, caps).run();
}

GroundingResult ground_text(std::string_view text, const Caps& caps, const std::string& file) {
    return ground(parse_program(text, file), caps);
}

CRule parse_ground_rule(std::string_view text) {
    ProgramAst program = parse_program(text);
    if (program.rules.size() != 1) {
        throw Error(ErrorCode::Syntax, "expected exactly one rule, found " + std::to_string(program.rules.size()));
    }
    std::set<std::string> vars;
    for (const LiteralAst& l : program.rules[0].body) {
        l.collect_variables(vars);
    }
    for (const LiteralAst& l : program.rules[0].head.disjuncts) {
        l.collect_variables(vars);
    }
    for (const ChoiceElementAst& e : program.rules[0].head.elements) {
        e.atom.collect_variables(vars);
    }
    if (!vars.empty()) {
        throw Error(ErrorCode::Syntax, "rule is not ground: " + std::string(text));
    }
    GroundingResult g = ground(program);
    if (g.program.size() != 1) {
        throw Error(ErrorCode::Syntax, "rule does not denote a single ground rule: " + std::string(text));
    }
    return g.program[0];
}

} // namespace acpstep
