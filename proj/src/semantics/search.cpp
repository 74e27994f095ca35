#include <acpstep/error.hpp>
#include <acpstep/semantics/search.hpp>
#include <acpstep/semantics/semantics.hpp>

#include "compiled.hpp"

#include <algorithm>

namespace acpstep {

struct AnswerSetSearch::Impl {
    struct Decision {
        std::size_t trail_size;
        std::uint32_t atom;
        bool flipped;
    };

    Impl(const GroundProgram& p, SearchOptions o)
        : program(p), options(std::move(o)), cp(p.rules(), options.assume_true | options.assume_false) {
        const std::size_t n = cp.atom_count();
        std::vector<char> placed(n, 0);
        for (Atom a : options.branch_first) {
            if (auto i = cp.index_of(a); i && !placed[*i]) {
                placed[*i] = 1;
                order.push_back(*i);
            }
        }
        for (std::uint32_t i = 0; i < n; ++i) {
            if (!placed[i]) {
                order.push_back(i);
            }
        }
    }

    bool assign(std::uint32_t a, Truth v) {
        if (values[a] == v) {
            return true;
        }
        if (values[a] != Truth::Unknown) {
            return false;
        }
        values[a] = v;
        trail.push_back(a);
        for (std::uint32_t r : cp.rules_of_atom[a]) {
            if (!dirty[r]) {
                dirty[r] = 1;
                queue.push_back(r);
            }
        }
        return true;
    }

    // Restricts the unknown atoms of a c-atom so that it can still take the target value.
    bool force(std::uint32_t c, bool target) {
        const detail::CompiledCAtom& cc = cp.catoms[c];
        const Truth unwanted = target ? Truth::False : Truth::True;
        for (std::uint32_t a : cc.local) {
            if (values[a] != Truth::Unknown) {
                continue;
            }
            values[a] = Truth::True;
            const bool can_true = cp.eval(c, values) != unwanted;
            values[a] = Truth::False;
            const bool can_false = cp.eval(c, values) != unwanted;
            values[a] = Truth::Unknown;
            if (!can_true && !can_false) {
                return false;
            }
            if (!can_true && !assign(a, Truth::False)) {
                return false;
            }
            if (!can_false && !assign(a, Truth::True)) {
                return false;
            }
        }
        return cp.eval(c, values) != unwanted;
    }

    bool propagate_rule(std::uint32_t r) {
        const detail::CompiledRule& rule = cp.rules[r];
        Truth body = Truth::True;
        std::size_t unknown_literals = 0;
        const detail::CompiledLiteral* unknown_literal = nullptr;
        for (const detail::CompiledLiteral& l : rule.body) {
            Truth t = cp.eval_literal(l, values);
            if (t == Truth::False) {
                return true;
            }
            if (t == Truth::Unknown) {
                body = Truth::Unknown;
                ++unknown_literals;
                unknown_literal = &l;
            }
        }
        std::size_t open_heads = 0;
        std::uint32_t open_head = 0;
        for (std::uint32_t h : rule.head) {
            Truth t = cp.eval(h, values);
            if (t == Truth::True) {
                return true;
            }
            if (t == Truth::Unknown) {
                ++open_heads;
                open_head = h;
            }
        }
        if (body == Truth::True) {
            if (open_heads == 0) {
                return false;
            }
            return open_heads > 1 || force(open_head, true);
        }
        if (open_heads == 0 && unknown_literals == 1) {
            return force(unknown_literal->catom, unknown_literal->negated);
        }
        return true;
    }

    bool propagate() {
        for (;;) {
            while (!queue.empty()) {
                std::uint32_t r = queue.back();
                queue.pop_back();
                dirty[r] = 0;
                if (!propagate_rule(r)) {
                    clear_queue();
                    return false;
                }
            }
            std::vector<char> founded = detail::founded_closure(cp, values);
            bool changed = false;
            for (std::uint32_t a = 0; a < values.size(); ++a) {
                if (values[a] == Truth::False || founded[a]) {
                    continue;
                }
                if (!assign(a, Truth::False)) {
                    clear_queue();
                    return false;
                }
                changed = true;
            }
            if (!changed) {
                return true;
            }
        }
    }

    void clear_queue() {
        for (std::uint32_t r : queue) {
            dirty[r] = 0;
        }
        queue.clear();
    }

    void undo(std::size_t size) {
        while (trail.size() > size) {
            values[trail.back()] = Truth::Unknown;
            trail.pop_back();
        }
    }

    bool backtrack() {
        clear_queue();
        while (!decisions.empty()) {
            Decision d = decisions.back();
            decisions.pop_back();
            undo(d.trail_size);
            if (!d.flipped) {
                decisions.push_back({d.trail_size, d.atom, true});
                assign(d.atom, Truth::True);
                return true;
            }
        }
        return false;
    }

    bool start() {
        values.assign(cp.atom_count(), Truth::Unknown);
        dirty.assign(cp.rules.size(), 1);
        queue.clear();
        for (std::uint32_t r = 0; r < cp.rules.size(); ++r) {
            queue.push_back(r);
        }
        trail.clear();
        decisions.clear();
        for (Atom a : options.assume_true) {
            if (!assign(*cp.index_of(a), Truth::True)) {
                return false;
            }
        }
        for (Atom a : options.assume_false) {
            if (!assign(*cp.index_of(a), Truth::False)) {
                return false;
            }
        }
        return true;
    }

    SearchStatus run(const std::function<bool(const AtomSet&)>& visitor) {
        bool ok = start() && propagate();
        for (;;) {
            if (!ok) {
                if (!backtrack()) {
                    return SearchStatus::Complete;
                }
                ok = propagate();
                continue;
            }
            std::uint32_t next = static_cast<std::uint32_t>(values.size());
            for (std::uint32_t a : order) {
                if (values[a] == Truth::Unknown) {
                    next = a;
                    break;
                }
            }
            if (next == values.size()) {
                std::vector<Atom> atoms;
                for (std::uint32_t a = 0; a < values.size(); ++a) {
                    if (values[a] == Truth::True) {
                        atoms.push_back(cp.atoms[a]);
                    }
                }
                AtomSet model = AtomSet::from_sorted(std::move(atoms));
                if (is_answer_set(program, model, options.caps).is_answer_set() && !visitor(model)) {
                    return SearchStatus::Stopped;
                }
                ok = false;
                continue;
            }
            if (++decision_count > options.caps.search_nodes) {
                return SearchStatus::Exhausted;
            }
            decisions.push_back({trail.size(), next, false});
            assign(next, Truth::False);
            ok = propagate();
        }
    }

    GroundProgram program;
    SearchOptions options;
    detail::CompiledProgram cp;
    std::vector<std::uint32_t> order;
    std::vector<Truth> values;
    std::vector<std::uint32_t> trail;
    std::vector<Decision> decisions;
    std::vector<char> dirty;
    std::vector<std::uint32_t> queue;
    std::size_t decision_count = 0;
};

AnswerSetSearch::AnswerSetSearch(const GroundProgram& program, SearchOptions options)
    : impl_(std::make_unique<Impl>(program, std::move(options))) {}

AnswerSetSearch::~AnswerSetSearch() = default;

SearchStatus AnswerSetSearch::enumerate(const std::function<bool(const AtomSet&)>& visitor) {
    return impl_->run(visitor);
}

std::size_t AnswerSetSearch::decisions() const {
    return impl_->decision_count;
}

std::optional<AtomSet> solve_extension(const GroundProgram& base, const GroundProgram& extension,
                                       const AtomSet& required_true, const AtomSet& required_false,
                                       const Caps& caps) {
    if (required_true.intersects(required_false)) {
        return std::nullopt;
    }
    SearchOptions options;
    options.caps = caps;
    options.assume_true = required_true;
    options.assume_false = required_false;
    options.branch_first = extension.domain().atoms();
    AnswerSetSearch search(base | extension, options);
    std::optional<AtomSet> found;
    SearchStatus status = search.enumerate([&](const AtomSet& model) {
        found = model;
        return false;
    });
    if (status == SearchStatus::Exhausted) {
        throw Error(ErrorCode::SearchExhausted,
                    "answer-set search stopped after " + std::to_string(caps.search_nodes) + " decisions");
    }
    return found;
}

std::vector<AtomSet> solve(const GroundProgram& program, std::size_t max_models, const Caps& caps,
                           SearchStatus* status) {
    SearchOptions options;
    options.caps = caps;
    AnswerSetSearch search(program, options);
    std::vector<AtomSet> out;
    SearchStatus s = search.enumerate([&](const AtomSet& model) {
        out.push_back(model);
        return max_models == 0 || out.size() < max_models;
    });
    if (status != nullptr) {
        *status = s;
    }
    return out;
}

} // namespace acpstep
