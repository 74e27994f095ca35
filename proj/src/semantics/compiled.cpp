#include "compiled.hpp"

#include <algorithm>
#include <deque>

namespace acpstep::detail {

CompiledProgram::CompiledProgram(std::span<const CRule> program, const AtomSet& extra_atoms)
    : source(program.begin(), program.end()) {
    std::vector<Atom> all(extra_atoms.begin(), extra_atoms.end());
    for (const CRule& r : source) {
        all.insert(all.end(), r.domain().begin(), r.domain().end());
    }
    atoms = AtomSet(std::move(all)).atoms();
    for (std::uint32_t i = 0; i < atoms.size(); ++i) {
        index_.emplace(atoms[i].id(), i);
    }
    rules_of_atom.resize(atoms.size());
    body_rules_of_atom.resize(atoms.size());

    auto add_catom = [&](const CAtom& a) {
        CompiledCAtom c{a, {}, {}};
        for (Atom x : a.domain()) {
            c.local.push_back(index_.at(x.id()));
        }
        for (Atom x : pos_occurrences(a)) {
            c.positive.push_back(index_.at(x.id()));
        }
        catoms.push_back(std::move(c));
        return static_cast<std::uint32_t>(catoms.size() - 1);
    };
    for (std::uint32_t ri = 0; ri < source.size(); ++ri) {
        const CRule& r = source[ri];
        CompiledRule cr;
        for (const CAtom& h : r.head()) {
            cr.head.push_back(add_catom(h));
        }
        std::vector<std::uint32_t> body_atoms;
        for (const CAtom& b : r.positive_body()) {
            cr.body.push_back({add_catom(b), false});
        }
        for (const CAtom& b : r.negative_body()) {
            cr.body.push_back({add_catom(b), true});
        }
        for (const CompiledLiteral& l : cr.body) {
            const auto& local = catoms[l.catom].local;
            body_atoms.insert(body_atoms.end(), local.begin(), local.end());
        }
        std::sort(body_atoms.begin(), body_atoms.end());
        body_atoms.erase(std::unique(body_atoms.begin(), body_atoms.end()), body_atoms.end());
        for (std::uint32_t a : body_atoms) {
            body_rules_of_atom[a].push_back(ri);
        }
        for (Atom x : r.domain()) {
            rules_of_atom[index_.at(x.id())].push_back(ri);
        }
        rules.push_back(std::move(cr));
    }
}

std::optional<std::uint32_t> CompiledProgram::index_of(Atom a) const {
    auto it = index_.find(a.id());
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Truth CompiledProgram::eval(std::uint32_t catom, std::span<const Truth> values, bool* exact) const {
    const CompiledCAtom& c = catoms[catom];
    std::vector<Truth> local(c.local.size());
    for (std::size_t i = 0; i < c.local.size(); ++i) {
        local[i] = values[c.local[i]];
    }
    return c.atom.evaluate(local, exact);
}

Truth CompiledProgram::eval_literal(const CompiledLiteral& l, std::span<const Truth> values) const {
    Truth t = eval(l.catom, values);
    return l.negated ? negate(t) : t;
}

Truth CompiledProgram::eval_body(std::uint32_t rule, std::span<const Truth> values) const {
    Truth result = Truth::True;
    for (const CompiledLiteral& l : rules[rule].body) {
        Truth t = eval_literal(l, values);
        if (t == Truth::False) {
            return Truth::False;
        }
        if (t == Truth::Unknown) {
            result = Truth::Unknown;
        }
    }
    return result;
}

std::vector<char> founded_closure(const CompiledProgram& cp, std::span<const Truth> values) {
    const std::size_t n = cp.atom_count();
    std::vector<char> founded(n, 0);
    std::vector<char> queued(cp.rules.size(), 1);
    std::deque<std::uint32_t> queue;
    for (std::uint32_t r = 0; r < cp.rules.size(); ++r) {
        queue.push_back(r);
    }
    std::vector<Truth> restricted(n);
    std::vector<Truth> upward(n);
    for (std::size_t a = 0; a < n; ++a) {
        restricted[a] = Truth::False;
        upward[a] = values[a] == Truth::True ? Truth::True : Truth::Unknown;
    }
    while (!queue.empty()) {
        std::uint32_t r = queue.front();
        queue.pop_front();
        queued[r] = 0;
        const CompiledRule& rule = cp.rules[r];
        if (rule.head.empty() || cp.eval_body(r, values) == Truth::False ||
            cp.eval_body(r, restricted) == Truth::False) {
            continue;
        }
        for (std::uint32_t h : rule.head) {
            if (cp.eval(h, upward) == Truth::False) {
                continue;
            }
            for (std::uint32_t x : cp.catoms[h].positive) {
                if (values[x] == Truth::False || founded[x]) {
                    continue;
                }
                founded[x] = 1;
                restricted[x] = values[x];
                for (std::uint32_t dependent : cp.body_rules_of_atom[x]) {
                    if (!queued[dependent]) {
                        queued[dependent] = 1;
                        queue.push_back(dependent);
                    }
                }
            }
        }
    }
    return founded;
}

} // namespace acpstep::detail
