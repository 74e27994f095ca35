#pragma once

#include <acpstep/core/rule.hpp>

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace acpstep::detail {

struct CompiledCAtom {
    CAtom atom;
    std::vector<std::uint32_t> local;     // domain position -> atom index
    std::vector<std::uint32_t> positive;  // atom indices of pos_occurrences
};

struct CompiledLiteral {
    std::uint32_t catom = 0;
    bool negated = false;
};

struct CompiledRule {
    std::vector<std::uint32_t> head;
    std::vector<CompiledLiteral> body;
};

// Rules over dense atom indices, for algorithms that evaluate c-atoms many times.
class CompiledProgram {
public:
    explicit CompiledProgram(std::span<const CRule> rules, const AtomSet& extra_atoms = {});

    std::size_t atom_count() const { return atoms.size(); }
    std::optional<std::uint32_t> index_of(Atom a) const;

    // values indexed by atom index.
    Truth eval(std::uint32_t catom, std::span<const Truth> values, bool* exact = nullptr) const;
    Truth eval_literal(const CompiledLiteral& l, std::span<const Truth> values) const;
    Truth eval_body(std::uint32_t rule, std::span<const Truth> values) const;

    std::vector<CRule> source;
    std::vector<Atom> atoms;
    std::vector<CompiledCAtom> catoms;
    std::vector<CompiledRule> rules;
    std::vector<std::vector<std::uint32_t>> rules_of_atom;       // atom in dom(rule)
    std::vector<std::vector<std::uint32_t>> body_rules_of_atom;  // atom in dom(body(rule))

private:
    std::unordered_map<std::uint32_t, std::uint32_t> index_;
    mutable std::vector<Truth> scratch_;
};

// Atoms that may still be true in an answer set extending `values`: the
// closure of the rules whose body can hold when every atom outside the
// closure is false. Exact for total assignments in the sense that
// (true atoms) \ closure is unfounded.
std::vector<char> founded_closure(const CompiledProgram& cp, std::span<const Truth> values);

} // namespace acpstep::detail
