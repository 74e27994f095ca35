#pragma once

#include <acpstep/caps.hpp>
#include <acpstep/core/rule.hpp>
#include <acpstep/frontend/ast.hpp>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace acpstep {

// Variable bindings of one instance, sorted by variable name.
using Substitution = std::vector<std::pair<std::string, Term>>;

struct Provenance {
    std::size_t source = 0;
    Substitution substitution;

    // "r5 {X→5, Y→2}"
    std::string str() const;
    friend bool operator==(const Provenance&, const Provenance&) = default;
    friend auto operator<=>(const Provenance& a, const Provenance& b) {
        if (auto c = a.source <=> b.source; c != 0) {
            return c;
        }
        return a.substitution <=> b.substitution;
    }
};

struct GroundingResult {
    ProgramAst source;
    GroundProgram program;
    // provenance[i] lists every (source rule, substitution) producing program[i].
    std::vector<std::vector<Provenance>> provenance;

    const RuleAst* source_rule(std::size_t id) const;
    // Throws UnknownId for an id not in source.
    std::vector<std::size_t> instances_of(std::size_t source_id) const;
    std::string provenance_str(std::size_t rule_index) const;
    // Ground program with provenance comments, one rule per line.
    std::string annotated() const;
};

// Instantiates the program. Variables range over atoms derivable when negation
// is ignored; conditions of choice and aggregate elements are resolved against
// the well-founded model of the instantiated program and must be decided there.
GroundingResult ground(const ProgramAst& program, const Caps& caps = {});
GroundingResult ground_text(std::string_view text, const Caps& caps = {}, const std::string& file = {});

// Parses and grounds a single variable-free rule, e.g. "a :- not b."
CRule parse_ground_rule(std::string_view text);

} // namespace acpstep
