#pragma once

#include <acpstep/caps.hpp>
#include <acpstep/core/rule.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace acpstep {

// posOcc of a literal set: atoms in some satisfier of a positive c-atom or of
// the complement of a negated one. Falls back to the whole domain when a
// complement cannot be built.
AtomSet head_occurrences(const CRule& r);
AtomSet body_occurrences(const CRule& r);

// Edge (a, b): a occurs positively in a head, b in the body of the same rule.
struct AtomGraph {
    AtomSet vertices;
    std::vector<std::pair<Atom, Atom>> edges;   // sorted, unique
};

// Edge (i, j): rule i has a positive body occurrence of a positive head
// occurrence of rule j. Vertices are indices into the program.
struct RuleGraph {
    std::size_t vertices = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;   // sorted, unique
};

AtomGraph dependency_graph(const GroundProgram& p);
RuleGraph rule_dependency_graph(const GroundProgram& p);

// A cycle v1 -> ... -> vk -> v1 (listed without repeating v1), if any.
std::optional<std::vector<Atom>> find_cycle(const AtomGraph& g);
std::optional<std::vector<std::size_t>> find_cycle(const RuleGraph& g);

bool is_absolutely_tight(const GroundProgram& p);

// Stepping order: every rule comes after the rules it positively depends on;
// ties broken canonically. Throws CyclicGraph.
std::vector<CRule> topological_rule_order(const GroundProgram& p);

// Convex when every literal (a negated c-atom through its complement) is.
bool literal_convex(const CAtom& a, bool negated, const Caps& caps = {});

struct Guarantee {
    bool normal = false;     // every rule except constraints has one head c-atom
    bool convex = false;
    bool tight = false;
    bool stable_guarantee = false;
    std::vector<CRule> order;                  // certificate when guaranteed
    std::optional<std::string> violation;      // first reason otherwise
    std::vector<Atom> cycle_witness;
};

// Throws CapExceeded from classification of large c-atoms.
Guarantee stable_guarantee(const GroundProgram& p, const Caps& caps = {});

} // namespace acpstep
