#pragma once

#include <acpstep/caps.hpp>
#include <acpstep/core/rule.hpp>

#include <optional>
#include <string>
#include <vector>

namespace acpstep {

// How is_answer_set establishes stability of a model.
enum class Strategy {
    UnfoundedSets,   // no nonempty unfounded subset
    MinimalModel,    // no proper subset satisfies the minimality condition
};

struct Verdict {
    enum class Kind { AnswerSet, ViolatedRule, UnfoundedSet, SmallerModel };

    Kind kind = Kind::AnswerSet;
    std::optional<CRule> rule;   // ViolatedRule
    AtomSet witness;             // UnfoundedSet or SmallerModel

    bool is_answer_set() const { return kind == Kind::AnswerSet; }
    std::string str() const;
};

// Rules whose body is satisfied by I.
GroundProgram reduct(const GroundProgram& p, const AtomSet& interpretation);

// For every reduct rule whose body holds in the smaller interpretation, some
// head c-atom holds in it and agrees with I on its domain.
bool minimality_condition(const GroundProgram& p, const AtomSet& interpretation, const AtomSet& smaller);

// Some satisfier of `a` contains `atoms` (atoms outside the domain are ignored).
bool exists_superset(const CAtom& a, const AtomSet& atoms);

bool external_support(const CRule& r, const AtomSet& x, const AtomSet& interpretation);
bool is_unfounded(const GroundProgram& p, const AtomSet& x, const AtomSet& interpretation);

// Every unfounded subset of I (including the empty set), canonical order.
std::vector<AtomSet> unfounded_sets(const GroundProgram& p, const AtomSet& interpretation, const Caps& caps = {});

// Normal (constraints aside) with convex literals: the greatest-unfounded-set
// computation below is exact for such programs.
bool unfounded_check_applicable(const GroundProgram& p, const Caps& caps = {});

// Greatest unfounded subset of I ∩ scope. Throws NotApplicable unless
// unfounded_check_applicable(p).
AtomSet greatest_unfounded_check(const GroundProgram& p, const AtomSet& interpretation, const AtomSet& scope,
                                 const Caps& caps = {});

// A nonempty unfounded subset of I, if one exists.
std::optional<AtomSet> find_unfounded_set(const GroundProgram& p, const AtomSet& interpretation,
                                          const Caps& caps = {});

Verdict is_answer_set(const GroundProgram& p, const AtomSet& interpretation, const Caps& caps = {},
                      Strategy strategy = Strategy::UnfoundedSets);

// Brute force over 2^dom(P); throws CapExceeded beyond caps.atoms.
std::vector<AtomSet> enumerate_answer_sets(const GroundProgram& p, const Caps& caps = {});

} // namespace acpstep
