#pragma once

#include <acpstep/caps.hpp>
#include <acpstep/core/rule.hpp>

#include <optional>
#include <string>
#include <vector>

namespace acpstep {

// <P, I, I-, Y>: considered rules, atoms considered true and false, and every
// unfounded subset of I with respect to P (the empty set included).
struct State {
    GroundProgram rules;
    AtomSet pos;
    AtomSet neg;
    std::vector<AtomSet> unfounded{AtomSet{}};

    AtomSet domain() const { return pos | neg; }
    bool stable() const { return unfounded.size() == 1 && unfounded.front().empty(); }
    std::vector<AtomSet> nonempty_unfounded() const;

    friend bool operator==(const State&, const State&) = default;
};

State empty_state();

struct StepDelta {
    CRule rule;
    AtomSet delta_true;
    AtomSet delta_false;

    friend bool operator==(const StepDelta&, const StepDelta&) = default;
};

struct StepCheck {
    enum class Kind {
        Ok,
        AlreadyConsidered,
        Inactive,          // I does not satisfy the body
        NotUndecided,      // an assigned atom is outside dom(r) or already decided
        Overlap,           // an atom is assigned both values
        Incomplete,        // some undecided atom of the rule is unassigned
        BodyFalsified,
        HeadUnsatisfied,
    };

    Kind kind = Kind::Ok;
    std::string message;

    bool ok() const { return kind == Kind::Ok; }
};

const char* to_string(StepCheck::Kind kind);

// dom(r) \ dom(S)
AtomSet undecided_atoms(const State& s, const CRule& r);

StepCheck validate_assignment(const State& s, const StepDelta& d);

// Successor of s for a valid delta. The unfounded sets are extended locally:
// only X ∪ Δ' with X ∈ Y and Δ' ⊆ Δ are candidates, and r is the only rule that
// can support them. Throws InvalidStep for a delta validate_assignment rejects
// and CapExceeded when |Δ| or the family grows past caps.
State apply_step(const State& s, const StepDelta& d, const Caps& caps = {});

// The values the undecided atoms of r can take in a valid successor.
struct AssignmentSpace {
    bool admissible = false;   // at least one valid assignment exists
    AtomSet forced_true;       // true in every valid assignment
    AtomSet forced_false;
    AtomSet free;              // both values occur
    bool exhausted = false;    // search cap hit; the sets are then incomplete
};

// Assumes rule_active(r, I_S) and r not yet considered.
bool admits_successor(const State& s, const CRule& r, const Caps& caps = {});
// With a partial assignment, only completions of it are considered.
AssignmentSpace assignment_space(const State& s, const CRule& r, const Caps& caps = {},
                                 const AtomSet& fix_true = {}, const AtomSet& fix_false = {});
// Completes a partial assignment with some valid one, or nullopt.
std::optional<StepDelta> complete_assignment(const State& s, const CRule& r, const AtomSet& want_true,
                                             const AtomSet& want_false, const Caps& caps = {});

// State conditions checked against the definitions, the unfounded family by
// exhaustive enumeration.
struct StateCheck {
    bool ok = true;
    std::string reason;
};

StateCheck check_state(const State& s, const Caps& caps = {});
StateCheck check_successor(const State& s, const State& next, const Caps& caps = {});

} // namespace acpstep
