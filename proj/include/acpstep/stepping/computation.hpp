#pragma once

#include <acpstep/caps.hpp>
#include <acpstep/core/rule.hpp>
#include <acpstep/stepping/state.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace acpstep {

// Indices into p of the unconsidered rules active under I_S that admit a
// valid successor assignment.
std::vector<std::size_t> active_candidates(const GroundProgram& p, const State& s, const Caps& caps = {});

// Unconsidered rules active under I_S, whether or not they admit a successor.
std::vector<std::size_t> active_unconsidered(const GroundProgram& p, const State& s);

struct JumpResult {
    State state;
    AtomSet model;                // the answer set of the auxiliary program
    GroundProgram added;          // rules new to the state
};

// Solves P_S ∪ selected ∪ {:- not a | a ∈ I} ∪ {:- a | a ∈ I-} and returns the
// stable state with I = model and P = P_S ∪ reduct(selected, model).
// Throws NoAnswerSet or SearchExhausted.
JumpResult apply_jump(const State& s, const GroundProgram& selected, const Caps& caps = {});

// A state reached by a jump from `from` to `to` with model I = I_to, as single
// steps. Each step picks the first rule of P_to \ P active under the current
// interpretation.
std::vector<StepDelta> expand_jump(const State& from, const State& to, const Caps& caps = {});

// Steps rules of reduct(P, target) from start until complete. With an order,
// the first eligible rule in that order is taken; otherwise the canonically
// smallest. Throws PreconditionViolated if target is not an answer set
// reachable from start.
std::vector<State> guided_computation(const GroundProgram& p, const AtomSet& target, const State& start,
                                      const std::vector<CRule>& order = {}, const Caps& caps = {});

enum class ComputationStatus { InProgress, Complete, Succeeded, Stuck };

const char* to_string(ComputationStatus s);

struct StatusReport {
    ComputationStatus status = ComputationStatus::InProgress;
    bool complete = false;
    bool stable = false;
    bool stuck = false;
    bool failed_checked = false;
    std::optional<std::size_t> failed_at;   // earliest failing step when checked
};

// path is S_0 .. S_n. With check_failed, searches answer sets of p extending
// each prefix (monotone, so binary search); throws SearchExhausted past caps.
StatusReport computation_status(const GroundProgram& p, std::span<const State> path, bool check_failed,
                                const Caps& caps = {});

struct ComputationCheck {
    bool is_computation = true;
    std::optional<std::size_t> bad_index;   // first offending state
    std::string reason;
    bool rooted = false;
    bool stable = false;
};

ComputationCheck check_computation(std::span<const State> states, const Caps& caps = {});

} // namespace acpstep
