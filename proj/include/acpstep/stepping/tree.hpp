#pragma once

#include <acpstep/caps.hpp>
#include <acpstep/stepping/computation.hpp>
#include <acpstep/stepping/state.hpp>

#include <optional>
#include <vector>

namespace acpstep {

struct Edge {
    enum class Kind { Root, Step, Jump };

    Kind kind = Kind::Root;
    std::optional<StepDelta> step;   // Step
    GroundProgram selected;          // Jump: the rules jumped through
    AtomSet model;                   // Jump: answer set of the auxiliary program
};

struct TreeNode {
    std::size_t id = 0;
    std::optional<std::size_t> parent;
    Edge edge;
    State state;
    std::vector<std::size_t> children;
};

// Rooted tree of states; the path from the root to the active node is the
// current computation. Retracting only moves the active node, so abandoned
// branches stay available.
class ComputationTree {
public:
    ComputationTree();

    std::size_t size() const { return nodes_.size(); }
    const TreeNode& node(std::size_t id) const;
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t active() const { return active_; }
    const State& current() const { return nodes_[active_].state; }

    std::vector<std::size_t> active_path() const;
    std::vector<State> path_states() const;

    // Validates and applies a step from the active node; the new node becomes
    // active. An identical existing child is reused. Throws InvalidStep.
    std::size_t step(const StepDelta& d, const Caps& caps = {});
    // Throws NoAnswerSet or SearchExhausted.
    std::size_t jump(const GroundProgram& selected, const Caps& caps = {});
    // Throws UnknownId.
    void retract(std::size_t id);

private:
    std::size_t attach(Edge edge, State state);

    std::vector<TreeNode> nodes_;
    std::size_t active_ = 0;
};

} // namespace acpstep
