#include <acpstep/stepping/tree.hpp>

#include <acpstep/error.hpp>

#include <algorithm>

namespace acpstep {

namespace {

bool same_edge(const Edge& a, const Edge& b) {
    return a.kind == b.kind && a.step == b.step && a.selected == b.selected && a.model == b.model;
}

} // namespace

ComputationTree::ComputationTree() { nodes_.push_back(TreeNode{0, std::nullopt, Edge{}, empty_state(), {}}); }

const TreeNode& ComputationTree::node(std::size_t id) const {
    if (id >= nodes_.size()) {
        throw Error(ErrorCode::UnknownId, "no node " + std::to_string(id));
    }
    return nodes_[id];
}

std::vector<std::size_t> ComputationTree::active_path() const {
    std::vector<std::size_t> path;
    for (std::optional<std::size_t> id = active_; id; id = nodes_[*id].parent) {
        path.push_back(*id);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<State> ComputationTree::path_states() const {
    std::vector<State> out;
    for (std::size_t id : active_path()) {
        out.push_back(nodes_[id].state);
    }
    return out;
}

std::size_t ComputationTree::attach(Edge edge, State state) {
    for (std::size_t child : nodes_[active_].children) {
        if (same_edge(nodes_[child].edge, edge)) {
            active_ = child;
            return child;
        }
    }
    const std::size_t id = nodes_.size();
    nodes_.push_back(TreeNode{id, active_, std::move(edge), std::move(state), {}});
    nodes_[active_].children.push_back(id);
    active_ = id;
    return id;
}

std::size_t ComputationTree::step(const StepDelta& d, const Caps& caps) {
    StepCheck c = validate_assignment(current(), d);
    if (!c.ok()) {
        throw Error(ErrorCode::InvalidStep, std::string(to_string(c.kind)) + ": " + c.message);
    }
    State next = apply_step(current(), d, caps);
    Edge edge;
    edge.kind = Edge::Kind::Step;
    edge.step = d;
    return attach(std::move(edge), std::move(next));
}

std::size_t ComputationTree::jump(const GroundProgram& selected, const Caps& caps) {
    JumpResult r = apply_jump(current(), selected, caps);
    Edge edge;
    edge.kind = Edge::Kind::Jump;
    edge.selected = selected;
    edge.model = r.model;
    return attach(std::move(edge), std::move(r.state));
}

void ComputationTree::retract(std::size_t id) {
    node(id);
    active_ = id;
}

} // namespace acpstep
