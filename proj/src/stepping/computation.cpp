#include <acpstep/stepping/computation.hpp>

#include <acpstep/error.hpp>
#include <acpstep/semantics/search.hpp>
#include <acpstep/semantics/semantics.hpp>

#include <algorithm>

namespace acpstep {

std::vector<std::size_t> active_unconsidered(const GroundProgram& p, const State& s) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!s.rules.contains(p[i]) && rule_active(p[i], s.pos)) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> active_candidates(const GroundProgram& p, const State& s, const Caps& caps) {
    std::vector<std::size_t> out;
    for (std::size_t i : active_unconsidered(p, s)) {
        if (admits_successor(s, p[i], caps)) {
            out.push_back(i);
        }
    }
    return out;
}

JumpResult apply_jump(const State& s, const GroundProgram& selected, const Caps& caps) {
    GroundProgram extension = selected - s.rules;
    std::optional<AtomSet> model = solve_extension(s.rules, extension, s.pos, s.neg, caps);
    if (!model) {
        throw Error(ErrorCode::NoAnswerSet,
                    "jump target inconsistent: the auxiliary program has no answer set "
                    "(the overall program may still have answer sets)");
    }
    JumpResult out;
    out.model = *model;
    out.added = reduct(extension, *model);
    const AtomSet& reached = out.added.domain();
    out.state.rules = s.rules | out.added;
    out.state.pos = s.pos | (*model & reached);
    out.state.neg = s.neg | (reached - *model);
    return out;
}

namespace {

StepDelta toward(const State& cur, const CRule& r, const AtomSet& target) {
    AtomSet undecided = undecided_atoms(cur, r);
    return StepDelta{r, undecided & target, undecided - target};
}

// Steps the rules of goal \ P_start, always taking the first eligible rule of
// `order` (falling back to canonical order).
std::vector<State> walk(const State& start, const GroundProgram& goal, const AtomSet& target,
                        const std::vector<CRule>& order, const Caps& caps) {
    std::vector<State> states{start};
    std::vector<CRule> sequence = order;
    for (const CRule& r : goal) {
        if (std::find(order.begin(), order.end(), r) == order.end()) {
            sequence.push_back(r);
        }
    }
    std::vector<char> done(sequence.size(), 0);
    for (std::size_t k = 0; k < sequence.size(); ++k) {
        done[k] = start.rules.contains(sequence[k]) || !goal.contains(sequence[k]);
    }
    while (true) {
        const State& cur = states.back();
        std::optional<std::size_t> pick;
        bool pending = false;
        for (std::size_t k = 0; k < sequence.size() && !pick; ++k) {
            if (done[k]) {
                continue;
            }
            pending = true;
            if (rule_active(sequence[k], cur.pos)) {
                pick = k;
            }
        }
        if (!pick) {
            if (pending) {
                throw Error(ErrorCode::PreconditionViolated, "no remaining rule is active under " + cur.pos.str());
            }
            return states;
        }
        done[*pick] = 1;
        StepDelta d = toward(cur, sequence[*pick], target);
        StepCheck c = validate_assignment(cur, d);
        if (!c.ok()) {
            throw Error(ErrorCode::PreconditionViolated, "cannot step " + d.rule.str() + ": " + c.message);
        }
        states.push_back(apply_step(cur, d, caps));
    }
}

} // namespace

std::vector<StepDelta> expand_jump(const State& from, const State& to, const Caps& caps) {
    std::vector<State> states = walk(from, to.rules, to.pos, {}, caps);
    std::vector<StepDelta> out;
    for (std::size_t i = 1; i < states.size(); ++i) {
        CRule r = (states[i].rules - states[i - 1].rules)[0];
        out.push_back(StepDelta{r, states[i].pos - states[i - 1].pos, states[i].neg - states[i - 1].neg});
    }
    return out;
}

std::vector<State> guided_computation(const GroundProgram& p, const AtomSet& target, const State& start,
                                      const std::vector<CRule>& order, const Caps& caps) {
    if (!start.pos.subset_of(target) || target.intersects(start.neg)) {
        throw Error(ErrorCode::PreconditionViolated, "the start state disagrees with " + target.str());
    }
    GroundProgram goal = reduct(p, target);
    if (!start.rules.subset_of(goal)) {
        throw Error(ErrorCode::PreconditionViolated, "the start state considers rules inactive under " + target.str());
    }
    try {
        Verdict v = is_answer_set(p, target, caps);
        if (!v.is_answer_set()) {
            throw Error(ErrorCode::PreconditionViolated, target.str() + " is not an answer set: " + v.str());
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::CapExceeded) {
            throw;
        }
    }
    return walk(start, goal, target, order, caps);
}

const char* to_string(ComputationStatus s) {
    switch (s) {
    case ComputationStatus::InProgress: return "in_progress";
    case ComputationStatus::Complete: return "complete";
    case ComputationStatus::Succeeded: return "succeeded";
    case ComputationStatus::Stuck: return "stuck";
    }
    return "?";
}

namespace {

bool extends_to_answer_set(const GroundProgram& p, const State& s, const Caps& caps) {
    SearchOptions options;
    options.caps = caps;
    options.assume_true = s.pos;
    options.assume_false = s.neg;
    AnswerSetSearch search(p, options);
    bool found = false;
    SearchStatus st = search.enumerate([&](const AtomSet& i) {
        found = s.rules.subset_of(reduct(p, i));
        return !found;
    });
    if (!found && st == SearchStatus::Exhausted) {
        throw Error(ErrorCode::SearchExhausted, "failure check reached the search cap");
    }
    return found;
}

} // namespace

StatusReport computation_status(const GroundProgram& p, std::span<const State> path, bool check_failed,
                                const Caps& caps) {
    StatusReport report;
    const State& leaf = path.back();
    report.complete = reduct(p, leaf.pos).subset_of(leaf.rules);
    report.stable = leaf.stable();
    report.stuck = !report.complete && active_candidates(p, leaf, caps).empty();
    if (report.complete) {
        report.status = report.stable ? ComputationStatus::Succeeded : ComputationStatus::Complete;
    } else if (report.stuck) {
        report.status = ComputationStatus::Stuck;
    }
    if (check_failed) {
        report.failed_checked = true;
        std::size_t lo = 0;
        std::size_t hi = path.size();
        while (lo < hi) {
            std::size_t mid = lo + (hi - lo) / 2;
            if (extends_to_answer_set(p, path[mid], caps)) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if (lo < path.size()) {
            report.failed_at = lo;
        }
    }
    return report;
}

ComputationCheck check_computation(std::span<const State> states, const Caps& caps) {
    ComputationCheck out;
    for (std::size_t i = 0; i < states.size() && out.is_computation; ++i) {
        StateCheck c = check_state(states[i], caps);
        if (!c.ok) {
            out = {false, i, "state " + std::to_string(i) + " is not a state: " + c.reason, false, false};
            break;
        }
        if (i > 0) {
            c = check_successor(states[i - 1], states[i], caps);
            if (!c.ok) {
                out = {false, i,
                       "state " + std::to_string(i) + " is not a successor of state " + std::to_string(i - 1) + ": " +
                           c.reason,
                       false, false};
            }
        }
    }
    if (out.is_computation && !states.empty()) {
        out.rooted = states.front() == empty_state();
        out.stable = std::all_of(states.begin(), states.end(), [](const State& s) { return s.stable(); });
    }
    return out;
}

} // namespace acpstep
