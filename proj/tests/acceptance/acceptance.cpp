// Prints one PASS/FAIL line per acceptance criterion; exits non-zero when any
// criterion fails. Details of failed checks go to stderr.

#include "../property/properties.hpp"
#include "../support/support.hpp"

#include <acpstep/analysis/analysis.hpp>
#include <acpstep/error.hpp>
#include <acpstep/semantics/search.hpp>
#include <acpstep/semantics/semantics.hpp>
#include <acpstep/session/session.hpp>
#include <acpstep/stepping/computation.hpp>

#include <functional>
#include <iostream>

using namespace acpstep;
using namespace acpstep::testing;

namespace {

class Criterion {
public:
    explicit Criterion(std::string name) : name_(std::move(name)) {}

    void check(bool ok, const std::string& what) {
        if (!ok) {
            failed_ = true;
            std::cerr << "  [" << name_ << "] failed: " << what << '\n';
        }
    }

    // Runs a block of checks; an exception counts as a failure.
    void run(const std::string& what, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            check(false, what + " threw " + e.what());
        }
    }

    bool report() const {
        std::cout << (failed_ ? "FAIL " : "PASS ") << name_ << std::endl;
        return !failed_;
    }

private:
    std::string name_;
    bool failed_ = false;
};

GroundProgram rules(std::initializer_list<const char*> texts) {
    std::vector<CRule> out;
    for (const char* t : texts) {
        out.push_back(rule_of(t));
    }
    return GroundProgram(std::move(out));
}

State st(GroundProgram p, const char* pos, const char* neg, std::initializer_list<const char*> unfounded = {}) {
    State s{std::move(p), atoms_of(pos), atoms_of(neg), {AtomSet{}}};
    for (const char* x : unfounded) {
        s.unfounded.push_back(atoms_of(x));
    }
    canonicalize(s.unfounded);
    return s;
}

// Every head c-atom is closed under supersets within its domain.
bool monotone(const GroundProgram& p) {
    for (const CRule& r : p) {
        for (const CAtom& a : r.head()) {
            for (const AtomSet& x : subsets(a.domain())) {
                for (const AtomSet& y : subsets(a.domain())) {
                    if (x.subset_of(y) && o_sat(a, x) && !o_sat(a, y)) {
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

const char* r1 = "a :- <{a, b}, {{}, {a, b}}>.";
const char* r2 = "b :- a.";
const char* r3 = "a :- b.";
const char* r4 = "<{c}, {{}, {c}}>.";
const char* r5 = ":- c.";

bool example_regression() {
    Criterion c("example-regression: intro, colouring, nested program and computations C1-C7");
    c.run("intro", [&] {
        c.check(enumerate_answer_sets(program_file({"intro.lp"})) == std::vector<AtomSet>{atoms_of("a")},
                "intro answer sets are {{a}}");
    });
    c.run("colouring", [&] {
        SearchStatus status = SearchStatus::Exhausted;
        c.check(solve(program_file({"coloring_buggy.lp"}), 0, {}, &status).empty() &&
                    status == SearchStatus::Complete,
                "buggy colouring has no answer set");
        c.check(!solve(program_file({"coloring.lp"}), 1, {}, &status).empty(), "fixed colouring has an answer set");
    });
    c.run("nested program", [&] {
        GroundProgram p = program_file({"nested_catoms.lp"});
        c.check(p == rules({r1, r2, r3, r4, r5}), "nested_catoms.lp grounds to r1..r5");
        c.check(enumerate_answer_sets(p) == std::vector<AtomSet>{atoms_of("a, b")}, "answer sets are {{a, b}}");

        State s0 = empty_state();
        State a = st(rules({r4}), "", "c");
        State b = st(rules({r4, r1}), "a, b", "c", {"a", "b"});
        State d = st(rules({r4, r1, r2}), "a, b", "c", {"a"});
        State e = st(rules({r4, r1, r2, r3}), "a, b", "c");
        std::vector<State> c1{s0, a, b}, c2{s0, a, b, d, e}, c3{e}, c4{s0, st(rules({r4}), "c", "")},
            c5{st(rules({r4, r1, r2, r3}), "a, b, c", "")};
        for (const auto* comp : {&c1, &c2, &c3, &c4, &c5}) {
            c.check(check_computation(*comp).is_computation, "C1-C5 are computations");
        }
        c.check(check_computation(c1).rooted && check_computation(c2).rooted && check_computation(c4).rooted,
                "C1, C2, C4 are rooted");
        c.check(!check_computation(c3).rooted && !check_computation(c5).rooted, "C3, C5 are not rooted");
        c.check(!check_computation(c1).stable && !check_computation(c2).stable, "C1, C2 are unstable");
        c.check(check_computation(c3).stable && check_computation(c4).stable && check_computation(c5).stable,
                "C3, C4, C5 are stable");

        StatusReport s1 = computation_status(rules({r1, r4, r5}), c1, true);
        c.check(s1.complete && s1.failed_at == 0u, "C1 is complete for P without r2, r3 and has failed at 0");
        StatusReport s2 = computation_status(p, c2, true);
        StatusReport s3 = computation_status(p, c3, true);
        c.check(s2.status == ComputationStatus::Succeeded && !s2.failed_at, "C2 has succeeded");
        c.check(s3.status == ComputationStatus::Succeeded && !s3.failed_at, "C3 has succeeded");
        StatusReport s4 = computation_status(p, c4, true);
        c.check(s4.status != ComputationStatus::Succeeded && s4.failed_at == 1u, "C4 has failed at 1");
        StatusReport s5 = computation_status(p, c5, true);
        c.check(s5.status == ComputationStatus::Stuck && s5.failed_at == 0u, "C5 is stuck and has failed at 0");

        ComputationCheck c6 = check_computation(std::vector<State>{st(rules({r5}), "", "c")});
        c.check(!c6.is_computation && c6.reason.find("not a state") != std::string::npos,
                "C6 is rejected: not a state");
        ComputationCheck c7 = check_computation(std::vector<State>{s0, b});
        c.check(!c7.is_computation && c7.reason.find("exactly one rule") != std::string::npos,
                "C7 is rejected: the successor adds two rules");
    });
    return c.report();
}

bool unstable_computations() {
    Criterion c("unstable-computations: loop through a c-atom and the tight monotone program");
    c.run("loop through a c-atom", [&] {
        GroundProgram p = rules({"a :- b.", "b :- <{a}, {{}, {a}}>."});
        std::vector<std::vector<State>> all = o_succeeding_computations(p);
        std::vector<State> listed{empty_state(), st(rules({"b :- <{a}, {{}, {a}}>."}), "a, b", "", {"a"}),
                                  st(p, "a, b", "")};
        c.check(all.size() == 1 && all[0] == listed, "exactly the listed computation succeeds");
        c.check(enumerate_answer_sets(p) == std::vector<AtomSet>{atoms_of("a, b")}, "answer sets are {{a, b}}");
    });
    c.run("tight monotone program", [&] {
        const char* q1 = "a | <{a, b}, {{a}, {a, b}}>.";
        const char* q2 = "b | <{a, b}, {{b}, {a, b}}>.";
        GroundProgram p = rules({q1, q2});
        std::vector<std::vector<State>> all = o_succeeding_computations(p);
        std::vector<State> first{empty_state(), st(rules({q1}), "a, b", "", {"b"}), st(p, "a, b", "")};
        std::vector<State> second{empty_state(), st(rules({q2}), "a, b", "", {"a"}), st(p, "a, b", "")};
        bool listed = all.size() == 2 && ((all[0] == first && all[1] == second) || (all[0] == second && all[1] == first));
        c.check(listed, "exactly the two listed computations succeed");
        for (const std::vector<State>& comp : all) {
            c.check(!check_computation(comp).stable, "neither succeeding computation is stable");
            c.check(computation_status(p, comp, false).status == ComputationStatus::Succeeded,
                    "the engine reports both as succeeded");
        }
        c.check(is_absolutely_tight(p) && monotone(p), "the program is tight and monotone");
        c.check(!stable_guarantee(p).stable_guarantee, "stable_guarantee is false");
    });
    return c.report();
}

bool maze_walkthrough_replay() {
    Criterion c("maze-walkthrough: scripted replay, answer set, no-answer-set jump and stuck buggy constraint");
    c.run("replay", [&] {
        Session s(program_text({"maze_instance.lp", "maze_guess.lp"}));
        json script = json::array({
            {{"op", "step"}, {"rule", "entrance(1,2)."}},
            {{"op", "step"}, {"rule", "col(5)."}},
            {{"op", "step"}, {"rule", "maxCol(5) :- col(5), not col(6)."}, {"false", {"col(6)"}}},
            {{"op", "jump"}, {"sources", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}}},
            {{"op", "step"}, {"rule", {{"source", 14}}}, {"true", {"wall(3,2)"}}, {"rest", "false"}},
            {{"op", "jump"}, {"sources", {13, 15}}},
        });
        std::vector<json> payloads;
        for (const json& action : script) {
            payloads.push_back(s.apply_action(action));
        }
        auto pos = [&](std::size_t i) { return atoms_from_json(payloads[i - 1].at("pos")); };
        auto considered = [&](std::size_t i) {
            std::vector<CRule> out;
            for (const json& id : payloads[i - 1].at("rules")) {
                out.push_back(s.program()[id.get<std::size_t>()]);
            }
            return GroundProgram(std::move(out));
        };
        c.check(considered(1) == rules({"entrance(1,2)."}) && pos(1) == atoms_of("entrance(1,2)"), "S1");
        c.check(considered(2) == rules({"entrance(1,2).", "col(5)."}) && pos(2) == atoms_of("entrance(1,2), col(5)"),
                "S2");
        c.check(considered(3) == rules({"entrance(1,2).", "col(5).", "maxCol(5) :- col(5), not col(6)."}) &&
                    pos(3) == atoms_of("entrance(1,2), col(5), maxCol(5)") &&
                    atoms_from_json(payloads[2].at("neg")) == atoms_of("col(6)"),
                "S3");
        c.check(considered(4) == maze_s4_rules() && pos(4) == maze_s4_interpretation(), "S4");
        c.check(pos(5) == (pos(4) | atoms_of("wall(3,2)")), "S5 adds wall(3,2)");
        c.check(atoms_from_json(payloads[4].at("neg")) ==
                    (atoms_from_json(payloads[3].at("neg")) |
                     atoms_of("wall(2,2), wall(4,2), wall(2,3), wall(4,3), wall(2,4), wall(3,4), wall(4,4)")),
                "S5 makes the other inner walls false");

        // S6: walls on the border except entrance and exit, empty wherever no wall
        AtomSet expected = pos(5);
        GroundProgram added = considered(6) - considered(5);
        for (int x = 1; x <= 5; ++x) {
            for (int y = 1; y <= 5; ++y) {
                std::string cell = std::to_string(x) + "," + std::to_string(y);
                bool border = x == 1 || y == 1 || x == 5 || y == 5;
                bool wall = (border && cell != "1,2" && cell != "5,4") || cell == "3,3" || cell == "3,2";
                expected = expected | atoms_of((wall ? "wall(" : "empty(") + cell + ")");
            }
        }
        c.check(added.size() == 23, "S6 adds 23 rules");
        c.check(pos(6) == expected, "S6 interpretation");
        c.check(payloads[5].at("status") == "succeeded", "the computation has succeeded");
        c.check(is_answer_set(s.program(), pos(6)).is_answer_set() && o_model(s.program(), pos(6)),
                "the final interpretation is an answer set");
    });
    c.run("no-answer-set jump", [&] {
        MazeWalk w = maze_walkthrough({"maze_reach_buggy.lp"});
        try {
            apply_jump(w.states[6], instances(w.grounding, {16, 17, 18, 19, 20, 21, 22, 23}));
            c.check(false, "jumping through the buggy rules finds no answer set");
        } catch (const Error& e) {
            c.check(e.code() == ErrorCode::NoAnswerSet, "jumping through the buggy rules raises no-answer-set");
        }
    });
    c.run("stuck buggy constraint", [&] {
        MazeWalk w = maze_walkthrough({"maze_reach_buggy.lp"});
        const GroundProgram& p = w.grounding.program;
        std::vector<State> path = w.states;
        path.push_back(apply_jump(w.states[6], instances(w.grounding, {16, 17, 18, 19, 20, 21})).state);
        c.check(computation_status(p, path, false).status == ComputationStatus::Stuck, "the computation is stuck");
        std::vector<std::size_t> active = active_unconsidered(p, path.back());
        c.check(active.size() == 1 && p[active[0]].str() == ":- empty(1,2), empty(2,2), empty(1,2), empty(2,3).",
                "the only active instance is the buggy constraint");
    });
    return c.report();
}

bool property_suites() {
    Criterion c("property-suites: (a)-(h), 500 fixed-seed programs each");
    std::vector<std::function<PropertyReport()>> suites{
        [] { return incremental_unfounded_sets(101, property_programs); },
        [] { return soundness(102, property_programs); },
        [] { return completeness(103, property_programs); },
        [] { return jump_then_expand(104, property_programs); },
        [] { return order_independence(105, property_programs); },
        [] { return graph_acyclicity(106, property_programs); },
        [] { return certificate_order_stable(107, property_programs); },
        [] { return gelfond_lifschitz_agreement(108, property_programs); },
    };
    for (const auto& suite : suites) {
        c.run("property", [&] {
            PropertyReport r = suite();
            std::cerr << "  " << r.summary() << '\n';
            c.check(r.programs >= property_programs && r.cases > 0, r.name + " ran too few cases");
            for (const std::string& f : r.failures) {
                c.check(false, r.name + ": " + f);
            }
        });
    }
    return c.report();
}

} // namespace

int main() {
    bool ok = example_regression();
    ok = unstable_computations() && ok;
    ok = maze_walkthrough_replay() && ok;
    ok = property_suites() && ok;
    return ok ? 0 : 1;
}
