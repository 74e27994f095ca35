#pragma once

// Generators and definition-level oracles shared by the test suites. The
// oracles only use the c-atom descriptions (domain, stored satisfiers, weight
// entries, bounds) and never call into the engine's semantics or stepping.

#include <acpstep/core/rule.hpp>
#include <acpstep/frontend/grounder.hpp>
#include <acpstep/stepping/state.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace acpstep::testing {

GroundProgram program_of(const std::string& text);
CRule rule_of(const std::string& text);
AtomSet atoms_of(const std::string& text);
Atom atom_of(const std::string& text);

// Files under programs/, concatenated in order.
std::string program_text(const std::vector<std::string>& names);
GroundProgram program_file(const std::vector<std::string>& names);

// The maze session S0..S6 (three steps, a jump through the instance facts,
// maxCol/maxRow and the border rules, the wall choice, a jump through the
// wall and empty rules), on maze_instance.lp + maze_guess.lp + extra files.
struct MazeWalk {
    GroundingResult grounding;
    std::vector<State> states;
};

MazeWalk maze_walkthrough(const std::vector<std::string>& extra = {});
GroundProgram instances(const GroundingResult& g, std::initializer_list<std::size_t> sources);

// S4 of the walkthrough as listed: 35 rules and the jump's interpretation.
GroundProgram maze_s4_rules();
AtomSet maze_s4_interpretation();

// --- generators -----------------------------------------------------------

struct GenOptions {
    std::size_t max_atoms = 10;
    std::size_t max_rules = 8;
    std::size_t max_head = 2;
    std::size_t max_body = 2;
    bool elementary_only = false;
    bool normal_only = false;       // exactly one head c-atom per non-constraint rule
    bool constraints = true;
    bool negation = true;
    bool convex_only = false;       // no explicit families, no complements
    double bodyless = 0.0;          // chance that a rule gets no body at all
};

class ProgramGenerator {
public:
    explicit ProgramGenerator(std::uint64_t seed) : rng_(seed) {}

    GroundProgram program(const GenOptions& opts = {});
    CAtom catom(const std::vector<Atom>& pool, const GenOptions& opts);
    AtomSet subset(const AtomSet& of);
    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// --- oracles ---------------------------------------------------------------

std::vector<AtomSet> subsets(const AtomSet& of);

bool o_sat(const CAtom& a, const AtomSet& i);
bool o_literal(const CAtom& a, bool negated, const AtomSet& i);
bool o_body(const CRule& r, const AtomSet& i);
bool o_head(const CRule& r, const AtomSet& i);
bool o_model(const GroundProgram& p, const AtomSet& i);
GroundProgram o_reduct(const GroundProgram& p, const AtomSet& i);
std::vector<AtomSet> o_satisfiers(const CAtom& a);

bool o_condition_o(const GroundProgram& p, const AtomSet& i, const AtomSet& smaller);
bool o_answer_set(const GroundProgram& p, const AtomSet& i);
std::vector<AtomSet> o_answer_sets(const GroundProgram& p);

bool o_external_support(const CRule& r, const AtomSet& x, const AtomSet& i);
std::vector<AtomSet> o_unfounded_sets(const GroundProgram& p, const AtomSet& i);

// Gelfond-Lifschitz answer sets of an elementary normal program.
std::vector<AtomSet> o_gl_answer_sets(const GroundProgram& p);

bool o_is_state(const State& s);
// Every successor of s that adds r.
std::vector<State> o_successors(const State& s, const CRule& r);
bool o_is_successor(const State& s, const State& next);
bool o_complete(const GroundProgram& p, const State& last);
bool o_stuck(const GroundProgram& p, const State& last);
bool o_failed_at(const GroundProgram& p, const State& s);

// All rooted computations for p that have succeeded.
std::vector<std::vector<State>> o_succeeding_computations(const GroundProgram& p);

// Positive atom occurrences and the dependency graph cycle test.
AtomSet o_pos_occ(const CAtom& a, bool negated);
bool o_atom_graph_cyclic(const GroundProgram& p);

} // namespace acpstep::testing
