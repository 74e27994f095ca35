#include "../support/support.hpp"

#include <acpstep/frontend/grounder.hpp>
#include <acpstep/frontend/parser.hpp>
#include <acpstep/stepping/state.hpp>

#include <gtest/gtest.h>

#include <regex>

using namespace acpstep;
using namespace acpstep::testing;

namespace {

std::string program_file(const std::string& name) { return program_text({name}); }

std::vector<std::string> texts(const GroundingResult& g, const std::vector<std::size_t>& ids) {
    std::vector<std::string> out;
    for (std::size_t i : ids) {
        out.push_back(g.program[i].str());
    }
    return out;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::Schema;
}

} // namespace

TEST(Parse, StatementCounts) {
    EXPECT_EQ(parse_program("col(1..5). row(1..5).").rules.size(), 2u);
    EXPECT_TRUE(parse_program("").rules.empty());
    EXPECT_TRUE(parse_program("% only a comment\n").rules.empty());
    ProgramAst intro = parse_program("a :- not b.\nb :- not a.\na :- b.\n");
    ASSERT_EQ(intro.rules.size(), 3u);
    EXPECT_EQ(intro.rules[0].id, 1u);
    EXPECT_EQ(intro.rules[2].id, 3u);
}

TEST(Parse, IdsContinueFromFirstId) {
    ProgramAst p = parse_program("a. b.", "x.lp", 7);
    EXPECT_EQ(p.rules[0].id, 7u);
    EXPECT_EQ(p.rules[1].id, 8u);
}

TEST(Parse, SpansCoverWholeRules) {
    ProgramAst p = parse_program("a.\n  maxCol(X) :- col(X),\n    not col(X+1).\n", "m.lp");
    ASSERT_EQ(p.rules.size(), 2u);
    const SourceSpan& s = p.rules[1].span;
    EXPECT_EQ(s.file, "m.lp");
    EXPECT_EQ(s.begin.line, 2u);
    EXPECT_EQ(s.begin.column, 3u);
    EXPECT_EQ(s.end.line, 3u);
    EXPECT_GE(s.end.column, 17u);
}

TEST(Parse, SyntaxErrorHasPosition) {
    try {
        parse_program("a.\nb :- c d.\n", "bad.lp");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Syntax);
        ASSERT_TRUE(e.span());
        EXPECT_EQ(e.span()->begin.line, 2u);
        EXPECT_NE(std::string(e.what()).find("bad.lp:2:"), std::string::npos);
    }
}

TEST(Parse, UnsafeRuleNamesVariable) {
    try {
        ground_text("p(X) :- not q(X).", {}, "u.lp");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Unsafe);
        EXPECT_NE(std::string(e.what()).find("X"), std::string::npos);
        ASSERT_TRUE(e.span());
        EXPECT_EQ(e.span()->begin.line, 1u);
    }
    EXPECT_EQ(code_of([] { ground_text("p(Y) :- q(X), Y = X + Z."); }), ErrorCode::Unsafe);
}

TEST(Parse, GroundAtomsAndLists) {
    EXPECT_EQ(parse_ground_atom("wall(3,2)").str(), "wall(3,2)");
    EXPECT_EQ(parse_atom_list("a, b(1)"), atoms_of("b(1), a"));
    EXPECT_EQ(parse_atom_list("{a, b(1)}").size(), 2u);
    EXPECT_TRUE(parse_atom_list("").empty());
    EXPECT_THROW(parse_ground_atom("p(X)"), Error);
}

TEST(Ground, RangeFacts) {
    GroundingResult g = ground_text("col(1..5).");
    ASSERT_EQ(g.program.size(), 5u);
    for (int i = 1; i <= 5; ++i) {
        EXPECT_TRUE(g.program.index_of("col(" + std::to_string(i) + ").").has_value());
    }
    EXPECT_TRUE(ground_text("q(5..3).").program.empty());
    EXPECT_EQ(ground_text("q(4..4).").program.size(), 1u);
}

TEST(Ground, MaxColInstancesKeepUnderivableNegation) {
    GroundingResult g = ground_text("col(1..5).\nmaxCol(X) :- col(X), not col(X+1).\n");
    std::vector<std::size_t> ids = g.instances_of(2);
    ASSERT_EQ(ids.size(), 5u);
    std::vector<std::string> got = texts(g, ids);
    EXPECT_NE(std::find(got.begin(), got.end(), "maxCol(5) :- col(5), not col(6)."), got.end());
    EXPECT_NE(std::find(got.begin(), got.end(), "maxCol(1) :- col(1), not col(2)."), got.end());
}

TEST(Ground, GroundRuleIsItselfWithIdentitySubstitution) {
    GroundingResult g = ground_text("a :- not b.");
    ASSERT_EQ(g.program.size(), 1u);
    EXPECT_EQ(g.program[0].str(), "a :- not b.");
    ASSERT_EQ(g.provenance[0].size(), 1u);
    EXPECT_EQ(g.provenance[0][0].source, 1u);
    EXPECT_TRUE(g.provenance[0][0].substitution.empty());
}

TEST(Ground, InstancesOfFactAndPrunedRule) {
    GroundingResult g = ground_text("n(1..3).\nf.\np(X) :- n(X), X > 7.\n");
    EXPECT_EQ(texts(g, g.instances_of(2)), std::vector<std::string>{"f."});
    EXPECT_TRUE(g.instances_of(3).empty());
    EXPECT_EQ(code_of([&] { g.instances_of(9); }), ErrorCode::UnknownId);
}

TEST(Ground, DuplicatesMergeProvenance) {
    GroundingResult g = ground_text("n(1..2).\na :- n(X).\n");
    ASSERT_TRUE(g.program.index_of(std::string("a :- n(1).")));
    EXPECT_EQ(g.program.size(), 4u);
    GroundingResult h = ground_text("a.\na.\n");
    ASSERT_EQ(h.program.size(), 1u);
    EXPECT_EQ(h.provenance[0].size(), 2u);
}

TEST(Ground, ArithmeticComparisonAndPooling) {
    GroundingResult g = ground_text("n(1..4).\ns(X, Y) :- n(X), Y = X * 2 - 1, Y < 6.\np(1;b).\n");
    EXPECT_TRUE(g.program.index_of(std::string("s(3,5) :- n(3).")).has_value());
    EXPECT_EQ(g.instances_of(2).size(), 3u);
    EXPECT_EQ(texts(g, g.instances_of(3)), (std::vector<std::string>{"p(1).", "p(b)."}));
}

TEST(Ground, ChoiceAndAggregateBecomeCatoms) {
    GroundingResult g = ground_text("n(1..3).\n1 { s(X) : n(X) } 2.\nok :- 2 #count { s(X) : n(X) }.\n"
                                    "heavy :- 3 [ s(X) = X : n(X) ].\n");
    std::vector<std::size_t> choice = g.instances_of(2);
    ASSERT_EQ(choice.size(), 1u);
    const CRule& r = g.program[choice[0]];
    ASSERT_EQ(r.head().size(), 1u);
    EXPECT_EQ(r.head()[0].kind(), CAtom::Kind::Choice);
    EXPECT_EQ(r.head()[0].domain(), atoms_of("s(1), s(2), s(3)"));
    EXPECT_EQ(*r.head()[0].lower_count(), 1u);
    ASSERT_EQ(g.instances_of(3).size(), 1u);
    const CRule& c = g.program[g.instances_of(3)[0]];
    ASSERT_EQ(c.body().size(), 1u);
    EXPECT_TRUE(eval_catom(c.body()[0].atom, atoms_of("s(1), s(3)")));
    EXPECT_FALSE(eval_catom(c.body()[0].atom, atoms_of("s(1)")));
    const CRule& w = g.program[g.instances_of(4)[0]];
    EXPECT_TRUE(eval_catom(w.body()[0].atom, atoms_of("s(3)")));
    EXPECT_TRUE(eval_catom(w.body()[0].atom, atoms_of("s(1), s(2)")));
    EXPECT_FALSE(eval_catom(w.body()[0].atom, atoms_of("s(2)")));
}

TEST(Ground, ExplicitCatomSyntax) {
    GroundingResult g = ground_text("a :- <{a, b}, {{}, {a, b}}>.");
    ASSERT_EQ(g.program.size(), 1u);
    EXPECT_EQ(g.program[0].str(), "a :- <{a, b}, {{}, {a, b}}>.");
}

TEST(Ground, CapRaisesCapExceeded) {
    Caps caps;
    caps.grounding = 50;
    EXPECT_EQ(code_of([&] { ground_text("n(1..10).\np(X, Y) :- n(X), n(Y).", caps); }), ErrorCode::CapExceeded);
}

TEST(Ground, AnnotatedOutputCarriesProvenance) {
    GroundingResult g = ground_text("col(1..2).\nmaxCol(X) :- col(X), not col(X+1).\n");
    std::string out = g.annotated();
    EXPECT_NE(out.find("maxCol(2) :- col(2), not col(3). % r2 {X→2}"), std::string::npos) << out;
}

TEST(Ground, MazeGuessChoiceOverNineWalls) {
    GroundingResult g = ground_text(program_file("maze_instance.lp") + program_file("maze_guess.lp"));
    std::vector<std::size_t> choice = g.instances_of(14);
    ASSERT_EQ(choice.size(), 1u);
    const CRule& r = g.program[choice[0]];
    EXPECT_EQ(r.head()[0].kind(), CAtom::Kind::Choice);
    EXPECT_EQ(r.head()[0].domain().size(), 9u);
    EXPECT_TRUE(r.head()[0].domain().contains(atom_of("wall(2,2)")));
    EXPECT_TRUE(r.head()[0].domain().contains(atom_of("wall(3,2)")));
    EXPECT_FALSE(r.head()[0].domain().contains(atom_of("wall(1,1)")));
}

TEST(Ground, MazeFactsAndMaxCol) {
    GroundingResult g = ground_text(program_file("maze_instance.lp") + program_file("maze_guess.lp"));
    EXPECT_EQ(g.instances_of(1).size(), 5u);
    EXPECT_TRUE(g.program.index_of(std::string("maxCol(5) :- col(5), not col(6).")).has_value());
    EXPECT_TRUE(g.program.index_of(std::string("entrance(1,2).")).has_value());
}

// Substituting the recorded bindings into the source rule and grounding the
// program again with that rule in place reproduces the instance.
TEST(GroundProperties, ProvenanceRoundTrip) {
    std::vector<std::string> programs{program_file("maze_instance.lp") + program_file("maze_guess.lp"),
                                      program_file("maze_instance.lp") + program_file("maze_guess.lp") +
                                          program_file("maze_reach.lp"),
                                      program_file("coloring.lp"), program_file("nested_catoms.lp")};
    for (const std::string& text : programs) {
        GroundingResult g = ground_text(text);
        std::size_t checked = 0;
        for (std::size_t i = 0; i < g.program.size(); i += 7) {
            ASSERT_FALSE(g.provenance[i].empty());
            const Provenance& p = g.provenance[i].front();
            const RuleAst* src = g.source_rule(p.source);
            ASSERT_NE(src, nullptr);
            std::string rule = src->text;
            for (const auto& [var, value] : p.substitution) {
                rule = std::regex_replace(rule, std::regex("\\b" + var + "\\b"), value.str());
            }
            std::string rest;
            for (const RuleAst& other : g.source.rules) {
                rest += (other.id == p.source ? rule : other.text) + "\n";
            }
            GroundingResult again = ground_text(rest);
            EXPECT_TRUE(again.program.index_of(g.program[i]).has_value()) << rule << " vs " << g.program[i].str();
            ++checked;
        }
        EXPECT_GT(checked, 0u);
    }
}

TEST(GroundProperties, GroundProgramsAreFixedPoints) {
    ProgramGenerator gen(21);
    GenOptions opts;
    opts.elementary_only = true;
    for (int n = 0; n < 100; ++n) {
        GroundProgram p = gen.program(opts);
        std::string text;
        for (const CRule& r : p) {
            text += r.str() + "\n";
        }
        GroundingResult g = ground_text(text);
        EXPECT_EQ(g.program, p) << text;
    }
}

TEST(GroundProperties, RangeSizes) {
    for (int i = -3; i <= 4; ++i) {
        for (int j = -3; j <= 4; ++j) {
            GroundingResult g = ground_text("r(" + std::to_string(i) + ".." + std::to_string(j) + ").");
            EXPECT_EQ(g.program.size(), i <= j ? std::size_t(j - i + 1) : 0u);
        }
    }
}

TEST(GroundProperties, EveryAtomIsGround) {
    GroundingResult g = ground_text(program_file("maze_instance.lp") + program_file("maze_guess.lp") +
                                    program_file("maze_reach.lp") + program_file("maze_constraints.lp"));
    for (const CRule& r : g.program) {
        EXPECT_EQ(r.str().find_first_of("XYZ_"), std::string::npos) << r.str();
    }
}
