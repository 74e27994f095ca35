#pragma once

#include <acpstep/error.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace acpstep {

struct TermAst {
    enum class Kind { Number, Symbol, Variable, Anonymous, Unary, Binary, Range, Pool };

    Kind kind = Kind::Number;
    std::int64_t number = 0;
    std::string name;
    char op = 0;
    std::vector<TermAst> children;

    bool is_plain_variable() const { return kind == Kind::Variable; }
    void collect_variables(std::set<std::string>& out) const;
    std::string str() const;
};

struct AtomAst {
    std::string predicate;
    std::vector<TermAst> args;
    SourceSpan span;

    void collect_variables(std::set<std::string>& out) const;
    std::string str() const;
};

enum class Comparison { Eq, Ne, Lt, Le, Gt, Ge };

struct ExplicitAst {
    std::vector<AtomAst> domain;
    std::vector<std::vector<AtomAst>> satisfiers;
};

struct LiteralAst;

struct AggregateElementAst {
    AtomAst atom;
    bool negated = false;
    std::optional<TermAst> weight;
    std::vector<LiteralAst> conditions;
};

struct AggregateAst {
    bool weighted = false;
    std::optional<TermAst> lower;
    std::optional<TermAst> upper;
    std::vector<AggregateElementAst> elements;
};

struct LiteralAst {
    enum class Kind { Atom, Compare, Aggregate, Explicit };

    Kind kind = Kind::Atom;
    bool negated = false;
    AtomAst atom;
    Comparison op = Comparison::Eq;
    TermAst lhs;
    TermAst rhs;
    AggregateAst aggregate;
    ExplicitAst explicit_atom;
    SourceSpan span;

    void collect_variables(std::set<std::string>& out) const;
};

struct ChoiceElementAst {
    AtomAst atom;
    std::vector<LiteralAst> conditions;
};

struct HeadAst {
    enum class Kind { Constraint, Disjunction, Choice };

    Kind kind = Kind::Constraint;
    // Atom, Explicit or weighted Aggregate literals, never negated.
    std::vector<LiteralAst> disjuncts;
    std::optional<TermAst> lower;
    std::optional<TermAst> upper;
    std::vector<ChoiceElementAst> elements;
};

struct RuleAst {
    std::size_t id = 0;
    HeadAst head;
    std::vector<LiteralAst> body;
    SourceSpan span;
    std::string text;
};

struct ProgramAst {
    std::vector<RuleAst> rules;
};

} // namespace acpstep
