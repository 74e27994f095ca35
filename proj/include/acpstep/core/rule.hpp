#pragma once

#include <acpstep/core/catom.hpp>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace acpstep {

struct CLiteral {
    CAtom atom;
    bool negated = false;

    bool satisfied_by(const AtomSet& interpretation) const;
    std::string str() const;
};

// Ground c-rule  A1 | ... | Ak :- B1, ..., Bm, not C1, ..., not Cn.
// Bodies are kept as lists in the order given, so the rendered text is an
// injective identity for the rule.
class CRule {
public:
    CRule(std::vector<CAtom> head, std::vector<CAtom> positive_body = {},
          std::vector<CAtom> negative_body = {});

    std::span<const CAtom> head() const;
    std::span<const CAtom> positive_body() const;
    std::span<const CAtom> negative_body() const;
    std::vector<CLiteral> body() const;

    // Union of the domains of all c-atoms of the rule.
    const AtomSet& domain() const;

    bool is_normal() const { return head().size() == 1; }
    bool is_constraint() const { return head().empty(); }
    bool is_fact() const { return positive_body().empty() && negative_body().empty(); }
    bool is_positive() const { return negative_body().empty(); }

    bool body_satisfied(const AtomSet& interpretation) const;
    bool head_satisfied(const AtomSet& interpretation) const;

    const std::string& str() const;
    std::size_t hash() const;

    friend bool operator==(const CRule& a, const CRule& b);
    friend std::strong_ordering operator<=>(const CRule& a, const CRule& b);

private:
    struct Data;
    std::shared_ptr<const Data> d_;
};

struct CRuleHash {
    std::size_t operator()(const CRule& r) const noexcept { return r.hash(); }
};

// A set of ground rules in canonical (text) order.
class GroundProgram {
public:
    GroundProgram() = default;
    explicit GroundProgram(std::vector<CRule> rules);

    std::span<const CRule> rules() const { return rules_; }
    std::size_t size() const { return rules_.size(); }
    bool empty() const { return rules_.empty(); }
    const CRule& operator[](std::size_t i) const { return rules_[i]; }
    auto begin() const { return rules_.begin(); }
    auto end() const { return rules_.end(); }

    const AtomSet& domain() const { return domain_; }
    std::optional<std::size_t> index_of(const CRule& r) const;
    std::optional<std::size_t> index_of(const std::string& text) const;
    bool contains(const CRule& r) const { return index_of(r).has_value(); }
    bool subset_of(const GroundProgram& other) const;

    friend GroundProgram operator|(const GroundProgram& a, const GroundProgram& b);
    friend GroundProgram operator-(const GroundProgram& a, const GroundProgram& b);
    friend bool operator==(const GroundProgram& a, const GroundProgram& b) { return a.rules_ == b.rules_; }

    // One rule per line.
    std::string str() const;

private:
    std::vector<CRule> rules_;
    AtomSet domain_;
    std::unordered_map<std::string, std::size_t> index_;
};

bool eval_literal(const CLiteral& l, const AtomSet& interpretation);
bool rule_active(const CRule& r, const AtomSet& interpretation);
bool rule_satisfied(const CRule& r, const AtomSet& interpretation);
bool program_satisfied(const GroundProgram& p, const AtomSet& interpretation);

} // namespace acpstep
