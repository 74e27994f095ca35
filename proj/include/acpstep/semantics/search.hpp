#pragma once

#include <acpstep/caps.hpp>
#include <acpstep/core/rule.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace acpstep {

struct SearchOptions {
    Caps caps;
    AtomSet assume_true;
    AtomSet assume_false;
    // Atoms decided first, in this order; the rest follow in canonical order.
    std::vector<Atom> branch_first;
};

enum class SearchStatus {
    Complete,    // every answer set was reported
    Stopped,     // the visitor asked to stop
    Exhausted,   // caps.search_nodes reached
};

// Backtracking search for answer sets with three-valued propagation through
// the c-atoms and an unfounded-set test on partial assignments. Every reported
// interpretation is checked against the definition before it is reported.
class AnswerSetSearch {
public:
    AnswerSetSearch(const GroundProgram& program, SearchOptions options = {});
    ~AnswerSetSearch();
    AnswerSetSearch(const AnswerSetSearch&) = delete;
    AnswerSetSearch& operator=(const AnswerSetSearch&) = delete;

    // Reports answer sets in search order until the visitor returns false.
    SearchStatus enumerate(const std::function<bool(const AtomSet&)>& visitor);

    std::size_t decisions() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// An answer set I of base ∪ extension with required_true ⊆ I and
// required_false ∩ I = ∅, or nullopt when none exists. Throws
// SearchExhausted when the search cap is reached first.
std::optional<AtomSet> solve_extension(const GroundProgram& base, const GroundProgram& extension,
                                       const AtomSet& required_true, const AtomSet& required_false,
                                       const Caps& caps = {});

// Up to max_models answer sets (0 = all) in search order.
std::vector<AtomSet> solve(const GroundProgram& program, std::size_t max_models, const Caps& caps = {},
                           SearchStatus* status = nullptr);

} // namespace acpstep
