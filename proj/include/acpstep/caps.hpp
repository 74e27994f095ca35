#pragma once

#include <cstddef>

namespace acpstep {

// Resource bounds for the exhaustive parts of the engine.
// Exceeding one of them raises ErrorCode::CapExceeded (or SearchExhausted
// for the answer-set search) instead of running unbounded.
struct Caps {
    std::size_t enumeration = 16;   // |dom(A)| for enumerating satisfiers of a c-atom
    std::size_t atoms = 24;         // |dom(P)| for brute-force answer-set enumeration
    std::size_t subset = 20;        // |I| for searches over subsets of an interpretation
    std::size_t unfounded = 4096;   // candidate unfounded sets considered per step
    std::size_t grounding = 1000000;
    std::size_t search_nodes = 2000000;

    // Defaults overridden by ACPSTEP_ATOM_CAP and ACPSTEP_UNFOUNDED_CAP.
    static Caps from_environment();
};

} // namespace acpstep
