#pragma once

#include <acpstep/core/atom.hpp>
#include <acpstep/frontend/ast.hpp>

#include <string>
#include <string_view>

namespace acpstep {

// Parses a non-ground program. Statement ids are numbered from first_id in
// source order. Throws Error(Syntax) with the offending position.
ProgramAst parse_program(std::string_view text, const std::string& file = {}, std::size_t first_id = 1);

// "p(1,a)" -> ground atom.
Atom parse_ground_atom(std::string_view text);

// "a, b(1)" or "{a, b(1)}" -> set of ground atoms.
AtomSet parse_atom_list(std::string_view text);

} // namespace acpstep
