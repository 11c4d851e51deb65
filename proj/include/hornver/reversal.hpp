#pragma once

#include "hornver/specializer.hpp"

namespace hornver {

/// Transposes a program of linear clauses so derivations run from the error
/// states back to the initial ones. Queries become facts and facts become
/// queries: `unsafe :- c, r(t)` turns into `r_rev(t) :- c`, a fact
/// `r(t) :- c` turns into `unsafe :- c, r_rev(t)`, and a transition
/// `r1(t1) :- c, r2(t2)` into `r2_rev(t2) :- c, r1_rev(t1)`. Predicate names
/// gain the `_rev` suffix, or lose it when already present, so reversing
/// twice restores the program up to variable names. Clause order and weights
/// are unchanged; a derivation uses the same clauses in either direction.
/// The definition list is dropped: contexts describe the forward predicates
/// and do not transfer. Throws ShapeError on clauses with several body
/// atoms.
SpecResult reverse_program(const SpecResult& in);
SpecResult reverse_program(const ChcProgram& p);

}  // namespace hornver
