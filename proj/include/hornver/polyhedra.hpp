#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hornver/linear.hpp"

namespace hornver {

/// Satisfiability over the rationals of a raw atom list, by Fourier-Motzkin
/// elimination. LinConstraint::make calls this, so a constructed constraint
/// is satisfiable unless is_false().
bool atoms_satisfiable(const std::vector<LinAtom>& atoms);

bool entails(const LinConstraint& premise, const LinAtom& conclusion);
bool entails(const LinConstraint& premise, const LinConstraint& conclusion);
bool equivalent(const LinConstraint& a, const LinConstraint& b);

/// Existentially eliminates every variable outside `keep`. The result is the
/// exact rational projection, with redundant atoms pruned.
LinConstraint project(const LinConstraint& c,
                      const std::set<std::string>& keep);

/// Closed convex hull of the union. FALSE is the identity element.
LinConstraint convex_hull(const LinConstraint& a, const LinConstraint& b);

/// Standard polyhedral widening: keeps the atoms of `older` (equalities split
/// into inequality halves) that `newer` still entails. Intended for
/// older [= newer; widen(FALSE, c) is c.
LinConstraint widen(const LinConstraint& older, const LinConstraint& newer);

/// Removes atoms entailed by the remaining ones. The result is irredundant.
LinConstraint simplify(const LinConstraint& c);

/// Craig interpolant for an unsatisfiable conjunction a /\ b: a constraint I
/// with a |= I, I /\ b unsatisfiable, and vars(I) included in
/// vars(a) /\ vars(b). Built from a Farkas infeasibility certificate, so I is
/// a single half-space (or TRUE/FALSE). Returns nullopt when a /\ b is
/// satisfiable.
std::optional<LinConstraint> binary_interpolant(const LinConstraint& a,
                                                const LinConstraint& b);

/// Interpolant sequence I_0..I_n for an unsatisfiable conjunction of n
/// formulas: I_0 = TRUE, I_n = FALSE, I_k /\ formulas[k] |= I_{k+1}, and
/// vars(I_k) within vars of the prefix and of the suffix. All partial sums of
/// one infeasibility certificate, so the chain condition holds by
/// construction. Returns nullopt when the conjunction is satisfiable.
std::optional<std::vector<LinConstraint>> sequence_interpolants(
    const std::vector<LinConstraint>& formulas);

/// A rational point satisfying c, assigning exactly vars(c). Midpoint choice
/// during back-substitution keeps the result deterministic. Returns nullopt
/// only for FALSE.
std::optional<std::map<std::string, Rat>> sample_model(const LinConstraint& c);

}  // namespace hornver
