#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hornver/specializer.hpp"

// Machinery shared by the interpreter-removal and constraint-propagation
// passes: the unfolding engine that drives a clause body to its residual
// atoms, and the common post-processing (projection, inlining, renaming).

namespace hornver::spec {

struct WClause {
    Clause clause;
    long weight;
};

/// One leaf of an unfolding tree: the accumulated constraint, the atoms that
/// were not unfolded, and the total weight of the clauses applied on the way.
struct Residue {
    LinConstraint constraint;
    std::vector<Atom> atoms;
    long weight;
};

/// Drives `body` under `constraint`, repeatedly resolving the leftmost atom
/// whose predicate satisfies `unfoldable` against the clauses of `defs`
/// (weights[i] is the weight of clause i). Branches in clause order;
/// unsatisfiable branches are dropped. Throws std::runtime_error when the
/// tree exceeds a large internal step cap.
std::vector<Residue> unfold_closure(
    const LinConstraint& constraint, const std::vector<Atom>& body,
    const ChcProgram& defs, const std::vector<long>& weights,
    const std::function<bool(const std::string&)>& unfoldable,
    FreshVars& fresh);

/// "A", "B", ..., "Z", then "A26" on: fallback display names for argument
/// positions.
std::string slot_letter(size_t j);

struct FinishOptions {
    bool inline_nonrecursive = false;
    bool compress_chains = false;
};

/// Shared tail of both passes: projects every clause constraint onto its
/// visible variables, optionally inlines non-recursive predicates and
/// single-clause call chains, drops clauses that cannot take part in a goal
/// derivation, renames predicates to p0, p1, ... in order of first mention
/// and renames clause variables after the definitions' display names.
SpecResult finish(std::vector<WClause> clauses, std::vector<SpecDefinition> defs,
                  const FinishOptions& opt);

}  // namespace hornver::spec
