#pragma once

#include <string>
#include <vector>

#include "hornver/chc.hpp"

namespace hornver {

/// One-step unfolding: resolves the body atom at `atom_index` against every
/// clause defining its predicate and returns the satisfiable resolvents in
/// program order. The unfolded clause's body replaces the selected atom in
/// place.
std::vector<Clause> unfold(const Clause& c, size_t atom_index,
                           const ChcProgram& p, FreshVars& fresh);

/// How constraint propagation generalizes the context of a new predicate.
/// Monovariant keeps a single specialized version per source predicate and
/// rewidens it in place when a new call pattern escapes it; PolyvariantWiden
/// keeps several versions and widens along the chain of definitions that
/// introduced them.
enum class GenPolicy { Monovariant, PolyvariantWiden };

/// A predicate introduced by a specialization pass: `name` stands for
/// `source_pred` restricted to the constraint `context` over `vars` (one
/// variable per argument position). `parent` is the index of the definition
/// whose processing introduced this one, -1 when it came from a goal clause.
struct SpecDefinition {
    std::string name;
    std::string source_pred;
    std::vector<std::string> vars;
    LinConstraint context;
    int parent = -1;
};

/// A transformed program with its bookkeeping. weights[i] is the number of
/// resolution steps one use of clause i stands for in the program the
/// pipeline started from, so a derivation found here can be replayed there
/// with a depth bound of the sum over its clauses. defs lists the predicates
/// the pass introduced (their contexts are the propagated invariants).
struct SpecResult {
    ChcProgram program;
    std::vector<long> weights;
    std::vector<SpecDefinition> defs;
};

/// Wraps a plain program as a pipeline stage: weight 1 per clause, no
/// definitions.
SpecResult as_spec(ChcProgram p);

/// Specializes away the interpreter layer of a front-end encoding. The
/// outcome is a program over one predicate per reachable program point,
/// whose arguments are the program variables; straight-line code is folded
/// into the clauses, so loop-free inputs reduce to goal facts (or to
/// nothing, when no execution can fail). Throws std::invalid_argument when
/// the input lacks the encoding's reachability clauses.
SpecResult specialize_remove(const ChcProgram& vc);

/// Propagates the goal constraints of a program of linear clauses through
/// its predicates by unfold/fold specialization. Each reachable predicate is
/// replaced by versions specialized to the constraints that actually flow
/// into it, generalized per `gen` so the set of versions stays finite.
/// Non-recursive predicates are unfolded away. Throws ShapeError on clauses
/// with several body atoms or with structured argument terms.
SpecResult specialize_prop(const SpecResult& in, GenPolicy gen);
SpecResult specialize_prop(const ChcProgram& p, GenPolicy gen);

enum class Verdict { Safe, Unsafe, Unknown };

/// Decides safety by clause shape alone: Unsafe when some goal clause has no
/// body atoms (its constraint is satisfiable, or it would have been
/// dropped), Safe when every goal clause calls an underivable predicate (or
/// there are none), Unknown otherwise.
Verdict syntactic_verdict(const ChcProgram& p);

}  // namespace hornver
