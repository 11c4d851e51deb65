#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hornver/chc.hpp"
#include "hornver/specializer.hpp"

namespace hornver {

/// One entailment from the safety certificate assembled when the derivation
/// search fails everywhere. Certificates annotate a cycle-cutting set of
/// predicates; every clause path between two annotated calls (or from a goal
/// to the first annotated call, threading through unannotated predicates)
/// yields a record premise ⊨ conclusion:
///   - reaching an annotated predicate: premise is the path constraint (plus
///     the starting annotation), conclusion the target's annotation at the
///     call arguments; `predicate` names the target.
///   - ending in a fact without meeting one: conclusion is FALSE and the
///     premise must be unsatisfiable; `predicate` names the fact's head.
/// Together the records prove no goal clause has a derivation.
struct SubsumptionRecord {
    std::string predicate;
    LinConstraint premise;
    LinConstraint conclusion;
    bool holds = false;
};

struct SolveOptions {
    std::chrono::milliseconds deadline{120000};
    /// How many ancestors with the same predicate a derivation branch may
    /// have before it is frozen. Doubles each round until the deadline.
    size_t initial_unfold_bound = 1;
};

struct SolveResult {
    Verdict verdict = Verdict::Unknown;
    /// On Safe with a certificate: the cycle-cut predicates' annotations
    /// over the argument names of each predicate's first clause head. Every
    /// context reaching such a predicate from a goal satisfies its
    /// annotation, and no fact completes a derivation under them.
    std::map<std::string, LinConstraint> invariants;
    std::optional<DerivationTrace> trace;
    std::vector<SubsumptionRecord> checks;
};

/// Decides whether any goal clause of a program of linear clauses has a
/// derivation. Runs a tabled depth-first search over derivation chains,
/// freezing branches that nest the same predicate more than the current
/// bound; failed chains leave Craig interpolants at the call boundaries they
/// cross. A round that froze nothing proves safety by exhaustion. Otherwise
/// the frozen predicates' accumulated interpolants are checked for
/// inductiveness along every clause path between them (the returned checks);
/// when all hold the program is Safe, else the bound doubles until the
/// deadline runs out. A found derivation is returned as an Unsafe trace with
/// a model of its path constraint. Throws ShapeError on clauses with several
/// body atoms or structured arguments.
SolveResult solve_horn(const ChcProgram& p, const SolveOptions& opts = {});

}  // namespace hornver
