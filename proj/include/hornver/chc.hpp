#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hornver/linear.hpp"
#include "hornver/term.hpp"

namespace hornver {

/// One constrained Horn clause: head :- constraint, body. A clause without a
/// head is a goal clause, written "unsafe :- ..." in the text syntax; the
/// program is safe exactly when no goal clause has a derivation. Facts have
/// an empty body (the constraint may still be nontrivial).
struct Clause {
    std::optional<Atom> head;
    LinConstraint constraint;
    std::vector<Atom> body;

    bool is_goal() const { return !head.has_value(); }
    bool is_fact() const { return head.has_value() && body.empty(); }

    std::set<std::string> vars() const;
    /// Variables not occurring in the head.
    std::set<std::string> locals() const;
    std::string str() const;
};

/// Renames every variable of the clause to a fresh name.
Clause rename_clause(const Clause& c, FreshVars& fresh);

class ChcProgram {
public:
    ChcProgram() = default;

    /// Validates and indexes. Drops clauses whose constraint is FALSE (they
    /// are vacuous). Throws std::invalid_argument on arity clashes.
    static ChcProgram of(std::vector<Clause> clauses);

    const std::vector<Clause>& clauses() const { return clauses_; }
    bool empty() const { return clauses_.empty(); }
    size_t size() const { return clauses_.size(); }

    /// Indices of the clauses whose head predicate is `pred`.
    std::vector<size_t> defining(const std::string& pred) const;
    std::vector<size_t> goal_clauses() const;

    /// Predicates with their arities, in name order.
    const std::map<std::string, size_t>& predicates() const { return arity_; }

    /// Predicates on a dependency cycle (self-loops included).
    std::set<std::string> recursive_preds() const;

    /// Predicates reachable from the goal clauses' bodies.
    std::set<std::string> reachable_preds() const;

    /// Predicates with at least one derivation tree (least fixpoint over
    /// clause bodies, ignoring constraints beyond FALSE).
    std::set<std::string> derivable_preds() const;

    std::string str() const;

private:
    std::vector<Clause> clauses_;
    std::map<std::string, size_t> arity_;
};

/// A supply whose names are disjoint from every variable in the program.
FreshVars fresh_vars_for(const ChcProgram& p);

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised by transformations that receive clauses outside the shape they
/// support (for example a body with several atoms where linear clauses are
/// required).
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses the textual clause syntax: Prolog-style clauses over linear
/// constraints (=, =<, >=, <, > with < and > tightened to the integer grid)
/// and predicate atoms. '%' starts a line comment; '_' is a fresh variable at
/// each occurrence. Throws ParseError with a line/column prefix.
ChcProgram parse_chc(const std::string& text);
ChcProgram parse_chc_file(const std::string& path);

std::string emit_clause(const Clause& c);
std::string emit_chc(const ChcProgram& p);

enum class OracleOutcome {
    FoundAnswer,
    NoAnswerWithinDepth,
    ExhaustedAll,
};

/// A successful top-down derivation of a goal clause: the clauses applied in
/// resolution order (goal clause first), the satisfiable path constraint,
/// and one model of it over the derivation's renamed variables.
struct DerivationTrace {
    std::vector<size_t> clause_indices;
    LinConstraint path;
    std::map<std::string, Rat> model;
    std::string str() const;
};

struct OracleResult {
    OracleOutcome outcome;
    std::optional<DerivationTrace> trace;
};

/// Exhaustive depth-bounded SLD search over the program, leftmost selection,
/// clauses tried in program order. Depth counts atom-resolution steps, so a
/// derivation using the goal clause alone has depth 0. Returns the first
/// answer found, or reports whether the whole space was exhausted.
OracleResult bounded_oracle(const ChcProgram& p, size_t max_depth);

}  // namespace hornver
