#pragma once

#include <string>
#include <vector>

#include "hornver/chc.hpp"

namespace hornver {

/// Arithmetic expressions over program variables. Multiplication is only
/// accepted when at least one factor is a literal, keeping every generated
/// constraint linear.
struct AExpr {
    enum class Kind { Var, Lit, Add, Sub, Mul };
    Kind kind = Kind::Lit;
    std::string name;         // Var
    Rat value;                // Lit
    std::vector<AExpr> args;  // binary operators

    static AExpr var(std::string n);
    static AExpr lit(Rat v);
    static AExpr bin(Kind k, AExpr l, AExpr r);
};

/// Boolean guards: comparisons, conjunction, and the nondeterministic guard
/// written '*' in the source.
struct BExpr {
    enum class Kind { Nondet, Less, Leq, Gtr, Geq, Eq, And };
    Kind kind = Kind::Nondet;
    std::vector<AExpr> cmp;   // comparison operands
    std::vector<BExpr> sub;   // conjuncts

    static BExpr nondet();
    static BExpr cmp_of(Kind k, AExpr l, AExpr r);
    static BExpr conj(BExpr l, BExpr r);
};

struct Stmt {
    enum class Kind { Assign, If, While };
    Kind kind = Kind::Assign;
    std::string target;        // Assign
    std::vector<AExpr> expr;   // Assign right-hand side
    std::vector<BExpr> guard;  // If, While
    std::vector<Stmt> then_branch;
    std::vector<Stmt> else_branch;  // If only
};

/// A program: integer declarations with initial values, a statement list,
/// and one final assertion.
struct ImpProgram {
    std::vector<std::pair<std::string, Rat>> decls;
    std::vector<Stmt> body;
    BExpr assertion;
};

ImpProgram parse_imp(const std::string& text);
ImpProgram parse_imp_file(const std::string& path);

/// Encodes the program as the clauses of a small-step interpreter
/// specialized to it: at/3 facts list the labelled commands, tr/2 the
/// transition rules, eval/beval/update/nextlab the expression semantics, and
/// reach/1 threads reachability from initConf to errorConf. The program is
/// unsafe exactly when these clauses derive the goal.
ChcProgram encode_imp(const ImpProgram& p);

enum class ExecStatus {
    Halted,           // ran to the end, assertion held
    AssertViolated,   // ran to the end, assertion false
    OutOfChoices,     // needed a nondet choice beyond the provided ones
    OutOfSteps,
};

struct ExecResult {
    ExecStatus status;
    std::map<std::string, Rat> final_env;
    size_t steps = 0;
    size_t choices_used = 0;
};

/// Runs the program concretely. Each evaluation of a '*' guard consumes the
/// next entry of `choices`.
ExecResult exec_imp(const ImpProgram& p, const std::vector<bool>& choices,
                    size_t max_steps = 100000);

}  // namespace hornver
