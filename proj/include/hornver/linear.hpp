#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hornver/rational.hpp"
#include "hornver/term.hpp"

namespace hornver {

enum class Rel { Eq, Le };

/// A linear atom sum(coeffs[v]*v) REL bound in canonical form: no zero
/// coefficients, and the coefficient of the lexicographically first variable
/// is +1 for equalities, +1 or -1 for inequalities (inequalities only admit
/// positive scaling). An atom with an empty coefficient map is ground and has
/// a fixed truth value.
class LinAtom {
public:
    LinAtom(std::map<std::string, Rat> coeffs, Rel rel, Rat bound);

    const std::map<std::string, Rat>& coeffs() const { return coeffs_; }
    Rel rel() const { return rel_; }
    const Rat& bound() const { return bound_; }

    Rat coeff(const std::string& var) const;
    bool ground() const { return coeffs_.empty(); }
    bool ground_true() const;

    std::set<std::string> vars() const;
    bool eval(const std::map<std::string, Rat>& point) const;

    bool operator==(const LinAtom& other) const;
    bool operator<(const LinAtom& other) const;

    /// Prints with integer coefficients (scaled by the common denominator),
    /// e.g. "X-Y =< -1", "X = 1", "X+2*Y >= 0". Inequalities whose leading
    /// coefficient is negative are flipped and printed with ">=".
    std::string str() const;

private:
    std::map<std::string, Rat> coeffs_;
    Rel rel_;
    Rat bound_;
};

/// A linear expression sum(coeffs[v]*v) + constant, the intermediate form for
/// turning parsed arithmetic terms into atoms.
struct LinExpr {
    std::map<std::string, Rat> coeffs;
    Rat constant;

    static LinExpr of_var(const std::string& name);
    static LinExpr of_const(Rat k);

    bool is_constant() const { return coeffs.empty(); }
    LinExpr& add(const LinExpr& other);
    LinExpr& sub(const LinExpr& other);
    LinExpr& scale(const Rat& k);
};

/// Converts an arithmetic term built from +, -, * (or plus, minus, times)
/// over variables and numerals. Unary minus is accepted. Returns nullopt on
/// nonlinear products or foreign functors.
std::optional<LinExpr> term_to_linexpr(const Term& t);

/// A conjunction of linear atoms. Construction canonicalizes: ground atoms
/// are evaluated away, duplicates removed, opposite inequality pairs merged
/// into equalities, atoms kept sorted, and satisfiability is decided. A
/// constraint is therefore either is_false() or satisfiable; TRUE is the
/// empty conjunction.
class LinConstraint {
public:
    LinConstraint() = default;  // TRUE

    static LinConstraint top() { return LinConstraint(); }
    static LinConstraint bottom();
    static LinConstraint make(std::vector<LinAtom> atoms);
    static LinConstraint conj(const LinConstraint& a, const LinConstraint& b);

    bool is_false() const { return false_; }
    bool is_true() const { return !false_ && atoms_.empty(); }
    const std::vector<LinAtom>& atoms() const { return atoms_; }

    std::set<std::string> vars() const;
    bool eval(const std::map<std::string, Rat>& point) const;

    bool operator==(const LinConstraint& other) const {
        return false_ == other.false_ && atoms_ == other.atoms_;
    }
    bool operator!=(const LinConstraint& other) const {
        return !(*this == other);
    }

    /// "true", "false", or the atoms joined with ", ".
    std::string str() const;

private:
    bool false_ = false;
    std::vector<LinAtom> atoms_;
};

/// Simultaneous variable renaming. A non-injective map merges coefficients
/// (the semantics of substituting equal variables).
LinConstraint rename_vars(const LinConstraint& c,
                          const std::map<std::string, std::string>& renaming);

/// Applies a term substitution to a constraint. Bindings must send each
/// constrained variable to a variable or a numeral; a binding to any other
/// term makes the arithmetic ill-typed and yields nullopt.
std::optional<LinConstraint> substitute(const LinConstraint& c,
                                        const Substitution& s);

}  // namespace hornver
