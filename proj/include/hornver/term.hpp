#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hornver/rational.hpp"

namespace hornver {

/// First-order terms: variables, numeric constants, symbolic constants and
/// compound terms. Lists are ordinary compounds over "."/2 and "[]"/0 and are
/// printed with bracket sugar.
class Term {
public:
    enum class Kind { Var, Num, Sym, Compound };

    static Term var(std::string name);
    static Term num(Rat value);
    static Term num(long value) { return num(Rat(value)); }
    static Term sym(std::string name);
    static Term compound(std::string functor, std::vector<Term> args);
    static Term nil();
    static Term cons(Term head, Term tail);
    static Term list(std::vector<Term> items);

    Kind kind() const { return kind_; }
    bool is_var() const { return kind_ == Kind::Var; }
    bool is_num() const { return kind_ == Kind::Num; }
    bool is_sym() const { return kind_ == Kind::Sym; }
    bool is_compound() const { return kind_ == Kind::Compound; }

    /// Variable name, symbolic-constant name or compound functor.
    const std::string& name() const { return name_; }
    const Rat& value() const { return value_; }
    const std::vector<Term>& args() const { return args_; }

    bool operator==(const Term& other) const;
    bool operator!=(const Term& other) const { return !(*this == other); }

    void collect_vars(std::set<std::string>& out) const;
    std::set<std::string> vars() const;
    bool contains_var(const std::string& name) const;

    std::string str() const;

private:
    Kind kind_ = Kind::Sym;
    std::string name_;
    Rat value_;
    std::vector<Term> args_;
};

/// A predicate applied to argument terms. The goal head of a clause is
/// represented elsewhere (Clause::head is optional), so Atom is always a real
/// predicate call.
struct Atom {
    std::string pred;
    std::vector<Term> args;

    bool operator==(const Atom& other) const {
        return pred == other.pred && args == other.args;
    }
    std::set<std::string> vars() const;
    std::string str() const;
};

/// Idempotent substitution: no bound variable occurs in any binding's
/// right-hand side. bind() maintains the invariant by resolving both sides.
class Substitution {
public:
    bool empty() const { return map_.empty(); }
    const std::map<std::string, Term>& bindings() const { return map_; }

    std::optional<Term> lookup(const std::string& var) const;

    /// Adds var := term (term is first resolved against the current bindings).
    /// Fails (returns false) on occurs-check violation. Binding a variable to
    /// itself is a no-op.
    bool bind(const std::string& var, const Term& term);

    Term apply(const Term& t) const;
    Atom apply(const Atom& a) const;

private:
    std::map<std::string, Term> map_;
};

/// Most general unifier with the occurs check always enabled. Returns nullopt
/// when the terms do not unify.
std::optional<Substitution> unify(const Term& a, const Term& b);
std::optional<Substitution> unify(const std::vector<Term>& as,
                                  const std::vector<Term>& bs);

/// Fresh-variable supply. Names are "V<k>" with a single monotone counter; a
/// pipeline run shares one counter so renamings never collide.
class FreshVars {
public:
    explicit FreshVars(unsigned long start = 0) : next_(start) {}
    std::string fresh();
    unsigned long next() const { return next_; }

private:
    unsigned long next_;
};

}  // namespace hornver
