#include "hornver/term.hpp"

#include <cassert>
#include <sstream>
#include <utility>

namespace hornver {

std::optional<Rat> rat_parse(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::string num = text, den = "1";
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        num = text.substr(0, slash);
        den = text.substr(slash + 1);
    }
    auto is_number = [](const std::string& s) {
        if (s.empty()) return false;
        size_t i = (s[0] == '-') ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (!isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    };
    if (!is_number(num) || !is_number(den)) return std::nullopt;
    mpz_class d(den);
    if (d == 0) return std::nullopt;
    Rat q(mpz_class(num), d);
    q.canonicalize();
    return q;
}

std::string rat_str(const Rat& q) {
    return q.get_den() == 1 ? q.get_num().get_str() : q.get_str();
}

Term Term::var(std::string name) {
    Term t;
    t.kind_ = Kind::Var;
    t.name_ = std::move(name);
    return t;
}

Term Term::num(Rat value) {
    Term t;
    t.kind_ = Kind::Num;
    t.value_ = std::move(value);
    return t;
}

Term Term::sym(std::string name) {
    Term t;
    t.kind_ = Kind::Sym;
    t.name_ = std::move(name);
    return t;
}

Term Term::compound(std::string functor, std::vector<Term> args) {
    Term t;
    t.kind_ = Kind::Compound;
    t.name_ = std::move(functor);
    t.args_ = std::move(args);
    return t;
}

Term Term::nil() { return compound("[]", {}); }

Term Term::cons(Term head, Term tail) {
    return compound(".", {std::move(head), std::move(tail)});
}

Term Term::list(std::vector<Term> items) {
    Term t = nil();
    for (auto it = items.rbegin(); it != items.rend(); ++it)
        t = cons(std::move(*it), std::move(t));
    return t;
}

bool Term::operator==(const Term& other) const {
    if (kind_ != other.kind_) return false;
    switch (kind_) {
        case Kind::Var:
        case Kind::Sym:
            return name_ == other.name_;
        case Kind::Num:
            return value_ == other.value_;
        case Kind::Compound:
            return name_ == other.name_ && args_ == other.args_;
    }
    return false;
}

void Term::collect_vars(std::set<std::string>& out) const {
    if (kind_ == Kind::Var) {
        out.insert(name_);
    } else if (kind_ == Kind::Compound) {
        for (const auto& a : args_) a.collect_vars(out);
    }
}

std::set<std::string> Term::vars() const {
    std::set<std::string> out;
    collect_vars(out);
    return out;
}

bool Term::contains_var(const std::string& name) const {
    if (kind_ == Kind::Var) return name_ == name;
    if (kind_ == Kind::Compound)
        for (const auto& a : args_)
            if (a.contains_var(name)) return true;
    return false;
}

namespace {

// Proper lists print as [a,b,c]; anything else falls back to functor syntax.
bool render_list(const Term& t, std::ostream& os) {
    std::vector<const Term*> items;
    const Term* cur = &t;
    while (cur->is_compound() && cur->name() == "." && cur->args().size() == 2) {
        items.push_back(&cur->args()[0]);
        cur = &cur->args()[1];
    }
    if (!(cur->is_compound() && cur->name() == "[]" && cur->args().empty()))
        return false;
    os << '[';
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) os << ',';
        os << items[i]->str();
    }
    os << ']';
    return true;
}

}  // namespace

std::string Term::str() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Var:
        case Kind::Sym:
            os << name_;
            break;
        case Kind::Num:
            os << rat_str(value_);
            break;
        case Kind::Compound: {
            if (render_list(*this, os)) break;
            // Arithmetic operators print infix and fully parenthesized so the
            // surface syntax reads them back.
            if ((name_ == "+" || name_ == "-" || name_ == "*") &&
                args_.size() == 2) {
                os << '(' << args_[0].str() << name_ << args_[1].str() << ')';
                break;
            }
            if (name_ == "-" && args_.size() == 1) {
                os << "(-" << args_[0].str() << ')';
                break;
            }
            os << name_;
            if (!args_.empty()) {
                os << '(';
                for (size_t i = 0; i < args_.size(); ++i) {
                    if (i) os << ',';
                    os << args_[i].str();
                }
                os << ')';
            }
            break;
        }
    }
    return os.str();
}

std::set<std::string> Atom::vars() const {
    std::set<std::string> out;
    for (const auto& a : args) a.collect_vars(out);
    return out;
}

std::string Atom::str() const {
    std::ostringstream os;
    os << pred;
    if (!args.empty()) {
        os << '(';
        for (size_t i = 0; i < args.size(); ++i) {
            if (i) os << ',';
            os << args[i].str();
        }
        os << ')';
    }
    return os.str();
}

std::optional<Term> Substitution::lookup(const std::string& var) const {
    auto it = map_.find(var);
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

Term Substitution::apply(const Term& t) const {
    switch (t.kind()) {
        case Term::Kind::Var: {
            auto it = map_.find(t.name());
            return it == map_.end() ? t : it->second;
        }
        case Term::Kind::Num:
        case Term::Kind::Sym:
            return t;
        case Term::Kind::Compound: {
            std::vector<Term> args;
            args.reserve(t.args().size());
            for (const auto& a : t.args()) args.push_back(apply(a));
            return Term::compound(t.name(), std::move(args));
        }
    }
    return t;
}

Atom Substitution::apply(const Atom& a) const {
    Atom out;
    out.pred = a.pred;
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) out.args.push_back(apply(t));
    return out;
}

bool Substitution::bind(const std::string& var, const Term& term) {
    Term resolved = apply(term);
    if (resolved.is_var() && resolved.name() == var) return true;
    if (resolved.contains_var(var)) return false;  // occurs check
    // Rewrite existing right-hand sides so no binding mentions `var`.
    Substitution single;
    single.map_.emplace(var, resolved);
    for (auto& [v, t] : map_) t = single.apply(t);
    map_[var] = std::move(resolved);
    return true;
}

namespace {

bool unify_into(const Term& a, const Term& b, Substitution& s) {
    Term ra = s.apply(a);
    Term rb = s.apply(b);
    if (ra == rb) return true;
    if (ra.is_var()) return s.bind(ra.name(), rb);
    if (rb.is_var()) return s.bind(rb.name(), ra);
    if (ra.is_compound() && rb.is_compound() && ra.name() == rb.name() &&
        ra.args().size() == rb.args().size()) {
        for (size_t i = 0; i < ra.args().size(); ++i)
            if (!unify_into(ra.args()[i], rb.args()[i], s)) return false;
        return true;
    }
    return false;
}

}  // namespace

std::optional<Substitution> unify(const Term& a, const Term& b) {
    Substitution s;
    if (!unify_into(a, b, s)) return std::nullopt;
    return s;
}

std::optional<Substitution> unify(const std::vector<Term>& as,
                                  const std::vector<Term>& bs) {
    if (as.size() != bs.size()) return std::nullopt;
    Substitution s;
    for (size_t i = 0; i < as.size(); ++i)
        if (!unify_into(as[i], bs[i], s)) return std::nullopt;
    return s;
}

std::string FreshVars::fresh() { return "V" + std::to_string(next_++); }

}  // namespace hornver
