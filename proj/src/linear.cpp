#include "hornver/linear.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "hornver/polyhedra.hpp"

namespace hornver {

LinAtom::LinAtom(std::map<std::string, Rat> coeffs, Rel rel, Rat bound)
    : coeffs_(std::move(coeffs)), rel_(rel), bound_(std::move(bound)) {
    for (auto it = coeffs_.begin(); it != coeffs_.end();)
        it = it->second == 0 ? coeffs_.erase(it) : std::next(it);
    if (coeffs_.empty()) return;
    Rat lead = coeffs_.begin()->second;
    Rat scale = rel_ == Rel::Eq ? Rat(1 / lead) : Rat(1 / abs(lead));
    if (scale != 1) {
        for (auto& [v, c] : coeffs_) c *= scale;
        bound_ *= scale;
    }
}

Rat LinAtom::coeff(const std::string& var) const {
    auto it = coeffs_.find(var);
    return it == coeffs_.end() ? Rat(0) : it->second;
}

bool LinAtom::ground_true() const {
    assert(ground());
    return rel_ == Rel::Eq ? bound_ == 0 : bound_ >= 0;
}

std::set<std::string> LinAtom::vars() const {
    std::set<std::string> out;
    for (const auto& [v, c] : coeffs_) {
        (void)c;
        out.insert(v);
    }
    return out;
}

bool LinAtom::eval(const std::map<std::string, Rat>& point) const {
    Rat sum = 0;
    for (const auto& [v, c] : coeffs_) {
        auto it = point.find(v);
        assert(it != point.end());
        sum += c * it->second;
    }
    return rel_ == Rel::Eq ? sum == bound_ : sum <= bound_;
}

bool LinAtom::operator==(const LinAtom& other) const {
    return rel_ == other.rel_ && bound_ == other.bound_ &&
           coeffs_ == other.coeffs_;
}

bool LinAtom::operator<(const LinAtom& other) const {
    if (coeffs_ != other.coeffs_)
        return std::lexicographical_compare(
            coeffs_.begin(), coeffs_.end(), other.coeffs_.begin(),
            other.coeffs_.end(), [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first < b.first
                                          : a.second < b.second;
            });
    if (rel_ != other.rel_) return rel_ == Rel::Eq;
    return bound_ < other.bound_;
}

std::string LinAtom::str() const {
    // Scale so every coefficient and the bound become integers.
    mpz_class den = bound_.get_den();
    for (const auto& [v, c] : coeffs_) {
        (void)v;
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), c.get_den().get_mpz_t());
        den = den / g * c.get_den();
    }
    Rat scale(den);
    bool flip = rel_ == Rel::Le && !coeffs_.empty() &&
                coeffs_.begin()->second < 0;
    if (flip) scale = -scale;

    std::ostringstream os;
    bool first = true;
    for (const auto& [v, c] : coeffs_) {
        Rat k = c * scale;
        assert(rat_is_int(k));
        if (k > 0 && !first) os << '+';
        if (k == -1)
            os << '-';
        else if (k != 1)
            os << rat_str(k) << '*';
        os << v;
        first = false;
    }
    if (first) os << '0';
    os << (rel_ == Rel::Eq ? " = " : flip ? " >= " : " =< ");
    os << rat_str(bound_ * scale);
    return os.str();
}

LinExpr LinExpr::of_var(const std::string& name) {
    LinExpr e;
    e.coeffs[name] = 1;
    return e;
}

LinExpr LinExpr::of_const(Rat k) {
    LinExpr e;
    e.constant = std::move(k);
    return e;
}

LinExpr& LinExpr::add(const LinExpr& other) {
    for (const auto& [v, c] : other.coeffs) {
        Rat& mine = coeffs[v];
        mine += c;
        if (mine == 0) coeffs.erase(v);
    }
    constant += other.constant;
    return *this;
}

LinExpr& LinExpr::sub(const LinExpr& other) {
    LinExpr neg = other;
    neg.scale(-1);
    return add(neg);
}

LinExpr& LinExpr::scale(const Rat& k) {
    if (k == 0) {
        coeffs.clear();
        constant = 0;
        return *this;
    }
    for (auto& [v, c] : coeffs) c *= k;
    constant *= k;
    return *this;
}

std::optional<LinExpr> term_to_linexpr(const Term& t) {
    switch (t.kind()) {
        case Term::Kind::Var:
            return LinExpr::of_var(t.name());
        case Term::Kind::Num:
            return LinExpr::of_const(t.value());
        case Term::Kind::Sym:
            return std::nullopt;
        case Term::Kind::Compound:
            break;
    }
    const std::string& f = t.name();
    size_t n = t.args().size();
    auto sub0 = [&] { return term_to_linexpr(t.args()[0]); };
    auto sub1 = [&] { return term_to_linexpr(t.args()[1]); };
    if ((f == "+" || f == "plus") && n == 2) {
        auto a = sub0(), b = sub1();
        if (!a || !b) return std::nullopt;
        return a->add(*b);
    }
    if ((f == "-" || f == "minus") && n == 2) {
        auto a = sub0(), b = sub1();
        if (!a || !b) return std::nullopt;
        return a->sub(*b);
    }
    if ((f == "-" || f == "minus") && n == 1) {
        auto a = sub0();
        if (!a) return std::nullopt;
        return a->scale(-1);
    }
    if ((f == "*" || f == "times") && n == 2) {
        auto a = sub0(), b = sub1();
        if (!a || !b) return std::nullopt;
        if (b->is_constant()) return a->scale(b->constant);
        if (a->is_constant()) return b->scale(a->constant);
        return std::nullopt;  // nonlinear
    }
    return std::nullopt;
}

LinConstraint LinConstraint::bottom() {
    LinConstraint c;
    c.false_ = true;
    return c;
}

LinConstraint LinConstraint::make(std::vector<LinAtom> atoms) {
    std::set<LinAtom> kept;
    for (auto& a : atoms) {
        if (a.ground()) {
            if (!a.ground_true()) return bottom();
            continue;
        }
        kept.insert(std::move(a));
    }

    // Merge opposite inequality halves into equalities. Canonical Le atoms
    // have leading coefficient +1 or -1, so each pair appears as one of each
    // sign.
    std::vector<LinAtom> merged;
    std::set<LinAtom> consumed;
    for (const auto& a : kept) {
        if (consumed.count(a)) continue;
        if (a.rel() == Rel::Le) {
            std::map<std::string, Rat> neg;
            for (const auto& [v, c] : a.coeffs()) neg[v] = -c;
            LinAtom mirror(neg, Rel::Le, -a.bound());
            if (!(mirror == a) && kept.count(mirror)) {
                consumed.insert(mirror);
                merged.emplace_back(a.coeffs(), Rel::Eq, a.bound());
                continue;
            }
        }
        merged.push_back(a);
    }

    if (!atoms_satisfiable(merged)) return bottom();
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    LinConstraint c;
    c.atoms_ = std::move(merged);
    return c;
}

LinConstraint LinConstraint::conj(const LinConstraint& a,
                                  const LinConstraint& b) {
    if (a.is_false() || b.is_false()) return bottom();
    std::vector<LinAtom> atoms = a.atoms_;
    atoms.insert(atoms.end(), b.atoms_.begin(), b.atoms_.end());
    return make(std::move(atoms));
}

std::set<std::string> LinConstraint::vars() const {
    std::set<std::string> out;
    for (const auto& a : atoms_)
        for (const auto& [v, c] : a.coeffs()) {
            (void)c;
            out.insert(v);
        }
    return out;
}

bool LinConstraint::eval(const std::map<std::string, Rat>& point) const {
    if (false_) return false;
    for (const auto& a : atoms_)
        if (!a.eval(point)) return false;
    return true;
}

std::string LinConstraint::str() const {
    if (false_) return "false";
    if (atoms_.empty()) return "true";
    std::ostringstream os;
    for (size_t i = 0; i < atoms_.size(); ++i) {
        if (i) os << ", ";
        os << atoms_[i].str();
    }
    return os.str();
}

LinConstraint rename_vars(const LinConstraint& c,
                          const std::map<std::string, std::string>& renaming) {
    if (c.is_false()) return LinConstraint::bottom();
    std::vector<LinAtom> atoms;
    for (const auto& a : c.atoms()) {
        std::map<std::string, Rat> coeffs;
        for (const auto& [v, k] : a.coeffs()) {
            auto it = renaming.find(v);
            coeffs[it == renaming.end() ? v : it->second] += k;
        }
        atoms.emplace_back(std::move(coeffs), a.rel(), a.bound());
    }
    return LinConstraint::make(std::move(atoms));
}

std::optional<LinConstraint> substitute(const LinConstraint& c,
                                        const Substitution& s) {
    if (c.is_false()) return LinConstraint::bottom();
    std::vector<LinAtom> atoms;
    for (const auto& a : c.atoms()) {
        std::map<std::string, Rat> coeffs;
        Rat bound = a.bound();
        for (const auto& [v, k] : a.coeffs()) {
            auto bound_to = s.lookup(v);
            if (!bound_to) {
                coeffs[v] += k;
            } else if (bound_to->is_var()) {
                coeffs[bound_to->name()] += k;
            } else if (bound_to->is_num()) {
                bound -= k * bound_to->value();
            } else {
                return std::nullopt;
            }
        }
        atoms.emplace_back(std::move(coeffs), a.rel(), bound);
    }
    return LinConstraint::make(std::move(atoms));
}

}  // namespace hornver
