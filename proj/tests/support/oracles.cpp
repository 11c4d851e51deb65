#include "support/oracles.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>

namespace testsupport {

uint64_t Rng::next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

long Rng::range(long lo, long hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<long>(next() % span);
}

bool Rng::chance(unsigned num, unsigned den) {
    return next() % den < num;
}

namespace {

bool match_into(const hornver::Term& pattern, const hornver::Term& target,
                hornver::Substitution& s) {
    using hornver::Term;
    if (pattern.is_var()) {
        if (auto bound = s.lookup(pattern.name())) return *bound == target;
        return s.bind(pattern.name(), target);
    }
    switch (pattern.kind()) {
        case Term::Kind::Num:
            return target.is_num() && pattern.value() == target.value();
        case Term::Kind::Sym:
            return target.is_sym() && pattern.name() == target.name();
        case Term::Kind::Compound: {
            if (!target.is_compound() || pattern.name() != target.name() ||
                pattern.args().size() != target.args().size())
                return false;
            for (size_t i = 0; i < pattern.args().size(); ++i)
                if (!match_into(pattern.args()[i], target.args()[i], s))
                    return false;
            return true;
        }
        case Term::Kind::Var:
            break;
    }
    return false;
}

}  // namespace

std::optional<hornver::Substitution> match(const hornver::Term& pattern,
                                           const hornver::Term& target) {
    hornver::Substitution s;
    if (!match_into(pattern, target, s)) return std::nullopt;
    return s;
}

std::optional<hornver::Substitution> match(
    const std::vector<hornver::Term>& pattern,
    const std::vector<hornver::Term>& target) {
    if (pattern.size() != target.size()) return std::nullopt;
    hornver::Substitution s;
    for (size_t i = 0; i < pattern.size(); ++i)
        if (!match_into(pattern[i], target[i], s)) return std::nullopt;
    return s;
}

using hornver::LinAtom;
using hornver::LinConstraint;
using hornver::Rat;
using hornver::Rel;

LinAtom random_atom(Rng& rng, const std::vector<std::string>& vars,
                    unsigned eq_percent) {
    std::map<std::string, Rat> coeffs;
    bool nonzero = false;
    while (!nonzero) {
        for (const auto& v : vars) {
            long c = rng.range(-3, 3);
            if (c != 0) {
                coeffs[v] = c;
                nonzero = true;
            }
        }
    }
    Rel rel = rng.chance(eq_percent, 100) ? Rel::Eq : Rel::Le;
    return LinAtom(std::move(coeffs), rel, Rat(rng.range(-10, 10)));
}

LinConstraint random_constraint(Rng& rng, const std::vector<std::string>& vars,
                                int min_atoms, int max_atoms,
                                unsigned eq_percent) {
    std::vector<LinAtom> atoms;
    long n = rng.range(min_atoms, max_atoms);
    for (long i = 0; i < n; ++i)
        atoms.push_back(random_atom(rng, vars, eq_percent));
    return LinConstraint::make(std::move(atoms));
}

LinConstraint box(const std::vector<std::string>& vars, long lo, long hi) {
    std::vector<LinAtom> atoms;
    for (const auto& v : vars) {
        atoms.emplace_back(std::map<std::string, Rat>{{v, Rat(1)}}, Rel::Le,
                           Rat(hi));
        atoms.emplace_back(std::map<std::string, Rat>{{v, Rat(-1)}}, Rel::Le,
                           Rat(-lo));
    }
    return LinConstraint::make(std::move(atoms));
}

namespace {

struct Line {
    Rat a, b, rhs;  // a*x + b*y = rhs
};

Rat cross(const Point2& o, const Point2& p, const Point2& q) {
    return (p.first - o.first) * (q.second - o.second) -
           (p.second - o.second) * (q.first - o.first);
}

}  // namespace

std::vector<Point2> poly2d_vertices(const LinConstraint& c,
                                    const std::string& x,
                                    const std::string& y) {
    for (const auto& v : c.vars()) assert(v == x || v == y);
    std::vector<Line> lines;
    for (const auto& atom : c.atoms())
        lines.push_back({atom.coeff(x), atom.coeff(y), atom.bound()});
    std::set<Point2> found;
    for (size_t i = 0; i < lines.size(); ++i) {
        for (size_t j = i + 1; j < lines.size(); ++j) {
            Rat det = lines[i].a * lines[j].b - lines[j].a * lines[i].b;
            if (det == 0) continue;
            Rat px =
                (lines[i].rhs * lines[j].b - lines[j].rhs * lines[i].b) / det;
            Rat py =
                (lines[i].a * lines[j].rhs - lines[j].a * lines[i].rhs) / det;
            if (c.eval({{x, px}, {y, py}})) found.insert({px, py});
        }
    }
    return {found.begin(), found.end()};
}

LinConstraint hull_of_points(const std::vector<Point2>& points,
                             const std::string& x, const std::string& y) {
    assert(!points.empty());
    std::vector<Point2> pts = points;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    if (pts.size() == 1) {
        return LinConstraint::make(
            {LinAtom({{x, Rat(1)}}, Rel::Eq, pts[0].first),
             LinAtom({{y, Rat(1)}}, Rel::Eq, pts[0].second)});
    }

    bool collinear = true;
    for (size_t k = 2; k < pts.size() && collinear; ++k)
        collinear = cross(pts[0], pts[1], pts[k]) == 0;
    if (collinear) {
        // Segment from the lexicographic extremes: the carrier line plus
        // bounds on the direction parameter dx*X + dy*Y.
        Rat dx = pts.back().first - pts.front().first;
        Rat dy = pts.back().second - pts.front().second;
        std::vector<LinAtom> atoms;
        atoms.emplace_back(
            std::map<std::string, Rat>{{x, dy}, {y, -dx}}, Rel::Eq,
            dy * pts.front().first - dx * pts.front().second);
        Rat tmin, tmax;
        bool first = true;
        for (const auto& p : pts) {
            Rat t = dx * p.first + dy * p.second;
            if (first || t < tmin) tmin = t;
            if (first || t > tmax) tmax = t;
            first = false;
        }
        atoms.emplace_back(std::map<std::string, Rat>{{x, dx}, {y, dy}},
                           Rel::Le, tmax);
        atoms.emplace_back(std::map<std::string, Rat>{{x, -dx}, {y, -dy}},
                           Rel::Le, -tmin);
        return LinConstraint::make(std::move(atoms));
    }

    // Monotone chain; pops on cross <= 0 keep only strict corners, and the
    // concatenation walks the polygon counterclockwise.
    std::vector<Point2> lower, upper;
    for (const auto& p : pts) {
        while (lower.size() >= 2 &&
               cross(lower[lower.size() - 2], lower.back(), p) <= 0)
            lower.pop_back();
        lower.push_back(p);
    }
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (upper.size() >= 2 &&
               cross(upper[upper.size() - 2], upper.back(), *it) <= 0)
            upper.pop_back();
        upper.push_back(*it);
    }
    lower.pop_back();
    upper.pop_back();
    std::vector<Point2> hull = lower;
    hull.insert(hull.end(), upper.begin(), upper.end());

    std::vector<LinAtom> atoms;
    for (size_t i = 0; i < hull.size(); ++i) {
        const Point2& p = hull[i];
        const Point2& q = hull[(i + 1) % hull.size()];
        Rat dx = q.first - p.first;
        Rat dy = q.second - p.second;
        // Interior lies to the left of p->q.
        atoms.emplace_back(std::map<std::string, Rat>{{x, dy}, {y, -dx}},
                           Rel::Le, dy * p.first - dx * p.second);
    }
    return LinConstraint::make(std::move(atoms));
}

hornver::ChcProgram random_linear_program(Rng& rng, bool acyclic) {
    using hornver::Atom;
    using hornver::Clause;
    using hornver::Term;
    auto pred = [](long i) { return "r" + std::to_string(i); };
    long npreds = rng.range(2, 4);
    std::vector<Clause> cs;
    {
        Clause g;
        g.constraint = random_constraint(rng, {"X", "Y"}, 0, 2, 30);
        g.body.push_back(Atom{pred(rng.range(0, npreds - 1)),
                              {Term::var("X"), Term::var("Y")}});
        cs.push_back(std::move(g));
    }
    for (long i = 0; i < npreds; ++i) {
        long defs = rng.range(1, 2);
        for (long k = 0; k < defs; ++k) {
            Clause c;
            c.head = Atom{pred(i), {Term::var("A"), Term::var("B")}};
            c.constraint = random_constraint(rng, {"A", "B", "C"}, 1, 3, 40);
            bool call = acyclic ? (i + 1 < npreds && rng.chance(2, 3))
                                : rng.chance(2, 3);
            if (call) {
                long j = acyclic ? rng.range(i + 1, npreds - 1)
                                 : rng.range(0, npreds - 1);
                auto arg = [&]() {
                    switch (rng.range(0, 3)) {
                        case 0: return Term::var("A");
                        case 1: return Term::var("B");
                        case 2: return Term::var("C");
                        default: return Term::num(rng.range(-2, 2));
                    }
                };
                c.body.push_back(Atom{pred(j), {arg(), arg()}});
            }
            cs.push_back(std::move(c));
        }
    }
    return hornver::ChcProgram::of(std::move(cs));
}

}  // namespace testsupport
