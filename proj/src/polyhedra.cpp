#include "hornver/polyhedra.hpp"

#include <algorithm>
#include <cassert>

namespace hornver {

namespace {

// A working inequality sum(coeffs*x) <= bound (< when strict). lineage
// expresses the row as a linear combination of the input atoms: multipliers
// are nonnegative for inequality atoms and signed for equality atoms, so a
// ground contradictory row carries a Farkas infeasibility certificate.
struct Row {
    std::map<std::string, Rat> coeffs;
    Rat bound;
    bool strict = false;
    std::map<int, Rat> lineage;

    bool ground() const { return coeffs.empty(); }
    bool contradictory() const {
        return ground() && (strict ? bound <= 0 : bound < 0);
    }
    bool trivial() const { return ground() && !contradictory(); }
};

bool row_less(const Row& a, const Row& b) {
    if (a.coeffs != b.coeffs) {
        return std::lexicographical_compare(
            a.coeffs.begin(), a.coeffs.end(), b.coeffs.begin(),
            b.coeffs.end(), [](const auto& x, const auto& y) {
                return x.first != y.first ? x.first < y.first
                                          : x.second < y.second;
            });
    }
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.strict > b.strict;
}

void add_scaled(std::map<std::string, Rat>& into,
                const std::map<std::string, Rat>& from, const Rat& k) {
    for (const auto& [key, val] : from) {
        Rat& slot = into[key];
        slot += k * val;
        if (slot == 0) into.erase(key);
    }
}

void add_scaled(std::map<int, Rat>& into, const std::map<int, Rat>& from,
                const Rat& k) {
    for (const auto& [key, val] : from) {
        Rat& slot = into[key];
        slot += k * val;
        if (slot == 0) into.erase(key);
    }
}

/// One row per inequality atom, two per equality (with lineage multipliers
/// +1 and -1 on the same atom index).
std::vector<Row> rows_from_atoms(const std::vector<LinAtom>& atoms,
                                 int index_base = 0) {
    std::vector<Row> rows;
    for (size_t i = 0; i < atoms.size(); ++i) {
        const LinAtom& a = atoms[i];
        int idx = index_base + static_cast<int>(i);
        Row fwd;
        fwd.coeffs = a.coeffs();
        fwd.bound = a.bound();
        fwd.lineage = {{idx, Rat(1)}};
        if (a.rel() == Rel::Eq) {
            Row bwd;
            for (const auto& [v, c] : a.coeffs()) bwd.coeffs[v] = -c;
            bwd.bound = -a.bound();
            bwd.lineage = {{idx, Rat(-1)}};
            rows.push_back(std::move(bwd));
        }
        rows.push_back(std::move(fwd));
    }
    return rows;
}

/// Drops trivial rows and, among rows with identical coefficients, keeps only
/// the strongest bound. Returns rows in a deterministic sorted order.
std::vector<Row> cheap_prune(std::vector<Row> rows) {
    std::vector<Row> kept;
    for (auto& r : rows) {
        if (r.trivial()) continue;
        kept.push_back(std::move(r));
    }
    std::sort(kept.begin(), kept.end(), row_less);
    std::vector<Row> out;
    for (auto& r : kept) {
        if (!out.empty() && out.back().coeffs == r.coeffs) {
            // Sorted so the smaller bound came first; equal bounds put the
            // strict row first. Either way the earlier row dominates.
            continue;
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::set<std::string> row_vars(const std::vector<Row>& rows) {
    std::set<std::string> vars;
    for (const auto& r : rows)
        for (const auto& [v, c] : r.coeffs) {
            (void)c;
            vars.insert(v);
        }
    return vars;
}

/// Cheapest variable first: fewest lower*upper combinations, ties broken by
/// name so elimination order is reproducible.
std::string pick_var(const std::vector<Row>& rows,
                     const std::set<std::string>& candidates) {
    std::string best;
    size_t best_score = 0;
    for (const auto& v : candidates) {
        size_t lowers = 0, uppers = 0;
        for (const auto& r : rows) {
            auto it = r.coeffs.find(v);
            if (it == r.coeffs.end()) continue;
            (it->second < 0 ? lowers : uppers)++;
        }
        size_t score = lowers * uppers;
        if (best.empty() || score < best_score) {
            best = v;
            best_score = score;
        }
    }
    return best;
}

// Chernikov's support rule: after k elimination steps, a derived row whose
// combination involves more than k+1 of the original rows is redundant.
// Lineage keys merge the two halves of an equality, which can only undercount
// the support, so the filter stays exact.
bool chernikov_redundant(const Row& r, size_t steps_done) {
    return r.lineage.size() > steps_done + 1;
}

Row combine(const Row& lo, const Row& up, const std::string& var) {
    Rat cl = -lo.coeffs.at(var);
    Rat cu = up.coeffs.at(var);
    assert(cl > 0 && cu > 0);
    Row combo;
    add_scaled(combo.coeffs, lo.coeffs, 1 / cl);
    add_scaled(combo.coeffs, up.coeffs, 1 / cu);
    combo.bound = lo.bound / cl + up.bound / cu;
    combo.strict = lo.strict || up.strict;
    add_scaled(combo.lineage, lo.lineage, 1 / cl);
    add_scaled(combo.lineage, up.lineage, 1 / cu);
    assert(!combo.coeffs.count(var));
    return combo;
}

std::vector<Row> eliminate(const std::vector<Row>& rows,
                           const std::string& var, size_t steps_done) {
    std::vector<Row> lowers, uppers, rest;
    for (const auto& r : rows) {
        auto it = r.coeffs.find(var);
        if (it == r.coeffs.end())
            rest.push_back(r);
        else if (it->second < 0)
            lowers.push_back(r);
        else
            uppers.push_back(r);
    }
    auto emit = [&rest, steps_done](Row r) {
        if (!chernikov_redundant(r, steps_done)) rest.push_back(std::move(r));
    };

    // When a mirrored non-strict pair pins var to an affine expression,
    // eliminate by substitution through that pair: each remaining bound on
    // var combines with one half of the equation only. The general
    // lower*upper products are nonnegative combinations of these rows, so
    // skipping them is exact, and it avoids the quadratic blowup on
    // equation-heavy systems.
    for (size_t li = 0; li < lowers.size(); ++li) {
        if (lowers[li].strict) continue;
        for (size_t ui = 0; ui < uppers.size(); ++ui) {
            const Row& lo = lowers[li];
            const Row& up = uppers[ui];
            if (up.strict) continue;
            Rat mu = lo.coeffs.at(var) / up.coeffs.at(var);  // negative
            bool mirrored = lo.coeffs.size() == up.coeffs.size() &&
                            lo.bound == mu * up.bound;
            if (mirrored) {
                for (const auto& [v, c] : up.coeffs)
                    if (lo.coeffs.count(v) == 0 ||
                        lo.coeffs.at(v) != mu * c)
                        mirrored = false;
            }
            if (!mirrored) continue;
            for (size_t j = 0; j < lowers.size(); ++j)
                if (j != li) emit(combine(lowers[j], up, var));
            for (size_t j = 0; j < uppers.size(); ++j)
                if (j != ui) emit(combine(lo, uppers[j], var));
            return cheap_prune(std::move(rest));
        }
    }

    for (const auto& lo : lowers)
        for (const auto& up : uppers) emit(combine(lo, up, var));
    return cheap_prune(std::move(rest));
}

bool rows_satisfiable(std::vector<Row> rows, bool allow_prune);

/// Drops every row entailed by the remaining ones. Entailment is checked by
/// strict negation, using the cheap satisfiability mode, so pruning does not
/// recurse into itself.
std::vector<Row> entailment_prune(std::vector<Row> rows) {
    int index = 0;
    for (const auto& r : rows)
        for (const auto& [i, c] : r.lineage) {
            (void)c;
            if (i >= index) index = i + 1;
        }
    for (size_t i = 0; i < rows.size();) {
        std::vector<Row> test;
        for (size_t j = 0; j < rows.size(); ++j)
            if (j != i) test.push_back(rows[j]);
        Row neg;
        for (const auto& [v, c] : rows[i].coeffs) neg.coeffs[v] = -c;
        neg.bound = -rows[i].bound;
        neg.strict = !rows[i].strict;
        neg.lineage = {{index, Rat(1)}};
        test.push_back(std::move(neg));
        if (!rows_satisfiable(std::move(test), /*allow_prune=*/false))
            rows.erase(rows.begin() + static_cast<long>(i));
        else
            ++i;
    }
    return rows;
}

constexpr size_t kPruneThreshold = 48;

// Mid-elimination pruning pays for itself only when products are piling up.
// A large but shrinking system (long equality chains) must not trigger it:
// each prune costs one full elimination per row.
bool should_prune(size_t current, size_t initial) {
    return current > kPruneThreshold && current > 2 * initial;
}

bool rows_satisfiable(std::vector<Row> rows, bool allow_prune = true) {
    rows = cheap_prune(std::move(rows));
    const size_t initial = rows.size();
    size_t steps = 0;
    while (true) {
        for (const auto& r : rows)
            if (r.contradictory()) return false;
        std::set<std::string> vars = row_vars(rows);
        if (vars.empty()) return true;
        rows = eliminate(rows, pick_var(rows, vars), ++steps);
        if (allow_prune && should_prune(rows.size(), initial))
            rows = entailment_prune(std::move(rows));
    }
}

/// Runs elimination to the ground and returns a contradictory row whose
/// lineage certifies infeasibility, or nullopt if satisfiable.
std::optional<Row> find_certificate(std::vector<Row> rows) {
    rows = cheap_prune(std::move(rows));
    const size_t initial = rows.size();
    size_t steps = 0;
    while (true) {
        for (const auto& r : rows)
            if (r.contradictory()) return r;
        std::set<std::string> vars = row_vars(rows);
        if (vars.empty()) return std::nullopt;
        rows = eliminate(rows, pick_var(rows, vars), ++steps);
        if (should_prune(rows.size(), initial))
            rows = entailment_prune(std::move(rows));
    }
}

/// Eliminates every variable outside `keep` and rebuilds a constraint from
/// the remaining rows.
LinConstraint project_rows(std::vector<Row> rows,
                           const std::set<std::string>& keep) {
    rows = cheap_prune(std::move(rows));
    const size_t initial = rows.size();
    size_t steps = 0;
    while (true) {
        for (const auto& r : rows)
            if (r.contradictory()) return LinConstraint::bottom();
        std::set<std::string> gone;
        for (const auto& v : row_vars(rows))
            if (!keep.count(v)) gone.insert(v);
        if (gone.empty()) break;
        rows = eliminate(rows, pick_var(rows, gone), ++steps);
        if (should_prune(rows.size(), initial))
            rows = entailment_prune(std::move(rows));
    }
    rows = entailment_prune(std::move(rows));
    std::vector<LinAtom> atoms;
    for (const auto& r : rows) {
        assert(!r.strict);
        atoms.emplace_back(r.coeffs, Rel::Le, r.bound);
    }
    return LinConstraint::make(std::move(atoms));
}

Row negation_row(const LinAtom& le_atom, int index) {
    assert(le_atom.rel() == Rel::Le);
    Row neg;
    for (const auto& [v, c] : le_atom.coeffs()) neg.coeffs[v] = -c;
    neg.bound = -le_atom.bound();
    neg.strict = true;
    neg.lineage = {{index, Rat(1)}};
    return neg;
}

bool entails_le(const std::vector<Row>& premise, const LinAtom& le_atom) {
    std::vector<Row> rows = premise;
    int index = 0;
    for (const auto& r : premise)
        for (const auto& [i, c] : r.lineage) {
            (void)c;
            if (i >= index) index = i + 1;
        }
    rows.push_back(negation_row(le_atom, index));
    return !rows_satisfiable(std::move(rows));
}

}  // namespace

bool atoms_satisfiable(const std::vector<LinAtom>& atoms) {
    return rows_satisfiable(rows_from_atoms(atoms));
}

bool entails(const LinConstraint& premise, const LinAtom& conclusion) {
    if (premise.is_false()) return true;
    if (conclusion.ground()) return conclusion.ground_true();
    std::vector<Row> rows = rows_from_atoms(premise.atoms());
    if (conclusion.rel() == Rel::Le) return entails_le(rows, conclusion);
    LinAtom fwd(conclusion.coeffs(), Rel::Le, conclusion.bound());
    std::map<std::string, Rat> neg;
    for (const auto& [v, c] : conclusion.coeffs()) neg[v] = -c;
    LinAtom bwd(neg, Rel::Le, -conclusion.bound());
    return entails_le(rows, fwd) && entails_le(rows, bwd);
}

bool entails(const LinConstraint& premise, const LinConstraint& conclusion) {
    if (premise.is_false()) return true;
    if (conclusion.is_false()) return false;
    std::vector<Row> rows = rows_from_atoms(premise.atoms());
    for (const auto& a : conclusion.atoms()) {
        if (a.rel() == Rel::Le) {
            if (!entails_le(rows, a)) return false;
            continue;
        }
        LinAtom fwd(a.coeffs(), Rel::Le, a.bound());
        std::map<std::string, Rat> neg;
        for (const auto& [v, c] : a.coeffs()) neg[v] = -c;
        LinAtom bwd(neg, Rel::Le, -a.bound());
        if (!entails_le(rows, fwd) || !entails_le(rows, bwd)) return false;
    }
    return true;
}

bool equivalent(const LinConstraint& a, const LinConstraint& b) {
    return entails(a, b) && entails(b, a);
}

LinConstraint project(const LinConstraint& c,
                      const std::set<std::string>& keep) {
    if (c.is_false()) return LinConstraint::bottom();
    return project_rows(rows_from_atoms(c.atoms()), keep);
}

LinConstraint convex_hull(const LinConstraint& a, const LinConstraint& b) {
    if (a.is_false()) return b;
    if (b.is_false()) return a;
    if (a.is_true() || b.is_true()) return LinConstraint::top();

    // Classic lifting: x = y + z with y in sigma1*A, z in sigma2*B,
    // sigma1 + sigma2 = 1, sigma >= 0, then project back onto x. Auxiliary
    // names start with '#', which no surface-syntax variable can, so they
    // cannot collide. With sigma = 0 the scaled copy degenerates to the
    // recession cone, which is exactly what makes the projection the closed
    // hull of the union.
    std::set<std::string> keep = a.vars();
    for (const auto& v : b.vars()) keep.insert(v);

    std::vector<Row> rows;
    int next_index = 0;
    auto add_eq = [&rows, &next_index](const std::map<std::string, Rat>& coeffs,
                                       const Rat& bound) {
        int idx = next_index++;
        Row fwd;
        fwd.coeffs = coeffs;
        fwd.bound = bound;
        fwd.lineage = {{idx, Rat(1)}};
        Row bwd;
        for (const auto& [v, c] : coeffs) bwd.coeffs[v] = -c;
        bwd.bound = -bound;
        bwd.lineage = {{idx, Rat(-1)}};
        rows.push_back(std::move(fwd));
        rows.push_back(std::move(bwd));
    };
    auto add_le = [&rows, &next_index](std::map<std::string, Rat> coeffs,
                                       Rat bound) {
        Row r;
        r.coeffs = std::move(coeffs);
        r.bound = std::move(bound);
        r.lineage = {{next_index++, Rat(1)}};
        rows.push_back(std::move(r));
    };

    auto copy_atoms = [&](const LinConstraint& c, const std::string& prefix,
                          const std::string& sigma) {
        for (const auto& atom : c.atoms()) {
            std::map<std::string, Rat> coeffs;
            for (const auto& [v, k] : atom.coeffs()) coeffs[prefix + v] = k;
            coeffs[sigma] = -atom.bound();
            if (atom.rel() == Rel::Eq)
                add_eq(coeffs, 0);
            else
                add_le(std::move(coeffs), 0);
        }
    };
    copy_atoms(a, "#a_", "#s1");
    copy_atoms(b, "#b_", "#s2");
    for (const auto& v : keep)
        add_eq({{v, Rat(1)}, {"#a_" + v, Rat(-1)}, {"#b_" + v, Rat(-1)}}, 0);
    add_eq({{"#s1", Rat(1)}, {"#s2", Rat(1)}}, 1);
    add_le({{"#s1", Rat(-1)}}, 0);
    add_le({{"#s2", Rat(-1)}}, 0);

    return project_rows(std::move(rows), keep);
}

LinConstraint widen(const LinConstraint& older, const LinConstraint& newer) {
    if (older.is_false()) return newer;
    if (newer.is_false()) return older;
    std::vector<LinAtom> kept;
    for (const auto& atom : older.atoms()) {
        if (atom.rel() == Rel::Le) {
            if (entails(newer, atom)) kept.push_back(atom);
            continue;
        }
        LinAtom fwd(atom.coeffs(), Rel::Le, atom.bound());
        std::map<std::string, Rat> neg;
        for (const auto& [v, c] : atom.coeffs()) neg[v] = -c;
        LinAtom bwd(neg, Rel::Le, -atom.bound());
        if (entails(newer, fwd)) kept.push_back(fwd);
        if (entails(newer, bwd)) kept.push_back(bwd);
    }
    return simplify(LinConstraint::make(std::move(kept)));
}

LinConstraint simplify(const LinConstraint& c) {
    if (c.is_false() || c.is_true()) return c;
    std::vector<LinAtom> kept = c.atoms();
    for (size_t i = 0; i < kept.size();) {
        std::vector<LinAtom> rest;
        for (size_t j = 0; j < kept.size(); ++j)
            if (j != i) rest.push_back(kept[j]);
        if (entails(LinConstraint::make(rest), kept[i]))
            kept.erase(kept.begin() + static_cast<long>(i));
        else
            ++i;
    }
    return LinConstraint::make(std::move(kept));
}

namespace {

/// Partial Farkas combination of a certificate over one block of atoms.
/// Atom index i contributes certificate[i] * atoms[i].
LinConstraint partial_combination(const std::map<int, Rat>& certificate,
                                  const std::vector<LinAtom>& atoms,
                                  int index_base, int index_limit) {
    std::map<std::string, Rat> coeffs;
    Rat bound = 0;
    for (const auto& [idx, lambda] : certificate) {
        if (idx < index_base || idx >= index_limit) continue;
        const LinAtom& atom = atoms[static_cast<size_t>(idx - index_base)];
        add_scaled(coeffs, atom.coeffs(), lambda);
        bound += lambda * atom.bound();
    }
    return LinConstraint::make({LinAtom(std::move(coeffs), Rel::Le, bound)});
}

}  // namespace

std::optional<LinConstraint> binary_interpolant(const LinConstraint& a,
                                                const LinConstraint& b) {
    if (a.is_false()) return LinConstraint::bottom();
    if (b.is_false()) return LinConstraint::top();
    std::vector<LinAtom> all = a.atoms();
    all.insert(all.end(), b.atoms().begin(), b.atoms().end());
    auto cert = find_certificate(rows_from_atoms(all));
    if (!cert) return std::nullopt;
    return partial_combination(cert->lineage, a.atoms(), 0,
                               static_cast<int>(a.atoms().size()));
}

std::optional<std::vector<LinConstraint>> sequence_interpolants(
    const std::vector<LinConstraint>& formulas) {
    size_t n = formulas.size();
    for (size_t j = 0; j < n; ++j) {
        if (!formulas[j].is_false()) continue;
        std::vector<LinConstraint> out(n + 1);
        for (size_t k = 0; k <= n; ++k)
            out[k] = k <= j ? LinConstraint::top() : LinConstraint::bottom();
        return out;
    }

    std::vector<LinAtom> all;
    std::vector<int> formula_start(n + 1, 0);
    for (size_t j = 0; j < n; ++j) {
        formula_start[j] = static_cast<int>(all.size());
        all.insert(all.end(), formulas[j].atoms().begin(),
                   formulas[j].atoms().end());
    }
    formula_start[n] = static_cast<int>(all.size());

    auto cert = find_certificate(rows_from_atoms(all));
    if (!cert) return std::nullopt;

    std::vector<LinConstraint> out;
    out.reserve(n + 1);
    for (size_t k = 0; k <= n; ++k)
        out.push_back(
            partial_combination(cert->lineage, all, 0, formula_start[k]));
    assert(out.front().is_true());
    assert(out.back().is_false());
    return out;
}

std::optional<std::map<std::string, Rat>> sample_model(
    const LinConstraint& c) {
    if (c.is_false()) return std::nullopt;

    // One variable at a time, in name order: fold the values chosen so far
    // into the bounds, project the rest away, and take the midpoint of the
    // remaining interval. Projection exactness guarantees every chosen value
    // extends to a full model.
    std::map<std::string, Rat> point;
    for (const auto& var : c.vars()) {
        std::vector<Row> rows;
        int index = 0;
        for (const auto& atom : c.atoms()) {
            Row fwd;
            for (const auto& [v, k] : atom.coeffs()) {
                auto it = point.find(v);
                if (it == point.end())
                    fwd.coeffs[v] = k;
                else
                    fwd.bound -= k * it->second;
            }
            fwd.bound += atom.bound();
            fwd.lineage = {{index, Rat(1)}};
            if (atom.rel() == Rel::Eq) {
                Row bwd;
                for (const auto& [v, k] : fwd.coeffs) bwd.coeffs[v] = -k;
                bwd.bound = -fwd.bound;
                bwd.lineage = {{index, Rat(-1)}};
                rows.push_back(std::move(bwd));
            }
            rows.push_back(std::move(fwd));
            ++index;
        }
        rows = cheap_prune(std::move(rows));
        const size_t initial = rows.size();
        size_t steps = 0;
        while (true) {
            std::set<std::string> others = row_vars(rows);
            others.erase(var);
            if (others.empty()) break;
            rows = eliminate(rows, pick_var(rows, others), ++steps);
            if (should_prune(rows.size(), initial))
                rows = entailment_prune(std::move(rows));
        }

        std::optional<Rat> lo, hi;
        for (const Row& r : rows) {
            assert(!r.strict);
            if (r.ground()) {
                assert(!r.contradictory());
                continue;
            }
            Rat cv = r.coeffs.at(var);
            Rat limit = r.bound / cv;
            if (cv > 0) {
                if (!hi || limit < *hi) hi = limit;
            } else {
                if (!lo || limit > *lo) lo = limit;
            }
        }
        Rat value;
        if (lo && hi) {
            assert(*lo <= *hi);
            value = (*lo + *hi) / 2;
        } else if (lo) {
            value = *lo + 1;
        } else if (hi) {
            value = *hi - 1;
        } else {
            value = 0;
        }
        point[var] = value;
    }
    return point;
}

}  // namespace hornver
