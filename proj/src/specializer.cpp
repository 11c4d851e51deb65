#include "hornver/specializer.hpp"

#include <cassert>
#include <deque>
#include <optional>
#include <stdexcept>

#include "hornver/polyhedra.hpp"
#include "spec_internal.hpp"

namespace hornver {
namespace spec {
namespace {

Term rename_term(const Term& t, const std::map<std::string, std::string>& m) {
    switch (t.kind()) {
        case Term::Kind::Var: {
            auto it = m.find(t.name());
            return it == m.end() ? t : Term::var(it->second);
        }
        case Term::Kind::Compound: {
            std::vector<Term> args;
            for (const auto& a : t.args()) args.push_back(rename_term(a, m));
            return Term::compound(t.name(), std::move(args));
        }
        default: return t;
    }
}

Atom rename_atom(const Atom& a, const std::map<std::string, std::string>& m) {
    std::vector<Term> args;
    for (const auto& t : a.args) args.push_back(rename_term(t, m));
    return Atom{a.pred, std::move(args)};
}

/// Resolves c's body atom at `ai` against `d`, which the caller has renamed
/// apart. nullopt when the heads do not unify or the constraints clash.
std::optional<Clause> resolve(const Clause& c, size_t ai, const Clause& d) {
    auto mgu = unify(d.head->args, c.body[ai].args);
    if (!mgu) return std::nullopt;
    auto cc = substitute(c.constraint, *mgu);
    auto dc = substitute(d.constraint, *mgu);
    // A constrained variable bound to a structured term has no numeric
    // solutions, so the resolvent is vacuous.
    if (!cc || !dc) return std::nullopt;
    LinConstraint merged = LinConstraint::conj(*cc, *dc);
    if (merged.is_false()) return std::nullopt;
    Clause r;
    if (c.head) r.head = mgu->apply(*c.head);
    r.constraint = std::move(merged);
    for (size_t i = 0; i < ai; ++i) r.body.push_back(mgu->apply(c.body[i]));
    for (const auto& a : d.body) r.body.push_back(mgu->apply(a));
    for (size_t i = ai + 1; i < c.body.size(); ++i)
        r.body.push_back(mgu->apply(c.body[i]));
    return r;
}

void project_clause(Clause& c) {
    std::set<std::string> keep;
    if (c.head)
        for (const auto& t : c.head->args) t.collect_vars(keep);
    for (const auto& a : c.body)
        for (const auto& t : a.args) t.collect_vars(keep);
    c.constraint = project(c.constraint, keep);
}

ChcProgram to_program(const std::vector<WClause>& cs) {
    std::vector<Clause> v;
    v.reserve(cs.size());
    for (const auto& wc : cs) v.push_back(wc.clause);
    return ChcProgram::of(std::move(v));
}

struct ClosureRun {
    const ChcProgram& defs;
    const std::vector<long>& weights;
    const std::function<bool(const std::string&)>& unfoldable;
    FreshVars& fresh;
    long budget = 200000;
    std::vector<Residue> out;

    void go(const LinConstraint& c, const std::vector<Atom>& atoms,
            long weight) {
        size_t i = 0;
        while (i < atoms.size() && !unfoldable(atoms[i].pred)) ++i;
        if (i == atoms.size()) {
            out.push_back({c, atoms, weight});
            return;
        }
        Clause at_site;
        at_site.constraint = c;
        at_site.body = atoms;
        for (size_t di : defs.defining(atoms[i].pred)) {
            if (--budget < 0)
                throw std::runtime_error("unfolding did not terminate");
            Clause d = rename_clause(defs.clauses()[di], fresh);
            auto r = resolve(at_site, i, d);
            if (!r) continue;
            go(r->constraint, r->body, weight + weights[di]);
        }
    }
};

}  // namespace

std::vector<Residue> unfold_closure(
    const LinConstraint& constraint, const std::vector<Atom>& body,
    const ChcProgram& defs, const std::vector<long>& weights,
    const std::function<bool(const std::string&)>& unfoldable,
    FreshVars& fresh) {
    ClosureRun run{defs, weights, unfoldable, fresh, 200000, {}};
    run.go(constraint, body, 0);
    return run.out;
}

namespace {

// Projection can expose unsatisfiability that conj did not, and
// ChcProgram::of drops false clauses, so every pass that indexes `cs` by
// program position has to filter first to keep the two aligned.
void drop_false(std::vector<WClause>& cs) {
    std::vector<WClause> live;
    for (auto& wc : cs)
        if (!wc.clause.constraint.is_false()) live.push_back(std::move(wc));
    cs = std::move(live);
}

void inline_nonrecursive(std::vector<WClause>& cs, FreshVars& fresh) {
    const size_t clause_cap = 2048;
    for (;;) {
        drop_false(cs);
        ChcProgram prog = to_program(cs);
        std::set<std::string> rec = prog.recursive_preds();
        size_t ci = cs.size(), ai = 0;
        for (size_t i = 0; i < cs.size() && ci == cs.size(); ++i)
            for (size_t j = 0; j < cs[i].clause.body.size(); ++j)
                if (!rec.count(cs[i].clause.body[j].pred)) {
                    ci = i;
                    ai = j;
                    break;
                }
        if (ci == cs.size()) return;
        std::vector<WClause> next(cs.begin(), cs.begin() + ci);
        for (size_t di : prog.defining(cs[ci].clause.body[ai].pred)) {
            Clause d = rename_clause(cs[di].clause, fresh);
            auto r = resolve(cs[ci].clause, ai, d);
            if (!r) continue;
            project_clause(*r);
            next.push_back({std::move(*r), cs[ci].weight + cs[di].weight});
        }
        next.insert(next.end(), cs.begin() + ci + 1, cs.end());
        if (next.size() > clause_cap) return;
        cs = std::move(next);
    }
}

void compress_chains(std::vector<WClause>& cs, FreshVars& fresh) {
    for (;;) {
        drop_false(cs);
        ChcProgram prog = to_program(cs);
        size_t qi = cs.size();
        std::string q;
        for (const auto& [pred, arity] : prog.predicates()) {
            (void)arity;
            auto def = prog.defining(pred);
            if (def.size() != 1) continue;
            const Clause& d = cs[def[0]].clause;
            if (d.body.size() != 1 || d.body[0].pred == pred) continue;
            bool called = false;
            for (const auto& wc : cs)
                for (const auto& a : wc.clause.body)
                    if (a.pred == pred) called = true;
            if (!called) continue;
            q = pred;
            qi = def[0];
            break;
        }
        if (qi == cs.size()) return;
        std::vector<WClause> next;
        for (size_t i = 0; i < cs.size(); ++i) {
            if (i == qi) continue;
            WClause cur = cs[i];
            bool dead = false;
            for (;;) {
                size_t aj = cur.clause.body.size();
                for (size_t j = 0; j < cur.clause.body.size(); ++j)
                    if (cur.clause.body[j].pred == q) {
                        aj = j;
                        break;
                    }
                if (aj == cur.clause.body.size()) break;
                Clause d = rename_clause(cs[qi].clause, fresh);
                auto r = resolve(cur.clause, aj, d);
                if (!r) {
                    dead = true;
                    break;
                }
                cur = {std::move(*r), cur.weight + cs[qi].weight};
            }
            if (dead) continue;
            project_clause(cur.clause);
            next.push_back(std::move(cur));
        }
        cs = std::move(next);
    }
}

void drop_dead(std::vector<WClause>& cs) {
    ChcProgram prog = to_program(cs);
    std::set<std::string> reach = prog.reachable_preds();
    std::set<std::string> deriv = prog.derivable_preds();
    std::vector<WClause> next;
    for (auto& wc : cs) {
        bool keep = true;
        if (wc.clause.head && !reach.count(wc.clause.head->pred)) keep = false;
        for (const auto& a : wc.clause.body)
            if (!deriv.count(a.pred)) keep = false;
        if (keep) next.push_back(std::move(wc));
    }
    cs = std::move(next);
}

void rename_preds(std::vector<WClause>& cs, std::vector<SpecDefinition>& defs) {
    std::map<std::string, std::string> m;
    auto name_of = [&](const std::string& p) {
        auto it = m.find(p);
        if (it == m.end())
            it = m.emplace(p, "p" + std::to_string(m.size())).first;
        return it->second;
    };
    for (auto& wc : cs) {
        if (wc.clause.head) wc.clause.head->pred = name_of(wc.clause.head->pred);
        for (auto& a : wc.clause.body) a.pred = name_of(a.pred);
    }
    std::vector<SpecDefinition> kept;
    std::map<int, int> remap;
    for (size_t i = 0; i < defs.size(); ++i) {
        auto it = m.find(defs[i].name);
        if (it == m.end()) continue;
        remap[static_cast<int>(i)] = static_cast<int>(kept.size());
        defs[i].name = it->second;
        kept.push_back(std::move(defs[i]));
    }
    for (auto& d : kept) {
        auto it = remap.find(d.parent);
        d.parent = it == remap.end() ? -1 : it->second;
    }
    defs = std::move(kept);
}

void rename_vars_pretty(std::vector<WClause>& cs,
                        const std::vector<SpecDefinition>& defs) {
    std::map<std::string, const std::vector<std::string>*> display;
    for (const auto& d : defs) display[d.name] = &d.vars;
    auto slot_base = [&](const Atom& a, size_t j) {
        auto it = display.find(a.pred);
        if (it != display.end() && j < it->second->size())
            return (*it->second)[j];
        return slot_letter(j);
    };
    for (auto& wc : cs) {
        Clause& c = wc.clause;
        std::map<std::string, std::string> m;
        std::set<std::string> taken;
        auto assign = [&](const std::string& old, const std::string& base) {
            if (m.count(old)) return;
            std::string n = base;
            for (int k = 1; taken.count(n); ++k) n = base + std::to_string(k);
            m[old] = n;
            taken.insert(n);
        };
        auto assign_atom = [&](const Atom& a) {
            for (size_t j = 0; j < a.args.size(); ++j)
                if (a.args[j].is_var()) assign(a.args[j].name(), slot_base(a, j));
        };
        if (c.head) assign_atom(*c.head);
        for (const auto& a : c.body) assign_atom(a);
        for (const auto& v : c.vars()) assign(v, "Z");
        if (c.head) *c.head = rename_atom(*c.head, m);
        for (auto& a : c.body) a = rename_atom(a, m);
        c.constraint = rename_vars(c.constraint, m);
    }
}

}  // namespace

std::string slot_letter(size_t j) {
    if (j < 26) return std::string(1, static_cast<char>('A' + j));
    return "A" + std::to_string(j);
}

SpecResult finish(std::vector<WClause> cs, std::vector<SpecDefinition> defs,
                  const FinishOptions& opt) {
    drop_false(cs);
    FreshVars fresh = fresh_vars_for(to_program(cs));
    for (auto& wc : cs) project_clause(wc.clause);
    if (opt.inline_nonrecursive) inline_nonrecursive(cs, fresh);
    if (opt.compress_chains) compress_chains(cs, fresh);
    for (auto& wc : cs) project_clause(wc.clause);
    drop_false(cs);
    drop_dead(cs);
    rename_preds(cs, defs);
    rename_vars_pretty(cs, defs);
    SpecResult out;
    out.program = to_program(cs);
    for (const auto& wc : cs) out.weights.push_back(wc.weight);
    out.defs = std::move(defs);
    return out;
}

}  // namespace spec

std::vector<Clause> unfold(const Clause& c, size_t atom_index,
                           const ChcProgram& p, FreshVars& fresh) {
    const Atom& sel = c.body.at(atom_index);
    std::vector<Clause> out;
    for (size_t di : p.defining(sel.pred)) {
        Clause d = rename_clause(p.clauses()[di], fresh);
        auto r = spec::resolve(c, atom_index, d);
        if (r) out.push_back(std::move(*r));
    }
    return out;
}

SpecResult as_spec(ChcProgram p) {
    SpecResult r;
    // A goal clause costs nothing to use: derivation depth counts the
    // resolutions below it.
    for (const auto& c : p.clauses()) r.weights.push_back(c.is_goal() ? 0 : 1);
    r.program = std::move(p);
    return r;
}

namespace {

std::string gvar(size_t j) { return "G" + std::to_string(j); }

/// Constraint propagation by unfold/fold specialization. Definitions keep
/// their context over the positional variables G0, G1, ... so contexts of
/// different versions of one predicate compare directly.
struct Prop {
    const ChcProgram& in;
    GenPolicy gen;
    FreshVars fresh;
    std::set<std::string> recursive;
    std::map<std::string, std::vector<std::string>> display;
    ChcProgram norm;
    std::vector<long> norm_w;
    std::function<bool(const std::string&)> unfoldable;

    struct Def {
        std::string name;
        std::string source;
        LinConstraint g;
        int parent;
        bool queued = true;
        std::vector<spec::WClause> produced;
    };
    std::vector<Def> defs;
    std::map<std::string, std::vector<int>> variants;
    std::deque<int> queue;
    std::vector<spec::WClause> goal_out;

    Prop(const SpecResult& src, GenPolicy g)
        : in(src.program), gen(g), fresh(fresh_vars_for(src.program)) {
        recursive = in.recursive_preds();
        unfoldable = [this](const std::string& s) {
            return s != "$head" && !recursive.count(s);
        };
        check_shapes();
        build_display();
        normalize(src.weights);
    }

    void check_shapes() const {
        for (const auto& c : in.clauses()) {
            if (c.body.size() > 1)
                throw ShapeError(
                    "specialization requires linear clauses; a clause has " +
                    std::to_string(c.body.size()) + " body atoms");
            auto flat = [](const Atom& a) {
                if (a.pred == "$head")
                    throw ShapeError("the predicate name $head is reserved");
                for (const auto& t : a.args)
                    if (!t.is_var() && !t.is_num())
                        throw ShapeError(
                            "specialization requires flat arguments; " +
                            a.pred + " has the structured argument " +
                            t.str());
            };
            if (c.head) flat(*c.head);
            for (const auto& a : c.body) flat(a);
        }
    }

    // Display names for each predicate's argument positions, taken from its
    // first clause head where that names a variable, letters otherwise.
    void build_display() {
        for (const auto& [pred, arity] : in.predicates()) {
            std::vector<std::string> names;
            std::set<std::string> seen;
            auto def = in.defining(pred);
            for (size_t j = 0; j < arity; ++j) {
                std::string n;
                if (!def.empty()) {
                    const Term& t = in.clauses()[def[0]].head->args[j];
                    if (t.is_var() && t.name()[0] != '_') n = t.name();
                }
                if (n.empty() || seen.count(n)) n = spec::slot_letter(j);
                while (seen.count(n)) n += "x";
                seen.insert(n);
                names.push_back(n);
            }
            display[pred] = std::move(names);
        }
    }

    void normalize(const std::vector<long>& weights) {
        std::vector<Clause> cls;
        for (size_t i = 0; i < in.size(); ++i) {
            Clause c = rename_clause(in.clauses()[i], fresh);
            if (c.head) {
                std::vector<LinAtom> extra;
                std::set<std::string> seen;
                for (auto& t : c.head->args) {
                    if (t.is_var() && seen.insert(t.name()).second) continue;
                    std::string v = fresh.fresh();
                    if (t.is_num())
                        extra.push_back(
                            LinAtom({{v, Rat(1)}}, Rel::Eq, t.value()));
                    else
                        extra.push_back(LinAtom({{v, Rat(1)}, {t.name(), Rat(-1)}},
                                                Rel::Eq, Rat(0)));
                    t = Term::var(v);
                    seen.insert(v);
                }
                if (!extra.empty())
                    c.constraint = LinConstraint::conj(
                        c.constraint, LinConstraint::make(std::move(extra)));
            }
            cls.push_back(std::move(c));
            norm_w.push_back(weights.empty() ? 1 : weights[i]);
        }
        norm = ChcProgram::of(std::move(cls));
    }

    int find_or_make(const std::string& pred, const LinConstraint& proj,
                     int trigger) {
        auto& vs = variants[pred];
        for (int i : vs)
            if (entails(proj, defs[i].g)) return i;
        if (gen == GenPolicy::Monovariant && !vs.empty()) {
            int v = vs[0];
            defs[v].g = widen(defs[v].g, convex_hull(defs[v].g, proj));
            defs[v].produced.clear();
            if (!defs[v].queued) {
                defs[v].queued = true;
                queue.push_back(v);
            }
            return v;
        }
        LinConstraint g = proj;
        if (gen == GenPolicy::PolyvariantWiden) {
            int anc = -1;
            for (int d = trigger; d != -1; d = defs[d].parent)
                if (defs[d].source == pred) {
                    anc = d;
                    break;
                }
            if (anc == -1 && vs.size() >= 4) anc = vs.back();
            if (anc != -1)
                g = widen(defs[anc].g, convex_hull(defs[anc].g, proj));
            for (int i : vs)
                if (equivalent(defs[i].g, g)) return i;
        }
        if (defs.size() >= 512)
            throw std::runtime_error("constraint propagation did not stabilize");
        int idx = static_cast<int>(defs.size());
        defs.push_back(
            {"s" + std::to_string(idx), pred, std::move(g), trigger, true, {}});
        vs.push_back(idx);
        queue.push_back(idx);
        return idx;
    }

    // Folds the call `a` under the path constraint `c`: projects the
    // constraint onto a's argument positions and finds or introduces the
    // definition covering it.
    Atom fold(const Atom& a, const LinConstraint& c, int trigger) {
        std::vector<LinAtom> binds;
        for (size_t j = 0; j < a.args.size(); ++j) {
            if (a.args[j].is_num())
                binds.push_back(
                    LinAtom({{gvar(j), Rat(1)}}, Rel::Eq, a.args[j].value()));
            else
                binds.push_back(LinAtom(
                    {{gvar(j), Rat(1)}, {a.args[j].name(), Rat(-1)}}, Rel::Eq,
                    Rat(0)));
        }
        std::set<std::string> keep;
        for (size_t j = 0; j < a.args.size(); ++j) keep.insert(gvar(j));
        LinConstraint proj = project(
            LinConstraint::conj(c, LinConstraint::make(std::move(binds))),
            keep);
        int d = find_or_make(a.pred, proj, trigger);
        return Atom{defs[d].name, a.args};
    }

    void process_goal(size_t gi) {
        const Clause& c = norm.clauses()[gi];
        auto residues = spec::unfold_closure(c.constraint, c.body, norm,
                                             norm_w, unfoldable, fresh);
        for (auto& r : residues) {
            Clause out;
            out.constraint = r.constraint;
            if (!r.atoms.empty())
                out.body.push_back(fold(r.atoms[0], r.constraint, -1));
            goal_out.push_back({std::move(out), norm_w[gi] + r.weight});
        }
    }

    void process_def(int d) {
        defs[d].produced.clear();
        const size_t arity = in.predicates().at(defs[d].source);
        std::vector<std::string> hv;
        std::map<std::string, std::string> to_hv;
        std::vector<Term> hv_terms;
        for (size_t j = 0; j < arity; ++j) {
            hv.push_back(fresh.fresh());
            to_hv[gvar(j)] = hv.back();
            hv_terms.push_back(Term::var(hv.back()));
        }
        LinConstraint g_local = rename_vars(defs[d].g, to_hv);
        for (size_t ci : norm.defining(defs[d].source)) {
            const Clause& c = norm.clauses()[ci];
            std::map<std::string, std::string> hm;
            for (size_t j = 0; j < arity; ++j)
                hm[c.head->args[j].name()] = hv[j];
            LinConstraint base = LinConstraint::conj(
                rename_vars(c.constraint, hm), g_local);
            if (base.is_false()) continue;
            std::vector<Atom> body{Atom{"$head", hv_terms}};
            for (const auto& a : c.body)
                body.push_back(spec::rename_atom(a, hm));
            auto residues = spec::unfold_closure(base, body, norm, norm_w,
                                                 unfoldable, fresh);
            for (auto& r : residues) {
                assert(!r.atoms.empty() && r.atoms[0].pred == "$head");
                assert(r.atoms.size() <= 2);
                Clause out;
                out.head = Atom{defs[d].name, r.atoms[0].args};
                out.constraint = r.constraint;
                if (r.atoms.size() == 2)
                    out.body.push_back(fold(r.atoms[1], r.constraint, d));
                defs[d].produced.push_back(
                    {std::move(out), norm_w[ci] + r.weight});
            }
        }
    }

    SpecResult run() {
        for (size_t gi : norm.goal_clauses()) process_goal(gi);
        long rounds = 0;
        while (!queue.empty()) {
            int d = queue.front();
            queue.pop_front();
            defs[d].queued = false;
            process_def(d);
            if (++rounds > 10000)
                throw std::runtime_error(
                    "constraint propagation did not stabilize");
        }
        std::vector<spec::WClause> cs = std::move(goal_out);
        for (auto& d : defs)
            for (auto& wc : d.produced) cs.push_back(std::move(wc));
        std::vector<SpecDefinition> exported;
        for (auto& d : defs) {
            std::map<std::string, std::string> to_display;
            const auto& names = display.at(d.source);
            for (size_t j = 0; j < names.size(); ++j)
                to_display[gvar(j)] = names[j];
            exported.push_back({d.name, d.source, names,
                                rename_vars(d.g, to_display), d.parent});
        }
        return spec::finish(std::move(cs), std::move(exported), {});
    }
};

}  // namespace

SpecResult specialize_prop(const SpecResult& in, GenPolicy gen) {
    return Prop(in, gen).run();
}

SpecResult specialize_prop(const ChcProgram& p, GenPolicy gen) {
    return specialize_prop(as_spec(p), gen);
}

Verdict syntactic_verdict(const ChcProgram& p) {
    auto goals = p.goal_clauses();
    if (goals.empty()) return Verdict::Safe;
    std::set<std::string> deriv = p.derivable_preds();
    bool some_open = false;
    for (size_t gi : goals) {
        const Clause& g = p.clauses()[gi];
        if (g.body.empty()) return Verdict::Unsafe;
        bool blocked = false;
        for (const auto& a : g.body)
            if (!deriv.count(a.pred)) blocked = true;
        if (!blocked) some_open = true;
    }
    return some_open ? Verdict::Unknown : Verdict::Safe;
}

}  // namespace hornver
