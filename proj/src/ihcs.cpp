#include "hornver/ihcs.hpp"

#include <cassert>
#include <chrono>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hornver/polyhedra.hpp"

namespace hornver {

namespace {

// Escalation stops here: a program the search cannot settle with 128 nested
// occurrences of one predicate is reported Unknown rather than unfolded
// further.
constexpr size_t kMaxBound = 128;
// Recursion guard independent of the unfold bound (many distinct predicates
// can stack without triggering a freeze).
constexpr size_t kMaxChain = 2048;
// Certificate checking walks every clause path between cut predicates; a
// program with more paths than this fails the round instead of blowing up.
constexpr size_t kMaxPathSteps = 4096;

void check_shapes(const ChcProgram& p) {
    for (const auto& c : p.clauses()) {
        if (c.body.size() > 1)
            throw ShapeError("the solver requires linear clauses; a clause has " +
                             std::to_string(c.body.size()) + " body atoms");
        auto flat = [](const Atom& a) {
            for (const auto& t : a.args)
                if (!t.is_var() && !t.is_num())
                    throw ShapeError("the solver requires flat arguments; " +
                                     a.pred + " has the structured argument " +
                                     t.str());
        };
        if (c.head) flat(*c.head);
        for (const auto& a : c.body) flat(a);
    }
}

std::string slot_var(size_t j) { return "$a" + std::to_string(j); }

// The equality t = u as a linear atom; nullopt when trivially true. Both
// terms are flat, so the only ground case is two numerals.
std::optional<LinAtom> link_atom(const Term& t, const Term& u) {
    if (t.is_var() && u.is_var()) {
        if (t.name() == u.name()) return std::nullopt;
        return LinAtom({{t.name(), Rat(1)}, {u.name(), Rat(-1)}}, Rel::Eq,
                       Rat(0));
    }
    if (t.is_var()) return LinAtom({{t.name(), Rat(1)}}, Rel::Eq, u.value());
    if (u.is_var()) return LinAtom({{u.name(), Rat(1)}}, Rel::Eq, t.value());
    if (t.value() == u.value()) return std::nullopt;
    return LinAtom({}, Rel::Eq, t.value() - u.value());
}

// Simultaneous substitution of variables by flat terms, without the
// occurs-check plumbing of Substitution (which resolves right-hand sides
// against earlier bindings and would capture when frames share names).
Term map_term(const Term& t, const std::map<std::string, Term>& m) {
    if (!t.is_var()) return t;
    auto it = m.find(t.name());
    return it == m.end() ? t : it->second;
}

Atom map_atom(const Atom& a, const std::map<std::string, Term>& m) {
    Atom out{a.pred, {}};
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) out.args.push_back(map_term(t, m));
    return out;
}

LinConstraint map_constraint(const LinConstraint& c,
                             const std::map<std::string, Term>& m) {
    if (c.is_false()) return c;
    std::vector<LinAtom> atoms;
    for (const auto& a : c.atoms()) {
        std::map<std::string, Rat> coeffs;
        Rat bound = a.bound();
        for (const auto& [v, k] : a.coeffs()) {
            Term t = map_term(Term::var(v), m);
            if (t.is_num())
                bound -= k * t.value();
            else
                coeffs[t.name()] += k;
        }
        atoms.emplace_back(std::move(coeffs), a.rel(), std::move(bound));
    }
    return LinConstraint::make(std::move(atoms));
}

// How an argument list maps onto the positional variables $a0, $a1, ...:
// the first occurrence of each variable names its slot, and repeated
// variables or numeral arguments become equations between slots. A
// constraint on the caller's variables translates into one on the slots via
// `renaming`, but it only transfers to calls of a different shape together
// with the `shape` equations.
struct SlotShape {
    std::map<std::string, std::string> renaming;
    std::vector<LinAtom> shape;
};

SlotShape shape_of(const std::vector<Term>& args) {
    SlotShape out;
    for (size_t j = 0; j < args.size(); ++j) {
        if (args[j].is_num()) {
            out.shape.push_back(
                LinAtom({{slot_var(j), Rat(1)}}, Rel::Eq, args[j].value()));
            continue;
        }
        auto it = out.renaming.find(args[j].name());
        if (it == out.renaming.end())
            out.renaming.emplace(args[j].name(), slot_var(j));
        else
            out.shape.push_back(LinAtom(
                {{it->second, Rat(1)}, {slot_var(j), Rat(-1)}}, Rel::Eq,
                Rat(0)));
    }
    return out;
}

// A positional constraint evaluated at an actual argument list.
LinConstraint instantiate(const LinConstraint& ann,
                          const std::vector<Term>& args) {
    if (ann.is_true() || ann.is_false()) return ann;
    std::map<std::string, Term> m;
    for (size_t j = 0; j < args.size(); ++j) m.emplace(slot_var(j), args[j]);
    return map_constraint(ann, m);
}

std::set<std::string> arg_vars(const std::vector<Term>& args) {
    std::set<std::string> out;
    for (const auto& t : args) t.collect_vars(out);
    return out;
}

enum class Sub { Clean, Dirty, Answer };

struct Node {
    Atom atom;
    // Interpolants harvested at this node's boundary, already renamed onto
    // the slot variables. Their conjunction blocks the node's call context.
    std::vector<LinConstraint> local;
};

// One round of bounded depth-first derivation search. Failed branches leave
// interpolants in `cert`; subtrees that fail without freezing leave blocked
// regions in `regions` for sound reuse later in the same round.
struct Search {
    const ChcProgram& p;
    size_t bound;
    std::chrono::steady_clock::time_point stop;
    FreshVars fresh;

    std::map<std::string, std::vector<LinConstraint>> cert;
    std::map<std::string, std::vector<LinConstraint>> regions;
    std::set<std::string> frozen_preds;
    std::vector<LinConstraint> formulas;
    std::vector<LinConstraint> paths;
    std::vector<Node> chain;
    std::vector<size_t> trace;
    bool timed_out = false;
    std::optional<DerivationTrace> answer;

    Search(const ChcProgram& prog, size_t b,
           std::chrono::steady_clock::time_point deadline)
        : p(prog), bound(b), stop(deadline), fresh(fresh_vars_for(prog)) {}

    // True when some goal clause has a derivation (`answer` holds it).
    bool run() {
        for (size_t gi : p.goal_clauses()) {
            const Clause& g = p.clauses()[gi];
            if (g.constraint.is_false()) continue;
            if (g.body.empty()) {
                DerivationTrace dt;
                dt.clause_indices = {gi};
                dt.path = g.constraint;
                dt.model = *sample_model(g.constraint);
                answer = std::move(dt);
                return true;
            }
            formulas = {g.constraint};
            paths = {g.constraint};
            chain = {Node{g.body[0], {}}};
            trace = {gi};
            Sub s = explore();
            formulas.clear();
            paths.clear();
            chain.clear();
            trace.clear();
            if (s == Sub::Answer) return true;
            if (timed_out) return false;
        }
        return false;
    }

    // Expands the last chain node against every defining clause. Clean means
    // the whole subtree was explored and refuted, so the node's harvested
    // interpolants form a blocked region; a freeze, timeout or table cut
    // anywhere below makes the result Dirty instead.
    Sub explore() {
        if (std::chrono::steady_clock::now() >= stop) {
            timed_out = true;
            return Sub::Dirty;
        }
        const size_t me = chain.size() - 1;
        const Atom atom = chain[me].atom;
        if (chain.size() >= kMaxChain) {
            frozen_preds.insert(atom.pred);
            return Sub::Dirty;
        }

        auto rit = regions.find(atom.pred);
        if (rit != regions.end())
            for (const auto& region : rit->second)
                if (entails(paths.back(), instantiate(region, atom.args)))
                    // The region proves this context has no derivation, but
                    // no interpolant reaches the ancestors for it, so they
                    // must not table.
                    return Sub::Dirty;

        size_t nested = 0;
        for (size_t i = 0; i + 1 < chain.size(); ++i)
            if (chain[i].atom.pred == atom.pred) ++nested;
        if (nested >= bound) {
            frozen_preds.insert(atom.pred);
            return Sub::Dirty;
        }

        bool clean = true;
        for (size_t ci : p.defining(atom.pred)) {
            if (std::chrono::steady_clock::now() >= stop) {
                timed_out = true;
                return Sub::Dirty;
            }
            Clause r = rename_clause(p.clauses()[ci], fresh);
            std::vector<LinAtom> links;
            for (size_t k = 0; k < atom.args.size(); ++k)
                if (auto la = link_atom(r.head->args[k], atom.args[k]))
                    links.push_back(*la);
            LinConstraint f =
                LinConstraint::conj(r.constraint, LinConstraint::make(links));
            LinConstraint newP = LinConstraint::conj(paths.back(), f);
            if (newP.is_false()) {
                formulas.push_back(f);
                harvest();
                formulas.pop_back();
                continue;
            }
            if (r.body.empty()) {
                DerivationTrace dt;
                dt.clause_indices = trace;
                dt.clause_indices.push_back(ci);
                dt.path = newP;
                dt.model = *sample_model(newP);
                answer = std::move(dt);
                return Sub::Answer;
            }
            formulas.push_back(f);
            paths.push_back(newP);
            trace.push_back(ci);
            chain.push_back(Node{r.body[0], {}});
            Sub s = explore();
            chain.pop_back();
            trace.pop_back();
            paths.pop_back();
            formulas.pop_back();
            if (s == Sub::Answer) return Sub::Answer;
            if (s != Sub::Clean) clean = false;
        }
        if (!clean) return Sub::Dirty;

        SlotShape ss = shape_of(atom.args);
        LinConstraint region = LinConstraint::make(ss.shape);
        for (const auto& i : chain[me].local)
            region = LinConstraint::conj(region, i);
        regions[atom.pred].push_back(std::move(region));
        return Sub::Clean;
    }

    // The current path is infeasible: attribute one interpolant of the
    // formula sequence to every chain node. The interpolant after formula j
    // speaks only about the call arguments of node j (clauses are renamed
    // apart), so renaming it onto the slot variables is exact.
    void harvest() {
        if (std::chrono::steady_clock::now() >= stop) {
            timed_out = true;
            return;
        }
        auto seq = sequence_interpolants(formulas);
        assert(seq && seq->size() == formulas.size() + 1);
        if (!seq) return;
        for (size_t j = 0; j < chain.size(); ++j) {
            const LinConstraint& raw = (*seq)[j + 1];
            if (raw.is_true()) continue;
            SlotShape ss = shape_of(chain[j].atom.args);
            LinConstraint pos = rename_vars(
                project(raw, arg_vars(chain[j].atom.args)), ss.renaming);
            if (pos.is_true()) continue;
            chain[j].local.push_back(pos);
            cert[chain[j].atom.pred].push_back(std::move(pos));
        }
    }
};

// A set of predicates meeting every dependency cycle among the reachable
// ones. Seeded with the predicates the search froze; remaining cycles add
// their name-least member until none are left.
std::set<std::string> cycle_cut(const ChcProgram& p,
                                const std::set<std::string>& frozen) {
    std::set<std::string> reach = p.reachable_preds();
    std::set<std::string> cut;
    for (const auto& q : frozen)
        if (reach.count(q)) cut.insert(q);

    std::map<std::string, std::set<std::string>> adj;
    for (const Clause& c : p.clauses())
        if (c.head && !c.body.empty() && reach.count(c.head->pred) &&
            reach.count(c.body[0].pred))
            adj[c.head->pred].insert(c.body[0].pred);

    // A predicate outside the cut that can reach itself avoiding the cut
    // sits on an uncut cycle.
    auto on_cycle = [&](const std::string& s) {
        std::vector<std::string> stack(adj[s].begin(), adj[s].end());
        std::set<std::string> seen;
        while (!stack.empty()) {
            std::string v = stack.back();
            stack.pop_back();
            if (v == s) return true;
            if (cut.count(v) || !seen.insert(v).second) continue;
            for (const auto& w : adj[v]) stack.push_back(w);
        }
        return false;
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& q : reach) {
            if (cut.count(q) || !on_cycle(q)) continue;
            cut.insert(q);
            changed = true;
            break;
        }
    }
    return cut;
}

// Enumerates the clause paths between annotated predicates and turns each
// into an entailment record. Paths start at a goal clause or at a defining
// clause of an annotated predicate (whose annotation becomes part of the
// premise) and thread through unannotated predicates by resolution that
// keeps the caller frame's variable names, so single-clause paths read
// exactly as written.
struct Completion {
    const ChcProgram& p;
    const std::set<std::string>& cut;
    const std::map<std::string, LinConstraint>& ann;
    FreshVars fresh;
    std::vector<SubsumptionRecord> out;
    bool ok = true;
    size_t steps = 0;

    Completion(const ChcProgram& prog, const std::set<std::string>& c,
               const std::map<std::string, LinConstraint>& a)
        : p(prog), cut(c), ann(a), fresh(fresh_vars_for(prog)) {}

    void run() {
        for (size_t gi : p.goal_clauses()) {
            const Clause& g = p.clauses()[gi];
            if (g.body.empty()) continue;
            walk(LinConstraint::top(), g.constraint, g.body[0], {}, g.vars());
        }
        for (const auto& q : cut) {
            for (size_t ci : p.defining(q)) {
                const Clause& c = p.clauses()[ci];
                LinConstraint anchor = instantiate(ann.at(q), c.head->args);
                std::set<std::string> keep = arg_vars(c.head->args);
                if (c.body.empty()) {
                    record_dead_end(anchor, c.constraint, c.head->pred, keep);
                    continue;
                }
                walk(anchor, c.constraint, c.body[0], keep, c.vars());
            }
        }
    }

    // anchor: the starting annotation (TRUE for goal-rooted paths); acc: the
    // composed path constraint; keep: the anchor head's variables, retained
    // in record premises.
    void walk(const LinConstraint& anchor, const LinConstraint& acc,
              const Atom& frontier, const std::set<std::string>& keep,
              std::set<std::string> used) {
        if (++steps > kMaxPathSteps) {
            ok = false;
            return;
        }
        if (cut.count(frontier.pred)) {
            SubsumptionRecord rec;
            rec.predicate = frontier.pred;
            std::set<std::string> pk = keep;
            for (const auto& v : arg_vars(frontier.args)) pk.insert(v);
            rec.premise = project(LinConstraint::conj(anchor, acc), pk);
            rec.conclusion = instantiate(ann.at(frontier.pred), frontier.args);
            rec.holds = entails(rec.premise, rec.conclusion);
            ok = ok && rec.holds;
            out.push_back(std::move(rec));
            return;
        }
        for (size_t ci : p.defining(frontier.pred)) {
            const Clause& c = p.clauses()[ci];
            auto [ext, next, nused] = compose(c, frontier, used);
            LinConstraint nacc = LinConstraint::conj(acc, ext);
            if (nacc.is_false()) continue;  // dead under any annotation
            if (!next) {
                record_dead_end(anchor, nacc, c.head->pred, keep);
                continue;
            }
            walk(anchor, nacc, *next, keep, std::move(nused));
        }
    }

    // A path that reached a fact without meeting an annotated predicate: it
    // would complete a derivation, so the annotation must rule it out.
    void record_dead_end(const LinConstraint& anchor, const LinConstraint& acc,
                         const std::string& head_pred,
                         const std::set<std::string>& keep) {
        SubsumptionRecord rec;
        rec.predicate = head_pred;
        rec.premise = project(LinConstraint::conj(anchor, acc), keep);
        rec.conclusion = LinConstraint::bottom();
        rec.holds = rec.premise.is_false();
        ok = ok && rec.holds;
        out.push_back(std::move(rec));
    }

    // Resolution step that keeps the caller frame: clause head variables are
    // replaced by the caller's argument terms, clause locals keep their
    // written names unless the frame already uses them.
    std::tuple<LinConstraint, std::optional<Atom>, std::set<std::string>>
    compose(const Clause& c, const Atom& frontier, std::set<std::string> used) {
        std::map<std::string, Term> m;
        std::vector<LinAtom> extra;
        for (size_t j = 0; j < frontier.args.size(); ++j) {
            const Term& h = c.head->args[j];
            const Term& a = frontier.args[j];
            if (!h.is_var()) {
                if (auto la = link_atom(h, a)) extra.push_back(*la);
                continue;
            }
            auto it = m.find(h.name());
            if (it == m.end())
                m.emplace(h.name(), a);
            else if (auto la = link_atom(it->second, a))
                extra.push_back(*la);
        }
        for (const auto& v : c.vars()) {
            if (m.count(v)) continue;
            if (used.insert(v).second) continue;
            std::string nv = fresh.fresh();
            used.insert(nv);
            m.emplace(v, Term::var(nv));
        }
        LinConstraint ext =
            LinConstraint::conj(map_constraint(c.constraint, m),
                                LinConstraint::make(std::move(extra)));
        std::optional<Atom> next;
        if (!c.body.empty()) next = map_atom(c.body[0], m);
        return {std::move(ext), std::move(next), std::move(used)};
    }
};

// Slot variables back to readable names: the first defining clause's head
// argument names where they exist and are unambiguous, single letters
// otherwise.
std::map<std::string, std::string> display_map(const ChcProgram& p,
                                               const std::string& pred,
                                               size_t arity) {
    std::vector<std::string> names(arity);
    std::set<std::string> used;
    auto defs = p.defining(pred);
    if (!defs.empty()) {
        const Atom& head = *p.clauses()[defs.front()].head;
        for (size_t j = 0; j < arity; ++j) {
            const Term& t = head.args[j];
            if (t.is_var() && t.name() != "_" && used.insert(t.name()).second)
                names[j] = t.name();
        }
    }
    for (size_t j = 0; j < arity; ++j) {
        if (!names[j].empty()) continue;
        std::string base(1, static_cast<char>('A' + j % 26));
        std::string candidate = base;
        for (size_t n = 1; !used.insert(candidate).second; ++n)
            candidate = base + std::to_string(n);
        names[j] = candidate;
    }
    std::map<std::string, std::string> out;
    for (size_t j = 0; j < arity; ++j) out.emplace(slot_var(j), names[j]);
    return out;
}

std::map<std::string, LinConstraint> cut_annotations(
    const std::set<std::string>& cut,
    const std::map<std::string, std::vector<LinConstraint>>& cert) {
    std::map<std::string, LinConstraint> ann;
    for (const auto& pred : cut) {
        LinConstraint a = LinConstraint::top();
        auto it = cert.find(pred);
        if (it != cert.end())
            for (const auto& i : it->second) a = LinConstraint::conj(a, i);
        ann.emplace(pred, simplify(a));
    }
    return ann;
}

std::map<std::string, LinConstraint> display_annotations(
    const ChcProgram& p, const std::map<std::string, LinConstraint>& ann) {
    std::map<std::string, LinConstraint> out;
    const auto& arities = p.predicates();
    for (const auto& [pred, a] : ann) {
        auto ar = arities.find(pred);
        size_t arity = ar == arities.end() ? 0 : ar->second;
        out.emplace(pred, rename_vars(a, display_map(p, pred, arity)));
    }
    return out;
}

}  // namespace

SolveResult solve_horn(const ChcProgram& p, const SolveOptions& opts) {
    check_shapes(p);
    SolveResult res;
    auto stop = std::chrono::steady_clock::now() + opts.deadline;
    size_t bound = opts.initial_unfold_bound > 0 ? opts.initial_unfold_bound : 1;
    for (; bound <= kMaxBound; bound *= 2) {
        Search search(p, bound, stop);
        if (search.run()) {
            res.verdict = Verdict::Unsafe;
            res.trace = std::move(search.answer);
            return res;
        }
        if (search.timed_out) return res;
        std::set<std::string> cut = cycle_cut(p, search.frozen_preds);
        std::map<std::string, LinConstraint> ann =
            cut_annotations(cut, search.cert);
        Completion completion(p, cut, ann);
        completion.run();
        if (search.frozen_preds.empty() || completion.ok) {
            // Either the whole derivation space was explored and refuted, or
            // the annotations survived the path-by-path check; both are
            // proofs. The certificate is only reported when it checks out.
            res.verdict = Verdict::Safe;
            if (completion.ok) {
                res.invariants = display_annotations(p, ann);
                res.checks = std::move(completion.out);
            }
            return res;
        }
        if (std::chrono::steady_clock::now() >= stop) return res;
    }
    return res;
}

}  // namespace hornver
