#include <cassert>

#include "hornver/imp.hpp"

namespace hornver {
namespace {

// The generated clauses use '_'-prefixed metavariables; source variables map
// to their name with the first letter upcased, and identifiers must start
// with a lowercase letter, so the two can never collide.

std::string env_var(const std::string& source_name) {
    std::string s = source_name;
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

Term int_of(const Term& inner) { return Term::compound("int", {inner}); }

Term enc_aexpr(const AExpr& e) {
    switch (e.kind) {
        case AExpr::Kind::Var: return int_of(Term::sym(e.name));
        case AExpr::Kind::Lit: return int_of(Term::num(e.value));
        case AExpr::Kind::Add:
            return Term::compound(
                "plus", {enc_aexpr(e.args[0]), enc_aexpr(e.args[1])});
        case AExpr::Kind::Sub:
            return Term::compound(
                "minus", {enc_aexpr(e.args[0]), enc_aexpr(e.args[1])});
        case AExpr::Kind::Mul:
            return Term::compound(
                "times", {enc_aexpr(e.args[0]), enc_aexpr(e.args[1])});
    }
    assert(false);
    return Term::nil();
}

const char* cmp_functor(BExpr::Kind k) {
    switch (k) {
        case BExpr::Kind::Less: return "less";
        case BExpr::Kind::Leq: return "leq";
        case BExpr::Kind::Gtr: return "gtr";
        case BExpr::Kind::Geq: return "geq";
        case BExpr::Kind::Eq: return "eq";
        default: assert(false); return "";
    }
}

Term enc_bexpr(const BExpr& b) {
    switch (b.kind) {
        case BExpr::Kind::Nondet: return Term::sym("nondet");
        case BExpr::Kind::And:
            return Term::compound(
                "and", {enc_bexpr(b.sub[0]), enc_bexpr(b.sub[1])});
        default:
            return Term::compound(
                cmp_functor(b.kind),
                {enc_aexpr(b.cmp[0]), enc_aexpr(b.cmp[1])});
    }
}

struct Encoder {
    const ImpProgram& prog;
    std::vector<Clause> clauses;

    // What the program actually uses, to keep the semantic clauses minimal.
    std::set<std::string> arith_ops;
    std::set<Rat> literals;
    std::vector<std::pair<bool, Rat>> mul_shapes;  // (literal on left, value)
    std::set<BExpr::Kind> cmp_kinds;
    bool uses_nondet = false;
    bool uses_and = false;

    int next_label = 1;
    std::vector<std::pair<Term, Term>> at_facts;       // (label, command)
    std::vector<std::pair<Term, Term>> nextlab_facts;  // (label, successor)

    explicit Encoder(const ImpProgram& p) : prog(p) {}

    Term halt_label() const { return Term::sym("h"); }

    Term env_pattern() const {
        std::vector<Term> pairs;
        for (const auto& [name, ignored] : prog.decls) {
            (void)ignored;
            pairs.push_back(Term::list(
                {int_of(Term::sym(name)), Term::var(env_var(name))}));
        }
        return Term::list(std::move(pairs));
    }

    void scan_aexpr(const AExpr& e) {
        switch (e.kind) {
            case AExpr::Kind::Var: break;
            case AExpr::Kind::Lit: literals.insert(e.value); break;
            case AExpr::Kind::Add:
            case AExpr::Kind::Sub:
                arith_ops.insert(e.kind == AExpr::Kind::Add ? "plus"
                                                            : "minus");
                scan_aexpr(e.args[0]);
                scan_aexpr(e.args[1]);
                break;
            case AExpr::Kind::Mul: {
                bool lit_left = e.args[0].kind == AExpr::Kind::Lit;
                const AExpr& lit = lit_left ? e.args[0] : e.args[1];
                assert(lit.kind == AExpr::Kind::Lit);
                mul_shapes.emplace_back(lit_left, lit.value);
                scan_aexpr(e.args[0]);
                scan_aexpr(e.args[1]);
                break;
            }
        }
    }

    void scan_bexpr(const BExpr& b) {
        switch (b.kind) {
            case BExpr::Kind::Nondet: uses_nondet = true; break;
            case BExpr::Kind::And:
                uses_and = true;
                scan_bexpr(b.sub[0]);
                scan_bexpr(b.sub[1]);
                break;
            default:
                cmp_kinds.insert(b.kind);
                scan_aexpr(b.cmp[0]);
                scan_aexpr(b.cmp[1]);
        }
    }

    void scan_stmts(const std::vector<Stmt>& stmts) {
        for (const auto& s : stmts) {
            switch (s.kind) {
                case Stmt::Kind::Assign: scan_aexpr(s.expr[0]); break;
                case Stmt::Kind::If:
                    scan_bexpr(s.guard[0]);
                    scan_stmts(s.then_branch);
                    scan_stmts(s.else_branch);
                    break;
                case Stmt::Kind::While:
                    scan_bexpr(s.guard[0]);
                    scan_stmts(s.then_branch);
                    break;
            }
        }
    }

    // Assigns preorder labels and records at/nextlab facts. Returns the
    // entry label of the sequence (`succ` when it is empty).
    Term emit_stmts(const std::vector<Stmt>& stmts, const Term& succ) {
        if (stmts.empty()) return succ;
        std::vector<int> labels;
        for (size_t i = 0; i < stmts.size(); ++i)
            labels.push_back(next_label++);
        for (size_t i = 0; i < stmts.size(); ++i) {
            Term next =
                i + 1 < stmts.size() ? Term::num(labels[i + 1]) : succ;
            emit_stmt(stmts[i], labels[i], next);
        }
        return Term::num(labels[0]);
    }

    void emit_stmt(const Stmt& s, int label, const Term& succ) {
        Term lab = Term::num(label);
        switch (s.kind) {
            case Stmt::Kind::Assign: {
                Term cmd = Term::compound(
                    "asgn", {int_of(Term::sym(s.target)),
                             Term::compound("expr", {enc_aexpr(s.expr[0])})});
                at_facts.emplace_back(lab, cmd);
                nextlab_facts.emplace_back(lab, succ);
                break;
            }
            case Stmt::Kind::If: {
                // Branch entry labels are the labels of the branch bodies,
                // which follow this statement in preorder.
                size_t slot = at_facts.size();
                at_facts.emplace_back(lab, Term::nil());  // patched below
                Term then_entry = emit_stmts(s.then_branch, succ);
                Term else_entry = emit_stmts(s.else_branch, succ);
                at_facts[slot].second = Term::compound(
                    "ite", {enc_bexpr(s.guard[0]), then_entry, else_entry});
                break;
            }
            case Stmt::Kind::While: {
                size_t slot = at_facts.size();
                at_facts.emplace_back(lab, Term::nil());
                Term body_entry = emit_stmts(s.then_branch, lab);
                at_facts[slot].second = Term::compound(
                    "ite", {enc_bexpr(s.guard[0]), body_entry, succ});
                break;
            }
        }
    }

    void fact(Atom head) {
        clauses.push_back(
            Clause{std::move(head), LinConstraint::top(), {}});
    }
    void rule(Atom head, LinConstraint c, std::vector<Atom> body) {
        clauses.push_back(
            Clause{std::move(head), std::move(c), std::move(body)});
    }
    void goal(LinConstraint c, std::vector<Atom> body) {
        clauses.push_back(Clause{std::nullopt, std::move(c), std::move(body)});
    }

    static LinAtom diff_atom(const std::string& a, const std::string& b,
                             Rel rel, long bound) {
        return LinAtom({{a, Rat(1)}, {b, Rat(-1)}}, rel, Rat(bound));
    }

    // beval clauses for one comparison functor, positive and negated.
    void emit_cmp_semantics(BExpr::Kind k) {
        const std::string f = cmp_functor(k);
        Term e1 = Term::var("_E1"), e2 = Term::var("_E2");
        Term env = Term::var("_Env");
        Atom ev1{"eval", {e1, env, Term::var("_R1")}};
        Atom ev2{"eval", {e2, env, Term::var("_R2")}};
        Term pos_cmp = Term::compound(f, {e1, e2});
        Term neg_cmp = Term::compound("not", {pos_cmp});
        auto emit = [&](const Term& cmp_term, std::vector<LinAtom> atoms) {
            rule(Atom{"beval", {cmp_term, env}},
                 LinConstraint::make(std::move(atoms)), {ev1, ev2});
        };
        switch (k) {
            case BExpr::Kind::Less:
                emit(pos_cmp, {diff_atom("_R1", "_R2", Rel::Le, -1)});
                emit(neg_cmp, {diff_atom("_R2", "_R1", Rel::Le, 0)});
                break;
            case BExpr::Kind::Leq:
                emit(pos_cmp, {diff_atom("_R1", "_R2", Rel::Le, 0)});
                emit(neg_cmp, {diff_atom("_R2", "_R1", Rel::Le, -1)});
                break;
            case BExpr::Kind::Gtr:
                emit(pos_cmp, {diff_atom("_R2", "_R1", Rel::Le, -1)});
                emit(neg_cmp, {diff_atom("_R1", "_R2", Rel::Le, 0)});
                break;
            case BExpr::Kind::Geq:
                emit(pos_cmp, {diff_atom("_R2", "_R1", Rel::Le, 0)});
                emit(neg_cmp, {diff_atom("_R1", "_R2", Rel::Le, -1)});
                break;
            case BExpr::Kind::Eq:
                emit(pos_cmp, {diff_atom("_R1", "_R2", Rel::Eq, 0)});
                // The negation splits into two clauses.
                emit(neg_cmp, {diff_atom("_R1", "_R2", Rel::Le, -1)});
                emit(neg_cmp, {diff_atom("_R2", "_R1", Rel::Le, -1)});
                break;
            default: assert(false);
        }
    }

    ChcProgram run() {
        scan_stmts(prog.body);
        scan_bexpr(prog.assertion);

        Term entry = emit_stmts(prog.body, halt_label());
        at_facts.emplace_back(halt_label(), Term::sym("halt"));

        // Goal and reachability.
        Term x = Term::var("_X"), x1 = Term::var("_X1");
        goal(LinConstraint::top(),
             {Atom{"errorConf", {x}}, Atom{"reach", {x}}});
        rule(Atom{"reach", {x}}, LinConstraint::top(),
             {Atom{"initConf", {x}}});
        // reach before tr: each tr atom then fires with its source
        // configuration grounded, so the interpreter atoms (eval, beval,
        // update) always see concrete commands and terminate.
        rule(Atom{"reach", {x1}}, LinConstraint::top(),
             {Atom{"reach", {x}}, Atom{"tr", {x, x1}}});

        // Initial and error configurations.
        {
            std::vector<LinAtom> init;
            for (const auto& [name, value] : prog.decls)
                init.push_back(
                    LinAtom({{env_var(name), Rat(1)}}, Rel::Eq, value));
            Term c = Term::var("_C");
            rule(Atom{"initConf",
                      {Term::compound(
                          "cf", {Term::compound("cmd", {entry, c}),
                                 env_pattern()})}},
                 LinConstraint::make(std::move(init)),
                 {Atom{"at", {entry, c}}});
        }
        {
            Term env = Term::var("_Env");
            rule(Atom{"errorConf",
                      {Term::compound(
                          "cf",
                          {Term::compound("cmd",
                                          {halt_label(), Term::sym("halt")}),
                           env})}},
                 LinConstraint::top(),
                 {Atom{"beval",
                       {Term::compound("not", {enc_bexpr(prog.assertion)}),
                        env}}});
        }

        // Transition rules.
        {
            Term l = Term::var("_L"), l1 = Term::var("_L1"),
                 l2 = Term::var("_L2");
            Term env = Term::var("_Env"), env1 = Term::var("_Env1");
            Term c = Term::var("_C"), e = Term::var("_E"), b = Term::var("_B");
            Term xv = Term::var("_V"), r = Term::var("_R");
            auto cf = [](const Term& lab, const Term& cmd, const Term& en) {
                return Term::compound(
                    "cf", {Term::compound("cmd", {lab, cmd}), en});
            };
            rule(Atom{"tr",
                      {cf(l,
                          Term::compound(
                              "asgn", {xv, Term::compound("expr", {e})}),
                          env),
                       cf(l1, c, env1)}},
                 LinConstraint::top(),
                 {Atom{"eval", {e, env, r}},
                  Atom{"update", {xv, r, env, env1}},
                  Atom{"nextlab", {l, l1}}, Atom{"at", {l1, c}}});
            Term ite = Term::compound("ite", {b, l1, l2});
            rule(Atom{"tr", {cf(l, ite, env), cf(l1, c, env)}},
                 LinConstraint::top(),
                 {Atom{"beval", {b, env}}, Atom{"at", {l1, c}}});
            rule(Atom{"tr", {cf(l, ite, env), cf(l2, c, env)}},
                 LinConstraint::top(),
                 {Atom{"beval", {Term::compound("not", {b}), env}},
                  Atom{"at", {l2, c}}});
            rule(Atom{"tr", {cf(l, Term::compound("goto", {l1}), env),
                             cf(l1, c, env)}},
                 LinConstraint::top(), {Atom{"at", {l1, c}}});
        }

        // Program text.
        for (const auto& [lab, cmd] : at_facts) fact(Atom{"at", {lab, cmd}});
        for (const auto& [lab, succ] : nextlab_facts)
            fact(Atom{"nextlab", {lab, succ}});

        // Expression semantics, restricted to what occurs.
        {
            Term env = env_pattern();
            for (const auto& [name, ignored] : prog.decls) {
                (void)ignored;
                fact(Atom{"eval", {int_of(Term::sym(name)), env,
                                   Term::var(env_var(name))}});
            }
            for (const auto& k : literals)
                fact(Atom{"eval", {int_of(Term::num(k)), Term::var("_Env"),
                                   Term::num(k)}});
            for (const auto& op : arith_ops) {
                Term e1 = Term::var("_E1"), e2 = Term::var("_E2");
                Term r = Term::var("_R"), r1 = Term::var("_R1"),
                     r2 = Term::var("_R2");
                Rat sign = op == "plus" ? Rat(1) : Rat(-1);
                rule(Atom{"eval",
                          {Term::compound(op, {e1, e2}), Term::var("_Env"),
                           r}},
                     LinConstraint::make({LinAtom({{"_R", Rat(1)},
                                                   {"_R1", Rat(-1)},
                                                   {"_R2", -sign}},
                                                  Rel::Eq, Rat(0))}),
                     {Atom{"eval", {e1, Term::var("_Env"), r1}},
                      Atom{"eval", {e2, Term::var("_Env"), r2}}});
            }
            std::set<std::pair<bool, std::string>> seen_muls;
            for (const auto& [lit_left, value] : mul_shapes) {
                if (!seen_muls.insert({lit_left, rat_str(value)}).second)
                    continue;
                Term e = Term::var("_E");
                Term r = Term::var("_R"), r1 = Term::var("_R1");
                Term lit = int_of(Term::num(value));
                Term shape = lit_left ? Term::compound("times", {lit, e})
                                      : Term::compound("times", {e, lit});
                rule(Atom{"eval", {shape, Term::var("_Env"), r}},
                     LinConstraint::make({LinAtom(
                         {{"_R", Rat(1)}, {"_R1", -value}}, Rel::Eq,
                         Rat(0))}),
                     {Atom{"eval", {e, Term::var("_Env"), r1}}});
            }
        }

        // Guard semantics.
        if (uses_nondet) {
            rule(Atom{"beval", {Term::sym("nondet"), Term::var("_Env")}},
                 LinConstraint::make(
                     {LinAtom({{"_B", Rat(-1)}}, Rel::Le, Rat(-1))}),
                 {});
            rule(Atom{"beval",
                      {Term::compound("not", {Term::sym("nondet")}),
                       Term::var("_Env")}},
                 LinConstraint::make(
                     {LinAtom({{"_B", Rat(1)}}, Rel::Le, Rat(0))}),
                 {});
        }
        if (uses_and) {
            Term b1 = Term::var("_B1"), b2 = Term::var("_B2");
            Term env = Term::var("_Env");
            Term conj = Term::compound("and", {b1, b2});
            rule(Atom{"beval", {conj, env}}, LinConstraint::top(),
                 {Atom{"beval", {b1, env}}, Atom{"beval", {b2, env}}});
            rule(Atom{"beval", {Term::compound("not", {conj}), env}},
                 LinConstraint::top(),
                 {Atom{"beval", {Term::compound("not", {b1}), env}}});
            rule(Atom{"beval", {Term::compound("not", {conj}), env}},
                 LinConstraint::top(),
                 {Atom{"beval", {Term::compound("not", {b2}), env}}});
        }
        for (const auto& k : cmp_kinds) emit_cmp_semantics(k);

        // update/4, one fact per variable.
        for (size_t i = 0; i < prog.decls.size(); ++i) {
            std::vector<Term> before, after;
            for (size_t j = 0; j < prog.decls.size(); ++j) {
                Term key = int_of(Term::sym(prog.decls[j].first));
                Term kept = Term::var(env_var(prog.decls[j].first));
                if (j == i) {
                    before.push_back(Term::list({key, Term::var("_Old")}));
                    after.push_back(Term::list({key, Term::var("_R")}));
                } else {
                    before.push_back(Term::list({key, kept}));
                    after.push_back(Term::list({key, kept}));
                }
            }
            fact(Atom{"update",
                      {int_of(Term::sym(prog.decls[i].first)),
                       Term::var("_R"), Term::list(std::move(before)),
                       Term::list(std::move(after))}});
        }

        return ChcProgram::of(std::move(clauses));
    }
};

}  // namespace

ChcProgram encode_imp(const ImpProgram& p) { return Encoder(p).run(); }

}  // namespace hornver
