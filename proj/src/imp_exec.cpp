#include <cassert>

#include "hornver/imp.hpp"

namespace hornver {
namespace {

struct Machine {
    const std::vector<bool>& choices;
    size_t max_steps;
    std::map<std::string, Rat> env;
    size_t steps = 0;
    size_t next_choice = 0;

    Rat eval(const AExpr& e) {
        switch (e.kind) {
            case AExpr::Kind::Var: return env.at(e.name);
            case AExpr::Kind::Lit: return e.value;
            case AExpr::Kind::Add: return eval(e.args[0]) + eval(e.args[1]);
            case AExpr::Kind::Sub: return eval(e.args[0]) - eval(e.args[1]);
            case AExpr::Kind::Mul: return eval(e.args[0]) * eval(e.args[1]);
        }
        assert(false);
        return Rat(0);
    }

    // nullopt when the choice sequence is exhausted.
    std::optional<bool> test(const BExpr& b) {
        switch (b.kind) {
            case BExpr::Kind::Nondet:
                if (next_choice >= choices.size()) return std::nullopt;
                return choices[next_choice++];
            case BExpr::Kind::And: {
                auto l = test(b.sub[0]);
                if (!l) return std::nullopt;
                // Both conjuncts always evaluate, so a nondet in the right
                // conjunct consumes its choice regardless of the left value.
                auto r = test(b.sub[1]);
                if (!r) return std::nullopt;
                return *l && *r;
            }
            case BExpr::Kind::Less: return eval(b.cmp[0]) < eval(b.cmp[1]);
            case BExpr::Kind::Leq: return eval(b.cmp[0]) <= eval(b.cmp[1]);
            case BExpr::Kind::Gtr: return eval(b.cmp[0]) > eval(b.cmp[1]);
            case BExpr::Kind::Geq: return eval(b.cmp[0]) >= eval(b.cmp[1]);
            case BExpr::Kind::Eq: return eval(b.cmp[0]) == eval(b.cmp[1]);
        }
        assert(false);
        return std::nullopt;
    }

    // Runs a statement list; returns nullopt on normal completion or the
    // terminating status.
    std::optional<ExecStatus> run(const std::vector<Stmt>& stmts) {
        for (const auto& s : stmts) {
            switch (s.kind) {
                case Stmt::Kind::Assign: {
                    if (++steps > max_steps) return ExecStatus::OutOfSteps;
                    env[s.target] = eval(s.expr[0]);
                    break;
                }
                case Stmt::Kind::If: {
                    if (++steps > max_steps) return ExecStatus::OutOfSteps;
                    auto g = test(s.guard[0]);
                    if (!g) return ExecStatus::OutOfChoices;
                    if (auto r = run(*g ? s.then_branch : s.else_branch))
                        return r;
                    break;
                }
                case Stmt::Kind::While: {
                    while (true) {
                        if (++steps > max_steps) return ExecStatus::OutOfSteps;
                        auto g = test(s.guard[0]);
                        if (!g) return ExecStatus::OutOfChoices;
                        if (!*g) break;
                        if (auto r = run(s.then_branch)) return r;
                    }
                    break;
                }
            }
        }
        return std::nullopt;
    }
};

}  // namespace

ExecResult exec_imp(const ImpProgram& p, const std::vector<bool>& choices,
                    size_t max_steps) {
    Machine m{choices, max_steps, {}, 0, 0};
    for (const auto& [name, value] : p.decls) m.env[name] = value;
    ExecResult out;
    if (auto stopped = m.run(p.body)) {
        out.status = *stopped;
    } else {
        auto holds = m.test(p.assertion);
        if (!holds)
            out.status = ExecStatus::OutOfChoices;
        else
            out.status = *holds ? ExecStatus::Halted
                                : ExecStatus::AssertViolated;
    }
    out.final_env = std::move(m.env);
    out.steps = m.steps;
    out.choices_used = m.next_choice;
    return out;
}

}  // namespace hornver
