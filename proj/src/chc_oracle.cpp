#include "hornver/chc.hpp"
#include "hornver/polyhedra.hpp"

namespace hornver {
namespace {

// Depth-first SLD search. Stops at the first answer; otherwise records
// whether any branch was cut by the depth bound.
struct Search {
    const ChcProgram& p;
    FreshVars fresh;
    bool cut = false;
    std::optional<DerivationTrace> answer;

    explicit Search(const ChcProgram& prog)
        : p(prog), fresh(fresh_vars_for(prog)) {}

    bool run(std::vector<Atom> goals, LinConstraint path,
             std::vector<size_t> used, size_t budget) {
        if (goals.empty()) {
            DerivationTrace t;
            t.clause_indices = std::move(used);
            t.model = *sample_model(path);  // the path is never FALSE here
            t.path = std::move(path);
            answer = std::move(t);
            return true;
        }
        Atom selected = goals.front();
        for (size_t idx : p.defining(selected.pred)) {
            Clause c = rename_clause(p.clauses()[idx], fresh);
            auto mgu = unify(c.head->args, selected.args);
            if (!mgu) continue;
            auto new_path = substitute(path, *mgu);
            if (!new_path) continue;
            auto clause_part = substitute(c.constraint, *mgu);
            if (!clause_part) continue;
            LinConstraint conj = LinConstraint::conj(*new_path, *clause_part);
            if (conj.is_false()) continue;
            if (budget == 0) {
                // A viable resolution exists but the bound forbids taking it.
                cut = true;
                continue;
            }
            std::vector<Atom> rest;
            for (const auto& a : c.body) rest.push_back(mgu->apply(a));
            for (size_t i = 1; i < goals.size(); ++i)
                rest.push_back(mgu->apply(goals[i]));
            std::vector<size_t> used2 = used;
            used2.push_back(idx);
            if (run(std::move(rest), std::move(conj), std::move(used2),
                    budget - 1))
                return true;
        }
        return false;
    }
};

}  // namespace

OracleResult bounded_oracle(const ChcProgram& p, size_t max_depth) {
    Search s(p);
    for (size_t gi : p.goal_clauses()) {
        const Clause& g = p.clauses()[gi];
        if (s.run(g.body, g.constraint, {gi}, max_depth))
            return {OracleOutcome::FoundAnswer, std::move(s.answer)};
    }
    return {s.cut ? OracleOutcome::NoAnswerWithinDepth
                  : OracleOutcome::ExhaustedAll,
            std::nullopt};
}

}  // namespace hornver
