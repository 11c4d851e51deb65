#include <cassert>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>

#include "hornver/specializer.hpp"
#include "spec_internal.hpp"

// Removes the interpreter layer from a front-end verification condition.
// The input describes reachability forward (reach holds of the initial
// configuration and is closed under tr), while the residual program is
// built from the equivalent co-reachability view
//
//     unsafe :- initConf(X), reachErr(X).
//     reachErr(X) :- errorConf(X).
//     reachErr(X) :- tr(X, X1), reachErr(X1).
//
// whose derivations match the input's one for one, step for step. Driving
// this view forward keeps every interpreter call (eval, beval, update, at,
// nextlab) applied to a concrete command, so unfolding them terminates and
// only reachErr calls at ground control locations remain. Each location
// becomes a new predicate over the environment values.

namespace hornver {
namespace {

[[noreturn]] void fail(const std::string& why) {
    throw std::invalid_argument(
        "interpreter removal needs the front end's reachability encoding (" +
        why + ")");
}

/// The items of a proper list term, nullopt for anything else.
std::optional<std::vector<Term>> list_items(const Term& t) {
    std::vector<Term> items;
    const Term* cur = &t;
    while (cur->is_compound() && cur->name() == "." &&
           cur->args().size() == 2) {
        items.push_back(cur->args()[0]);
        cur = &cur->args()[1];
    }
    if (!(cur->is_compound() && cur->name() == "[]" && cur->args().empty()))
        return std::nullopt;
    return items;
}

struct Removal {
    const ChcProgram& vc;
    size_t goal_idx = SIZE_MAX, base_idx = SIZE_MAX, step_idx = SIZE_MAX;
    std::vector<Term> env_keys;
    std::vector<std::string> display;
    ChcProgram interp;
    std::vector<long> interp_w;
    FreshVars fresh;
    std::function<bool(const std::string&)> unfoldable;

    struct Def {
        std::string name;
        Term lab;
        Term cmd;
        int parent;
        std::vector<spec::WClause> produced;
    };
    std::vector<Def> defs;
    std::map<std::string, int> index;
    std::deque<int> worklist;
    std::vector<spec::WClause> goal_out;

    explicit Removal(const ChcProgram& p) : vc(p), fresh(fresh_vars_for(p)) {
        unfoldable = [](const std::string& s) {
            return s != "reachErr" && s != "$head";
        };
    }

    void validate() {
        auto goals = vc.goal_clauses();
        if (goals.size() != 1) fail("expected exactly one goal clause");
        goal_idx = goals[0];
        const Clause& g = vc.clauses()[goal_idx];
        if (!g.constraint.is_true() || g.body.size() != 2 ||
            g.body[0].pred != "errorConf" || g.body[1].pred != "reach" ||
            g.body[0].args.size() != 1 || g.body[1].args.size() != 1 ||
            !g.body[0].args[0].is_var() ||
            !(g.body[0].args[0] == g.body[1].args[0]))
            fail("the goal must be errorConf(X), reach(X)");
        for (size_t ri : vc.defining("reach")) {
            const Clause& c = vc.clauses()[ri];
            if (!c.constraint.is_true() || c.head->args.size() != 1 ||
                !c.head->args[0].is_var())
                fail("the reach clauses must be plain rules over one variable");
            if (c.body.size() == 1 && c.body[0].pred == "initConf" &&
                c.body[0].args.size() == 1 &&
                c.body[0].args[0] == c.head->args[0] && base_idx == SIZE_MAX) {
                base_idx = ri;
            } else if (c.body.size() == 2 && c.body[0].pred == "reach" &&
                       c.body[0].args.size() == 1 &&
                       c.body[0].args[0].is_var() &&
                       c.body[1].pred == "tr" && c.body[1].args.size() == 2 &&
                       c.body[1].args[0] == c.body[0].args[0] &&
                       c.body[1].args[1] == c.head->args[0] &&
                       !(c.head->args[0] == c.body[0].args[0]) &&
                       step_idx == SIZE_MAX) {
                step_idx = ri;
            } else {
                fail("reach must consist of an initConf clause and a tr step");
            }
        }
        if (base_idx == SIZE_MAX || step_idx == SIZE_MAX)
            fail("reach must consist of an initConf clause and a tr step");
        for (size_t i = 0; i < vc.size(); ++i) {
            if (i == base_idx || i == step_idx) continue;
            const Clause& c = vc.clauses()[i];
            if (c.head && c.head->pred == "reach")
                fail("reach is defined outside its two clauses");
            if (i == goal_idx) continue;
            for (const auto& a : c.body)
                if (a.pred == "reach")
                    fail("reach is called outside the goal");
        }
        for (const auto& [pred, arity] : vc.predicates()) {
            (void)arity;
            if (pred == "reachErr" || pred == "$head")
                fail("the name " + pred + " is reserved");
        }
        auto idefs = vc.defining("initConf");
        if (idefs.size() != 1) fail("initConf must have exactly one clause");
        const Clause& ic = vc.clauses()[idefs[0]];
        if (ic.head->args.size() != 1) fail("initConf must have one argument");
        const Term& cfg = ic.head->args[0];
        if (!(cfg.is_compound() && cfg.name() == "cf" &&
              cfg.args().size() == 2))
            fail("the initial configuration must be cf(cmd(L,C), Env)");
        auto items = list_items(cfg.args()[1]);
        if (!items) fail("the initial environment must be a proper list");
        std::set<std::string> seen;
        for (size_t j = 0; j < items->size(); ++j) {
            auto pair = list_items((*items)[j]);
            if (!pair || pair->size() != 2 || !(*pair)[1].is_var() ||
                !(*pair)[0].vars().empty())
                fail("environment entries must be [key, Var] with a ground "
                     "key");
            env_keys.push_back((*pair)[0]);
            std::string n = (*pair)[1].name();
            if (n[0] == '_' || seen.count(n)) n = spec::slot_letter(j);
            while (seen.count(n)) n += "x";
            seen.insert(n);
            display.push_back(n);
        }
    }

    void build_interp() {
        std::vector<Clause> rest;
        for (size_t i = 0; i < vc.size(); ++i)
            if (i != goal_idx && i != base_idx && i != step_idx)
                rest.push_back(vc.clauses()[i]);
        interp = ChcProgram::of(std::move(rest));
        interp_w.assign(interp.size(), 1);
    }

    /// The call atom for a driven configuration, creating a definition for
    /// its control location on first sight.
    Atom fold_cfg(const Term& cfg, int trigger) {
        if (!(cfg.is_compound() && cfg.name() == "cf" &&
              cfg.args().size() == 2))
            fail("a driven configuration is not cf(cmd(L,C), Env)");
        const Term& cmd = cfg.args()[0];
        if (!(cmd.is_compound() && cmd.name() == "cmd" &&
              cmd.args().size() == 2 && cmd.args()[0].vars().empty() &&
              cmd.args()[1].vars().empty()))
            fail("a driven control location is not ground");
        auto items = list_items(cfg.args()[1]);
        if (!items || items->size() != env_keys.size())
            fail("a driven environment does not match the declared "
                 "variables");
        std::vector<Term> args;
        for (size_t j = 0; j < items->size(); ++j) {
            auto pair = list_items((*items)[j]);
            if (!pair || pair->size() != 2 || !((*pair)[0] == env_keys[j]) ||
                !((*pair)[1].is_var() || (*pair)[1].is_num()))
                fail("a driven environment does not match the declared "
                     "variables");
            args.push_back((*pair)[1]);
        }
        std::string key = cmd.args()[0].str() + "|" + cmd.args()[1].str();
        auto it = index.find(key);
        int d;
        if (it != index.end()) {
            d = it->second;
        } else {
            if (defs.size() >= 4096)
                throw std::runtime_error(
                    "interpreter removal did not terminate");
            d = static_cast<int>(defs.size());
            index.emplace(key, d);
            defs.push_back({"rm" + std::to_string(d), cmd.args()[0],
                            cmd.args()[1], trigger, {}});
            worklist.push_back(d);
        }
        return Atom{defs[d].name, std::move(args)};
    }

    void drive_goal() {
        Term vf = Term::var(fresh.fresh());
        auto residues = spec::unfold_closure(
            LinConstraint::top(),
            {Atom{"initConf", {vf}}, Atom{"reachErr", {vf}}}, interp,
            interp_w, unfoldable, fresh);
        for (auto& r : residues) {
            assert(r.atoms.size() == 1 && r.atoms[0].pred == "reachErr");
            Clause out;
            out.constraint = r.constraint;
            out.body.push_back(fold_cfg(r.atoms[0].args[0], -1));
            goal_out.push_back({std::move(out), r.weight});
        }
    }

    // Drives one location: the error check here, and one transition
    // followed by the co-reachability call. Each branch pays one step for
    // the reachErr clause it stands for.
    void process_def(int d) {
        std::vector<Term> pv;
        std::vector<Term> env_items;
        for (size_t j = 0; j < env_keys.size(); ++j) {
            pv.push_back(Term::var(fresh.fresh()));
            env_items.push_back(Term::list({env_keys[j], pv[j]}));
        }
        Term cfg = Term::compound(
            "cf", {Term::compound("cmd", {defs[d].lab, defs[d].cmd}),
                   Term::list(std::move(env_items))});
        Atom marker{"$head", pv};
        auto residues = spec::unfold_closure(
            LinConstraint::top(), {marker, Atom{"errorConf", {cfg}}}, interp,
            interp_w, unfoldable, fresh);
        for (auto& r : residues) {
            assert(r.atoms.size() == 1 && r.atoms[0].pred == "$head");
            Clause out;
            out.head = Atom{defs[d].name, r.atoms[0].args};
            out.constraint = r.constraint;
            defs[d].produced.push_back({std::move(out), r.weight + 1});
        }
        Term vt = Term::var(fresh.fresh());
        residues = spec::unfold_closure(
            LinConstraint::top(),
            {marker, Atom{"tr", {cfg, vt}}, Atom{"reachErr", {vt}}}, interp,
            interp_w, unfoldable, fresh);
        for (auto& r : residues) {
            assert(r.atoms.size() == 2 && r.atoms[0].pred == "$head" &&
                   r.atoms[1].pred == "reachErr");
            Clause out;
            out.head = Atom{defs[d].name, r.atoms[0].args};
            out.constraint = r.constraint;
            out.body.push_back(fold_cfg(r.atoms[1].args[0], d));
            defs[d].produced.push_back({std::move(out), r.weight + 1});
        }
    }

    SpecResult run() {
        validate();
        build_interp();
        drive_goal();
        while (!worklist.empty()) {
            int d = worklist.front();
            worklist.pop_front();
            process_def(d);
        }
        std::vector<spec::WClause> cs = std::move(goal_out);
        for (auto& d : defs)
            for (auto& wc : d.produced) cs.push_back(std::move(wc));
        std::vector<SpecDefinition> exported;
        for (auto& d : defs)
            exported.push_back({d.name, "reach", display,
                                LinConstraint::top(), d.parent});
        return spec::finish(std::move(cs), std::move(exported),
                            {.inline_nonrecursive = true,
                             .compress_chains = true});
    }
};

}  // namespace

SpecResult specialize_remove(const ChcProgram& vc) {
    return Removal(vc).run();
}

}  // namespace hornver
