#include "hornver/chc.hpp"

#include <algorithm>
#include <sstream>

namespace hornver {

std::set<std::string> Clause::vars() const {
    std::set<std::string> out;
    if (head)
        for (const auto& t : head->args) t.collect_vars(out);
    for (const auto& v : constraint.vars()) out.insert(v);
    for (const auto& a : body)
        for (const auto& t : a.args) t.collect_vars(out);
    return out;
}

std::set<std::string> Clause::locals() const {
    std::set<std::string> out = vars();
    if (head)
        for (const auto& v : head->vars()) out.erase(v);
    return out;
}

std::string Clause::str() const { return emit_clause(*this); }

Clause rename_clause(const Clause& c, FreshVars& fresh) {
    Substitution renaming;
    for (const auto& v : c.vars()) {
        bool ok = renaming.bind(v, Term::var(fresh.fresh()));
        (void)ok;
    }
    Clause out;
    if (c.head) out.head = renaming.apply(*c.head);
    auto sub = substitute(c.constraint, renaming);
    out.constraint = *sub;  // renaming maps vars to vars, cannot fail
    for (const auto& a : c.body) out.body.push_back(renaming.apply(a));
    return out;
}

FreshVars fresh_vars_for(const ChcProgram& p) {
    unsigned long start = 0;
    for (const auto& c : p.clauses())
        for (const auto& v : c.vars()) {
            if (v.size() < 2 || v.size() > 11 || v[0] != 'V') continue;
            if (v.find_first_not_of("0123456789", 1) != std::string::npos)
                continue;
            start = std::max(start, std::stoul(v.substr(1)) + 1);
        }
    return FreshVars(start);
}

ChcProgram ChcProgram::of(std::vector<Clause> clauses) {
    ChcProgram p;
    for (auto& c : clauses) {
        if (c.constraint.is_false()) continue;
        p.clauses_.push_back(std::move(c));
    }
    for (const auto& c : p.clauses_) {
        auto note = [&p](const Atom& a) {
            auto [it, inserted] = p.arity_.emplace(a.pred, a.args.size());
            if (!inserted && it->second != a.args.size())
                throw std::invalid_argument(
                    "predicate " + a.pred + " used with arities " +
                    std::to_string(it->second) + " and " +
                    std::to_string(a.args.size()));
        };
        if (c.head) note(*c.head);
        for (const auto& a : c.body) note(a);
    }
    return p;
}

std::vector<size_t> ChcProgram::defining(const std::string& pred) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < clauses_.size(); ++i)
        if (clauses_[i].head && clauses_[i].head->pred == pred)
            out.push_back(i);
    return out;
}

std::vector<size_t> ChcProgram::goal_clauses() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < clauses_.size(); ++i)
        if (clauses_[i].is_goal()) out.push_back(i);
    return out;
}

std::set<std::string> ChcProgram::recursive_preds() const {
    // Tarjan over the head -> body-predicate graph; a predicate is recursive
    // when its component is nontrivial or it calls itself directly.
    std::map<std::string, std::set<std::string>> succ;
    for (const auto& c : clauses_) {
        if (!c.head) continue;
        for (const auto& a : c.body) succ[c.head->pred].insert(a.pred);
    }
    std::map<std::string, int> index, low;
    std::map<std::string, bool> on_stack;
    std::vector<std::string> stack;
    std::set<std::string> recursive;
    int counter = 0;

    struct Frame {
        std::string pred;
        std::set<std::string>::const_iterator next, end;
    };
    for (const auto& [root, ignored] : succ) {
        (void)ignored;
        if (index.count(root)) continue;
        std::vector<Frame> frames;
        auto open = [&](const std::string& v) {
            index[v] = low[v] = counter++;
            stack.push_back(v);
            on_stack[v] = true;
            const auto& s = succ[v];
            frames.push_back({v, s.begin(), s.end()});
        };
        open(root);
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next != f.end) {
                std::string w = *f.next++;
                if (!index.count(w)) {
                    open(w);
                } else if (on_stack[w]) {
                    low[f.pred] = std::min(low[f.pred], index[w]);
                }
                continue;
            }
            std::string v = f.pred;
            frames.pop_back();
            if (!frames.empty())
                low[frames.back().pred] =
                    std::min(low[frames.back().pred], low[v]);
            if (low[v] != index[v]) continue;
            std::vector<std::string> component;
            while (true) {
                std::string w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                component.push_back(w);
                if (w == v) break;
            }
            bool self_loop = succ[v].count(v) > 0;
            if (component.size() > 1 || self_loop)
                for (const auto& w : component) recursive.insert(w);
        }
    }
    return recursive;
}

std::set<std::string> ChcProgram::reachable_preds() const {
    std::set<std::string> seen;
    std::vector<std::string> work;
    for (size_t i : goal_clauses())
        for (const auto& a : clauses_[i].body)
            if (seen.insert(a.pred).second) work.push_back(a.pred);
    while (!work.empty()) {
        std::string pred = work.back();
        work.pop_back();
        for (size_t i : defining(pred))
            for (const auto& a : clauses_[i].body)
                if (seen.insert(a.pred).second) work.push_back(a.pred);
    }
    return seen;
}

std::set<std::string> ChcProgram::derivable_preds() const {
    std::set<std::string> derivable;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& c : clauses_) {
            if (!c.head || derivable.count(c.head->pred)) continue;
            bool all = true;
            for (const auto& a : c.body)
                if (!derivable.count(a.pred)) all = false;
            if (all) {
                derivable.insert(c.head->pred);
                changed = true;
            }
        }
    }
    return derivable;
}

std::string ChcProgram::str() const { return emit_chc(*this); }

std::string DerivationTrace::str() const {
    std::ostringstream os;
    os << "clauses";
    for (size_t i : clause_indices) os << ' ' << i;
    os << " | " << path.str();
    return os.str();
}

}  // namespace hornver
