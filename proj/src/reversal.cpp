#include "hornver/reversal.hpp"

#include <string>
#include <vector>

namespace hornver {

namespace {

std::string flip_name(const std::string& pred) {
    const std::string suffix = "_rev";
    if (pred.size() > suffix.size() &&
        pred.compare(pred.size() - suffix.size(), suffix.size(), suffix) == 0)
        return pred.substr(0, pred.size() - suffix.size());
    return pred + suffix;
}

}  // namespace

SpecResult reverse_program(const SpecResult& in) {
    std::vector<Clause> out;
    out.reserve(in.program.size());
    for (const Clause& c : in.program.clauses()) {
        if (c.body.size() > 1)
            throw ShapeError("reversal requires linear clauses; a clause has " +
                             std::to_string(c.body.size()) + " body atoms");
        Clause r;
        r.constraint = c.constraint;
        if (!c.body.empty())
            r.head = Atom{flip_name(c.body[0].pred), c.body[0].args};
        if (c.head) r.body.push_back(Atom{flip_name(c.head->pred), c.head->args});
        out.push_back(std::move(r));
    }
    SpecResult r;
    r.program = ChcProgram::of(std::move(out));
    r.weights = in.weights;
    return r;
}

SpecResult reverse_program(const ChcProgram& p) {
    return reverse_program(as_spec(p));
}

}  // namespace hornver
