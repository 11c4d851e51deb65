#include <sstream>

#include "hornver/chc.hpp"

namespace hornver {

std::string emit_clause(const Clause& c) {
    std::ostringstream os;
    os << (c.head ? c.head->str() : "unsafe");
    std::vector<std::string> items;
    if (c.constraint.is_false()) {
        items.push_back("1 =< 0");
    } else {
        for (const auto& a : c.constraint.atoms()) items.push_back(a.str());
    }
    for (const auto& a : c.body) items.push_back(a.str());
    if (!items.empty()) {
        os << " :- ";
        for (size_t i = 0; i < items.size(); ++i) {
            if (i) os << ", ";
            os << items[i];
        }
    }
    os << '.';
    return os.str();
}

std::string emit_chc(const ChcProgram& p) {
    std::ostringstream os;
    for (const auto& c : p.clauses()) os << emit_clause(c) << '\n';
    return os.str();
}

}  // namespace hornver
