#include <cctype>
#include <fstream>
#include <sstream>

#include "hornver/chc.hpp"

namespace hornver {
namespace {

struct Tok {
    enum Kind { Ident, Var, Num, Punct, End };
    Kind kind;
    std::string text;
    int line;
    int col;
};

[[noreturn]] void fail(const Tok& at, const std::string& msg) {
    std::ostringstream os;
    os << "line " << at.line << ", col " << at.col << ": " << msg;
    throw ParseError(os.str());
}

std::vector<Tok> tokenize(const std::string& text) {
    std::vector<Tok> toks;
    int line = 1, col = 1;
    size_t i = 0;
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (text[i + k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        i += n;
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '%') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Tok t{Tok::Punct, "", line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) ||
                    text[j] == '_'))
                ++j;
            t.text = text.substr(i, j - i);
            t.kind = (std::islower(static_cast<unsigned char>(c))) ? Tok::Ident
                                                                   : Tok::Var;
            advance(j - i);
            toks.push_back(t);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < text.size() &&
                   std::isdigit(static_cast<unsigned char>(text[j])))
                ++j;
            t.kind = Tok::Num;
            t.text = text.substr(i, j - i);
            advance(j - i);
            toks.push_back(t);
            continue;
        }
        auto two = text.substr(i, 2);
        if (two == ":-" || two == "=<" || two == ">=") {
            t.text = two;
            advance(2);
            toks.push_back(t);
            continue;
        }
        if (std::string("()[],.=<>+-*/").find(c) != std::string::npos) {
            t.text = std::string(1, c);
            advance(1);
            toks.push_back(t);
            continue;
        }
        fail(t, std::string("unexpected character '") + c + "'");
    }
    toks.push_back(Tok{Tok::End, "", line, col});
    return toks;
}

bool is_relop(const std::string& s) {
    return s == "=" || s == "=<" || s == ">=" || s == "<" || s == ">";
}

class Parser {
public:
    explicit Parser(std::string text) : toks_(tokenize(text)) {
        for (const auto& t : toks_)
            if (t.kind == Tok::Var) var_names_.insert(t.text);
    }

    ChcProgram program() {
        std::vector<Clause> clauses;
        while (peek().kind != Tok::End) clauses.push_back(clause());
        try {
            return ChcProgram::of(std::move(clauses));
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what());
        }
    }

private:
    std::vector<Tok> toks_;
    size_t pos_ = 0;
    std::set<std::string> var_names_;
    size_t anon_counter_ = 0;

    const Tok& peek(size_t ahead = 0) const {
        size_t k = pos_ + ahead;
        return k < toks_.size() ? toks_[k] : toks_.back();
    }
    const Tok& take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    bool at_punct(const std::string& s) const {
        return peek().kind == Tok::Punct && peek().text == s;
    }
    void expect_punct(const std::string& s) {
        if (!at_punct(s)) fail(peek(), "expected '" + s + "'");
        take();
    }

    std::string fresh_anon() {
        // '_' stands for a different variable at each occurrence; pick names
        // no explicit variable in the input uses.
        std::string name;
        do {
            name = "_" + std::to_string(++anon_counter_);
        } while (var_names_.count(name));
        return name;
    }

    Term primary() {
        const Tok& t = peek();
        if (t.kind == Tok::Num) {
            take();
            if (at_punct("/")) {
                if (peek(1).kind != Tok::Num)
                    fail(peek(1), "expected an integer denominator");
                take();
                const Tok& den = take();
                if (den.text == "0") fail(den, "zero denominator");
                return Term::num(Rat(mpz_class(t.text), mpz_class(den.text)));
            }
            return Term::num(Rat(mpz_class(t.text)));
        }
        if (t.kind == Tok::Var) {
            take();
            return Term::var(t.text == "_" ? fresh_anon() : t.text);
        }
        if (t.kind == Tok::Ident) {
            take();
            if (at_punct("(")) {
                take();
                std::vector<Term> args;
                args.push_back(arith());
                while (at_punct(",")) {
                    take();
                    args.push_back(arith());
                }
                expect_punct(")");
                return Term::compound(t.text, std::move(args));
            }
            return Term::sym(t.text);
        }
        if (at_punct("(")) {
            take();
            Term inner = arith();
            expect_punct(")");
            return inner;
        }
        if (at_punct("[")) {
            take();
            std::vector<Term> items;
            if (!at_punct("]")) {
                items.push_back(arith());
                while (at_punct(",")) {
                    take();
                    items.push_back(arith());
                }
            }
            expect_punct("]");
            return Term::list(std::move(items));
        }
        fail(t, "expected a term");
    }

    Term unary() {
        if (at_punct("-")) {
            take();
            Term inner = unary();
            if (inner.is_num()) return Term::num(Rat(-inner.value()));
            return Term::compound("-", {inner});
        }
        return primary();
    }

    Term factor() {
        Term t = unary();
        while (at_punct("*")) {
            take();
            t = Term::compound("*", {t, unary()});
        }
        if (at_punct("/"))
            fail(peek(), "'/' is only allowed in rational literals");
        return t;
    }

    Term arith() {
        Term t = factor();
        while (at_punct("+") || at_punct("-")) {
            std::string op = take().text;
            t = Term::compound(op, {t, factor()});
        }
        return t;
    }

    LinExpr linexpr_of(const Term& t, const Tok& at) {
        auto e = term_to_linexpr(t);
        if (!e) fail(at, "constraint side is not a linear expression");
        return *e;
    }

    Atom atom_of(const Term& t, const Tok& at) {
        if (t.kind() == Term::Kind::Sym) return Atom{t.name(), {}};
        if (t.kind() == Term::Kind::Compound && !t.name().empty() &&
            std::islower(static_cast<unsigned char>(t.name()[0])))
            return Atom{t.name(), t.args()};
        fail(at, "expected a predicate atom");
    }

    // One body item: either a linear constraint (a relation tops the item)
    // or a predicate atom.
    void body_item(std::vector<LinAtom>& latoms, std::vector<Atom>& body) {
        const Tok& start = peek();
        Term lhs = arith();
        if (peek().kind == Tok::Punct && is_relop(peek().text)) {
            std::string rel = take().text;
            Term rhs = arith();
            LinExpr diff = linexpr_of(lhs, start);
            diff.sub(linexpr_of(rhs, start));
            // Strict comparisons tighten to the integer grid.
            if (rel == "=") {
                latoms.emplace_back(diff.coeffs, Rel::Eq, -diff.constant);
            } else if (rel == "=<") {
                latoms.emplace_back(diff.coeffs, Rel::Le, -diff.constant);
            } else if (rel == "<") {
                latoms.emplace_back(diff.coeffs, Rel::Le,
                                    Rat(-diff.constant - 1));
            } else {
                diff.scale(Rat(-1));
                Rat bound(-diff.constant);
                if (rel == ">") bound -= 1;
                latoms.emplace_back(diff.coeffs, Rel::Le, bound);
            }
            return;
        }
        Atom a = atom_of(lhs, start);
        if (a.pred == "unsafe")
            fail(start, "the goal marker cannot occur in a body");
        body.push_back(std::move(a));
    }

    Clause clause() {
        const Tok& start = peek();
        Term head_term = arith();
        if (peek().kind == Tok::Punct && is_relop(peek().text))
            fail(peek(), "a clause head must be a predicate atom");
        Atom head = atom_of(head_term, start);
        std::optional<Atom> head_opt;
        if (head.pred == "unsafe") {
            if (!head.args.empty())
                fail(start, "the goal marker takes no arguments");
        } else {
            head_opt = std::move(head);
        }
        std::vector<LinAtom> latoms;
        std::vector<Atom> body;
        if (at_punct(":-")) {
            take();
            body_item(latoms, body);
            while (at_punct(",")) {
                take();
                body_item(latoms, body);
            }
        }
        expect_punct(".");
        return Clause{std::move(head_opt), LinConstraint::make(latoms),
                      std::move(body)};
    }
};

}  // namespace

ChcProgram parse_chc(const std::string& text) {
    return Parser(text).program();
}

ChcProgram parse_chc_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_chc(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace hornver
