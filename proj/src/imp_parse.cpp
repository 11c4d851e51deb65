#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hornver/imp.hpp"

namespace hornver {

AExpr AExpr::var(std::string n) {
    AExpr e;
    e.kind = Kind::Var;
    e.name = std::move(n);
    return e;
}
AExpr AExpr::lit(Rat v) {
    AExpr e;
    e.kind = Kind::Lit;
    e.value = std::move(v);
    return e;
}
AExpr AExpr::bin(Kind k, AExpr l, AExpr r) {
    AExpr e;
    e.kind = k;
    e.args.push_back(std::move(l));
    e.args.push_back(std::move(r));
    return e;
}

BExpr BExpr::nondet() {
    BExpr b;
    b.kind = Kind::Nondet;
    return b;
}
BExpr BExpr::cmp_of(Kind k, AExpr l, AExpr r) {
    BExpr b;
    b.kind = k;
    b.cmp.push_back(std::move(l));
    b.cmp.push_back(std::move(r));
    return b;
}
BExpr BExpr::conj(BExpr l, BExpr r) {
    BExpr b;
    b.kind = Kind::And;
    b.sub.push_back(std::move(l));
    b.sub.push_back(std::move(r));
    return b;
}

namespace {

struct Lexer {
    const std::string& text;
    size_t i = 0;
    int line = 1, col = 1;

    explicit Lexer(const std::string& t) : text(t) { skip(); }

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "line " << line << ", col " << col << ": " << msg;
        throw ParseError(os.str());
    }

    void bump() {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++i;
    }

    void skip() {
        while (i < text.size()) {
            if (std::isspace(static_cast<unsigned char>(text[i]))) {
                bump();
            } else if (text.compare(i, 2, "//") == 0) {
                while (i < text.size() && text[i] != '\n') bump();
            } else {
                break;
            }
        }
    }

    bool done() const { return i >= text.size(); }
    char peek() const { return done() ? '\0' : text[i]; }
    bool peek2(const char* two) const { return text.compare(i, 2, two) == 0; }

    bool try_punct(const std::string& s) {
        if (text.compare(i, s.size(), s) != 0) return false;
        for (size_t k = 0; k < s.size(); ++k) bump();
        skip();
        return true;
    }
    void punct(const std::string& s) {
        if (!try_punct(s)) fail("expected '" + s + "'");
    }

    bool at_ident() const {
        return std::isalpha(static_cast<unsigned char>(peek())) ||
               peek() == '_';
    }
    std::string ident() {
        if (!at_ident()) fail("expected an identifier");
        size_t j = i;
        while (j < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[j])) ||
                text[j] == '_'))
            ++j;
        std::string s = text.substr(i, j - i);
        while (i < j) bump();
        skip();
        return s;
    }
    bool try_keyword(const char* kw) {
        size_t n = std::strlen(kw);
        if (text.compare(i, n, kw) != 0) return false;
        char after = i + n < text.size() ? text[i + n] : '\0';
        if (std::isalnum(static_cast<unsigned char>(after)) || after == '_')
            return false;
        for (size_t k = 0; k < n; ++k) bump();
        skip();
        return true;
    }

    Rat number() {
        if (!std::isdigit(static_cast<unsigned char>(peek())))
            fail("expected an integer literal");
        size_t j = i;
        while (j < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[j])))
            ++j;
        std::string digits = text.substr(i, j - i);
        while (i < j) bump();
        skip();
        return Rat(mpz_class(digits));
    }
};

struct ImpParser {
    Lexer lx;
    explicit ImpParser(const std::string& text) : lx(text) {}

    ImpProgram program() {
        ImpProgram p;
        while (lx.try_keyword("int")) {
            std::string name = lx.ident();
            for (const auto& [existing, ignored] : p.decls) {
                (void)ignored;
                if (existing == name)
                    lx.fail("variable '" + name + "' declared twice");
            }
            lx.punct("=");
            bool neg = lx.try_punct("-");
            Rat v = lx.number();
            if (neg) v = -v;
            lx.punct(";");
            p.decls.emplace_back(std::move(name), std::move(v));
        }
        if (p.decls.empty()) lx.fail("a program starts with declarations");
        while (!lx.try_keyword("assert")) {
            if (lx.done()) lx.fail("expected a statement or the assertion");
            p.body.push_back(stmt(p));
        }
        lx.punct("(");
        p.assertion = bexpr(p);
        lx.punct(")");
        lx.punct(";");
        lx.skip();
        if (!lx.done()) lx.fail("the assertion must end the program");
        return p;
    }

    void check_declared(const ImpProgram& p, const std::string& name) {
        for (const auto& [v, ignored] : p.decls) {
            (void)ignored;
            if (v == name) return;
        }
        lx.fail("undeclared variable '" + name + "'");
    }

    Stmt stmt(const ImpProgram& p) {
        Stmt s;
        if (lx.try_keyword("if")) {
            s.kind = Stmt::Kind::If;
            lx.punct("(");
            s.guard.push_back(bexpr(p));
            lx.punct(")");
            s.then_branch = block(p);
            if (!lx.try_keyword("else")) lx.fail("'if' requires an 'else'");
            s.else_branch = block(p);
            return s;
        }
        if (lx.try_keyword("while")) {
            s.kind = Stmt::Kind::While;
            lx.punct("(");
            s.guard.push_back(bexpr(p));
            lx.punct(")");
            s.then_branch = block(p);
            return s;
        }
        s.kind = Stmt::Kind::Assign;
        s.target = lx.ident();
        check_declared(p, s.target);
        lx.punct("=");
        s.expr.push_back(aexpr(p));
        lx.punct(";");
        return s;
    }

    std::vector<Stmt> block(const ImpProgram& p) {
        lx.punct("{");
        std::vector<Stmt> out;
        while (!lx.try_punct("}")) {
            if (lx.done()) lx.fail("unterminated block");
            out.push_back(stmt(p));
        }
        return out;
    }

    AExpr aexpr(const ImpProgram& p) {
        AExpr e = afactor(p);
        while (true) {
            if (lx.try_punct("+")) {
                e = AExpr::bin(AExpr::Kind::Add, std::move(e), afactor(p));
            } else if (lx.try_punct("-")) {
                e = AExpr::bin(AExpr::Kind::Sub, std::move(e), afactor(p));
            } else {
                return e;
            }
        }
    }

    AExpr afactor(const ImpProgram& p) {
        AExpr e = aprimary(p);
        while (lx.peek() == '*') {
            lx.punct("*");
            AExpr r = aprimary(p);
            bool linear = e.kind == AExpr::Kind::Lit || r.kind == AExpr::Kind::Lit;
            if (!linear)
                lx.fail("nonlinear multiplication: one factor must be a literal");
            e = AExpr::bin(AExpr::Kind::Mul, std::move(e), std::move(r));
        }
        return e;
    }

    AExpr aprimary(const ImpProgram& p) {
        if (lx.try_punct("(")) {
            AExpr e = aexpr(p);
            lx.punct(")");
            return e;
        }
        if (lx.try_punct("-")) return AExpr::bin(AExpr::Kind::Sub,
                                                 AExpr::lit(Rat(0)),
                                                 aprimary(p));
        if (std::isdigit(static_cast<unsigned char>(lx.peek())))
            return AExpr::lit(lx.number());
        std::string name = lx.ident();
        check_declared(p, name);
        return AExpr::var(std::move(name));
    }

    BExpr bexpr(const ImpProgram& p) {
        BExpr b = bprimary(p);
        while (lx.try_punct("&&")) b = BExpr::conj(std::move(b), bprimary(p));
        return b;
    }

    BExpr bprimary(const ImpProgram& p) {
        if (lx.try_punct("*")) return BExpr::nondet();
        if (lx.peek() == '(') {
            // Either a parenthesized guard or a parenthesized arithmetic
            // left-hand side; try the guard reading first.
            size_t save_i = lx.i;
            int save_line = lx.line, save_col = lx.col;
            lx.punct("(");
            try {
                BExpr inner = bexpr(p);
                lx.punct(")");
                return inner;
            } catch (const ParseError&) {
                lx.i = save_i;
                lx.line = save_line;
                lx.col = save_col;
            }
        }
        AExpr l = aexpr(p);
        BExpr::Kind k;
        if (lx.try_punct("<="))
            k = BExpr::Kind::Leq;
        else if (lx.try_punct(">="))
            k = BExpr::Kind::Geq;
        else if (lx.try_punct("=="))
            k = BExpr::Kind::Eq;
        else if (lx.try_punct("!="))
            lx.fail("'!=' is not supported; phrase the guard positively");
        else if (lx.try_punct("<"))
            k = BExpr::Kind::Less;
        else if (lx.try_punct(">"))
            k = BExpr::Kind::Gtr;
        else
            lx.fail("expected a comparison operator");
        return BExpr::cmp_of(k, std::move(l), aexpr(p));
    }
};

}  // namespace

ImpProgram parse_imp(const std::string& text) {
    return ImpParser(text).program();
}

ImpProgram parse_imp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_imp(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace hornver
