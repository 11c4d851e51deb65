#include <functional>

#include "doctest.h"
#include "hornver/term.hpp"
#include "support/oracles.hpp"

using namespace hornver;
using testsupport::match;

namespace {

Term V(const char* n) { return Term::var(n); }
Term N(long k) { return Term::num(k); }
Term S(const char* n) { return Term::sym(n); }

}  // namespace

TEST_CASE("rational parsing and printing") {
    CHECK(rat_parse("123").value() == Rat(123));
    CHECK(rat_parse("-7").value() == Rat(-7));
    CHECK(rat_parse("3/4").value() == rat(3, 4));
    CHECK(rat_parse("6/4").value() == rat(3, 2));
    CHECK(rat_parse("-6/4").value() == rat(-3, 2));
    CHECK(!rat_parse("").has_value());
    CHECK(!rat_parse("1/0").has_value());
    CHECK(!rat_parse("x").has_value());
    CHECK(!rat_parse("1.5").has_value());
    CHECK(!rat_parse("3/").has_value());
    CHECK(rat_str(Rat(5)) == "5");
    CHECK(rat_str(rat(-3, 2)) == "-3/2");
    CHECK(rat_is_int(Rat(4)));
    CHECK(!rat_is_int(rat(1, 2)));
}

TEST_CASE("term construction and printing") {
    Term t = Term::compound("f", {V("X"), N(3), S("a")});
    CHECK(t.str() == "f(X,3,a)");
    CHECK(t.vars() == std::set<std::string>{"X"});

    Term lst = Term::list({N(1), V("Y"), S("nil_sym")});
    CHECK(lst.str() == "[1,Y,nil_sym]");
    CHECK(Term::nil().str() == "[]");

    // An improper tail falls back to functor syntax.
    Term improper = Term::cons(N(1), V("T"));
    CHECK(improper.str() == ".(1,T)");

    Term env = Term::list({Term::list({Term::compound("int", {S("x")}), V("X")}),
                           Term::list({Term::compound("int", {S("y")}), V("Y")})});
    CHECK(env.str() == "[[int(x),X],[int(y),Y]]");
}

TEST_CASE("term equality distinguishes kinds") {
    CHECK(V("x") != S("x"));
    CHECK(N(0) != S("0"));
    CHECK(Term::compound("f", {N(1)}) != Term::compound("f", {N(1), N(1)}));
    CHECK(Term::compound("f", {N(1)}) == Term::compound("f", {N(1)}));
}

TEST_CASE("unification: basic success") {
    auto s = unify(Term::compound("f", {V("X"), S("b")}),
                   Term::compound("f", {S("a"), V("Y")}));
    REQUIRE(s.has_value());
    CHECK(s->apply(V("X")) == S("a"));
    CHECK(s->apply(V("Y")) == S("b"));
}

TEST_CASE("unification: occurs check") {
    CHECK(!unify(V("X"), Term::compound("f", {V("X")})).has_value());
    CHECK(!unify(Term::compound("f", {V("X"), Term::compound("g", {V("X")})}),
                 Term::compound("f", {V("Y"), V("Y")}))
               .has_value());
}

TEST_CASE("unification: clash on repeated variable") {
    CHECK(!unify(Term::compound("f", {V("X"), V("X")}),
                 Term::compound("f", {N(1), N(2)}))
               .has_value());
    auto s = unify(Term::compound("f", {V("X"), V("X")}),
                   Term::compound("f", {N(1), N(1)}));
    REQUIRE(s.has_value());
    CHECK(s->apply(V("X")) == N(1));
}

TEST_CASE("unifier is idempotent and unifies") {
    Term a = Term::compound(
        "p", {V("X"), Term::compound("g", {V("Y")}), V("Z")});
    Term b = Term::compound(
        "p", {Term::compound("g", {V("Y")}), V("X"), N(4)});
    auto s = unify(a, b);
    REQUIRE(s.has_value());
    CHECK(s->apply(a) == s->apply(b));
    // Idempotence: no bound variable occurs in any right-hand side.
    for (const auto& [v, t] : s->bindings()) {
        (void)v;
        for (const auto& [w, u] : s->bindings()) {
            (void)u;
            CHECK(!t.contains_var(w));
        }
    }
}

TEST_CASE("unifier is most general") {
    // u = {X -> h(c), Y -> c} also unifies the pair below; the computed mgu
    // must subsume it via one-way matching (sides renamed apart by
    // construction: the instance uses no variables).
    Term a = Term::compound("f", {V("X"), Term::compound("h", {V("Y")})});
    Term b = Term::compound("f", {Term::compound("h", {V("Y")}), V("X")});
    auto m = unify(a, b);
    REQUIRE(m.has_value());
    Substitution u;
    REQUIRE(u.bind("X", Term::compound("h", {S("c")})));
    REQUIRE(u.bind("Y", S("c")));
    CHECK(u.apply(a) == u.apply(b));
    CHECK(match(m->apply(a), u.apply(a)).has_value());
}

TEST_CASE("vector unification requires equal arity") {
    CHECK(!unify(std::vector<Term>{V("X")}, std::vector<Term>{N(1), N(2)})
               .has_value());
    auto s = unify(std::vector<Term>{V("X"), V("Y")},
                   std::vector<Term>{N(1), V("X")});
    REQUIRE(s.has_value());
    CHECK(s->apply(V("Y")) == N(1));
}

TEST_CASE("substitution bind keeps bindings resolved") {
    Substitution s;
    REQUIRE(s.bind("X", V("Y")));
    REQUIRE(s.bind("Y", N(3)));
    CHECK(s.apply(V("X")) == N(3));
    CHECK(s.apply(V("Y")) == N(3));
    // Self-binding is a no-op, not a cycle.
    Substitution t;
    REQUIRE(t.bind("X", V("X")));
    CHECK(t.empty());
}

TEST_CASE("atoms") {
    Atom a{"p", {V("X"), Term::compound("f", {V("Y"), N(2)})}};
    CHECK(a.str() == "p(X,f(Y,2))");
    CHECK(a.vars() == std::set<std::string>{"X", "Y"});
    Atom zero{"unsafe", {}};
    CHECK(zero.str() == "unsafe");
}

TEST_CASE("fresh variable supply") {
    FreshVars fv(7);
    CHECK(fv.fresh() == "V7");
    CHECK(fv.fresh() == "V8");
    CHECK(fv.next() == 9);
}

TEST_CASE("random round trips: unify after renaming apart") {
    testsupport::Rng rng(0xae1f);
    for (int iter = 0; iter < 200; ++iter) {
        // Build a random term over X0..X3, then a renamed copy over Y0..Y3.
        // The two must unify, and the mgu must map both to a common instance.
        std::function<Term(int)> gen = [&](int depth) -> Term {
            long pick = rng.range(0, depth >= 3 ? 2 : 3);
            switch (pick) {
                case 0:
                    return Term::var("X" + std::to_string(rng.range(0, 3)));
                case 1:
                    return Term::num(rng.range(-5, 5));
                case 2:
                    return Term::sym(rng.chance(1, 2) ? "a" : "b");
                default: {
                    std::vector<Term> args;
                    long n = rng.range(1, 3);
                    for (long i = 0; i < n; ++i) args.push_back(gen(depth + 1));
                    return Term::compound(rng.chance(1, 2) ? "f" : "g",
                                          std::move(args));
                }
            }
        };
        Term a = gen(0);
        Substitution rename;
        for (int i = 0; i < 4; ++i)
            REQUIRE(rename.bind("X" + std::to_string(i),
                                Term::var("Y" + std::to_string(i))));
        Term b = rename.apply(a);
        auto s = unify(a, b);
        REQUIRE(s.has_value());
        CHECK(s->apply(a) == s->apply(b));
    }
}
