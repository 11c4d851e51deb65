#include <optional>
#include <stdexcept>

#include "doctest.h"
#include "hornver/imp.hpp"
#include "hornver/polyhedra.hpp"
#include "hornver/specializer.hpp"
#include "support/oracles.hpp"

using namespace hornver;
using testsupport::Rng;

namespace {

std::string corpus(const char* name) {
    return std::string(CORPUS_DIR) + "/" + name;
}

LinConstraint ctx(std::vector<LinAtom> atoms) {
    return LinConstraint::make(std::move(atoms));
}

LinAtom eq(const std::string& v, long k) {
    return LinAtom({{v, Rat(1)}}, Rel::Eq, Rat(k));
}

LinAtom ge(const std::string& v, long k) {
    return LinAtom({{v, Rat(-1)}}, Rel::Le, Rat(-k));
}

/// Weight sum of the first answer the bounded search finds, scanning
/// budgets upward so the trace is depth-minimal.
std::optional<long> minimal_answer_weight(const SpecResult& r, size_t cap,
                                          std::vector<size_t>* trace = nullptr) {
    for (size_t b = 1; b <= cap; ++b) {
        auto o = bounded_oracle(r.program, b);
        if (o.outcome == OracleOutcome::FoundAnswer) {
            long s = 0;
            for (size_t ci : o.trace->clause_indices) s += r.weights[ci];
            if (trace) *trace = o.trace->clause_indices;
            return s;
        }
        if (o.outcome == OracleOutcome::ExhaustedAll) return std::nullopt;
    }
    return std::nullopt;
}

bool exec_ever_violates(const ImpProgram& p) {
    for (unsigned m = 0; m < 16; ++m) {
        std::vector<bool> choices;
        for (int b = 0; b < 4; ++b) choices.push_back((m >> b) & 1);
        ExecResult r = exec_imp(p, choices);
        REQUIRE(r.status != ExecStatus::OutOfSteps);
        REQUIRE(r.status != ExecStatus::OutOfChoices);
        if (r.status == ExecStatus::AssertViolated) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("unfolding a body atom resolves it against each defining clause") {
    ChcProgram p = parse_chc(
        "unsafe :- X >= 3, p(X).\n"
        "p(X) :- X =< 5, q(X, Y).\n"
        "q(A, B) :- A = 4, r(B).\n"
        "q(A, B) :- A >= 1, B = 0.\n"
        "r(B) :- B = 9.\n");
    FreshVars fresh = fresh_vars_for(p);

    auto rs = unfold(p.clauses()[1], 0, p, fresh);
    REQUIRE(rs.size() == 2);
    CHECK(rs[0].head->pred == "p");
    REQUIRE(rs[0].body.size() == 1);
    CHECK(rs[0].body[0].pred == "r");
    CHECK(equivalent(rs[0].constraint, ctx({eq("X", 4)})));
    CHECK(rs[1].body.empty());
    CHECK(equivalent(rs[1].constraint,
                     ctx({ge("X", 1), LinAtom({{"X", Rat(1)}}, Rel::Le, Rat(5)),
                          eq("Y", 0)})));

    auto gs = unfold(p.clauses()[0], 0, p, fresh);
    REQUIRE(gs.size() == 1);  // the X =< 5 branch collapses against X >= 3
    CHECK(gs[0].is_goal());
    REQUIRE(gs[0].body.size() == 1);
    CHECK(gs[0].body[0].pred == "q");

    ChcProgram clash = parse_chc("p(X) :- X =< 5, q(X).\nq(A) :- A >= 7.\n");
    FreshVars f2 = fresh_vars_for(clash);
    CHECK(unfold(clash.clauses()[0], 0, clash, f2).empty());

    ChcProgram undef = parse_chc("p(X) :- q(X).\n");
    FreshVars f3 = fresh_vars_for(undef);
    CHECK(unfold(undef.clauses()[0], 0, undef, f3).empty());
}

TEST_CASE("the loop program reduces to its transition relation") {
    ChcProgram vc = encode_imp(parse_imp_file(corpus("fig1.imp")));
    SpecResult r = specialize_remove(vc);
    CHECK(emit_chc(r.program) ==
          "unsafe :- X = 1, Y = 0, p0(X,Y).\n"
          "p0(X,Y) :- X-X1+Y = 0, Y-Y1 = -1, p0(X1,Y1).\n"
          "p0(X,Y) :- X-Y =< -1.\n");
    CHECK(r.weights == std::vector<long>{2, 20, 9});
    REQUIRE(r.defs.size() == 1);
    CHECK(r.defs[0].name == "p0");
    CHECK(r.defs[0].source_pred == "reach");
    CHECK(r.defs[0].vars == std::vector<std::string>{"X", "Y"});
    CHECK(r.defs[0].context.is_true());
    CHECK(r.defs[0].parent == -1);

    SpecResult again = specialize_remove(vc);
    CHECK(emit_chc(again.program) == emit_chc(r.program));
    CHECK(again.weights == r.weights);

    // The assertion holds on every run, so the only answers would need the
    // residual error clause, and the search keeps descending the loop.
    auto o = bounded_oracle(r.program, 50);
    CHECK(o.outcome == OracleOutcome::NoAnswerWithinDepth);
}

TEST_CASE("a violated assertion leaves an answer clause that replays exactly") {
    ChcProgram vc = encode_imp(parse_imp_file(corpus("fig1_unsafe.imp")));
    SpecResult r = specialize_remove(vc);
    CHECK(emit_chc(r.program) ==
          "unsafe :- X = 1, Y = 0, p0(X,Y).\n"
          "p0(X,Y) :- X-X1+Y = 0, Y-Y1 = -1, p0(X1,Y1).\n"
          "p0(X,Y) :- X-Y =< 0.\n");

    // One loop iteration reaches x = y = 1. The clause weights say how many
    // interpreter steps each specialized step stands for, so the shallowest
    // specialized answer pins the exact depth of the shallowest interpreter
    // derivation.
    std::vector<size_t> trace;
    auto sum = minimal_answer_weight(r, 8, &trace);
    REQUIRE(sum.has_value());
    CHECK(trace == std::vector<size_t>{0, 1, 2});
    CHECK(*sum == 31);
    CHECK(bounded_oracle(vc, 31).outcome == OracleOutcome::FoundAnswer);
    CHECK(bounded_oracle(vc, 30).outcome ==
          OracleOutcome::NoAnswerWithinDepth);

    // Propagating constraints preserves the correspondence.
    for (GenPolicy pol :
         {GenPolicy::PolyvariantWiden, GenPolicy::Monovariant}) {
        SpecResult pr = specialize_prop(r, pol);
        auto psum = minimal_answer_weight(pr, 8);
        REQUIRE(psum.has_value());
        CHECK(*psum == 31);
    }
}

TEST_CASE("loop-free programs are decided outright") {
    struct Case {
        const char* text;
    };
    const Case cases[] = {
        {"int x = 1; x = x + 1; assert(x <= 1);"},
        {"int x = 0; x = x + 1; assert(x >= 1);"},
        {"int x = 0; int y = 3;"
         " if (*) { x = x + 1; } else { x = x - 1; }"
         " if (x >= 1) { y = y - x; } else { y = y + x; }"
         " assert(y >= 2);"},
        {"int x = 0; int y = 3;"
         " if (*) { x = x + 1; } else { x = x - 1; }"
         " if (x >= 1) { y = y - x; } else { y = y + x; }"
         " assert(y >= 3);"},
        {"int x = 0; if (*) { x = 2; } else { x = 0; } assert(x <= 1);"},
        {"int a = 5; int b = 0; b = a - 2;"
         " if (b >= 3) { a = 1; } else { a = 0; } assert(a == 1);"},
        {"int x = 0;"
         " if (*) { if (*) { x = 3; } else { x = 1; } } else { x = 0; }"
         " assert(x <= 2);"},
    };
    for (const Case& c : cases) {
        CAPTURE(c.text);
        ImpProgram p = parse_imp(c.text);
        bool unsafe = exec_ever_violates(p);
        ChcProgram vc = encode_imp(p);
        SpecResult r = specialize_remove(vc);
        for (const auto& cl : r.program.clauses()) {
            CHECK(cl.is_goal());
            CHECK(cl.body.empty());
        }
        CHECK(syntactic_verdict(r.program) ==
              (unsafe ? Verdict::Unsafe : Verdict::Safe));
        SpecResult pr = specialize_prop(r, GenPolicy::PolyvariantWiden);
        CHECK(syntactic_verdict(pr.program) ==
              (unsafe ? Verdict::Unsafe : Verdict::Safe));
        if (unsafe) {
            long best = -1;
            for (size_t i = 0; i < r.program.size(); ++i)
                if (best < 0 || r.weights[i] < best) best = r.weights[i];
            CHECK(bounded_oracle(vc, static_cast<size_t>(best)).outcome ==
                  OracleOutcome::FoundAnswer);
            CHECK(bounded_oracle(vc, static_cast<size_t>(best) - 1).outcome ==
                  OracleOutcome::NoAnswerWithinDepth);
        }
    }

    ChcProgram det = encode_imp(parse_imp("int x = 1; x = x + 1; assert(x <= 1);"));
    SpecResult r = specialize_remove(det);
    CHECK(emit_chc(r.program) == "unsafe.\n");
    CHECK(r.weights == std::vector<long>{15});

    ChcProgram safe = encode_imp(parse_imp("int x = 0; x = x + 1; assert(x >= 1);"));
    CHECK(specialize_remove(safe).program.size() == 0);
}

TEST_CASE("inputs that do not use the reachability encoding are rejected") {
    CHECK_THROWS_WITH_AS(specialize_remove(parse_chc_file(corpus("fig1b.clp"))),
                         doctest::Contains("reachability encoding"),
                         std::invalid_argument);

    ChcProgram vc = encode_imp(parse_imp_file(corpus("fig1.imp")));

    std::vector<Clause> no_step;
    for (const auto& c : vc.clauses())
        if (!(c.head && c.head->pred == "reach" && c.body.size() == 2))
            no_step.push_back(c);
    CHECK_THROWS_AS(specialize_remove(ChcProgram::of(std::move(no_step))),
                    std::invalid_argument);

    std::vector<Clause> two_goals(vc.clauses());
    two_goals.push_back(vc.clauses()[0]);
    CHECK_THROWS_WITH_AS(
        specialize_remove(ChcProgram::of(std::move(two_goals))),
        doctest::Contains("one goal"), std::invalid_argument);
}

TEST_CASE("contexts propagate and widen up to the loop invariant") {
    ChcProgram vc = encode_imp(parse_imp_file(corpus("fig1.imp")));
    SpecResult rem = specialize_remove(vc);
    SpecResult r = specialize_prop(rem, GenPolicy::PolyvariantWiden);
    CHECK(emit_chc(r.program) ==
          "unsafe :- X = 1, Y = 0, p0(X,Y).\n"
          "p0(X,Y) :- X = 1, X-X1+Y = 0, Y = 0, Y-Y1 = -1, p1(X1,Y1).\n"
          "p1(X,Y) :- X = 1, X-X1+Y = 0, Y >= 0, Y-Y1 = -1, p2(X1,Y1).\n"
          "p1(X,Y) :- X = 1, X-Y =< -1.\n"
          "p2(X,Y) :- X >= 1, X-X1+Y = 0, Y >= 0, Y-Y1 = -1, p2(X1,Y1).\n"
          "p2(X,Y) :- X >= 1, X-Y =< -1.\n");
    CHECK(r.weights == std::vector<long>{2, 20, 20, 9, 20, 9});
    REQUIRE(r.defs.size() == 3);
    CHECK(equivalent(r.defs[0].context, ctx({eq("X", 1), eq("Y", 0)})));
    CHECK(equivalent(r.defs[1].context, ctx({eq("X", 1), ge("Y", 0)})));
    CHECK(equivalent(r.defs[2].context, ctx({ge("X", 1), ge("Y", 0)})));
    CHECK(r.defs[0].parent == -1);
    CHECK(r.defs[1].parent == 0);
    CHECK(r.defs[2].parent == 1);
    for (const auto& d : r.defs) CHECK(d.source_pred == "p0");
    CHECK(syntactic_verdict(r.program) == Verdict::Unknown);

    // Running propagation again starts from the already-specialized loop
    // entry, and this time widening keeps X >= Y, which kills the error
    // branch outright: the residual program is empty, meaning safe.
    SpecResult twice = specialize_prop(r, GenPolicy::PolyvariantWiden);
    CHECK(twice.program.size() == 0);
    CHECK(syntactic_verdict(twice.program) == Verdict::Safe);
}

TEST_CASE("a handwritten reachability system stabilizes to widened versions") {
    ChcProgram p = parse_chc_file(corpus("fig1b.clp"));
    SpecResult r = specialize_prop(p, GenPolicy::PolyvariantWiden);
    CHECK(emit_chc(r.program) ==
          "unsafe :- X = 1, Y = 0, p0(X,Y,C).\n"
          "p0(X,Y,C) :- X = 1, Y = 0, p1(X,Y,C1).\n"
          "p1(X,Y,C) :- C >= 1, X = 1, X-X1+Y = 0, Y = 0, Y-Y1 = -1, "
          "p2(X1,Y1,C).\n"
          "p2(X,Y,C) :- X = 1, Y >= 0, p3(X,Y,C1).\n"
          "p3(X,Y,C) :- C >= 1, X = 1, X-X1+Y = 0, Y >= 0, Y-Y1 = -1, "
          "p4(X1,Y1,C).\n"
          "p3(X,Y,C) :- C =< 0, X = 1, X-Y =< -1.\n"
          "p4(X,Y,C) :- X >= 1, Y >= 0, p5(X,Y,C1).\n"
          "p5(X,Y,C) :- C >= 1, X >= 1, X-X1+Y = 0, Y >= 0, Y-Y1 = -1, "
          "p4(X1,Y1,C).\n"
          "p5(X,Y,C) :- C =< 0, X >= 1, X-Y =< -1.\n");
    CHECK(r.weights == std::vector<long>{1, 1, 1, 1, 1, 3, 1, 1, 3});
    REQUIRE(r.defs.size() == 6);
    CHECK(equivalent(r.defs[4].context, ctx({ge("X", 1), ge("Y", 0)})));
    CHECK(equivalent(r.defs[5].context, ctx({ge("X", 1), ge("Y", 0)})));
    CHECK(r.defs[4].vars == std::vector<std::string>{"X", "Y", "C"});
    CHECK(syntactic_verdict(r.program) == Verdict::Unknown);

    SpecResult again = specialize_prop(p, GenPolicy::PolyvariantWiden);
    CHECK(emit_chc(again.program) == emit_chc(r.program));
}

TEST_CASE("monovariant generalization keeps one version per predicate") {
    ChcProgram p = parse_chc_file(corpus("fig1b.clp"));
    SpecResult r = specialize_prop(p, GenPolicy::Monovariant);
    CHECK(emit_chc(r.program) ==
          "unsafe :- X = 1, Y = 0, p0(X,Y,C).\n"
          "p0(X,Y,C) :- X >= 1, Y >= 0, p1(X,Y,C1).\n"
          "p1(X,Y,C) :- C >= 1, X >= 1, X-X1+Y = 0, Y >= 0, Y-Y1 = -1, "
          "p0(X1,Y1,C).\n"
          "p1(X,Y,C) :- C =< 0, X >= 1, X-Y =< -1.\n");
    REQUIRE(r.defs.size() == 2);
    CHECK(r.defs[0].source_pred == "new3");
    CHECK(r.defs[1].source_pred == "new4");
    CHECK(equivalent(r.defs[0].context, ctx({ge("X", 1), ge("Y", 0)})));
    CHECK(equivalent(r.defs[1].context, ctx({ge("X", 1), ge("Y", 0)})));
}

TEST_CASE("syntactic verdicts read off the residual program") {
    CHECK(syntactic_verdict(parse_chc("unsafe :- X = 0.\n")) ==
          Verdict::Unsafe);
    CHECK(syntactic_verdict(parse_chc("p(X) :- X = 1.\n")) == Verdict::Safe);
    CHECK(syntactic_verdict(parse_chc("unsafe :- p(X).\n")) == Verdict::Safe);
    CHECK(syntactic_verdict(parse_chc(
              "unsafe :- p(X).\np(X) :- q(X).\n")) == Verdict::Safe);
    CHECK(syntactic_verdict(parse_chc(
              "unsafe :- p(X).\np(X) :- p(X).\n")) == Verdict::Safe);
    CHECK(syntactic_verdict(parse_chc(
              "unsafe :- p(X).\np(X) :- X = 2.\n")) == Verdict::Unknown);
    CHECK(syntactic_verdict(parse_chc(
              "unsafe :- p(X).\nunsafe :- X = 1.\np(X) :- X = 2.\n")) ==
          Verdict::Unsafe);
}

TEST_CASE("nonlinear or structured inputs are rejected") {
    CHECK_THROWS_WITH_AS(
        specialize_prop(parse_chc("unsafe :- p(X), q(X).\n"
                                  "p(X) :- X = 1.\nq(X) :- X = 1.\n"),
                        GenPolicy::PolyvariantWiden),
        doctest::Contains("linear"), ShapeError);
    CHECK_THROWS_WITH_AS(
        specialize_prop(parse_chc("unsafe :- p(X).\np(g(X)) :- X = 1.\n"),
                        GenPolicy::PolyvariantWiden),
        doctest::Contains("structured"), ShapeError);
}

TEST_CASE("random linear programs keep their answers through propagation") {
    for (uint64_t seed = 0; seed < 120; ++seed) {
        Rng rng(seed * 2654435761 + 17);
        bool dag = seed % 2 == 0;
        ChcProgram p = testsupport::random_linear_program(rng, dag);
        CAPTURE(seed);
        CAPTURE(emit_chc(p));
        for (GenPolicy pol :
             {GenPolicy::PolyvariantWiden, GenPolicy::Monovariant}) {
            SpecResult s = specialize_prop(p, pol);
            for (size_t i = 0; i < s.program.size(); ++i)
                CHECK(s.weights[i] >=
                      (s.program.clauses()[i].is_goal() ? 0 : 1));
            CHECK(emit_chc(specialize_prop(p, pol).program) ==
                  emit_chc(s.program));

            auto orig = bounded_oracle(p, 10);
            auto spec = bounded_oracle(s.program, 10);
            if (orig.outcome == OracleOutcome::FoundAnswer)
                CHECK(spec.outcome == OracleOutcome::FoundAnswer);
            if (spec.outcome == OracleOutcome::FoundAnswer) {
                long sum = 0;
                for (size_t ci : spec.trace->clause_indices)
                    sum += s.weights[ci];
                CHECK(bounded_oracle(p, static_cast<size_t>(sum)).outcome ==
                      OracleOutcome::FoundAnswer);
            }
            if (spec.outcome == OracleOutcome::ExhaustedAll)
                CHECK(orig.outcome != OracleOutcome::FoundAnswer);

            if (dag) {
                auto full = bounded_oracle(p, 64);
                REQUIRE(full.outcome != OracleOutcome::NoAnswerWithinDepth);
                CHECK(syntactic_verdict(s.program) ==
                      (full.outcome == OracleOutcome::FoundAnswer
                           ? Verdict::Unsafe
                           : Verdict::Safe));
            }
        }
    }
}
