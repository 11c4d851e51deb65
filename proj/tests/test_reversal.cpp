#include <optional>

#include "doctest.h"
#include "hornver/imp.hpp"
#include "hornver/reversal.hpp"
#include "hornver/specializer.hpp"
#include "support/oracles.hpp"

using namespace hornver;
using testsupport::Rng;

namespace {

std::string corpus(const char* name) {
    return std::string(CORPUS_DIR) + "/" + name;
}

std::optional<long> minimal_answer_weight(const SpecResult& r, size_t cap) {
    for (size_t b = 1; b <= cap; ++b) {
        auto o = bounded_oracle(r.program, b);
        if (o.outcome == OracleOutcome::FoundAnswer) {
            long s = 0;
            for (size_t ci : o.trace->clause_indices) s += r.weights[ci];
            return s;
        }
        if (o.outcome == OracleOutcome::ExhaustedAll) return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("reversal swaps queries with facts and transposes transitions") {
    ChcProgram p = parse_chc(
        "unsafe :- X >= 3, p(X).\n"
        "p(X) :- X =< 9, q(X, Y).\n"
        "q(A, B) :- A-B = 1.\n");
    SpecResult r = reverse_program(p);
    CHECK(emit_chc(r.program) ==
          "p_rev(X) :- X >= 3.\n"
          "q_rev(X,Y) :- X =< 9, p_rev(X).\n"
          "unsafe :- A-B = 1, q_rev(A,B).\n");
    CHECK(r.weights == std::vector<long>{0, 1, 1});
    CHECK(r.defs.empty());

    SpecResult back = reverse_program(r);
    CHECK(emit_chc(back.program) == emit_chc(p));
    CHECK(back.weights == r.weights);

    ChcProgram bare = parse_chc("unsafe :- X = 2.\n");
    CHECK(emit_chc(reverse_program(bare).program) == "unsafe :- X = 2.\n");

    CHECK(reverse_program(ChcProgram::of({})).program.size() == 0);

    CHECK_THROWS_WITH_AS(
        reverse_program(parse_chc("unsafe :- p(X), q(X).\n"
                                  "p(X) :- X = 1.\nq(X) :- X = 1.\n")),
        doctest::Contains("linear"), ShapeError);
}

TEST_CASE("a reversed derivation replays at the same interpreter depth") {
    ChcProgram vc = encode_imp(parse_imp_file(corpus("fig1_unsafe.imp")));
    SpecResult fwd = specialize_remove(vc);
    SpecResult bwd = reverse_program(fwd);
    CHECK(bwd.weights == fwd.weights);

    auto sum = minimal_answer_weight(bwd, 8);
    REQUIRE(sum.has_value());
    CHECK(*sum == 31);
    CHECK(bounded_oracle(vc, 31).outcome == OracleOutcome::FoundAnswer);

    ChcProgram safe_vc = encode_imp(parse_imp_file(corpus("fig1.imp")));
    SpecResult safe_bwd = reverse_program(specialize_remove(safe_vc));
    CHECK(bounded_oracle(safe_bwd.program, 40).outcome ==
          OracleOutcome::NoAnswerWithinDepth);

    // The pipeline propagates constraints on the reversed program in the
    // next round; that composition has to hold up.
    SpecResult prop = specialize_prop(safe_bwd, GenPolicy::PolyvariantWiden);
    CHECK(syntactic_verdict(prop.program) != Verdict::Unsafe);
    if (prop.program.size() > 0)
        CHECK(bounded_oracle(prop.program, 30).outcome ==
              OracleOutcome::NoAnswerWithinDepth);
}

TEST_CASE("reversal preserves bounded answers at every depth") {
    for (uint64_t seed = 0; seed < 80; ++seed) {
        Rng rng(seed * 977 + 5);
        ChcProgram p = testsupport::random_linear_program(rng, seed % 2 == 0);
        CAPTURE(seed);
        CAPTURE(emit_chc(p));
        SpecResult r = reverse_program(p);
        for (size_t d = 1; d <= 12; d += 3) {
            auto fwd = bounded_oracle(p, d);
            auto bwd = bounded_oracle(r.program, d);
            CHECK((fwd.outcome == OracleOutcome::FoundAnswer) ==
                  (bwd.outcome == OracleOutcome::FoundAnswer));
        }
    }
}
