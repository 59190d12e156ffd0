#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include <asl/parser.hpp>
#include <asl/satcheck.hpp>

#include "support/three_partition.hpp"

using namespace asl;

namespace {

SymbolicHeap H(const std::string& text) { return parse_heap(text); }

SymbolicHeap random_heap(std::mt19937_64& rng) {
    auto val = [&](Val n) { return std::uniform_int_distribution<Val>(0, n)(rng); };
    auto term = [&]() {
        switch (val(3)) {
        case 0: return Term(val(2));
        case 1: return Term::var(val(1) ? "b" : "a");
        default: return Term::var(val(1) ? "b" : "a") + Term(val(2));
        }
    };
    SymbolicHeap h;
    size_t npure = val(2);
    for (size_t i = 0; i < npure; ++i) {
        Rel r = std::array{Rel::Eq, Rel::Ne, Rel::Le, Rel::Lt}[val(3)];
        h.pure.push_back({term(), r, term()});
    }
    size_t nspat = 1 + val(2);
    for (size_t i = 0; i < nspat; ++i) {
        if (val(2) == 0)
            h.spatial.push_back(PointsTo{term(), term()});
        else
            h.spatial.push_back(ArraySeg{term(), term()});
    }
    if (val(3) == 0) h.bound.push_back(val(1) ? "b" : "a");
    return h;
}

} // namespace

TEST_CASE("is_sat decides gamma satisfiability", "[satcheck]") {
    CHECK(is_sat(H("y < x : arr(x, y)")).status == Tri::Unsat);
    CHECK(is_sat(H("arr(x, y)")).status == Tri::Sat);
    CHECK(is_sat(H("x |-> y * x |-> z")).status == Tri::Unsat);
    CHECK(is_sat(H("EX z . z |-> 0")).status == Tri::Sat);
    CHECK(is_sat(H("emp")).status == Tri::Sat);

    CHECK_FALSE(is_sat(H("arr(x, x)")).witness.has_value());
    CHECK(is_sat(H("arr(x, x)"), true).witness.has_value());
    CHECK_FALSE(is_sat(H("y < x : arr(x, y)"), true).witness.has_value());
}

TEST_CASE("3-partition reductions decide instance solvability", "[satcheck]") {
    SECTION("single solvable group") {
        REQUIRE(three_partition_exists(12, {4, 4, 4}));
        auto A = three_part_heap(12, {4, 4, 4});
        CHECK(is_two_variable_form(A));
        auto r = is_sat(A, true);
        REQUIRE(r.status == Tri::Sat);
        REQUIRE(r.witness.has_value());
        CHECK(holds(r.witness->first, r.witness->second, A));
    }
    SECTION("two groups, no triple sums to the bound") {
        REQUIRE_FALSE(three_partition_exists(15, {4, 4, 4, 6, 6, 6}));
        auto A = three_part_heap(15, {4, 4, 4, 6, 6, 6});
        CHECK(is_two_variable_form(A));
        CHECK(is_sat(A).status == Tri::Unsat);
    }
    SECTION("odd bound still packs") {
        REQUIRE(three_partition_exists(13, {4, 4, 5}));
        CHECK(is_sat(three_part_heap(13, {4, 4, 5})).status == Tri::Sat);
    }
}

TEST_CASE("witness models satisfy the heap", "[satcheck]") {
    SECTION("array witness is minimized") {
        auto w = witness_model(H("arr(x, x)"));
        REQUIRE(w.has_value());
        CHECK(w->first.m == std::map<std::string, Val>{{"x", 0}});
        CHECK(w->second.cells == std::map<Val, Val>{{0, 0}});
    }
    SECTION("points-to contents come from the stack") {
        auto w = witness_model(H("x |-> y"));
        REQUIRE(w.has_value());
        CHECK(w->first.m == std::map<std::string, Val>{{"x", 0}, {"y", 0}});
        CHECK(w->second.cells == std::map<Val, Val>{{0, 0}});
    }
    SECTION("quantified variables are instantiated and dropped") {
        auto a = H("EX z . z = x+1 : z |-> 5");
        auto w = witness_model(a);
        REQUIRE(w.has_value());
        CHECK(w->first.m == std::map<std::string, Val>{{"x", 0}});
        CHECK(w->second.cells == std::map<Val, Val>{{1, 5}});
        CHECK(holds(w->first, w->second, a, Bounds{1, 0}));
    }
    SECTION("unsatisfiable heap yields none") {
        CHECK_FALSE(witness_model(H("x < x : emp")).has_value());
    }
    SECTION("doubling chains escape small-model bounds") {
        // d0 = 1, each arr(d_i, 2 d_i) must end before the next begins, so
        // the ninth delimiter exceeds 2^8 and so does the top address.
        SymbolicHeap A;
        auto dv = [](size_t i) { return "d" + std::to_string(i); };
        A.pure.push_back(eq_atom(Term::var(dv(0)), Term(1)));
        for (size_t i = 0; i < 8; ++i)
            A.pure.push_back(lt_atom(Term::var(dv(i)), Term::var(dv(i + 1))));
        for (size_t i = 0; i <= 8; ++i)
            A.spatial.push_back(ArraySeg{Term::var(dv(i)), Term::var(dv(i), 2)});
        auto w = witness_model(A);
        REQUIRE(w.has_value());
        CHECK(holds(w->first, w->second, A));
        CHECK(w->second.cells.rbegin()->first > 256);
    }
}

TEST_CASE("sat agrees with the bounded oracle", "[satcheck][property]") {
    std::mt19937_64 rng(20240820);
    int sat_seen = 0, oracle_seen = 0;
    for (int iter = 0; iter < 500; ++iter) {
        auto A = random_heap(rng);
        auto r = is_sat(A);
        auto m = oracle_find_model(A, Bounds{6, 2});
        INFO("A = " << to_string(A));
        if (r.status == Tri::Unsat) REQUIRE_FALSE(m.has_value());
        if (m.has_value()) REQUIRE(r.status == Tri::Sat);
        sat_seen += r.status == Tri::Sat;
        oracle_seen += m.has_value();
    }
    // the generator must exercise both outcomes, and the small bound must
    // leave the oracle finding most of the satisfiable heaps
    CHECK(sat_seen > 100);
    CHECK(500 - sat_seen > 50);
    CHECK(oracle_seen > sat_seen / 2);
}
