#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include <asl/smtlib.hpp>

using namespace asl;

namespace {

Term V(const std::string& n, Val c = 1) { return Term::var(n, c); }

std::string write_stub(const std::string& name, const std::string& body) {
    auto dir = std::filesystem::temp_directory_path() / "asl-smt-stubs";
    std::filesystem::create_directories(dir);
    auto path = dir / name;
    {
        std::ofstream f(path);
        f << "#!/bin/sh\n" << body;
    }
    std::filesystem::permissions(path, std::filesystem::perms::owner_all);
    return path.string();
}

} // namespace

TEST_CASE("script emission is stable", "[smtlib]") {
    ArithSentence s;
    s.exists = {"x", "y"};
    s.body = bx_and({bx_atom(le_atom(V("x", 2) + Term(1), V("y"))),
                     bx_or({bx_atom(eq_atom(V("y"), Term(4))), bx_atom(ne_atom(V("x"), Term(0)))})});
    REQUIRE(to_smtlib(s) ==
            "(set-logic LIA)\n"
            "(declare-const x Int)\n"
            "(assert (>= x 0))\n"
            "(declare-const y Int)\n"
            "(assert (>= y 0))\n"
            "(assert (and (<= (+ (* 2 x) 1) y) (or (= y 4) (not (= x 0)))))\n"
            "(check-sat)\n"
            "(get-value (x y))\n");

    ArithSentence q;
    q.exists = {"x"};
    q.forall = {"z", "w"};
    q.body = bx_atom(le_atom(V("x"), V("z") + V("w")));
    REQUIRE(to_smtlib(q) ==
            "(set-logic LIA)\n"
            "(declare-const x Int)\n"
            "(assert (>= x 0))\n"
            "(assert (forall ((z Int) (w Int)) (=> (and (>= z 0) (>= w 0)) (<= x (+ w z)))))\n"
            "(check-sat)\n"
            "(get-value (x))\n");
}

TEST_CASE("client parses solver verdicts and models", "[smtlib]") {
    ArithSentence s;
    s.exists = {"x"};
    s.body = bx_atom(le_atom(V("x") + Term(1), V("x")));
    auto unsat = write_stub("unsat.sh", "cat >/dev/null\necho unsat\n");
    REQUIRE(smt_backend_check(s, unsat).status == Tri::Unsat);

    auto sat = write_stub("sat.sh", "cat >/dev/null\necho sat\necho '((x 2))'\n");
    ArithSentence s2;
    s2.exists = {"x"};
    s2.body = bx_atom(le_atom(Term(2), V("x")));
    auto r = smt_backend_check(s2, sat);
    REQUIRE(r.status == Tri::Sat);
    REQUIRE(r.model == Valuation{{"x", 2}});

    auto unknown = write_stub("unknown.sh", "cat >/dev/null\necho unknown\n");
    REQUIRE(smt_backend_check(s2, unknown).status == Tri::Unknown);

    auto multiline = write_stub("multi.sh", "cat >/dev/null\necho sat\nprintf '((x 2)\\n (y 11))\\n'\n");
    ArithSentence s3;
    s3.exists = {"x", "y"};
    s3.body = bx_atom(le_atom(V("x"), V("y")));
    auto r3 = smt_backend_check(s3, multiline);
    REQUIRE(r3.status == Tri::Sat);
    REQUIRE(r3.model == Valuation{{"x", 2}, {"y", 11}});
}

TEST_CASE("client surfaces protocol failures and timeouts", "[smtlib]") {
    ArithSentence s;
    s.exists = {"x"};
    s.body = bx_atom(le_atom(Term(0), V("x")));

    auto garbage = write_stub("garbage.sh", "cat >/dev/null\necho flurble\n");
    REQUIRE_THROWS_AS(smt_backend_check(s, garbage), backend_error);

    auto silent = write_stub("silent.sh", "cat >/dev/null\n");
    REQUIRE_THROWS_AS(smt_backend_check(s, silent), backend_error);

    auto negative = write_stub("negative.sh", "cat >/dev/null\necho sat\necho '((x (- 1)))'\n");
    REQUIRE_THROWS_AS(smt_backend_check(s, negative), backend_error);

    auto missing = write_stub("missing.sh", "cat >/dev/null\necho sat\necho '((y 0))'\n");
    REQUIRE_THROWS_AS(smt_backend_check(s, missing), backend_error);

    REQUIRE_THROWS_AS(smt_backend_check(s, "/nonexistent/solver/binary"), backend_error);

    auto slow = write_stub("slow.sh", "cat >/dev/null\nsleep 5\necho sat\n");
    auto r = smt_backend_check(s, slow, 150);
    REQUIRE(r.status == Tri::Unknown);
}

// With a real solver configured, the builtin engine and the external backend
// must agree on seeded random existential sentences.
TEST_CASE("differential agreement with an external solver", "[smtlib][.external]") {
    const char* cmd = std::getenv("ASL_SMT_SOLVER");
    if (!cmd || !*cmd) SKIP("set ASL_SMT_SOLVER to run the differential suite");
    std::mt19937_64 rng(424242);
    auto rnd = [&](unsigned n) { return static_cast<unsigned>(rng() % n); };
    std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f", "g", "h"};
    for (int iter = 0; iter < 1000; ++iter) {
        std::vector<BoolExprPtr> gs;
        unsigned ng = 1 + rnd(4);
        for (unsigned i = 0; i < ng; ++i) {
            std::vector<BoolExprPtr> leaves;
            unsigned nl = 1 + rnd(3);
            for (unsigned l = 0; l < nl; ++l) {
                auto t = [&]() {
                    Term t(rnd(11));
                    for (unsigned v = rnd(3); v > 0; --v) t += Term::var(pool[rnd(8)], 1 + rnd(10));
                    return t;
                };
                leaves.push_back(bx_atom(LinAtom{t(), std::array{Rel::Eq, Rel::Ne, Rel::Le, Rel::Lt}[rnd(4)], t()}));
            }
            gs.push_back(i % 2 ? bx_or(std::move(leaves)) : bx_and(std::move(leaves)));
        }
        ArithSentence s;
        s.exists = pool;
        s.body = bx_and(std::move(gs));
        Solver builtin;
        auto r1 = builtin.check_exists(s.body, s.exists);
        auto r2 = smt_backend_check(s, cmd);
        if (r2.status == Tri::Unknown) continue;
        REQUIRE(r1.status == r2.status);
    }
}
