#include "doctest.h"

#include <stdexcept>

#include <cmath>

#include "uecsp/formula.hpp"
#include "uecsp/leaf_removal.hpp"
#include "uecsp/linear_solver.hpp"

using namespace uecsp;

TEST_CASE("a tree peels to nothing and reconstructs") {
    // chain of 3-clauses sharing one variable each: no 2-core
    Formula f = Formula::parse_text(
        "2 7 3 3\n3 0:1 1:1 2:1 1\n3 2:1 3:1 4:1 0\n3 4:1 5:1 6:1 1\n");
    Formula original = f;
    CoreReport rep = leaf_remove(f, 3);
    CHECK(rep.empty);
    CHECK(rep.core_vars == 0);
    CHECK(rep.backbone_vars == 0);
    CHECK(rep.backbone_fraction == 0.0);
    CHECK(rep.peel_order.size() == 3);
    CHECK(f.alive_clauses() == 0);

    Assignment ext = reconstruct_solution(Assignment(0), rep, f, 9);
    CHECK(check_solution(original, ext));
}

TEST_CASE("a 2-uniform cycle is its own core") {
    Formula f = Formula::parse_text("2 3 3 2\n2 0:1 1:1 0\n2 1:1 2:1 0\n2 2:1 0:1 0\n");
    CoreReport rep = leaf_remove(f, 1);
    CHECK(!rep.empty);
    CHECK(rep.core_vars == 3);
    CHECK(rep.backbone_vars == 3);
    CHECK(rep.backbone_fraction == doctest::Approx(1.0));
    CHECK(rep.core_clauses_by_len[2] == 3);
    CHECK(rep.peel_order.empty());
}

TEST_CASE("the backbone is the implication closure of the core") {
    // triangle core over {0,1,2} plus a pendant clause (2,3): peeling removes the
    // pendant, but its pivot x3 is pinned once the core fixes x2.
    Formula f = Formula::parse_text(
        "2 4 4 2\n2 0:1 1:1 0\n2 1:1 2:1 0\n2 2:1 0:1 0\n2 2:1 3:1 1\n");
    Formula original = f;
    CoreReport rep = leaf_remove(f, 5);
    CHECK(rep.core_vars == 3);
    CHECK(rep.backbone_vars == 4);
    CHECK(rep.backbone_fraction == doctest::Approx(1.0));
    CHECK(rep.peel_order.size() == 1);
    CHECK(rep.peel_order[0].pivot == 3);

    // the all-zero core witness forces x3 = 1 through the peeled clause
    SatVerdict core = gaussian_solve(f);
    REQUIRE(core.witness.has_value());
    Assignment ext = reconstruct_solution(*core.witness, rep, f, 2);
    CHECK(check_solution(original, ext));
    CHECK(ext.value[3] == 1);
}

TEST_CASE("unit clauses and contradictions are rejected") {
    Formula unit = Formula::parse_text("2 3 1 2\n1 0:1 1\n");
    CHECK_THROWS_AS(leaf_remove(unit, 1), std::invalid_argument);

    Formula f = Formula::parse_text("2 3 2 2\n2 0:1 1:1 1\n2 0:1 1:1 0\n");
    f.reduce_by_assignment(0, 0);
    f.reduce_by_assignment(1, 0);  // second clause now demands 0 = ... contradiction
    REQUIRE(f.has_contradiction());
    CHECK_THROWS_AS(leaf_remove(f, 1), std::invalid_argument);
}

TEST_CASE("peeled formula is a 2-core") {
    Formula f = Formula::random(3000, 3, 0.9, 2, 77);
    leaf_remove(f, 13);
    for (std::uint32_t v = 0; v < f.num_vars(); ++v) CHECK(f.degree(v) != 1);
    for (const Clause& c : f.clauses())
        if (c.alive) CHECK(c.len() >= 2);
    CHECK(f.handshake_ok());
}

TEST_CASE("peel order is independent of outcome: core vs direct solve agree") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        double alpha = seed < 6 ? 0.8 : 1.0;
        Formula direct = Formula::random(250, 3, alpha, 2, 900 + seed);
        Formula peeled = direct;
        SatVerdict full = gaussian_solve(direct);
        CoreReport rep = leaf_remove(peeled, seed);
        SatVerdict core = gaussian_solve(peeled);
        CHECK(full.satisfiable == core.satisfiable);
        if (core.satisfiable) {
            Assignment ext = reconstruct_solution(*core.witness, rep, peeled, seed + 1);
            CHECK(check_solution(direct, ext));
        }
    }
}

TEST_CASE("backbone fraction tracks the flow root at alpha = 0.85") {
    // largest root of 1 - b = exp(-3 alpha b^2): b* = 0.8198699391
    Formula f = Formula::random(30000, 3, 0.85, 2, 424242);
    CoreReport rep = leaf_remove(f, 7);
    CHECK(!rep.empty);
    CHECK(rep.backbone_fraction == doctest::Approx(0.8198699391).epsilon(0.02));
    // the plain core fraction is a different (smaller) observable
    CHECK(rep.core_vars < rep.backbone_vars);
}

TEST_CASE("core report serializes to json") {
    Formula f = Formula::parse_text("2 3 3 2\n2 0:1 1:1 0\n2 1:1 2:1 0\n2 2:1 0:1 0\n");
    CoreReport rep = leaf_remove(f, 1);
    std::string js = core_report_json(rep);
    CHECK(js.find("\"empty\":false") != std::string::npos);
    CHECK(js.find("\"core_vars\":3") != std::string::npos);
    CHECK(js.find("\"backbone_vars\":3") != std::string::npos);
}
