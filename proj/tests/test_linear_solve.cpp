#include "doctest.h"
#include "gjms/linear_solve.hpp"
#include "test_support.hpp"

using namespace gjms;
using gjms::testsupport::Rng;

TEST_CASE("identity system") {
    LinearSystem s;
    s.a = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
    s.b = {Rat(1), Rat(0)};
    auto sol = solve_exact(s);
    CHECK(sol.status == LinearSolution::Status::unique);
    CHECK(sol.particular == std::vector<Rat>{Rat(1), Rat(0)});
}

TEST_CASE("underdetermined 1x2 system x+y=1") {
    LinearSystem s;
    s.a = {{Rat(1), Rat(1)}};
    s.b = {Rat(1)};
    auto sol = solve_exact(s);
    CHECK(sol.status == LinearSolution::Status::underdetermined);
    CHECK(sol.rank == 1);
    CHECK(sol.particular == std::vector<Rat>{Rat(1), Rat(0)});
    REQUIRE(sol.nullspace.size() == 1);
    // nullspace is spanned by (1,-1) up to scale
    const auto& v = sol.nullspace[0];
    CHECK((v[0] + v[1]).is_zero());
    CHECK(!v[0].is_zero());
}

TEST_CASE("random invertible systems validate by substitution") {
    Rng rng(8);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t n = 5;
        LinearSystem s;
        s.a.assign(n, std::vector<Rat>(n));
        s.b.assign(n, Rat(0));
        for (auto& row : s.a)
            for (auto& e : row) e = rng.rat(9, 4);
        for (auto& e : s.b) e = rng.rat(9, 4);
        auto sol = solve_exact(s);
        if (sol.status != LinearSolution::Status::unique) continue;  // singular draw
        for (std::size_t i = 0; i < n; ++i) {
            Rat acc(0);
            for (std::size_t j = 0; j < n; ++j) acc += s.a[i][j] * sol.particular[j];
            CHECK(acc == s.b[i]);
        }
    }
}

TEST_CASE("inconsistent system yields a combination witness") {
    LinearSystem s;
    s.a = {{Rat(1), Rat(2)}, {Rat(2), Rat(4)}};
    s.b = {Rat(1), Rat(3)};
    auto sol = solve_exact(s);
    REQUIRE(sol.status == LinearSolution::Status::inconsistent);
    REQUIRE(sol.witness_combination.has_value());
    const auto& y = *sol.witness_combination;
    // y^T A = 0 and y^T b != 0
    for (std::size_t j = 0; j < 2; ++j) {
        Rat acc(0);
        for (std::size_t i = 0; i < 2; ++i) acc += y[i] * s.a[i][j];
        CHECK(acc.is_zero());
    }
    Rat rb(0);
    for (std::size_t i = 0; i < 2; ++i) rb += y[i] * s.b[i];
    CHECK(!rb.is_zero());
}

TEST_CASE("nullspace vectors solve the homogeneous system") {
    Rng rng(17);
    LinearSystem s;
    s.a.assign(3, std::vector<Rat>(6));
    s.b.assign(3, Rat(0));
    for (auto& row : s.a)
        for (auto& e : row) e = rng.rat(5, 2);
    auto sol = solve_exact(s);
    REQUIRE(sol.status == LinearSolution::Status::underdetermined);
    CHECK(sol.nullspace.size() == 6 - static_cast<std::size_t>(sol.rank));
    for (const auto& v : sol.nullspace)
        for (std::size_t i = 0; i < 3; ++i) {
            Rat acc(0);
            for (std::size_t j = 0; j < 6; ++j) acc += s.a[i][j] * v[j];
            CHECK(acc.is_zero());
        }
}
