#include "doctest.h"
#include "gjms/rho_jet.hpp"
#include "test_support.hpp"

using namespace gjms;
using gjms::testsupport::Rng;

namespace {
RatFn lam() { return RatFn::variable(kVarLambda); }

RhoJet random_jet(Rng& rng, int order, bool nonzero_c0) {
    RhoJet j(order);
    for (int m = 0; m <= order; ++m) j.set_coeff(m, RatFn(rng.poly(2, 2, 2)));
    if (nonzero_c0) j.set_coeff(0, j.coeff(0) + RatFn(rng.nonzero_rat().pow(2)) + RatFn(1));
    return j;
}
}

TEST_CASE("jet multiplication matches the Christoffel-table product") {
    // (1+lambda rho)(1-lambda rho) = 1 - lambda^2 rho^2 at order 2
    RhoJet a = RhoJet::from_coeffs({RatFn(1), lam()}, 2);
    RhoJet b = RhoJet::from_coeffs({RatFn(1), -lam()}, 2);
    RhoJet p = a * b;
    CHECK(p.order() == 2);
    CHECK(p.coeff(0) == RatFn(1));
    CHECK(p.coeff(1).is_zero());
    CHECK(p.coeff(2) == -(lam() * lam()));
}

TEST_CASE("multiplication by zero and truncation behavior") {
    Rng rng(5);
    RhoJet z = RhoJet::zero(4);
    RhoJet a = random_jet(rng, 4, false);
    CHECK((a * z).is_zero());
    // (1+rho)^2 at order 1 -> 1 + 2 rho with guarantee 1
    RhoJet one_rho = RhoJet::from_coeffs({RatFn(1), RatFn(1)}, 1);
    RhoJet sq = one_rho * one_rho;
    CHECK(sq.order() == 1);
    CHECK(sq.coeff(0) == RatFn(1));
    CHECK(sq.coeff(1) == RatFn(2));
    CHECK_THROWS_AS(sq.coeff(2), truncation_error);
}

TEST_CASE("valuation-aware order bookkeeping never overclaims") {
    // A jet that merely LOOKS like rho^2 (guarantee 2) has an unknown rho^3
    // tail, so the product guarantee stays at min(2+0, 1+2) = 2 ...
    RhoJet r2_approx = RhoJet::from_coeffs({RatFn(0), RatFn(0), RatFn(1)}, 2);
    RhoJet a = RhoJet::from_coeffs({RatFn(3), RatFn(5)}, 1);
    RhoJet p = r2_approx * a;
    CHECK(p.order() == 2);
    CHECK(p.coeff(2) == RatFn(3));
    CHECK_THROWS_AS(p.coeff(3), truncation_error);
    // ... while multiplication by an exact monomial rho^2 is a shift.
    RhoJet q = a.shifted_up(2);
    CHECK(q.order() == 3);
    CHECK(q.coeff(2) == RatFn(3));
    CHECK(q.coeff(3) == RatFn(5));
}

TEST_CASE("jet inversion against multiply-back oracle") {
    SUBCASE("invert(1+lambda rho) at order 2") {
        RhoJet a = RhoJet::from_coeffs({RatFn(1), lam()}, 2);
        RhoJet inv = a.inverted();
        CHECK(inv.coeff(0) == RatFn(1));
        CHECK(inv.coeff(1) == -lam());
        CHECK(inv.coeff(2) == lam() * lam());
        RhoJet prod = a * inv;
        CHECK(prod.coeff(0) == RatFn(1));
        CHECK(prod.coeff(1).is_zero());
        CHECK(prod.coeff(2).is_zero());
    }
    SUBCASE("invert((1+lambda rho)^2) at order 1") {
        RhoJet a = one_plus_lambda_rho_pow(2, 1, lam());
        RhoJet inv = a.inverted();
        CHECK(inv.coeff(0) == RatFn(1));
        CHECK(inv.coeff(1) == RatFn(-2) * lam());
    }
    SUBCASE("invert(1) = 1") {
        RhoJet one = RhoJet::constant(RatFn(1), 3);
        CHECK(agree_to_common_order(one.inverted(), one));
    }
    SUBCASE("100 random invertible jets") {
        Rng rng(2024);
        for (int trial = 0; trial < 100; ++trial) {
            RhoJet a = random_jet(rng, 3, true);
            RhoJet prod = a * a.inverted();
            CHECK(prod.coeff(0) == RatFn(1));
            for (int m = 1; m <= prod.order(); ++m) CHECK(prod.coeff(m).is_zero());
        }
    }
    SUBCASE("zero constant term is rejected") {
        RhoJet bad = RhoJet::from_coeffs({RatFn(0), RatFn(1)}, 2);
        CHECK_THROWS_AS(bad.inverted(), math_error);
    }
}

TEST_CASE("derivative drops the guarantee by one") {
    RhoJet a = RhoJet::from_coeffs({RatFn(1), lam(), lam() * lam()}, 2);
    RhoJet d = a.d_rho();
    CHECK(d.order() == 1);
    CHECK(d.coeff(0) == lam());
    CHECK(d.coeff(1) == RatFn(2) * lam() * lam());
}

TEST_CASE("guaranteed order is monotone under arithmetic") {
    Rng rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        int na = 2 + static_cast<int>(rng.below(3));
        int nb = 2 + static_cast<int>(rng.below(3));
        RhoJet a = random_jet(rng, na, false);
        RhoJet b = random_jet(rng, nb, false);
        CHECK((a + b).order() == std::min(na, nb));
        CHECK((a * b).order() >= std::min(na, nb));
        CHECK((a * b).order() == std::min(na + b.valuation(), nb + a.valuation()));
    }
}

TEST_CASE("negative binomial jets") {
    RhoJet j = one_plus_lambda_rho_pow(-2, 3, lam());
    // (1+x)^-2 = 1 - 2x + 3x^2 - 4x^3 + ...
    CHECK(j.coeff(0) == RatFn(1));
    CHECK(j.coeff(1) == RatFn(-2) * lam());
    CHECK(j.coeff(2) == RatFn(3) * lam() * lam());
    CHECK(j.coeff(3) == RatFn(-4) * lam() * lam() * lam());
}

TEST_CASE("shift up and down") {
    RhoJet a = RhoJet::from_coeffs({RatFn(2), RatFn(3)}, 1);
    RhoJet up = a.shifted_up(2);
    CHECK(up.order() == 3);
    CHECK(up.coeff(2) == RatFn(2));
    CHECK(agree_to_common_order(up.shifted_down(2), a));
    CHECK_THROWS_AS(a.shifted_down(1), math_error);
}
