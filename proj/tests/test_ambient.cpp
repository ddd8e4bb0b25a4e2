#include "doctest.h"
#include "gjms/ambient.hpp"
#include "gjms/explicit_ambient.hpp"
#include "test_support.hpp"

using namespace gjms;
using gjms::testsupport::Rng;

namespace {

RatFn lam() { return RatFn::variable(kVarLambda); }

AmbientTensor random_sym2_ambient(Rng& rng, const AmbientSpace& A, int w, int order,
                                  int sparse = 3) {
    AmbientTensor s(A.n, w, {false, false});
    const int dims = A.n + 2;
    for (std::size_t o = 0; o < s.flat_size(); ++o) s.flat(o) = RhoJet::zero(order);
    for (int pick = 0; pick < sparse; ++pick) {
        int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(dims)));
        int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(dims)));
        RhoJet jjet = RhoJet::zero(order);
        for (int m = 0; m <= std::min(order, 2); ++m)
            jjet.set_coeff(m, RatFn(rng.poly(A.n, 1, 2)));
        s.at({i, j}) = jjet;
        s.at({j, i}) = jjet;
    }
    return s;
}

AmbientTensor random_oneform_ambient(Rng& rng, const AmbientSpace& A, int w, int order) {
    AmbientTensor t(A.n, w, {false});
    const int dims = A.n + 2;
    for (int i = 0; i < dims; ++i) {
        RhoJet j = RhoJet::zero(order);
        for (int m = 0; m <= std::min(order, 2); ++m)
            j.set_coeff(m, RatFn(rng.poly(A.n, 1, 2)));
        t.at({i}) = j;
    }
    return t;
}

/// rho-Taylor coefficients of an explicit RatFn (rational in t, x, rho).
std::vector<RatFn> rho_taylor(RatFn f, int order) {
    std::vector<RatFn> out;
    Rat fact(1);
    for (int m = 0; m <= order; ++m) {
        if (m > 0) fact *= Rat(m);
        out.push_back(f.eval_partial({{kVarRho, Rat(0)}}) / RatFn(fact));
        f = f.derivative(kVarRho);
    }
    return out;
}

}  // namespace

TEST_CASE("assembled inverse has the block form of the closed-form display") {
    auto base = flat_metric(3);
    auto A = build_einstein_ambient(base, RatFn(0), 4);
    const int rho = 4;
    CHECK(A.ginv.at({0, 0}).is_zero());
    CHECK(A.ginv.at({0, rho}).coeff(0) == RatFn(1));
    CHECK(A.ginv.at({rho, rho}).coeff(1) == RatFn(-2));
    CHECK(A.ginv.at({rho, rho}).coeff(0).is_zero());
    for (int i = 1; i <= 3; ++i) CHECK(A.ginv.at({i, i}).coeff(0) == RatFn(1));
    // g g^{-1} = id for a general family too
    Rng rng(3);
    auto h = TensorField<RatFn>(3, {false, false});
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            RatFn v(rng.poly(3, 1, 1));
            h.at({i, j}) = v;
            h.at({j, i}) = v;
        }
    std::vector<std::vector<RhoJet>> fam(3, std::vector<RhoJet>(3));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            fam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                RhoJet::from_coeffs({base.g.at({i, j}), h.at({i, j})}, 4);
    auto Af = build_ambient_from_family(base, fam, 4);
    AmbientTensor mixed = raise_slot_ambient(Af, Af.g, 0);  // slots (contra, cov)
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            RhoJet expect = (i == j) ? RhoJet::constant(RatFn(1), mixed.at({i, j}).order())
                                     : RhoJet::zero(mixed.at({i, j}).order());
            CHECK((mixed.at({i, j}) - expect).is_zero());
        }
}

TEST_CASE("Christoffel tables of the closed-form Einstein ambient") {
    // n = 3, symbolic lambda over the space form with c = 2 lambda.
    const int n = 3;
    auto base = space_form_metric(n, RatFn(2) * lam());
    auto A = build_einstein_ambient(base, lam(), 5);
    auto base_gamma = christoffel(base);
    const int rho = n + 1;
    RhoJet one_lr = one_plus_lambda_rho_pow(1, 4, lam());
    RhoJet inv_lr = one_plus_lambda_rho_pow(-1, 4, lam());

    auto is_named = [&](int K, int I, int J, const RhoJet& expect) {
        const RhoJet& got = A.gamma.at({K, I, J});
        int m = std::min(got.order(), expect.order());
        REQUIRE(m >= 3);  // the comparison must see real coefficients
        return (got.truncated(m) - expect.truncated(m)).is_zero();
    };

    for (int K = 0; K < n + 2; ++K)
        for (int I = 0; I < n + 2; ++I)
            for (int J = 0; J < n + 2; ++J) {
                const RhoJet& got = A.gamma.at({K, I, J});
                RhoJet expect = RhoJet::zero(got.order());
                bool bi = I >= 1 && I <= n, bj = J >= 1 && J <= n, bk = K >= 1 && K <= n;
                if (K == 0 && bi && bj) {
                    expect = one_lr.scaled(-lam() * base.g.at({I - 1, J - 1}));
                } else if (bk && ((I == 0 && bj) || (J == 0 && bi))) {
                    int b = (I == 0) ? J : I;
                    expect = RhoJet::constant(b - 1 == K - 1 ? RatFn(1) : RatFn(0), got.order());
                } else if (bk && bi && bj) {
                    expect = RhoJet::constant(base_gamma.at({K - 1, I - 1, J - 1}), got.order());
                } else if (bk && ((I == rho && bj) || (J == rho && bi))) {
                    int b = (I == rho) ? J : I;
                    expect = (b - 1 == K - 1) ? inv_lr.scaled(lam()) : RhoJet::zero(got.order());
                } else if (K == rho && ((I == 0 && J == rho) || (I == rho && J == 0))) {
                    expect = RhoJet::constant(RatFn(1), got.order());
                } else if (K == rho && bi && bj) {
                    // -(1+lambda rho)(1-lambda rho) g_ij
                    RhoJet f = one_lr * RhoJet::from_coeffs({RatFn(1), -lam()}, 4);
                    expect = f.scaled(-base.g.at({I - 1, J - 1}));
                }
                CHECK(is_named(K, I, J, expect));
            }
}

TEST_CASE("graded Christoffel agrees with the explicit-coordinate route") {
    const int n = 3;
    auto base = space_form_metric(n, RatFn(1));
    RatFn lambda(Rat(1, 2));
    auto A = build_einstein_ambient(base, lambda, 4);
    auto ea = explicit_normal_form(base, lambda);
    auto egamma = christoffel(ea.chart);
    RatFn t = RatFn::variable(kVarT);
    for (int K = 0; K < n + 2; ++K)
        for (int I = 0; I < n + 2; ++I)
            for (int J = 0; J < n + 2; ++J) {
                const RhoJet& jet = A.gamma.at({K, I, J});
                std::vector<int> idx = {K, I, J};
                // implied power of t for this component of a weight-0 (1,2) object
                int h = 0;
                if (K == 0) h += 1;
                if (I == 0) h -= 1;
                if (J == 0) h -= 1;
                auto coeffs = rho_taylor(egamma.at({K, I, J}), jet.order());
                for (int m = 0; m <= jet.order(); ++m) {
                    RatFn graded_val = jet.coeff(m) * t.pow(h);
                    CHECK(graded_val == coeffs[static_cast<std::size_t>(m)]);
                }
            }
}

TEST_CASE("closed-form ambient metrics are Ricci-flat") {
    SUBCASE("flat base, lambda = 0") {
        auto A = build_einstein_ambient(flat_metric(3), RatFn(0), 5);
        CHECK(A.ric.is_zero());
        CHECK(A.ric.min_order() >= 3);
    }
    SUBCASE("sphere base, symbolic lambda, n = 3") {
        auto base = space_form_metric(3, RatFn(2) * lam());
        auto A = build_einstein_ambient(base, lam(), 5);
        CHECK(A.ric.is_zero());
    }
    SUBCASE("generic family is NOT Ricci-flat") {
        auto base = flat_metric(3);
        std::vector<std::vector<RhoJet>> fam(3, std::vector<RhoJet>(3));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                RatFn h = (i == j) ? RatFn::variable(0) * RatFn::variable(0) : RatFn(0);
                fam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    RhoJet::from_coeffs({base.g.at({i, j}), h}, 5);
            }
        auto A = build_ambient_from_family(base, fam, 5);
        CHECK(!A.ric.is_zero());
    }
}

TEST_CASE("straightness of graded normal-form metrics") {
    Rng rng(11);
    auto base = space_form_metric(3, RatFn(-2));
    auto A = build_einstein_ambient(base, RatFn(-1), 5);
    auto rep = straightness_check(A);
    CHECK(rep.nabla_T_is_id);
    CHECK(rep.dr_is_2Tg);
    // nabla_T tau = (w-1) tau and nabla_T sigma = (w-2) sigma
    for (int w : {-1, 0, 2, 3}) {
        auto tau = random_oneform_ambient(rng, A, w, 4);
        auto dtau = T_contract(cov_deriv_ambient(A, tau), 0);
        CHECK((dtau - tau.scaled(Rat(w - 1))).is_zero());
        auto sig = random_sym2_ambient(rng, A, w, 4);
        auto dsig = T_contract(cov_deriv_ambient(A, sig), 0);
        CHECK((dsig - sig.scaled(Rat(w - 2))).is_zero());
    }
    // the metric itself: nabla_T g = 0 = (2-2) g
    auto dg = T_contract(cov_deriv_ambient(A, A.g), 0);
    CHECK(dg.is_zero());
}

TEST_CASE("explicit route: normal form is straight, misprint form is not") {
    auto base = flat_metric(3);
    SUBCASE("normal form passes both conditions") {
        auto rep = explicit_straightness(explicit_normal_form(base, RatFn(Rat(1, 2))));
        CHECK(rep.nabla_T_is_id);
        CHECK(rep.dr_is_2Tg);
    }
    SUBCASE("2 rho dt drho variant fails with a concrete witness") {
        auto rep = explicit_straightness(explicit_misprint_form(base, RatFn(Rat(1, 2))));
        CHECK(!rep.nabla_T_is_id);
        CHECK(!rep.witness.empty());
    }
}

TEST_CASE("T hooks the curvature trivially for straight metrics") {
    // T^K R_{KLIJ} = 0, tested on the non-Ricci-flat family g + rho h.
    Rng rng(29);
    auto base = flat_metric(3);
    std::vector<std::vector<RhoJet>> fam(3, std::vector<RhoJet>(3));
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            RatFn h(rng.poly(3, 2, 2));
            fam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                RhoJet::from_coeffs({base.g.at({i, j}), h}, 5);
            fam[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                fam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    auto A = build_ambient_from_family(base, fam, 5);
    CHECK(!A.ric.is_zero());
    auto rep = straightness_check(A);
    CHECK(rep.nabla_T_is_id);
    CHECK(T_contract(A.riem4, 0).is_zero());
    CHECK(T_contract(A.ric, 0).is_zero());
}

TEST_CASE("laplacian of r^m") {
    // Delta(r^m) = -2m(2m+n) r^{m-1}
    for (int n : {3, 4}) {
        auto base = space_form_metric(n, RatFn(1));
        auto A = build_einstein_ambient(base, RatFn(Rat(1, 2)), 6);
        for (int m = 0; m <= 3; ++m) {
            AmbientTensor rm = r_power(A, m);
            AmbientTensor lap = laplacian_ambient(A, rm);
            AmbientTensor expect =
                (m == 0) ? AmbientTensor::scalar(A.n, -2, RhoJet::zero(4))
                         : r_power(A, m - 1).scaled(Rat(-2 * m * (2 * m + n)));
            CHECK(agree_to_common_order(lap, expect));
        }
    }
}

TEST_CASE("trace of the ambient metric is n + 2") {
    auto A = build_einstein_ambient(space_form_metric(3, RatFn(2) * lam()), lam(), 4);
    AmbientTensor tr = trace_ambient(A, A.g);
    CHECK(tr.weight() == 0);
    CHECK((tr.flat(0) - RhoJet::constant(RatFn(5), tr.flat(0).order())).is_zero());
}

TEST_CASE("Bochner formula for ambient 1-forms") {
    // Delta_H tau = Delta tau + Ric . tau, on a non-Ricci-flat family.
    Rng rng(37);
    auto base = flat_metric(3);
    std::vector<std::vector<RhoJet>> fam(3, std::vector<RhoJet>(3));
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            RatFn h(rng.poly(3, 1, 1));
            fam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                RhoJet::from_coeffs({base.g.at({i, j}), h}, 6);
            fam[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                fam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    auto A = build_ambient_from_family(base, fam, 6);
    for (int trial = 0; trial < 3; ++trial) {
        auto tau = random_oneform_ambient(rng, A, 1 + static_cast<int>(rng.below(3)), 6);
        AmbientTensor lhs = hodge_ambient_1form(A, tau);
        AmbientTensor ric_up = raise_slot_ambient(A, A.ric, 1);
        AmbientTensor ric_tau(A.n, tau.weight() - 2, {false});
        for (int i = 0; i < 5; ++i) {
            RhoJet acc;
            bool first = true;
            for (int j = 0; j < 5; ++j) {
                RhoJet term = ric_up.at({i, j}) * tau.at({j});
                if (first) {
                    acc = term;
                    first = false;
                } else {
                    acc += term;
                }
            }
            ric_tau.at({i}) = acc;
        }
        AmbientTensor rhs = laplacian_ambient(A, tau) + ric_tau;
        CHECK(agree_to_common_order(lhs, rhs));
    }
}

TEST_CASE("divergence commutes with the Lichnerowicz laplacian via DRic") {
    // delta(Delta_L sigma) = Delta_H(delta sigma) + (D Ric)o sigma,
    // on a family with nonvanishing ambient Ricci curvature.
    Rng rng(41);
    auto base = flat_metric(3);
    std::vector<std::vector<RhoJet>> fam(3, std::vector<RhoJet>(3));
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            RatFn h(rng.poly(3, 1, 1)), h2(rng.poly(3, 1, 1));
            fam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                RhoJet::from_coeffs({base.g.at({i, j}), h, h2}, 7);
            fam[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                fam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    auto A = build_ambient_from_family(base, fam, 7);
    for (int trial = 0; trial < 2; ++trial) {
        auto sig = random_sym2_ambient(rng, A, 2, 7, 2);
        AmbientTensor lhs = divergence_ambient(A, lichnerowicz_ambient(A, sig));
        AmbientTensor rhs = hodge_ambient_1form(A, divergence_ambient(A, sig)) +
                            dric_action_ambient(A, sig);
        CHECK(agree_to_common_order(lhs, rhs));
    }
}

TEST_CASE("restriction to G and to TM") {
    const int n = 3;
    auto base = space_form_metric(n, RatFn(1));
    RatFn lambda(Rat(1, 2));
    auto A = build_einstein_ambient(base, lambda, 4);
    SUBCASE("the ambient metric restricts to g with weight 2") {
        auto res = restrict_TM(A.g);
        REQUIRE(res.ok);
        CHECK(res.weight == 2);
        CHECK(res.field == base.g);
    }
    SUBCASE("conformal-profile extensions restrict to sigma") {
        Rng rng(5);
        TensorField<RatFn> sigma(n, {false, false});
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                RatFn v(rng.poly(n, 2, 2));
                sigma.at({i, j}) = v;
                sigma.at({j, i}) = v;
            }
        int w = 3;
        auto s = x_block_extension(A, sigma, w, one_plus_lambda_rho_pow(w, 4, lambda));
        auto res = restrict_TM(s);
        REQUIRE(res.ok);
        CHECK(res.field == sigma);
        CHECK(res.weight == w);
    }
    SUBCASE("nonvanishing T-contraction refuses restriction with witness") {
        AmbientTensor bad(n, 2, {false, false});
        for (std::size_t o = 0; o < bad.flat_size(); ++o) bad.flat(o) = RhoJet::zero(3);
        bad.at({0, 1}) = RhoJet::constant(RatFn(1), 3);
        bad.at({1, 0}) = RhoJet::constant(RatFn(1), 3);
        auto res = restrict_TM(bad);
        CHECK(!res.ok);
        CHECK(!res.witness.empty());
    }
}

TEST_CASE("order predicates") {
    auto base = flat_metric(3);
    auto A = build_einstein_ambient(base, RatFn(0), 6);
    Rng rng(61);
    SUBCASE("r^m times a generic tensor is O(r^m) but not O(r^{m+1})") {
        auto s = random_sym2_ambient(rng, A, 1, 6, 2);
        s.at({1, 2}) = RhoJet::constant(RatFn(1), 6);  // ensure nonzero at rho^0
        s.at({2, 1}) = s.at({1, 2});
        for (int m = 1; m <= 2; ++m) {
            auto rs = r_multiply(s, m);
            CHECK(order_O(rs, m).pass);
            CHECK(!order_O(rs, m + 1).pass);
            CHECK(!order_O(rs, m + 1).witness.empty());
        }
    }
    SUBCASE("r^{m-1} T.g is O^-(r^m) as a 1-form") {
        AmbientTensor Tg = T_contract(A.g, 0);
        for (int m = 1; m <= 3; ++m) {
            auto tau = r_multiply(Tg, m - 1);
            CHECK(order_Ominus(tau, m).pass);
        }
    }
    SUBCASE("zero tensors pass every predicate") {
        AmbientTensor z(3, 0, {false, false});
        for (std::size_t o = 0; o < z.flat_size(); ++o) z.flat(o) = RhoJet::zero(6);
        CHECK(order_O(z, 3).pass);
        CHECK(order_Oplus(A, z, 2).pass);
    }
}
