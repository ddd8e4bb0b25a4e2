#pragma once

#include <optional>

#include "gjms/sl2.hpp"

namespace gjms {

/// Choice of completion for the underdetermined part of the divergence
/// correction: where the prescribed trace of W is parked. Both choices meet
/// the constraints; the restriction to G must not depend on it.
enum class WCompletion { pure_trace_block, first_diagonal_block };

struct LiftResult {
    AmbientTensor sigma;      // extension in the formally trace-free, T-free class
    int k = 0;
    Weight weight;
    int steps = 0;                 // divergence corrections applied
    bool partial_last_step = false;  // f-part skipped at the final order
    int divergence_order = 0;      // largest s with delta sigma = O^-(r^s) certified
    AmbientTensor phi_tilde;       // sigma|_G
};

namespace liftdet {

/// sigma-trace and T-contraction must vanish identically for the class the
/// recursion lives in; cheap exact assertions.
inline void assert_formally_tt_free(const AmbientSpace& A, const AmbientTensor& s,
                                    const char* who) {
    if (!trace_ambient(A, s).is_zero())
        throw math_error(std::string(who) + ": trace does not vanish identically");
    if (!T_contract(s, 0).is_zero())
        throw math_error(std::string(who) + ": T-contraction does not vanish identically");
}

/// Symmetric product 2 T_(I V_J).
inline AmbientTensor sym_T_outer(const AmbientSpace& A, const AmbientTensor& V) {
    AmbientTensor Tlow = lower_slot_ambient(A, dilation_field(A), 0);
    const int dims = A.n + 2;
    AmbientTensor r(A.n, V.weight() + Weight(2), {false, false});
    for (int i = 0; i < dims; ++i)
        for (int j = 0; j < dims; ++j)
            r.at({i, j}) = Tlow.at({i}) * V.at({j}) + Tlow.at({j}) * V.at({i});
    return r;
}

/// f T_I T_J for a scalar f.
inline AmbientTensor f_TT(const AmbientSpace& A, const AmbientTensor& f) {
    if (f.rank() != 0) throw math_error("f_TT expects a scalar");
    AmbientTensor Tlow = lower_slot_ambient(A, dilation_field(A), 0);
    const int dims = A.n + 2;
    AmbientTensor r(A.n, f.weight() + Weight(4), {false, false});
    for (int i = 0; i < dims; ++i)
        for (int j = 0; j < dims; ++j) r.at({i, j}) = f.flat(0) * Tlow.at({i}) * Tlow.at({j});
    return r;
}

/// Completion W with T^J W_IJ = V_I + f T_I and tr W = f; the free part is
/// parked according to the requested completion.
inline AmbientTensor complete_W(const AmbientSpace& A, const AmbientTensor& V,
                                const AmbientTensor& f, WCompletion which) {
    const int dims = A.n + 2;
    const int rho = A.n + 1;
    AmbientTensor Tlow = lower_slot_ambient(A, dilation_field(A), 0);
    AmbientTensor W(A.n, V.weight(), {false, false});
    for (std::size_t o = 0; o < W.flat_size(); ++o) W.flat(o) = RhoJet::zero_exact();
    // T^J W_IJ = t W_0I, so the 0-row is forced.
    for (int i = 0; i < dims; ++i) {
        RhoJet v = V.at({i}) + f.flat(0) * Tlow.at({i});
        W.at({0, i}) = v;
        W.at({i, 0}) = v;
    }
    // Wait: W_00 appears in both the forced row and the T-contraction at I=0;
    // T^J W_0J = t W_00 must equal V_0 + f T_0, which the line above set.
    // Remaining trace: tr W = 2 g~^{0 rho} W_{0 rho} + g~^{ij} W_ij (x-block
    // completion keeps W_{i rho} = W_{rho rho} = 0).
    RhoJet current = (W.at({0, rho}) * A.ginv.at({0, rho})).scaled(Rat(2));
    RhoJet target = f.flat(0) - current;
    if (which == WCompletion::pure_trace_block) {
        // W_ij = mu g_rho,ij with n mu = target
        RhoJet mu = target.scaled(Rat(1, A.n));
        for (int i = 0; i < A.n; ++i)
            for (int j = 0; j < A.n; ++j)
                W.at({i + 1, j + 1}) =
                    mu * A.g_rho[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    } else {
        // W_11 = nu with (g_rho^{-1})^{11} nu = target
        RhoJet g11 = A.ginv.at({1, 1});  // t^{-2} (g_rho^{-1})^{11}
        W.at({1, 1}) = target * g11.inverted();
    }
    return W;
}

}  // namespace liftdet

/// Order-by-order divergence correction producing an approximately TT
/// extension of phi with sigma|_TM = phi. The input must be trace-free with
/// respect to the base metric. Runs until the weight bookkeeping stops the
/// recursion (even base dimension) or the jets are exhausted.
inline constexpr int kJetStepFloor = 1;

inline LiftResult ambient_lift(const AmbientSpace& A, const TensorField<RatFn>& phi, int k,
                               const RhoJet* seed_profile = nullptr,
                               WCompletion completion = WCompletion::pure_trace_block) {
    const int n = A.n;
    if (k < 1) throw math_error("ambient_lift needs k >= 1");
    if (n % 2 == 0 && k > n / 2)
        throw math_error("ambient_lift: k is capped at n/2 for even base dimension");
    RatFn tr = trace_g(A.base, phi);
    if (!tr.is_zero())
        throw math_error("ambient_lift: phi is not trace-free; residual " + tr.str());
    Weight w = Weight::halves(-n + 4 + 2 * k);

    LiftResult out;
    out.k = k;
    out.weight = w;

    RhoJet profile = seed_profile ? *seed_profile : RhoJet::constant_exact(RatFn(1));
    if (profile.coeff(0) != RatFn(1))
        throw math_error("seed profile must equal 1 at rho = 0");
    AmbientTensor sigma = x_block_extension(A, phi, w, profile).truncated(A.N);
    liftdet::assert_formally_tt_free(A, sigma, "ambient_lift seed");

    const int mcap = A.n + 2 * k + 6;  // safety stop for the odd-n exact case
    for (int m = 1; m <= mcap; ++m) {
        Rat den1 = Rat(n, 2) + Rat(2 + k - 2 * m);
        Rat den2 = Rat(n, 2) + Rat(1 + k - 2 * m);
        if (den1.is_zero()) break;
        if (sigma.min_order() < kJetStepFloor + m) break;  // jets exhausted
        AmbientTensor delta = divergence_ambient(A, sigma);
        if (delta.is_zero()) break;  // corrections would vanish identically
        OrderCertificate low = order_O(delta, m - 1);
        if (!low.pass)
            throw math_error("lift recursion invariant broken at m=" + std::to_string(m) +
                             ": " + low.witness);
        AmbientTensor V = r_multiply(delta, -(m - 1)).scaled(den1.inv());
        AmbientTensor f(A.n, V.weight() - Weight(2), {});
        bool partial = den2.is_zero();
        if (partial) {
            f = AmbientTensor::scalar(A.n, V.weight() - Weight(2), RhoJet::zero_exact());
        } else {
            AmbientTensor dV = cov_deriv_ambient(A, V);
            AmbientTensor divV = contract_ambient(raise_slot_ambient(A, dV, 0), 0, 1);
            f = divV.scaled(-(den2.inv()));
        }
        AmbientTensor W = liftdet::complete_W(A, V, f, completion);
        AmbientTensor correction =
            r_multiply(liftdet::sym_T_outer(A, V) + liftdet::f_TT(A, f), m - 1) -
            r_multiply(W, m);
        sigma += correction;
        liftdet::assert_formally_tt_free(A, sigma, "ambient_lift step");
        out.steps = m;
        if (partial) {
            out.partial_last_step = true;
            break;
        }
    }

    // Certify the achieved divergence order (O^- scale, capped for reporting).
    AmbientTensor delta = divergence_ambient(A, sigma);
    int best = 0;
    const int scan_cap = std::min(delta.min_order() + 1, 16);
    for (int s = 1; s <= scan_cap; ++s) {
        OrderCertificate c = order_Ominus(delta, s);
        if (c.pass)
            best = s;
        else
            break;
    }
    out.divergence_order = best;
    out.sigma = sigma;
    out.phi_tilde = restrict_G(sigma);
    return out;
}

inline int ceil_rat(const Rat& q) {
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), q.num().get_mpz_t(), q.den().get_mpz_t());
    return static_cast<int>(c.get_si());
}

/// Approximate-TT class membership certificates for a weighted symmetric
/// 2-tensor: trace O(r^s), divergence O^-(r^s), T-contraction O^-(r^{s+1})
/// with s = ceil((n - 2 + w)/2).
struct ATTCertificates {
    int threshold = 0;
    OrderCertificate trace, divergence, t_contraction;
    bool all_pass() const { return trace.pass && divergence.pass && t_contraction.pass; }
};

inline ATTCertificates att_certificates(const AmbientSpace& A, const AmbientTensor& s) {
    ATTCertificates c;
    c.threshold = ceil_rat((Rat(A.n - 2) + s.weight().rat()) / Rat(2));
    c.trace = order_O(trace_ambient(A, s), c.threshold);
    c.divergence = order_Ominus(divergence_ambient(A, s), c.threshold);
    c.t_contraction = order_Ominus(T_contract(s, 0), c.threshold + 1);
    return c;
}

struct HarmonicExtension {
    AmbientTensor sigma;       // Delta_L sigma = O(r^{k-1}), sigma|_G = phi~
    int k = 0;
    AmbientTensor obstruction;  // F~ = (r^{1-k} Delta_L sigma)|_G, order-0 jets
};

/// Corrects an extension order by order so the ambient Lichnerowicz laplacian
/// vanishes to O(r^{k-1}); the order-(k-1) residue is the obstruction.
inline HarmonicExtension harmonic_extend(const AmbientSpace& A, const AmbientTensor& start,
                                         int k) {
    HarmonicExtension out;
    out.k = k;
    AmbientTensor sigma = start;
    for (int m = 1; m < k; ++m) {
        AmbientTensor L = lichnerowicz_ambient(A, sigma);
        OrderCertificate c = order_O(L, m - 1);
        if (!c.pass)
            throw math_error("harmonic extension invariant broken at m=" + std::to_string(m) +
                             ": " + c.witness);
        AmbientTensor zeta = r_multiply(L, -(m - 1));
        AmbientTensor s1 =
            extend_from_G(restrict_G(zeta)).scaled(Rat(-1) / Rat(4 * m * (m - k)));
        sigma += r_multiply(s1, m);
    }
    AmbientTensor L = lichnerowicz_ambient(A, sigma);
    OrderCertificate c = order_O(L, k - 1);
    if (!c.pass)
        throw math_error("harmonic extension failed to reach O(r^{k-1}): " + c.witness);
    out.obstruction = restrict_G(r_multiply(L, -(k - 1)));
    out.sigma = sigma;
    return out;
}

struct PkResult {
    TensorField<RatFn> value;  // P_k phi in the base chart
    Weight out_weight;         // -n/2 + 2 - k
    bool trace_free_applied = false;
    // cross-route data: the two pipelines must agree exactly
    TensorField<RatFn> via_power;        // Delta_L^k route (before tf)
    TensorField<RatFn> via_obstruction;  // 4^{k-1}((k-1)!)^2 * F~|_TM
    bool routes_agree = false;
    LiftResult lift;
};

/// The GJMS operator on trace-free symmetric 2-tensors:
/// P_k phi = tf(Delta_L^k sigma |_TM) for any extension sigma of the ambient
/// lift of phi. Computed along two routes (iterated laplacian, and the
/// harmonic-extension obstruction scaled by 4^{k-1}((k-1)!)^2).
inline PkResult gjms_pk(const AmbientSpace& A, const TensorField<RatFn>& phi, int k,
                        const RhoJet* seed_profile = nullptr) {
    PkResult out;
    out.lift = ambient_lift(A, phi, k, seed_profile);
    out.out_weight = Weight::halves(-A.n + 4 - 2 * k);

    AmbientTensor L = out.lift.sigma;
    for (int i = 0; i < k; ++i) L = lichnerowicz_ambient(A, L);
    RestrictTMResult tm = restrict_TM(L);
    if (!tm.ok) throw math_error("Delta_L^k sigma does not restrict to TM: " + tm.witness);
    out.via_power = tm.field;

    HarmonicExtension he = harmonic_extend(A, out.lift.sigma, k);
    RestrictTMResult tm2 = restrict_TM(he.obstruction);
    if (!tm2.ok) throw math_error("obstruction does not restrict to TM: " + tm2.witness);
    Rat scale(1);
    for (int j = 1; j < k; ++j) scale *= Rat(4) * Rat(j) * Rat(j);  // 4^{k-1} ((k-1)!)^2
    out.via_obstruction = tm2.field.scaled(RatFn(scale));
    out.routes_agree = (out.via_power == out.via_obstruction);

    // tf only matters in the critical case k = n/2 (n even).
    if (A.n % 2 == 0 && k == A.n / 2) {
        out.value = trace_free_part(A.base, out.via_power);
        out.trace_free_applied = true;
    } else {
        out.value = out.via_power;
    }
    return out;
}

}  // namespace gjms
