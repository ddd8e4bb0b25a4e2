#pragma once

#include "gjms/ambient.hpp"

namespace gjms {

/// The raising/lowering/grading triple acting on weighted symmetric ambient
/// 2-tensors:
///   x: sigma -> (1/4) r sigma            (weight +2)
///   y: sigma -> Delta_L sigma            (weight -2)
///   h: sigma -> (w + n/2 - 1) sigma      (weight preserved)
/// For straight ambient metrics these satisfy [h,x] = 2x, [h,y] = -2y,
/// [x,y] = h on homogeneous tensors.

inline AmbientTensor sl2_x(const AmbientSpace& A, const AmbientTensor& s) {
    (void)A;
    return r_multiply(s, 1).scaled(Rat(1, 4));
}

inline AmbientTensor sl2_y(const AmbientSpace& A, const AmbientTensor& s) {
    return lichnerowicz_ambient(A, s);
}

inline Rat sl2_h_eigenvalue(const AmbientSpace& A, Weight w) {
    return w.rat() + Rat(A.n, 2) - Rat(1);
}

inline AmbientTensor sl2_h(const AmbientSpace& A, const AmbientTensor& s) {
    return s.scaled(sl2_h_eigenvalue(A, s.weight()));
}

/// Applies a word in {x, y, h} left-to-right (rightmost acts first).
inline AmbientTensor sl2_word(const AmbientSpace& A, const std::string& word,
                              AmbientTensor s) {
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        switch (*it) {
            case 'x': s = sl2_x(A, s); break;
            case 'y': s = sl2_y(A, s); break;
            case 'h': s = sl2_h(A, s); break;
            default: throw math_error("sl2 word may only contain x, y, h");
        }
    }
    return s;
}

inline AmbientTensor sl2_y_pow(const AmbientSpace& A, AmbientTensor s, int m) {
    for (int i = 0; i < m; ++i) s = sl2_y(A, s);
    return s;
}
inline AmbientTensor sl2_x_pow(const AmbientSpace& A, AmbientTensor s, int m) {
    for (int i = 0; i < m; ++i) s = sl2_x(A, s);
    return s;
}

struct SL2CheckReport {
    bool hx = false, hy = false, xy = false;
    bool ym_x = false;  // [y^m, x] = -m y^{m-1} (h - m + 1)
    bool xm_y = false;  // [x^m, y] =  m x^{m-1} (h + m - 1)
    bool casimir_restricted = false;  // y^{m-1} x^{m-1}|_G factorial identity
    std::string witness;
};

/// Exact commutator identities on one homogeneous test tensor.
inline SL2CheckReport sl2_check_on(const AmbientSpace& A, const AmbientTensor& s,
                                   int max_m = 3) {
    SL2CheckReport rep;
    const Rat h0 = sl2_h_eigenvalue(A, s.weight());

    // [h,x] = 2x
    AmbientTensor lhs = sl2_h(A, sl2_x(A, s)) - sl2_x(A, sl2_h(A, s));
    rep.hx = (lhs - sl2_x(A, s).scaled(Rat(2))).is_zero();
    if (!rep.hx) rep.witness = "[h,x] != 2x";
    // [h,y] = -2y
    lhs = sl2_h(A, sl2_y(A, s)) - sl2_y(A, sl2_h(A, s));
    rep.hy = (lhs - sl2_y(A, s).scaled(Rat(-2))).is_zero();
    if (!rep.hy && rep.witness.empty()) rep.witness = "[h,y] != -2y";
    // [x,y] = h
    lhs = sl2_x(A, sl2_y(A, s)) - sl2_y(A, sl2_x(A, s));
    rep.xy = (lhs - sl2_h(A, s)).is_zero();
    if (!rep.xy && rep.witness.empty()) rep.witness = "[x,y] != h";

    rep.ym_x = true;
    rep.xm_y = true;
    for (int m = 1; m <= max_m; ++m) {
        // [y^m, x] s = -m y^{m-1} (h - m + 1) s
        AmbientTensor l = sl2_y_pow(A, sl2_x(A, s), m) - sl2_x(A, sl2_y_pow(A, s, m));
        AmbientTensor r = sl2_y_pow(A, s.scaled(h0 - Rat(m - 1)), m - 1).scaled(Rat(-m));
        if (!(l - r).is_zero()) {
            rep.ym_x = false;
            if (rep.witness.empty()) rep.witness = "[y^m,x] identity fails at m=" + std::to_string(m);
        }
        // [x^m, y] s = m x^{m-1} (h + m - 1) s
        l = sl2_x_pow(A, sl2_y(A, s), m) - sl2_y(A, sl2_x_pow(A, s, m));
        r = sl2_x_pow(A, s.scaled(h0 + Rat(m - 1)), m - 1).scaled(Rat(m));
        if (!(l - r).is_zero()) {
            rep.xm_y = false;
            if (rep.witness.empty()) rep.witness = "[x^m,y] identity fails at m=" + std::to_string(m);
        }
    }

    // y^{m-1} x^{m-1} = (-1)^{m-1} (m-1)! h (h+1) ... (h+m-2) + x Z_m:
    // restricted to G the x-term dies, so both sides agree after |_G.
    rep.casimir_restricted = true;
    for (int m = 2; m <= max_m; ++m) {
        AmbientTensor l = restrict_G(sl2_y_pow(A, sl2_x_pow(A, s, m - 1), m - 1));
        Rat factor((m - 1) % 2 == 0 ? 1 : -1);
        for (int j = 2; j < m; ++j) factor *= Rat(j);  // (m-1)!
        Rat prod(1);
        for (int j = 0; j <= m - 2; ++j) prod *= h0 + Rat(j);
        AmbientTensor r = restrict_G(s.scaled(factor * prod));
        if (!agree_to_common_order(l, r)) {
            rep.casimir_restricted = false;
            if (rep.witness.empty())
                rep.witness = "restricted y^{m-1}x^{m-1} identity fails at m=" + std::to_string(m);
        }
    }
    return rep;
}

}  // namespace gjms
