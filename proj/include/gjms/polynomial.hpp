#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gjms/rational.hpp"

namespace gjms {

// Fixed variable universe. Chart coordinates are x1..x6; lambda is the
// Einstein parameter; rho and t only appear in the explicit ambient-chart
// cross-checks (the graded jet machinery keeps them implicit).
inline constexpr int kMaxChartDim = 6;
inline constexpr int kVarLambda = 6;
inline constexpr int kVarRho = 7;
inline constexpr int kVarT = 8;
inline constexpr int kNumVars = 9;

inline std::string var_name(int v) {
    if (v >= 0 && v < kMaxChartDim) return "x" + std::to_string(v + 1);
    if (v == kVarLambda) return "lambda";
    if (v == kVarRho) return "rho";
    if (v == kVarT) return "t";
    throw math_error("unknown variable id " + std::to_string(v));
}

inline int var_id(const std::string& name) {
    for (int v = 0; v < kNumVars; ++v)
        if (var_name(v) == name) return v;
    return -1;
}

/// Exponent vector over the fixed variable universe, packed into a single
/// 128-bit word: 12 bits per variable (x1 lowest ... t highest) with the
/// total degree above them. A raw integer compare of the packed word is
/// exactly graded lexicographic order with x1 < ... < x6 < lambda < rho < t.
class Mono {
  public:
    Mono() = default;

    int exp(int v) const { return static_cast<int>((bits_ >> (kFieldBits * v)) & kFieldMask); }
    void set_exp(int v, int e) {
        if (e < 0 || e > 2000) throw math_error("monomial exponent out of range");
        int old = exp(v);
        bits_ -= static_cast<u128>(old) << (kFieldBits * v);
        bits_ -= static_cast<u128>(old) << kDegShift;
        bits_ += static_cast<u128>(e) << (kFieldBits * v);
        bits_ += static_cast<u128>(e) << kDegShift;
    }
    int total_degree() const { return static_cast<int>(bits_ >> kDegShift); }
    bool is_one() const { return bits_ == 0; }

    friend bool operator==(const Mono& a, const Mono& b) { return a.bits_ == b.bits_; }
    friend bool grlex_less(const Mono& a, const Mono& b) { return a.bits_ < b.bits_; }

    friend Mono operator*(Mono a, const Mono& b) {
        a.bits_ += b.bits_;
        for (int v = 0; v < kNumVars; ++v)
            if (a.exp(v) > 2000) throw math_error("monomial exponent overflow in product");
        return a;
    }
    /// Exact division; throws when not divisible.
    friend Mono operator/(Mono a, const Mono& b) {
        if (!a.divisible_by(b)) throw math_error("monomial division underflow");
        a.bits_ -= b.bits_;
        return a;
    }
    bool divisible_by(const Mono& b) const {
        for (int v = 0; v < kNumVars; ++v)
            if (exp(v) < b.exp(v)) return false;
        return true;
    }

  private:
    using u128 = unsigned __int128;
    static constexpr int kFieldBits = 12;
    static constexpr u128 kFieldMask = 0xFFF;
    static constexpr int kDegShift = kFieldBits * kNumVars;  // 108
    u128 bits_ = 0;
};

/// Exact multivariate polynomial over Rat. Terms kept sorted in descending
/// grlex order with nonzero coefficients: the representation is canonical and
/// equality is structural.
class Poly {
  public:
    using Term = std::pair<Mono, Rat>;

    Poly() = default;
    Poly(int c) { if (c != 0) terms_.push_back({Mono{}, Rat(c)}); }
    Poly(const Rat& c) { if (!c.is_zero()) terms_.push_back({Mono{}, c}); }

    static Poly variable(int v, int exp = 1) {
        Poly p;
        if (exp < 0) throw math_error("negative exponent in monomial");
        Mono m;
        m.set_exp(v, exp);
        p.terms_.push_back({m, Rat(1)});
        return p;
    }
    static Poly monomial(const Mono& m, const Rat& c) {
        Poly p;
        if (!c.is_zero()) p.terms_.push_back({m, c});
        return p;
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one()); }
    Rat constant_value() const {
        if (is_zero()) return Rat(0);
        if (!is_constant()) throw math_error("polynomial is not constant");
        return terms_[0].second;
    }
    bool is_one() const { return is_constant() && !is_zero() && terms_[0].second.is_one(); }

    /// Leading (largest) term under grlex.
    const Term& leading() const {
        if (is_zero()) throw math_error("leading term of zero polynomial");
        return terms_.front();
    }

    int total_degree() const {
        int d = -1;
        for (const auto& t : terms_) d = std::max(d, t.first.total_degree());
        return d;  // -1 for the zero polynomial
    }
    int degree_in(int v) const {
        int d = -1;
        for (const auto& t : terms_) d = std::max<int>(d, t.first.exp(v));
        return d;
    }
    bool depends_on(int v) const {
        for (const auto& t : terms_)
            if (t.first.exp(v) > 0) return true;
        return false;
    }
    int max_var() const {
        int m = -1;
        for (const auto& t : terms_)
            for (int v = 0; v < kNumVars; ++v)
                if (t.first.exp(v) > 0) m = std::max(m, v);
        return m;
    }

    Poly operator-() const {
        Poly r(*this);
        for (auto& t : r.terms_) t.second = -t.second;
        return r;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r;
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            if (j == b.terms_.size() ||
                (i < a.terms_.size() && grlex_less(b.terms_[j].first, a.terms_[i].first))) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (i == a.terms_.size() || grlex_less(a.terms_[i].first, b.terms_[j].first)) {
                r.terms_.push_back(b.terms_[j++]);
            } else {
                Rat c = a.terms_[i].second + b.terms_[j].second;
                if (!c.is_zero()) r.terms_.push_back({a.terms_[i].first, c});
                ++i, ++j;
            }
        }
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        if (a.is_constant()) return b.scaled(a.terms_[0].second);
        if (b.is_constant()) return a.scaled(b.terms_[0].second);
        std::vector<Term> buf;
        buf.reserve(a.terms_.size() * b.terms_.size());
        for (const auto& ta : a.terms_)
            for (const auto& tb : b.terms_)
                buf.emplace_back(ta.first * tb.first, ta.second * tb.second);
        std::sort(buf.begin(), buf.end(),
                  [](const Term& x, const Term& y) { return grlex_less(y.first, x.first); });
        Poly r;
        r.terms_.reserve(buf.size());
        for (auto& t : buf) {
            if (!r.terms_.empty() && r.terms_.back().first == t.first)
                r.terms_.back().second += t.second;
            else
                r.terms_.push_back(std::move(t));
        }
        r.terms_.erase(std::remove_if(r.terms_.begin(), r.terms_.end(),
                                      [](const Term& t) { return t.second.is_zero(); }),
                       r.terms_.end());
        return r;
    }

    Poly& operator+=(const Poly& o) { *this = *this + o; return *this; }
    Poly& operator-=(const Poly& o) { *this = *this - o; return *this; }
    Poly& operator*=(const Poly& o) { *this = *this * o; return *this; }

    Poly scaled(const Rat& c) const {
        if (c.is_zero()) return Poly();
        Poly r(*this);
        for (auto& t : r.terms_) t.second *= c;
        return r;
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i)
            if (!(a.terms_[i].first == b.terms_[i].first) || a.terms_[i].second != b.terms_[i].second)
                return false;
        return true;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    Poly derivative(int v) const {
        Poly r;
        for (const auto& t : terms_) {
            if (t.first.exp(v) == 0) continue;
            Mono m = t.first;
            Rat c = t.second * Rat(m.exp(v));
            m.set_exp(v, m.exp(v) - 1);
            r.terms_.push_back({m, c});
        }
        // differentiation preserves grlex order within equal... not in general:
        // re-sort to restore canonical order.
        std::sort(r.terms_.begin(), r.terms_.end(),
                  [](const Term& x, const Term& y) { return grlex_less(y.first, x.first); });
        return r;
    }

    /// Substitutes rational values for a subset of variables.
    Poly eval_partial(const std::vector<std::pair<int, Rat>>& vals) const {
        Poly r;
        for (const auto& t : terms_) {
            Mono m = t.first;
            Rat c = t.second;
            for (const auto& [v, x] : vals) {
                if (m.exp(v) != 0) {
                    c *= x.pow(m.exp(v));
                    m.set_exp(v, 0);
                }
            }
            r += Poly::monomial(m, c);
        }
        return r;
    }

    /// Drops every term of total degree > bound in the chart variables
    /// x1..x6 (lambda and friends are parameters, not jet directions).
    Poly truncate_xdeg(int bound) const {
        Poly r;
        for (const auto& t : terms_) {
            int d = 0;
            for (int v = 0; v < kMaxChartDim; ++v) d += t.first.exp(v);
            if (d <= bound) r.terms_.push_back(t);
        }
        return r;
    }

    /// Smallest total x-degree appearing (INT_MAX for zero polynomial).
    int min_xdeg() const {
        int m = INT32_MAX;
        for (const auto& t : terms_) {
            int d = 0;
            for (int v = 0; v < kMaxChartDim; ++v) d += t.first.exp(v);
            m = std::min(m, d);
        }
        return m;
    }

    /// Per-variable minimum exponent over all terms (the monomial content).
    Mono monomial_content() const {
        Mono m;
        if (is_zero()) return m;
        m = terms_[0].first;
        for (const auto& t : terms_)
            for (int v = 0; v < kNumVars; ++v)
                if (t.first.exp(v) < m.exp(v)) m.set_exp(v, t.first.exp(v));
        return m;
    }
    Poly divided_by_monomial(const Mono& m) const {
        Poly r(*this);
        for (auto& t : r.terms_) t.first = t.first / m;
        return r;
    }

    /// gcd of the rational coefficients, sign of the leading term.
    Rat rational_content() const {
        Rat g(0);
        for (const auto& t : terms_) g = rat_gcd(g, t.second);
        if (!is_zero() && leading().second.sign() < 0) g = -g;
        return g;
    }

    std::string str() const;

  private:
    std::vector<Term> terms_;  // descending grlex, nonzero coefficients
};

inline Poly operator*(const Poly& a, const Rat& c) { return a.scaled(c); }
inline Poly operator*(const Rat& c, const Poly& a) { return a.scaled(c); }

inline std::string Poly::str() const {
    if (is_zero()) return "0";
    std::string s;
    bool first = true;
    for (const auto& t : terms_) {
        if (!first) s += " + ";
        first = false;
        std::string factors;
        for (int v = 0; v < kNumVars; ++v)
            if (t.first.exp(v) > 0) {
                factors += "*" + var_name(v);
                if (t.first.exp(v) > 1) factors += "^" + std::to_string(t.first.exp(v));
            }
        s += "(" + t.second.str() + ")" + factors;
    }
    return s;
}

/// Attempts exact division a / b; returns nullopt when b does not divide a.
inline std::optional<Poly> poly_divexact(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw math_error("polynomial division by zero");
    if (a.is_zero()) return Poly();
    if (b.is_one()) return a;
    if (b.is_constant()) return a.scaled(b.constant_value().inv());
    Poly rem = a, q;
    const auto& lb = b.leading();
    while (!rem.is_zero()) {
        const auto& lr = rem.leading();
        if (!lr.first.divisible_by(lb.first)) return std::nullopt;
        Poly t = Poly::monomial(lr.first / lb.first, lr.second / lb.second);
        q += t;
        rem -= t * b;
    }
    return q;
}

namespace detail {

/// View of p as a univariate polynomial in variable v with Poly coefficients,
/// index = degree in v.
inline std::vector<Poly> coeffs_in(const Poly& p, int v) {
    std::vector<Poly> c(static_cast<std::size_t>(std::max(0, p.degree_in(v)) + 1));
    for (const auto& t : p.terms()) {
        Mono m = t.first;
        int d = m.exp(v);
        m.set_exp(v, 0);
        c[static_cast<std::size_t>(d)] += Poly::monomial(m, t.second);
    }
    return c;
}

inline Poly from_coeffs(const std::vector<Poly>& c, int v) {
    Poly p;
    for (std::size_t d = 0; d < c.size(); ++d)
        p += c[d] * Poly::variable(v, static_cast<int>(d));
    return p;
}

inline Poly content_in(const Poly& p, int v);
Poly poly_gcd(const Poly& a, const Poly& b);

/// Substitutes v = xi (a big integer) exactly, by Horner in v.
inline Poly eval_var_z(const Poly& p, int v, const mpz_class& xi) {
    auto cs = coeffs_in(p, v);
    Poly acc;
    Rat rxi((mpz_class(xi)));
    for (int d = static_cast<int>(cs.size()) - 1; d >= 0; --d)
        acc = acc.scaled(rxi) + cs[static_cast<std::size_t>(d)];
    return acc;
}

/// Coefficientwise symmetric remainder mod xi for integer-coefficient polys.
inline Poly sym_mod(const Poly& p, const mpz_class& xi) {
    Poly r;
    mpz_class half = xi / 2;
    for (const auto& t : p.terms()) {
        mpz_class m;
        mpz_mod(m.get_mpz_t(), t.second.num().get_mpz_t(), xi.get_mpz_t());
        if (m > half) m -= xi;
        if (m != 0) r += Poly::monomial(t.first, Rat(m));
    }
    return r;
}

inline mpz_class max_abs_coeff(const Poly& p) {
    mpz_class m = 0;
    for (const auto& t : p.terms()) {
        mpz_class a = ::abs(t.second.num());
        if (a > m) m = a;
    }
    return m;
}

inline std::optional<Poly> xi_adic_reconstruct(Poly g, int v, const mpz_class& xi, int degcap) {
    Poly res;
    int i = 0;
    while (!g.is_zero()) {
        if (i > degcap) return std::nullopt;
        Poly d = sym_mod(g, xi);
        if (!d.is_zero()) res += d * Poly::variable(v, i);
        g = (g - d).scaled(Rat(mpz_class(1), xi));
        ++i;
    }
    return res;
}

/// Heuristic gcd (integer evaluation / xi-adic lifting with divisibility
/// verification). Inputs must have integer coefficients. Returns the primitive
/// gcd, or nullopt when the heuristic gives up.
inline std::optional<Poly> gcdheu_z(const Poly& A, const Poly& B, int depth) {
    if (depth > 12) return std::nullopt;
    if (A.is_constant() || B.is_constant()) {
        mpz_class g;
        mpz_class ca = A.is_zero() ? mpz_class(0) : A.rational_content().num();
        mpz_class cb = B.is_zero() ? mpz_class(0) : B.rational_content().num();
        mpz_gcd(g.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
        return Poly(Rat(g));
    }
    // Variable of smallest worst-case degree keeps the digit count low.
    int v = -1, best = INT32_MAX;
    for (int cand = 0; cand < kNumVars; ++cand) {
        int da = A.degree_in(cand), db = B.degree_in(cand);
        if (da == 0 && db == 0) continue;
        int w = std::max(da, db);
        if (w < best) { best = w; v = cand; }
    }
    if (v < 0) return std::nullopt;
    mpz_class na = max_abs_coeff(A), nb = max_abs_coeff(B);
    mpz_class xi = 2 * (na < nb ? na : nb) + 2;
    const int degcap = std::min(A.degree_in(v), B.degree_in(v));
    for (int attempt = 0; attempt < 6; ++attempt) {
        Poly a = eval_var_z(A, v, xi);
        Poly b = eval_var_z(B, v, xi);
        Rat ca = a.is_zero() ? Rat(1) : a.rational_content();
        Rat cb = b.is_zero() ? Rat(1) : b.rational_content();
        std::optional<Poly> gpp = gcdheu_z(a.scaled(ca.inv()), b.scaled(cb.inv()), depth + 1);
        if (gpp) {
            mpz_class cc;
            mpz_gcd(cc.get_mpz_t(), ca.num().get_mpz_t(), cb.num().get_mpz_t());
            Poly gamma = gpp->scaled(Rat(cc));
            auto G = xi_adic_reconstruct(gamma, v, xi, degcap);
            if (G && !G->is_zero()) {
                Poly Gp = G->scaled(G->rational_content().inv());
                if (poly_divexact(A, Gp) && poly_divexact(B, Gp)) return Gp;
            }
        }
        xi = xi * 73794 / 27011;
    }
    return std::nullopt;
}

/// Pseudo-remainder of a by b in variable v: lc(b)^(da-db+1) * a = q*b + rem.
inline Poly prem(const Poly& a, const Poly& b, int v) {
    int db = b.degree_in(v);
    auto bc = coeffs_in(b, v);
    Poly lb = bc[static_cast<std::size_t>(db)];
    auto rc = coeffs_in(a, v);
    int dr = a.degree_in(v);
    int steps = dr - db + 1;
    while (dr >= db && !(dr == 0 && rc[0].is_zero())) {
        Poly lr = rc[static_cast<std::size_t>(dr)];
        if (lr.is_zero()) {
            --dr;
            continue;
        }
        // rem = lb*rem - lr * v^(dr-db) * b
        for (auto& c : rc) c *= lb;
        for (int i = 0; i <= db; ++i)
            rc[static_cast<std::size_t>(dr - db + i)] -= lr * bc[static_cast<std::size_t>(i)];
        --steps;
        dr = -1;
        for (int i = static_cast<int>(rc.size()) - 1; i >= 0; --i)
            if (!rc[static_cast<std::size_t>(i)].is_zero()) { dr = i; break; }
        if (dr < db) break;
    }
    Poly rem = from_coeffs(rc, v);
    // Normalize the cofactor so prem always equals lb^(da-db+1)*a mod b.
    while (steps-- > 0) rem *= lb;
    return rem;
}

inline Poly content_in(const Poly& p, int v) {
    auto c = coeffs_in(p, v);
    Poly g;
    for (const auto& ci : c) {
        if (ci.is_zero()) continue;
        g = poly_gcd(g, ci);
        if (g.is_one()) break;
    }
    return g;
}

/// Canonical normalization of a gcd representative: divide out the rational
/// content so the leading coefficient is a positive "primitive" one.
inline Poly gcd_normalize(const Poly& p) {
    if (p.is_zero()) return p;
    return p.scaled(p.rational_content().inv());
}

/// Multivariate gcd by subresultant pseudo-remainder sequences.
inline Poly poly_gcd(const Poly& a, const Poly& b) {
    if (a.is_zero()) return gcd_normalize(b);
    if (b.is_zero()) return gcd_normalize(a);
    if (a.is_constant() || b.is_constant()) return Poly(1);

    // Monomial content first: cheap and common.
    Mono ma = a.monomial_content(), mb = b.monomial_content();
    Mono mg;
    for (int v = 0; v < kNumVars; ++v) mg.set_exp(v, std::min(ma.exp(v), mb.exp(v)));
    Poly A = a.divided_by_monomial(ma), B = b.divided_by_monomial(mb);
    Poly mono = Poly::monomial(mg, Rat(1));

    // Divisibility fast paths (denominators in this engine are mostly powers
    // of a single irreducible factor, caught here without a PRS).
    if (!A.is_constant() && !B.is_constant()) {
        if (auto q = poly_divexact(A, B)) { (void)q; return gcd_normalize(B) * mono; }
        if (auto q = poly_divexact(B, A)) { (void)q; return gcd_normalize(A) * mono; }
    }
    if (A.is_constant() || B.is_constant()) return mono;

    // Heuristic gcd first; the PRS below is the (rare) fallback.
    {
        Poly Az = A.scaled(A.rational_content().inv());
        Poly Bz = B.scaled(B.rational_content().inv());
        if (auto g = gcdheu_z(Az, Bz, 0)) return gcd_normalize(*g) * mono;
    }

    int v = std::max(A.max_var(), B.max_var());
    if (!A.depends_on(v)) return poly_gcd(A, content_in(B, v)) * mono;
    if (!B.depends_on(v)) return poly_gcd(B, content_in(A, v)) * mono;

    Poly contA = content_in(A, v), contB = content_in(B, v);
    Poly cg = poly_gcd(contA, contB);
    Poly F = *poly_divexact(A, contA);
    Poly G = *poly_divexact(B, contB);
    if (F.degree_in(v) < G.degree_in(v)) std::swap(F, G);

    Poly g(1), h(1);
    while (true) {
        int delta = F.degree_in(v) - G.degree_in(v);
        Poly R = prem(F, G, v);
        if (R.is_zero()) break;
        if (!R.depends_on(v)) {
            // Nontrivial remainder of degree 0: primitive parts are coprime.
            G = Poly(1);
            break;
        }
        F = G;
        Poly divisor = g;
        for (int i = 0; i < delta; ++i) divisor *= h;
        G = *poly_divexact(R, divisor);
        g = coeffs_in(F, v)[static_cast<std::size_t>(F.degree_in(v))];
        // h = g^delta / h^(delta-1)
        Poly gnum(1);
        for (int i = 0; i < delta; ++i) gnum *= g;
        if (delta == 0)
            h = *poly_divexact(h, Poly(1)) * gnum;  // h unchanged times g^0
        else {
            Poly hden(1);
            for (int i = 0; i < delta - 1; ++i) hden *= h;
            h = *poly_divexact(gnum, hden);
        }
    }
    if (G.is_constant()) return gcd_normalize(cg) * mono;
    Poly pp = *poly_divexact(G, content_in(G, v));
    return gcd_normalize(cg * pp) * mono;
}

}  // namespace detail

inline Poly poly_gcd(const Poly& a, const Poly& b) { return detail::poly_gcd(a, b); }

}  // namespace gjms
