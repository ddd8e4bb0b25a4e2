#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gjms/polynomial.hpp"

namespace gjms {

/// Exact multivariate rational function over Q in the chart variables and
/// lambda. Canonical form: gcd-reduced with a grlex-monic denominator, so
/// equality is structural.
class RatFn {
  public:
    RatFn() : num_(), den_(1) {}
    RatFn(int c) : num_(c), den_(1) {}
    RatFn(const Rat& c) : num_(c), den_(1) {}
    RatFn(const Poly& p) : num_(p), den_(1) {}
    RatFn(const Poly& num, const Poly& den) : num_(num), den_(den) { normalize(); }

    static RatFn variable(int v, int exp = 1) { return RatFn(Poly::variable(v, exp)); }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_polynomial() const { return den_.is_one(); }
    bool is_constant() const { return num_.is_constant() && den_.is_one(); }
    Rat constant_value() const {
        if (!is_constant()) throw math_error("rational function is not constant");
        return num_.constant_value();
    }

    RatFn operator-() const {
        RatFn r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    friend RatFn operator+(const RatFn& a, const RatFn& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.den_ == b.den_) return RatFn(a.num_ + b.num_, a.den_);
        Poly g = poly_gcd(a.den_, b.den_);
        if (g.is_one()) return RatFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
        Poly da = *poly_divexact(a.den_, g);
        Poly db = *poly_divexact(b.den_, g);
        return RatFn(a.num_ * db + b.num_ * da, a.den_ * db);
    }
    friend RatFn operator-(const RatFn& a, const RatFn& b) { return a + (-b); }

    friend RatFn operator*(const RatFn& a, const RatFn& b) {
        if (a.is_zero() || b.is_zero()) return RatFn();
        if (a.is_one()) return b;
        if (b.is_one()) return a;
        // Cross-cancel before multiplying to keep intermediates small.
        Poly g1 = poly_gcd(a.num_, b.den_);
        Poly g2 = poly_gcd(b.num_, a.den_);
        Poly n1 = g1.is_one() ? a.num_ : *poly_divexact(a.num_, g1);
        Poly d2 = g1.is_one() ? b.den_ : *poly_divexact(b.den_, g1);
        Poly n2 = g2.is_one() ? b.num_ : *poly_divexact(b.num_, g2);
        Poly d1 = g2.is_one() ? a.den_ : *poly_divexact(a.den_, g2);
        RatFn r;
        r.num_ = n1 * n2;
        r.den_ = d1 * d2;
        r.normalize_monic_only();
        return r;
    }

    friend RatFn operator/(const RatFn& a, const RatFn& b) {
        if (b.is_zero()) throw math_error("division by the zero rational function");
        RatFn binv;
        binv.num_ = b.den_;
        binv.den_ = b.num_;
        return a * binv;
    }

    RatFn& operator+=(const RatFn& o) { *this = *this + o; return *this; }
    RatFn& operator-=(const RatFn& o) { *this = *this - o; return *this; }
    RatFn& operator*=(const RatFn& o) { *this = *this * o; return *this; }
    RatFn& operator/=(const RatFn& o) { *this = *this / o; return *this; }

    friend bool operator==(const RatFn& a, const RatFn& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RatFn& a, const RatFn& b) { return !(a == b); }

    RatFn inv() const {
        if (is_zero()) throw math_error("inverse of the zero rational function");
        RatFn r;
        r.num_ = den_;
        r.den_ = num_;
        r.normalize_monic_only();
        return r;
    }

    RatFn pow(int e) const {
        if (e < 0) return inv().pow(-e);
        RatFn r(1), b(*this);
        while (e > 0) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    RatFn derivative(int v) const {
        if (is_polynomial()) return RatFn(num_.derivative(v));
        if (!den_.depends_on(v)) return RatFn(num_.derivative(v), den_);
        // (n/d)' = (n'd - nd')/d^2
        return RatFn(num_.derivative(v) * den_ - num_ * den_.derivative(v), den_ * den_);
    }

    RatFn eval_partial(const std::vector<std::pair<int, Rat>>& vals) const {
        Poly n = num_.eval_partial(vals);
        Poly d = den_.eval_partial(vals);
        if (d.is_zero()) throw math_error("pole hit while evaluating rational function");
        return RatFn(n, d);
    }

    Rat eval_all(const std::vector<std::pair<int, Rat>>& vals) const {
        RatFn v = eval_partial(vals);
        if (!v.is_constant())
            throw math_error("evaluation left free variables: " + v.str());
        return v.constant_value();
    }

    bool depends_on(int v) const { return num_.depends_on(v) || den_.depends_on(v); }

    /// Canonical text: "num" for polynomials, "(num)/(den)" otherwise.
    std::string str() const {
        if (is_polynomial()) return num_.str();
        return "(" + num_.str() + ")/(" + den_.str() + ")";
    }

    /// Taylor polynomial in the chart variables at the origin through total
    /// degree `bound`; requires the denominator to be 1 + O(x) up to scale.
    Poly taylor_x(int bound) const;

  private:
    void normalize() {
        if (den_.is_zero()) throw math_error("rational function with zero denominator");
        if (num_.is_zero()) {
            den_ = Poly(1);
            return;
        }
        if (!den_.is_constant()) {
            Poly g = poly_gcd(num_, den_);
            if (!g.is_one()) {
                num_ = *poly_divexact(num_, g);
                den_ = *poly_divexact(den_, g);
            }
        }
        normalize_monic_only();
    }
    /// Scales so the denominator is grlex-monic (assumes already reduced).
    void normalize_monic_only() {
        if (den_.is_zero()) throw math_error("rational function with zero denominator");
        if (num_.is_zero()) {
            den_ = Poly(1);
            return;
        }
        Rat lc = den_.leading().second;
        if (!lc.is_one()) {
            Rat inv = lc.inv();
            num_ = num_.scaled(inv);
            den_ = den_.scaled(inv);
        }
    }

    Poly num_, den_;
};

inline Poly RatFn::taylor_x(int bound) const {
    if (is_polynomial()) return num_.truncate_xdeg(bound);
    Poly d0 = den_.eval_partial({{0, Rat(0)}, {1, Rat(0)}, {2, Rat(0)}, {3, Rat(0)},
                                 {4, Rat(0)}, {5, Rat(0)}});
    if (!d0.is_constant() || d0.is_zero())
        throw math_error("taylor_x needs a denominator with constant nonzero x-value at 0");
    Rat c0 = d0.constant_value();
    // 1/den = (1/c0) * sum ((c0-den)/c0)^j, truncated by x-degree.
    Poly v = (Poly(c0) - den_).scaled(c0.inv());
    if (v.min_xdeg() < 1) throw math_error("taylor_x: denominator tail has constant part");
    Poly inv(Rat(1) / c0), pw(Rat(1) / c0);
    for (int j = 1; j <= bound; ++j) {
        pw = (pw * v).truncate_xdeg(bound);
        if (pw.is_zero()) break;
        inv += pw;
    }
    return (num_.truncate_xdeg(bound) * inv).truncate_xdeg(bound);
}

}  // namespace gjms
