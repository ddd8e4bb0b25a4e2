#pragma once

#include "gjms/ratfn.hpp"

namespace gjms {

/// Operations the tensor calculus needs from a scalar ring K: ring arithmetic
/// via operators, division by units, coordinate derivatives, zero/unit tests.
template <class K>
struct scalar_ops;

template <>
struct scalar_ops<RatFn> {
    static bool is_zero(const RatFn& a) { return a.is_zero(); }
    static bool is_unit(const RatFn& a) { return !a.is_zero(); }
    static RatFn dx(const RatFn& a, int var) { return a.derivative(var); }
    static RatFn from_int(int v) { return RatFn(v); }
};

/// First-order jet in a formal perturbation parameter: value + eps * deriv
/// with eps^2 = 0. Used to linearize curvature operators exactly.
template <class K>
struct Dual {
    K a{};  // value
    K b{};  // first-order part

    Dual() = default;
    Dual(int v) : a(v) {}
    Dual(const K& a_) : a(a_) {}
    Dual(const K& a_, const K& b_) : a(a_), b(b_) {}

    Dual operator-() const { return {K() - a, K() - b}; }
    friend Dual operator+(const Dual& x, const Dual& y) { return {x.a + y.a, x.b + y.b}; }
    friend Dual operator-(const Dual& x, const Dual& y) { return {x.a - y.a, x.b - y.b}; }
    friend Dual operator*(const Dual& x, const Dual& y) {
        return {x.a * y.a, x.a * y.b + x.b * y.a};
    }
    friend Dual operator/(const Dual& x, const Dual& y) {
        K q = x.a / y.a;
        return {q, (x.b - q * y.b) / y.a};
    }
    Dual& operator+=(const Dual& o) { *this = *this + o; return *this; }
    Dual& operator-=(const Dual& o) { *this = *this - o; return *this; }
    Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
    friend bool operator==(const Dual& x, const Dual& y) { return x.a == y.a && x.b == y.b; }
    friend bool operator!=(const Dual& x, const Dual& y) { return !(x == y); }
};

template <class K>
struct scalar_ops<Dual<K>> {
    static bool is_zero(const Dual<K>& d) {
        return scalar_ops<K>::is_zero(d.a) && scalar_ops<K>::is_zero(d.b);
    }
    static bool is_unit(const Dual<K>& d) { return scalar_ops<K>::is_unit(d.a); }
    static Dual<K> dx(const Dual<K>& d, int var) {
        return {scalar_ops<K>::dx(d.a, var), scalar_ops<K>::dx(d.b, var)};
    }
    static Dual<K> from_int(int v) { return Dual<K>(v); }
};

}  // namespace gjms
