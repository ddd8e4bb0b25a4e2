#pragma once

#include <string>
#include <vector>

#include "gjms/ratfn.hpp"

namespace gjms {

/// Truncated power series in rho with RatFn coefficients and an explicit
/// guaranteed order: the value is known modulo O(rho^(order+1)).
///
/// A jet may also be exact (order() == kInfOrder): every coefficient beyond
/// the stored ones is exactly zero. Closed-form data like (1+lambda rho)^2 g
/// or r = 2 rho t^2 is exact, and stays exact through ring operations; only
/// genuinely truncated data (series inverses, general families) carries a
/// finite guarantee.
///
/// Order bookkeeping is strict. Asking for a coefficient beyond a finite
/// guarantee throws truncation_error; it is never silently treated as zero.
class RhoJet {
  public:
    static constexpr int kInfOrder = 1 << 28;

    RhoJet() : order_(-1) {}  // "no information" jet; unusable until assigned

    explicit RhoJet(int order) : order_(order) {
        if (order < 0) throw math_error("jet with negative guaranteed order");
    }
    RhoJet(const RatFn& c0, int order) : RhoJet(order) {
        if (!c0.is_zero()) {
            if (c_.empty()) c_.resize(1);
            c_[0] = c0;
        }
    }

    static RhoJet constant(const RatFn& v, int order) { return RhoJet(v, order); }
    static RhoJet constant_exact(const RatFn& v) { return RhoJet(v, kInfOrder); }
    static RhoJet zero(int order) { return RhoJet(order); }
    static RhoJet zero_exact() { return RhoJet(kInfOrder); }

    /// Builds a jet from explicit low-order coefficients; the remaining
    /// coefficients up to `order` are exactly zero.
    static RhoJet from_coeffs(const std::vector<RatFn>& coeffs, int order) {
        if (order < kInfOrder && static_cast<int>(coeffs.size()) > order + 1)
            throw math_error("more coefficients than the guaranteed order admits");
        RhoJet j(order);
        if (j.c_.size() < coeffs.size()) j.c_.resize(coeffs.size());
        for (std::size_t i = 0; i < coeffs.size(); ++i) j.c_[i] = coeffs[i];
        j.trim();
        return j;
    }
    /// A polynomial in rho, exactly.
    static RhoJet from_coeffs_exact(const std::vector<RatFn>& coeffs) {
        return from_coeffs(coeffs, kInfOrder);
    }

    int order() const { return order_; }
    bool is_exact() const { return order_ == kInfOrder; }
    int stored() const { return static_cast<int>(c_.size()); }

    const RatFn& coeff(int m) const {
        if (m < 0) throw math_error("negative rho-power");
        if (m > order_)
            throw truncation_error("jet coefficient beyond guaranteed order", m, order_);
        if (m < static_cast<int>(c_.size())) return c_[static_cast<std::size_t>(m)];
        return zero_ratfn();
    }
    void set_coeff(int m, const RatFn& v) {
        if (m < 0 || m > order_)
            throw truncation_error("jet coefficient beyond guaranteed order", m, order_);
        if (m >= static_cast<int>(c_.size())) c_.resize(static_cast<std::size_t>(m) + 1);
        c_[static_cast<std::size_t>(m)] = v;
    }

    bool is_zero() const {
        for (const auto& c : c_)
            if (!c.is_zero()) return false;
        return true;
    }
    bool is_exact_zero() const { return is_exact() && is_zero(); }

    /// Smallest rho-power with nonzero coefficient; order()+1 (saturated at
    /// kInfOrder) when the jet is zero through its guarantee.
    int valuation() const {
        for (int m = 0; m < static_cast<int>(c_.size()); ++m)
            if (!c_[static_cast<std::size_t>(m)].is_zero()) return m;
        return sat_add(order_, 1);
    }

    /// Re-truncates to a smaller (finite or equal) guaranteed order.
    RhoJet truncated(int new_order) const {
        if (new_order > order_)
            throw truncation_error("cannot raise a jet guarantee", new_order, order_);
        RhoJet r(new_order);
        int top = std::min(new_order, static_cast<int>(c_.size()) - 1);
        for (int m = 0; m <= top; ++m) r.set_coeff(m, c_[static_cast<std::size_t>(m)]);
        return r;
    }

    RhoJet operator-() const {
        RhoJet r(*this);
        for (auto& c : r.c_) c = -c;
        return r;
    }

    friend RhoJet operator+(const RhoJet& a, const RhoJet& b) {
        int n = std::min(a.order_, b.order_);
        RhoJet r(n);
        int top = std::max(a.stored(), b.stored()) - 1;
        if (n < kInfOrder) top = std::min(top, n);
        for (int m = 0; m <= top; ++m) {
            RatFn s = a.raw(m) + b.raw(m);
            if (!s.is_zero()) r.set_coeff(m, s);
        }
        r.trim();
        return r;
    }
    friend RhoJet operator-(const RhoJet& a, const RhoJet& b) { return a + (-b); }

    /// Cauchy product with the valuation-aware guarantee
    /// min(Na + val(b), Nb + val(a)); exact times exact stays exact.
    friend RhoJet operator*(const RhoJet& a, const RhoJet& b) {
        int va = a.valuation(), vb = b.valuation();
        int n = std::min(sat_add(a.order_, vb), sat_add(b.order_, va));
        RhoJet r(n);
        if (a.c_.empty() || b.c_.empty()) return r;
        int top = a.stored() + b.stored() - 2;
        if (n < kInfOrder) top = std::min(top, n);
        for (int i = va; i < a.stored(); ++i) {
            const RatFn& ac = a.c_[static_cast<std::size_t>(i)];
            if (ac.is_zero()) continue;
            for (int j = vb; j < b.stored() && i + j <= top; ++j) {
                const RatFn& bc = b.c_[static_cast<std::size_t>(j)];
                if (bc.is_zero()) continue;
                r.set_coeff(i + j, r.raw(i + j) + ac * bc);
            }
        }
        r.trim();
        return r;
    }

    RhoJet& operator+=(const RhoJet& o) { *this = *this + o; return *this; }
    RhoJet& operator-=(const RhoJet& o) { *this = *this - o; return *this; }
    RhoJet& operator*=(const RhoJet& o) { *this = *this * o; return *this; }

    RhoJet scaled(const RatFn& f) const {
        if (f.is_zero()) {
            RhoJet r(order_);
            return r;
        }
        RhoJet r(*this);
        for (auto& c : r.c_) c = c * f;
        return r;
    }

    /// Equality of all coefficients through the common guaranteed order.
    friend bool agree_to_common_order(const RhoJet& a, const RhoJet& b) {
        int n = std::min(a.order_, b.order_);
        int top = std::max(a.stored(), b.stored()) - 1;
        if (n < kInfOrder) top = std::min(top, n);
        for (int m = 0; m <= top; ++m)
            if (a.raw(m) != b.raw(m)) return false;
        return true;
    }

    /// d/drho; a finite guarantee drops by one, exact jets stay exact.
    RhoJet d_rho() const {
        if (!is_exact() && order_ < 1)
            throw truncation_error("rho-derivative needs at least one guaranteed order", 1, order_);
        RhoJet r(is_exact() ? kInfOrder : order_ - 1);
        for (int m = 1; m < stored(); ++m)
            if (!c_[static_cast<std::size_t>(m)].is_zero())
                r.set_coeff(m - 1, c_[static_cast<std::size_t>(m)] * Rat(m));
        r.trim();
        return r;
    }

    /// Partial derivative in a chart variable, coefficientwise.
    RhoJet d_x(int v) const {
        RhoJet r(*this);
        for (auto& c : r.c_) c = c.derivative(v);
        return r;
    }

    /// Multiplication by rho^k (exact, raises a finite guarantee by k).
    RhoJet shifted_up(int k) const {
        RhoJet r(sat_add(order_, k));
        for (int m = 0; m < stored(); ++m)
            if (!c_[static_cast<std::size_t>(m)].is_zero())
                r.set_coeff(m + k, c_[static_cast<std::size_t>(m)]);
        return r;
    }

    /// Exact division by rho^k; stored coefficients below k must vanish.
    RhoJet shifted_down(int k) const {
        if (order_ < k)
            throw truncation_error("division by rho^k beyond guarantee", k, order_);
        for (int m = 0; m < std::min(k, stored()); ++m)
            if (!c_[static_cast<std::size_t>(m)].is_zero())
                throw math_error("division by rho^" + std::to_string(k) +
                                 " of a jet with nonzero low coefficient");
        RhoJet r(is_exact() ? kInfOrder : order_ - k);
        for (int m = k; m < stored(); ++m)
            if (!c_[static_cast<std::size_t>(m)].is_zero())
                r.set_coeff(m - k, c_[static_cast<std::size_t>(m)]);
        return r;
    }

    /// Multiplicative inverse to the given order; the constant term must be
    /// invertible. Exact constants invert exactly.
    RhoJet inverted_to(int target) const {
        if (order_ < 0) throw math_error("inverting an unassigned jet");
        if (raw(0).is_zero()) throw math_error("jet with zero constant term is not invertible");
        if (is_exact() && stored() <= 1) return constant_exact(c_[0].inv());
        if (target > order_)
            throw truncation_error("jet inverse beyond guaranteed order", target, order_);
        if (target == kInfOrder)
            throw math_error("inverse of a non-constant jet needs a finite target order");
        RhoJet r(target);
        RatFn i0 = raw(0).inv();
        r.set_coeff(0, i0);
        for (int m = 1; m <= target; ++m) {
            RatFn s;
            for (int j = 1; j <= m; ++j) s += raw(j) * r.raw(m - j);
            if (!s.is_zero()) r.set_coeff(m, -(i0 * s));
        }
        return r;
    }
    /// Inverse at the jet's own (finite) order.
    RhoJet inverted() const {
        if (is_exact() && stored() > 1)
            throw math_error("inverse of an exact non-constant jet needs a target order");
        return inverted_to(is_exact() ? kInfOrder : order_);
    }

    /// Integer power; negative powers through the inverse (finite jets or
    /// exact constants only).
    RhoJet power(int e) const {
        if (e < 0) return inverted().power(-e);
        RhoJet r = constant_exact(RatFn(1));
        for (int i = 0; i < e; ++i) r = r * *this;
        return r;
    }

    std::string str() const {
        std::string s = "[";
        for (int m = 0; m < stored(); ++m) {
            if (m) s += ", ";
            s += c_[static_cast<std::size_t>(m)].str();
        }
        s += "]";
        if (is_exact()) return s + " (exact)";
        return s + " + O(rho^" + std::to_string(order_ + 1) + ")";
    }

  private:
    static int sat_add(int a, int b) {
        long s = static_cast<long>(std::min(a, kInfOrder)) + static_cast<long>(std::min(b, kInfOrder));
        return s >= kInfOrder ? kInfOrder : static_cast<int>(s);
    }
    static const RatFn& zero_ratfn() {
        static const RatFn z;
        return z;
    }
    const RatFn& raw(int m) const {
        if (m < static_cast<int>(c_.size())) return c_[static_cast<std::size_t>(m)];
        return zero_ratfn();
    }
    void trim() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }

    std::vector<RatFn> c_;
    int order_;
};

/// The jet of (1 + lambda*rho)^w: exact for w >= 0, guaranteed to order n
/// otherwise.
inline RhoJet one_plus_lambda_rho_pow(int w, int n, const RatFn& lambda) {
    RhoJet base = RhoJet::from_coeffs_exact({RatFn(1), lambda});
    if (w >= 0) return base.power(w);
    return base.truncated(n).inverted().power(-w);
}

}  // namespace gjms
