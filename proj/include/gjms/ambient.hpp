#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gjms/chart.hpp"
#include "gjms/rho_jet.hpp"

namespace gjms {

template <>
struct scalar_ops<RhoJet> {
    static bool is_zero(const RhoJet& j) { return j.is_zero(); }
    static bool is_unit(const RhoJet& j) { return j.order() >= 0 && !j.coeff(0).is_zero(); }
    static RhoJet dx(const RhoJet& j, int var) { return j.d_x(var); }
    static RhoJet from_int(int v) { return RhoJet::constant_exact(RatFn(v)); }
};
inline RhoJet operator/(const RhoJet& a, const RhoJet& b) { return a * b.inverted(); }

/// Homogeneity weight, valued in (1/2) Z: for odd base dimensions the natural
/// tensor weights -n/2+2+k are half-integers. Stored as twice the weight.
class Weight {
  public:
    Weight() = default;
    Weight(int w) : twice_(2 * w) {}
    static Weight halves(int twice) {
        Weight w;
        w.twice_ = twice;
        return w;
    }
    int twice() const { return twice_; }
    Rat rat() const { return Rat(twice_, 2); }
    bool is_integer() const { return twice_ % 2 == 0; }
    friend Weight operator+(Weight a, Weight b) { return halves(a.twice_ + b.twice_); }
    friend Weight operator-(Weight a, Weight b) { return halves(a.twice_ - b.twice_); }
    friend bool operator==(Weight a, Weight b) { return a.twice_ == b.twice_; }
    friend bool operator!=(Weight a, Weight b) { return a.twice_ != b.twice_; }
    std::string str() const {
        if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

  private:
    int twice_ = 0;
};

/// Homogeneous tensor on the ambient space R+ x M x R in coordinates
/// (t, x, rho). Ambient indices run over {0 (t), 1..n (x), n+1 (rho)}.
///
/// The t-coordinate is never stored: a component whose index pattern has `a`
/// covariant and `b` contravariant 0-indices is the coefficient of
/// t^(weight - a + b), which makes homogeneity L_T sigma = w sigma structural.
/// Components are rho-jets over exact rational functions of (x, lambda).
class AmbientTensor {
  public:
    AmbientTensor() : n_(0), weight_(0) {}
    AmbientTensor(int n, Weight weight, std::vector<bool> contra)
        : n_(n), weight_(weight), contra_(std::move(contra)) {
        std::size_t sz = 1;
        for (std::size_t s = 0; s < contra_.size(); ++s) sz *= dims();
        c_.assign(sz, RhoJet());
    }
    static AmbientTensor scalar(int n, Weight weight, const RhoJet& v) {
        AmbientTensor t(n, weight, {});
        t.c_[0] = v;
        return t;
    }

    int base_dim() const { return n_; }
    std::size_t dims() const { return static_cast<std::size_t>(n_) + 2; }
    Weight weight() const { return weight_; }
    int rank() const { return static_cast<int>(contra_.size()); }
    const std::vector<bool>& variance() const { return contra_; }
    bool is_contra(int slot) const { return contra_[static_cast<std::size_t>(slot)]; }
    int t_index() const { return 0; }
    int rho_index() const { return n_ + 1; }

    std::size_t flat_size() const { return c_.size(); }
    RhoJet& flat(std::size_t i) { return c_[i]; }
    const RhoJet& flat(std::size_t i) const { return c_[i]; }
    std::size_t offset(const std::vector<int>& idx) const {
        std::size_t o = 0;
        for (int i : idx) o = o * dims() + static_cast<std::size_t>(i);
        return o;
    }
    RhoJet& at(const std::vector<int>& idx) { return c_[offset(idx)]; }
    const RhoJet& at(const std::vector<int>& idx) const { return c_[offset(idx)]; }
    std::vector<int> unpack(std::size_t o) const {
        std::vector<int> idx(static_cast<std::size_t>(rank()));
        for (int s = rank() - 1; s >= 0; --s) {
            idx[static_cast<std::size_t>(s)] = static_cast<int>(o % dims());
            o /= dims();
        }
        return idx;
    }

    /// Implied power of t for a component: weight - #cov0 + #contra0.
    Rat t_power(const std::vector<int>& idx) const {
        int p2 = weight_.twice();
        for (int s = 0; s < rank(); ++s) {
            if (idx[static_cast<std::size_t>(s)] != 0) continue;
            p2 += is_contra(s) ? 2 : -2;
        }
        return Rat(p2, 2);
    }

    bool is_zero() const {
        for (const auto& v : c_)
            if (!v.is_zero()) return false;
        return true;
    }
    /// Smallest guaranteed jet order over all components.
    int min_order() const {
        int m = INT32_MAX;
        for (const auto& v : c_) m = std::min(m, v.order());
        return m;
    }

    void check_same_shape(const AmbientTensor& o) const {
        if (n_ != o.n_ || weight_ != o.weight_ || contra_ != o.contra_)
            throw math_error("ambient tensor shape/weight mismatch");
    }

    AmbientTensor operator-() const {
        AmbientTensor r(*this);
        for (auto& v : r.c_) v = -v;
        return r;
    }
    friend AmbientTensor operator+(AmbientTensor a, const AmbientTensor& b) {
        a.check_same_shape(b);
        for (std::size_t i = 0; i < a.c_.size(); ++i) a.c_[i] += b.c_[i];
        return a;
    }
    friend AmbientTensor operator-(AmbientTensor a, const AmbientTensor& b) {
        a.check_same_shape(b);
        for (std::size_t i = 0; i < a.c_.size(); ++i) a.c_[i] -= b.c_[i];
        return a;
    }
    AmbientTensor& operator+=(const AmbientTensor& o) { *this = *this + o; return *this; }
    AmbientTensor& operator-=(const AmbientTensor& o) { *this = *this - o; return *this; }

    AmbientTensor scaled(const RatFn& f) const {
        AmbientTensor r(*this);
        for (auto& v : r.c_) v = v.scaled(f);
        return r;
    }
    AmbientTensor scaled(const Rat& f) const { return scaled(RatFn(f)); }

    /// Multiplication by a homogeneous scalar (rank-0 ambient tensor);
    /// weights add, jets multiply.
    AmbientTensor scaled_by_scalar(const AmbientTensor& s) const {
        if (s.rank() != 0) throw math_error("scalar factor must have rank 0");
        AmbientTensor r(n_, weight_ + s.weight_, contra_);
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] * s.c_[0];
        return r;
    }

    AmbientTensor symmetrized(int s1, int s2) const {
        AmbientTensor r(n_, weight_, contra_);
        for (std::size_t o = 0; o < c_.size(); ++o) {
            std::vector<int> idx = unpack(o);
            std::vector<int> sw = idx;
            std::swap(sw[static_cast<std::size_t>(s1)], sw[static_cast<std::size_t>(s2)]);
            r.c_[o] = (c_[o] + at(sw)).scaled(Rat(1, 2));
        }
        return r;
    }
    bool symmetric_in(int s1, int s2) const {
        for (std::size_t o = 0; o < c_.size(); ++o) {
            std::vector<int> idx = unpack(o);
            std::vector<int> sw = idx;
            std::swap(sw[static_cast<std::size_t>(s1)], sw[static_cast<std::size_t>(s2)]);
            if (!(c_[o] - at(sw)).is_zero()) return false;
        }
        return true;
    }

    /// Equality of all components through the common guaranteed orders.
    friend bool agree_to_common_order(const AmbientTensor& a, const AmbientTensor& b) {
        a.check_same_shape(b);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            if (!agree_to_common_order(a.c_[i], b.c_[i])) return false;
        return true;
    }

    AmbientTensor truncated(int order) const {
        AmbientTensor r(*this);
        for (auto& v : r.c_) v = v.truncated(std::min(order, v.order()));
        return r;
    }

  private:
    int n_;
    Weight weight_;
    std::vector<bool> contra_;
    std::vector<RhoJet> c_;
};

/// Normal-form ambient space over a base chart: the assembled metric
/// g~ = 2 rho dt^2 + 2t dt drho + t^2 g_rho, its inverse, connection and
/// curvature, all as graded rho-jets.
struct AmbientSpace {
    int n = 0;          // base dimension
    int N = 0;          // requested truncation order
    ChartMetric<RatFn> base;
    TensorField<RatFn> base_gamma;       // Christoffel of the base metric
    std::vector<std::vector<RhoJet>> g_rho;  // n x n family, g_rho(0) = g
    std::optional<RatFn> einstein_lambda;    // set for the closed-form build

    AmbientTensor g;      // (0,2), weight 2
    AmbientTensor ginv;   // (2,0), weight -2
    AmbientTensor gamma;  // (1,2), weight 0
    AmbientTensor riem4;  // (0,4), weight 2: R_{KLIJ}, pairs (KL),(IJ)
    AmbientTensor ric;    // (0,2), weight 0
};

// ---------------------------------------------------------------------------
// elementary ambient objects

/// Dilation vector field T = t d/dt as a (1,0) tensor of weight 0.
inline AmbientTensor dilation_field(const AmbientSpace& A);
/// r = |T|^2 = 2 rho t^2 as a weight-2 scalar (exact).
inline AmbientTensor r_scalar(const AmbientSpace& A);
/// (2 rho)^m as the graded jet of r^m (weight 2m, exact).
inline AmbientTensor r_power(const AmbientSpace& A, int m);

// ---------------------------------------------------------------------------
// ambient differential operators

/// Coordinate/graded partial derivative: new covariant slot in position 0.
/// Direction 0 multiplies by the implied t-power (and shifts the grading),
/// directions 1..n differentiate coefficients in x, direction rho is d/drho.
inline AmbientTensor partial_ambient(const AmbientSpace& A, const AmbientTensor& t) {
    std::vector<bool> var = t.variance();
    var.insert(var.begin(), false);
    AmbientTensor r(A.n, t.weight(), var);
    const int rho = t.rho_index();
    std::vector<int> ridx(static_cast<std::size_t>(t.rank()) + 1);
    for (std::size_t o = 0; o < t.flat_size(); ++o) {
        std::vector<int> idx = t.unpack(o);
        std::copy(idx.begin(), idx.end(), ridx.begin() + 1);
        const RhoJet& v = t.flat(o);
        for (int d = 0; d < static_cast<int>(t.dims()); ++d) {
            ridx[0] = d;
            if (d == 0) {
                r.at(ridx) = v.scaled(t.t_power(idx));
            } else if (d == rho) {
                r.at(ridx) = v.d_rho();
            } else {
                r.at(ridx) = v.d_x(d - 1);
            }
        }
    }
    return r;
}

inline AmbientTensor cov_deriv_ambient(const AmbientSpace& A, const AmbientTensor& t) {
    AmbientTensor r = partial_ambient(A, t);
    const int rk = t.rank();
    const int dims = static_cast<int>(t.dims());
    std::vector<int> ridx(static_cast<std::size_t>(rk) + 1);
    for (std::size_t o = 0; o < t.flat_size(); ++o) {
        std::vector<int> idx = t.unpack(o);
        std::copy(idx.begin(), idx.end(), ridx.begin() + 1);
        for (int d = 0; d < dims; ++d) {
            ridx[0] = d;
            RhoJet corr = r.at(ridx);
            std::vector<int> jidx = idx;
            for (int s = 0; s < rk; ++s) {
                const int is = idx[static_cast<std::size_t>(s)];
                // zero jets are kept in the sums: their unknown tails still
                // cap the guaranteed order of the result
                for (int l = 0; l < dims; ++l) {
                    jidx[static_cast<std::size_t>(s)] = l;
                    const RhoJet& tv = t.at(jidx);
                    if (t.is_contra(s))
                        corr += A.gamma.at({is, d, l}) * tv;
                    else
                        corr -= A.gamma.at({l, d, is}) * tv;
                }
                jidx[static_cast<std::size_t>(s)] = is;
            }
            r.at(ridx) = corr;
        }
    }
    return r;
}

inline AmbientTensor contract_ambient(const AmbientTensor& t, int s1, int s2) {
    if (t.is_contra(s1) == t.is_contra(s2))
        throw math_error("ambient contraction needs opposite variances");
    std::vector<bool> var;
    for (int s = 0; s < t.rank(); ++s)
        if (s != s1 && s != s2) var.push_back(t.is_contra(s));
    AmbientTensor r(t.base_dim(), t.weight(), var);
    const int dims = static_cast<int>(t.dims());
    for (std::size_t o = 0; o < r.flat_size(); ++o) {
        std::vector<int> ridx = r.unpack(o);
        std::vector<int> idx(static_cast<std::size_t>(t.rank()));
        int q = 0;
        for (int s = 0; s < t.rank(); ++s)
            if (s != s1 && s != s2) idx[static_cast<std::size_t>(s)] = ridx[static_cast<std::size_t>(q++)];
        RhoJet acc;
        bool first = true;
        for (int l = 0; l < dims; ++l) {
            idx[static_cast<std::size_t>(s1)] = l;
            idx[static_cast<std::size_t>(s2)] = l;
            if (first) {
                acc = t.at(idx);
                first = false;
            } else {
                acc += t.at(idx);
            }
        }
        r.flat(o) = acc;
    }
    return r;
}

/// Raise/lower one slot with the ambient metric; the weight shifts by -2/+2.
inline AmbientTensor raise_slot_ambient(const AmbientSpace& A, const AmbientTensor& t, int slot) {
    if (t.is_contra(slot)) throw math_error("raise_slot_ambient: slot already contravariant");
    std::vector<bool> var = t.variance();
    var[static_cast<std::size_t>(slot)] = true;
    AmbientTensor r(t.base_dim(), t.weight() - Weight(2), var);
    const int dims = static_cast<int>(t.dims());
    for (std::size_t o = 0; o < r.flat_size(); ++o) {
        std::vector<int> ridx = r.unpack(o);
        std::vector<int> idx = ridx;
        RhoJet acc;
        bool first = true;
        for (int l = 0; l < dims; ++l) {
            const RhoJet& gv = A.ginv.at({ridx[static_cast<std::size_t>(slot)], l});
            idx[static_cast<std::size_t>(slot)] = l;
            RhoJet term = gv * t.at(idx);
            if (first) {
                acc = term;
                first = false;
            } else {
                acc += term;
            }
        }
        r.flat(o) = acc;
    }
    return r;
}

inline AmbientTensor lower_slot_ambient(const AmbientSpace& A, const AmbientTensor& t, int slot) {
    if (!t.is_contra(slot)) throw math_error("lower_slot_ambient: slot already covariant");
    std::vector<bool> var = t.variance();
    var[static_cast<std::size_t>(slot)] = false;
    AmbientTensor r(t.base_dim(), t.weight() + Weight(2), var);
    const int dims = static_cast<int>(t.dims());
    for (std::size_t o = 0; o < r.flat_size(); ++o) {
        std::vector<int> ridx = r.unpack(o);
        std::vector<int> idx = ridx;
        RhoJet acc;
        bool first = true;
        for (int l = 0; l < dims; ++l) {
            const RhoJet& gv = A.g.at({ridx[static_cast<std::size_t>(slot)], l});
            idx[static_cast<std::size_t>(slot)] = l;
            RhoJet term = gv * t.at(idx);
            if (first) {
                acc = term;
                first = false;
            } else {
                acc += term;
            }
        }
        r.flat(o) = acc;
    }
    return r;
}

inline AmbientTensor metric_trace_ambient(const AmbientSpace& A, const AmbientTensor& t,
                                          int s1, int s2) {
    return contract_ambient(raise_slot_ambient(A, t, s1), s1, s2);
}

/// Contraction of a covariant slot with the dilation field T (T^0 = t).
inline AmbientTensor T_contract(const AmbientTensor& t, int slot) {
    if (t.is_contra(slot)) throw math_error("T_contract expects a covariant slot");
    std::vector<bool> var;
    for (int s = 0; s < t.rank(); ++s)
        if (s != slot) var.push_back(t.is_contra(s));
    AmbientTensor r(t.base_dim(), t.weight(), var);
    for (std::size_t o = 0; o < r.flat_size(); ++o) {
        std::vector<int> ridx = r.unpack(o);
        std::vector<int> idx(static_cast<std::size_t>(t.rank()));
        int q = 0;
        for (int s = 0; s < t.rank(); ++s)
            idx[static_cast<std::size_t>(s)] = (s == slot) ? 0 : ridx[static_cast<std::size_t>(q++)];
        r.flat(o) = t.at(idx);
    }
    return r;
}

/// Multiplication by r^m = (2 rho t^2)^m; m may be negative, in which case
/// every component must be divisible by rho^{|m|}.
inline AmbientTensor r_multiply(const AmbientTensor& t, int m) {
    AmbientTensor r(t.base_dim(), t.weight() + Weight(2 * m), t.variance());
    const Rat scale = Rat(2).pow(m);
    for (std::size_t o = 0; o < t.flat_size(); ++o) {
        const RhoJet& v = t.flat(o);
        r.flat(o) = (m >= 0 ? v.shifted_up(m) : v.shifted_down(-m)).scaled(RatFn(scale));
    }
    return r;
}

/// Restriction to G: every component evaluated at rho = 0 (a jet of order 0).
inline AmbientTensor restrict_G(const AmbientTensor& t) { return t.truncated(0); }

struct RestrictTMResult {
    bool ok = false;
    std::string witness;               // failing precondition, if any
    TensorField<RatFn> field;          // base-chart components
    Weight weight;
};

/// Restriction |_TM: requires (T contracted into any covariant slot) to
/// vanish along G in the TG-directions; projects to base indices at rho = 0.
inline RestrictTMResult restrict_TM(const AmbientTensor& t) {
    RestrictTMResult res;
    res.weight = t.weight();
    const int n = t.base_dim();
    for (int s = 0; s < t.rank(); ++s) {
        if (t.is_contra(s)) throw math_error("restrict_TM expects covariant tensors");
        AmbientTensor tc = T_contract(t, s);
        for (std::size_t o = 0; o < tc.flat_size(); ++o) {
            std::vector<int> idx = tc.unpack(o);
            bool tangent = true;
            for (int i : idx)
                if (i == n + 1) tangent = false;  // rho-direction is transverse
            if (!tangent) continue;
            if (!tc.flat(o).coeff(0).is_zero()) {
                res.ok = false;
                res.witness = "T-contraction in slot " + std::to_string(s) +
                              " nonzero along G at component offset " + std::to_string(o) +
                              ": " + tc.flat(o).coeff(0).str();
                return res;
            }
        }
    }
    std::vector<bool> var(static_cast<std::size_t>(t.rank()), false);
    TensorField<RatFn> f(n, var);
    for (std::size_t o = 0; o < f.flat_size(); ++o) {
        std::vector<int> bidx = f.unpack(o);
        std::vector<int> aidx(bidx.size());
        for (std::size_t s = 0; s < bidx.size(); ++s) aidx[s] = bidx[s] + 1;
        f.flat(o) = t.at(aidx).coeff(0);
    }
    res.ok = true;
    res.field = std::move(f);
    return res;
}

/// Ambient extension of a tensor given along G: components constant in rho
/// (pure t-grading), the canonical extension choice.
inline AmbientTensor extend_from_G(const AmbientTensor& restricted) {
    AmbientTensor r(restricted.base_dim(), restricted.weight(), restricted.variance());
    for (std::size_t o = 0; o < r.flat_size(); ++o)
        r.flat(o) = RhoJet::constant_exact(restricted.flat(o).coeff(0));
    return r;
}

// ---------------------------------------------------------------------------
// assembled space

inline AmbientTensor dilation_field(const AmbientSpace& A) {
    AmbientTensor T(A.n, 0, {true});
    for (std::size_t o = 0; o < T.flat_size(); ++o) T.flat(o) = RhoJet::zero_exact();
    T.at({0}) = RhoJet::constant_exact(RatFn(1));
    return T;
}

inline AmbientTensor r_scalar(const AmbientSpace& A) {
    return AmbientTensor::scalar(A.n, 2, RhoJet::from_coeffs_exact({RatFn(0), RatFn(2)}));
}

inline AmbientTensor r_power(const AmbientSpace& A, int m) {
    if (m < 0) throw math_error("r_power expects m >= 0");
    // r^m = (2 rho)^m t^{2m}: a single exact coefficient at rho^m.
    RhoJet out = RhoJet::zero_exact();
    out.set_coeff(m, RatFn(Rat(2).pow(m)));
    return AmbientTensor::scalar(A.n, 2 * m, out);
}

namespace ambientdet {

/// Inverse of the rho-jet matrix g_rho (invertible at rho = 0), computed to
/// the finite target order.
inline std::vector<std::vector<RhoJet>> invert_jet_matrix(
    const std::vector<std::vector<RhoJet>>& m, int target) {
    const std::size_t n = m.size();
    std::vector<std::vector<RhoJet>> a = m;
    for (auto& row : a)
        for (auto& e : row)
            if (e.order() > target) e = e.truncated(target);
    std::vector<std::vector<RhoJet>> inv(n, std::vector<RhoJet>(n));
    int order = target;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            inv[i][j] = i == j ? RhoJet::constant(RatFn(1), order) : RhoJet::zero(order);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && !scalar_ops<RhoJet>::is_unit(a[p][c])) ++p;
        if (p == n) throw math_error("g_rho is not invertible at rho = 0");
        std::swap(a[p], a[c]);
        std::swap(inv[p], inv[c]);
        RhoJet pivinv = a[c][c].inverted();
        for (std::size_t j = 0; j < n; ++j) {
            a[c][j] = a[c][j] * pivinv;
            inv[c][j] = inv[c][j] * pivinv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c].is_zero()) continue;
            RhoJet f = a[r][c];
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] = a[r][j] - f * a[c][j];
                inv[r][j] = inv[r][j] - f * inv[c][j];
            }
        }
    }
    return inv;
}

}  // namespace ambientdet

/// Assembles the normal-form ambient space for a general family g_rho with
/// g_rho(0) = g. No Ricci-flatness is implied for a general family.
inline AmbientSpace build_ambient_from_family(const ChartMetric<RatFn>& base,
                                              std::vector<std::vector<RhoJet>> g_rho,
                                              int N) {
    const int n = base.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (!(g_rho[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].coeff(0) ==
                  base.g.at({i, j})))
                throw math_error("g_rho(0) must equal the base metric");
        }
    AmbientSpace A;
    A.n = n;
    A.N = N;
    A.base = base;
    A.base_gamma = christoffel(base);
    A.g_rho = std::move(g_rho);

    const int rho = n + 1;
    A.g = AmbientTensor(n, 2, {false, false});
    for (std::size_t o = 0; o < A.g.flat_size(); ++o) A.g.flat(o) = RhoJet::zero_exact();
    A.g.at({0, 0}) = RhoJet::from_coeffs_exact({RatFn(0), RatFn(2)});  // 2 rho (times t^0)
    A.g.at({0, rho}) = RhoJet::constant_exact(RatFn(1));               // t dt drho, both ways
    A.g.at({rho, 0}) = RhoJet::constant_exact(RatFn(1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A.g.at({i + 1, j + 1}) = A.g_rho[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

    auto grho_inv = ambientdet::invert_jet_matrix(A.g_rho, N);
    A.ginv = AmbientTensor(n, -2, {true, true});
    for (std::size_t o = 0; o < A.ginv.flat_size(); ++o) A.ginv.flat(o) = RhoJet::zero_exact();
    A.ginv.at({0, rho}) = RhoJet::constant_exact(RatFn(1));
    A.ginv.at({rho, 0}) = RhoJet::constant_exact(RatFn(1));
    A.ginv.at({rho, rho}) = RhoJet::from_coeffs_exact({RatFn(0), RatFn(-2)});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A.ginv.at({i + 1, j + 1}) = grho_inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

    // Christoffel symbols from the assembled metric.
    AmbientTensor dg = partial_ambient(A, A.g);
    A.gamma = AmbientTensor(n, 0, {true, false, false});
    const int dims = n + 2;
    for (int k = 0; k < dims; ++k)
        for (int i = 0; i < dims; ++i)
            for (int j = i; j < dims; ++j) {
                RhoJet acc;
                bool first = true;
                for (int l = 0; l < dims; ++l) {
                    const RhoJet& gkl = A.ginv.at({k, l});
                    RhoJet s = dg.at({i, l, j}) + dg.at({j, l, i}) - dg.at({l, i, j});
                    RhoJet term = gkl * s;
                    if (first) {
                        acc = term;
                        first = false;
                    } else {
                        acc += term;
                    }
                }
                acc = acc.scaled(Rat(1, 2));
                A.gamma.at({k, i, j}) = acc;
                A.gamma.at({k, j, i}) = acc;
            }

    // Curvature: R^L_{KIJ} then lowered; Ric_{KJ} = R^I_{KIJ}.
    AmbientTensor dgam = partial_ambient(A, A.gamma);
    AmbientTensor riem(n, 0, {true, false, false, false});
    for (int l = 0; l < dims; ++l)
        for (int k = 0; k < dims; ++k)
            for (int i = 0; i < dims; ++i)
                for (int j = 0; j < i; ++j) {
                    RhoJet acc = dgam.at({i, l, j, k}) - dgam.at({j, l, i, k});
                    for (int mm = 0; mm < dims; ++mm)
                        acc += A.gamma.at({l, i, mm}) * A.gamma.at({mm, j, k}) -
                               A.gamma.at({l, j, mm}) * A.gamma.at({mm, i, k});
                    riem.at({l, k, i, j}) = acc;
                    riem.at({l, k, j, i}) = -acc;
                }
    // The i == j diagonal is zero by antisymmetry; give it the order of a
    // computed neighbor so downstream bookkeeping stays honest.
    for (int l = 0; l < dims; ++l)
        for (int k = 0; k < dims; ++k)
            for (int i = 0; i < dims; ++i) {
                RhoJet probe = riem.at({l, k, i, (i + 1) % dims});
                riem.at({l, k, i, i}) = probe - probe;
            }
    A.riem4 = lower_slot_ambient(A, riem, 0);
    A.ric = AmbientTensor(n, 0, {false, false});
    for (int k = 0; k < dims; ++k)
        for (int j = 0; j < dims; ++j) {
            RhoJet acc;
            bool first = true;
            for (int i = 0; i < dims; ++i) {
                if (first) {
                    acc = riem.at({i, k, i, j});
                    first = false;
                } else {
                    acc += riem.at({i, k, i, j});
                }
            }
            A.ric.at({k, j}) = acc;
        }
    return A;
}

/// Closed-form ambient metric of an Einstein base: g_rho = (1 + lambda rho)^2 g.
inline AmbientSpace build_einstein_ambient(const ChartMetric<RatFn>& base, const RatFn& lambda,
                                           int N) {
    const int n = base.n;
    RhoJet conf = one_plus_lambda_rho_pow(2, N, lambda);
    std::vector<std::vector<RhoJet>> fam(static_cast<std::size_t>(n),
                                         std::vector<RhoJet>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            fam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                conf.scaled(base.g.at({i, j}));
    AmbientSpace A = build_ambient_from_family(base, std::move(fam), N);
    A.einstein_lambda = lambda;
    return A;
}

// ---------------------------------------------------------------------------
// second-order operators

/// Connection Laplacian Delta = -g~^{IJ} nabla_I nabla_J.
inline AmbientTensor laplacian_ambient(const AmbientSpace& A, const AmbientTensor& t) {
    AmbientTensor dd = cov_deriv_ambient(A, cov_deriv_ambient(A, t));
    return -metric_trace_ambient(A, dd, 0, 1);
}

/// (Ric o sigma)_IJ = (Ric_I^K sigma_JK + Ric_J^K sigma_IK)/2.
inline AmbientTensor ricci_action_ambient(const AmbientSpace& A, const AmbientTensor& s) {
    AmbientTensor ric_up = raise_slot_ambient(A, A.ric, 1);
    const int dims = static_cast<int>(s.dims());
    AmbientTensor r(s.base_dim(), s.weight() - Weight(2), {false, false});
    for (int i = 0; i < dims; ++i)
        for (int j = 0; j < dims; ++j) {
            RhoJet acc;
            bool first = true;
            for (int k = 0; k < dims; ++k) {
                RhoJet term = ric_up.at({i, k}) * s.at({j, k}) + ric_up.at({j, k}) * s.at({i, k});
                if (first) {
                    acc = term;
                    first = false;
                } else {
                    acc += term;
                }
            }
            r.at({i, j}) = acc.scaled(Rat(1, 2));
        }
    return r;
}

/// (R o sigma)_IJ = R_{IKJL} sigma^{KL}.
inline AmbientTensor riemann_action_ambient(const AmbientSpace& A, const AmbientTensor& s) {
    AmbientTensor sup = raise_slot_ambient(A, raise_slot_ambient(A, s, 0), 1);
    const int dims = static_cast<int>(s.dims());
    AmbientTensor r(s.base_dim(), s.weight() - Weight(2), {false, false});
    for (int i = 0; i < dims; ++i)
        for (int j = 0; j < dims; ++j) {
            RhoJet acc;
            bool first = true;
            for (int k = 0; k < dims; ++k)
                for (int l = 0; l < dims; ++l) {
                    RhoJet term = A.riem4.at({i, k, j, l}) * sup.at({k, l});
                    if (first) {
                        acc = term;
                        first = false;
                    } else {
                        acc += term;
                    }
                }
            r.at({i, j}) = acc;
        }
    return r;
}

/// Ambient Lichnerowicz Laplacian Delta_L = Delta + 2 Ric o - 2 R o.
inline AmbientTensor lichnerowicz_ambient(const AmbientSpace& A, const AmbientTensor& s) {
    if (s.rank() != 2 || s.is_contra(0) || s.is_contra(1))
        throw math_error("ambient lichnerowicz expects a (0,2) tensor");
    AmbientTensor out = laplacian_ambient(A, s);
    out += ricci_action_ambient(A, s).scaled(Rat(2));
    out -= riemann_action_ambient(A, s).scaled(Rat(2));
    return out;
}

/// Divergence (delta sigma)_I = -nabla^J sigma_{JI} on the first slot.
inline AmbientTensor divergence_ambient(const AmbientSpace& A, const AmbientTensor& s) {
    AmbientTensor ds = cov_deriv_ambient(A, s);
    return -contract_ambient(raise_slot_ambient(A, ds, 0), 0, 1);
}

/// (delta* tau)_IJ = nabla_(I tau_J).
inline AmbientTensor delta_star_ambient(const AmbientSpace& A, const AmbientTensor& tau) {
    return cov_deriv_ambient(A, tau).symmetrized(0, 1);
}

/// Killing operator K xi = 2 nabla_(I xi_J) on 1-forms.
inline AmbientTensor killing_ambient(const AmbientSpace& A, const AmbientTensor& xi) {
    return delta_star_ambient(A, xi).scaled(Rat(2));
}

/// Full metric trace of a (0,2) tensor.
inline AmbientTensor trace_ambient(const AmbientSpace& A, const AmbientTensor& s) {
    return metric_trace_ambient(A, s, 0, 1);
}

/// Hodge Laplacian on 1-forms via d delta_c + delta_c d.
inline AmbientTensor hodge_ambient_1form(const AmbientSpace& A, const AmbientTensor& tau) {
    AmbientTensor dtau = cov_deriv_ambient(A, tau);
    AmbientTensor div = -contract_ambient(raise_slot_ambient(A, dtau, 0), 0, 1);  // scalar
    AmbientTensor d_of_div = partial_ambient(A, div);
    const int dims = static_cast<int>(tau.dims());
    AmbientTensor dt(tau.base_dim(), tau.weight(), {false, false});
    for (int i = 0; i < dims; ++i)
        for (int j = 0; j < dims; ++j) dt.at({i, j}) = dtau.at({i, j}) - dtau.at({j, i});
    AmbientTensor ddt = cov_deriv_ambient(A, dt);
    AmbientTensor del_dt = -contract_ambient(raise_slot_ambient(A, ddt, 0), 0, 1);
    return d_of_div + del_dt;
}

/// ((D Ric)o sigma)_I = (nabla_I Ric_JK - nabla_J Ric_IK - nabla_K Ric_IJ) sigma^{JK}.
inline AmbientTensor dric_action_ambient(const AmbientSpace& A, const AmbientTensor& s) {
    AmbientTensor dric = cov_deriv_ambient(A, A.ric);  // (cov d, cov J, cov K)
    AmbientTensor sup = raise_slot_ambient(A, raise_slot_ambient(A, s, 0), 1);
    const int dims = static_cast<int>(s.dims());
    AmbientTensor r(s.base_dim(), s.weight() - Weight(4), {false});
    for (int i = 0; i < dims; ++i) {
        RhoJet acc;
        bool first = true;
        for (int j = 0; j < dims; ++j)
            for (int k = 0; k < dims; ++k) {
                RhoJet term =
                    (dric.at({i, j, k}) - dric.at({j, i, k}) - dric.at({k, i, j})) * sup.at({j, k});
                if (first) {
                    acc = term;
                    first = false;
                } else {
                    acc += term;
                }
            }
        r.at({i}) = acc;
    }
    return r;
}

/// Extension with only x-block components: sigma~_ij = profile(rho) sigma_ij,
/// zero in every 0/rho slot. Trace-free sigma gives a formally trace-free,
/// T-annihilated extension; profile(0) = 1 makes it an extension of sigma.
inline AmbientTensor x_block_extension(const AmbientSpace& A, const TensorField<RatFn>& sigma,
                                       Weight weight, const RhoJet& profile) {
    if (sigma.rank() != 2 || sigma.dim() != A.n)
        throw math_error("x_block_extension expects a base (0,2) tensor");
    AmbientTensor s(A.n, weight, {false, false});
    for (std::size_t o = 0; o < s.flat_size(); ++o) s.flat(o) = RhoJet::zero_exact();
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j)
            s.at({i + 1, j + 1}) = profile.scaled(sigma.at({i, j}));
    return s;
}

/// B sigma = delta sigma + (1/2) d(tr sigma).
inline AmbientTensor bianchi_operator_ambient(const AmbientSpace& A, const AmbientTensor& s) {
    AmbientTensor tr = trace_ambient(A, s);
    AmbientTensor dtr = partial_ambient(A, tr);
    return divergence_ambient(A, s) + dtr.scaled(Rat(1, 2));
}

/// Linearized Ricci: Ric' sigma = (1/2) Delta_L sigma - delta* B sigma.
inline AmbientTensor ricci_prime_ambient(const AmbientSpace& A, const AmbientTensor& s) {
    return lichnerowicz_ambient(A, s).scaled(Rat(1, 2)) -
           delta_star_ambient(A, bianchi_operator_ambient(A, s));
}

// ---------------------------------------------------------------------------
// order predicates

struct OrderCertificate {
    enum class Kind { O, Ominus, Oplus };
    Kind kind = Kind::O;
    int m = 0;
    bool pass = false;
    std::string witness;  // first failing coefficient, when failing
};

/// O(r^m): every component jet vanishes through rho^{m-1}. In normal form
/// r = 2 rho t^2 exactly, so r-orders are rho-orders after grading removal.
inline OrderCertificate order_O(const AmbientTensor& t, int m) {
    OrderCertificate c;
    c.kind = OrderCertificate::Kind::O;
    c.m = m;
    if (t.min_order() < m - 1)
        throw truncation_error("O(r^m) check needs jet order m-1", m - 1, t.min_order());
    for (std::size_t o = 0; o < t.flat_size(); ++o)
        for (int q = 0; q < m; ++q)
            if (!t.flat(o).coeff(q).is_zero()) {
                c.pass = false;
                c.witness = "component offset " + std::to_string(o) + " has rho^" +
                            std::to_string(q) + " coefficient " + t.flat(o).coeff(q).str();
                return c;
            }
    c.pass = true;
    return c;
}

/// O^-(r^m) for 1-forms: tau = O(r^{m-1}) and (r^{1-m} tau)|_TG vanishes.
inline OrderCertificate order_Ominus(const AmbientTensor& tau, int m) {
    if (tau.rank() != 1 || tau.is_contra(0))
        throw math_error("O^- predicate expects a covariant 1-form");
    OrderCertificate c;
    c.kind = OrderCertificate::Kind::Ominus;
    c.m = m;
    OrderCertificate low = order_O(tau, m - 1);
    if (!low.pass) {
        c.pass = false;
        c.witness = "not O(r^{m-1}): " + low.witness;
        return c;
    }
    // (r^{1-m} tau) restricted to TG: t- and x-components at rho = 0.
    AmbientTensor shifted = r_multiply(tau, -(m - 1));
    const int n = tau.base_dim();
    for (int i = 0; i <= n; ++i) {
        if (!shifted.at({i}).coeff(0).is_zero()) {
            c.pass = false;
            c.witness = "(r^{1-m} tau)|_TG nonzero in direction " + std::to_string(i) + ": " +
                        shifted.at({i}).coeff(0).str();
            return c;
        }
    }
    c.pass = true;
    return c;
}

/// O^+(r^m) for symmetric 2-tensors: O(r^m), T-contraction O^-(r^{m+1}), and
/// (r^{-m} sigma)|_TM trace-free with respect to the base metric.
inline OrderCertificate order_Oplus(const AmbientSpace& A, const AmbientTensor& s, int m) {
    OrderCertificate c;
    c.kind = OrderCertificate::Kind::Oplus;
    c.m = m;
    OrderCertificate o1 = order_O(s, m);
    if (!o1.pass) {
        c.pass = false;
        c.witness = "clause 1 fails: " + o1.witness;
        return c;
    }
    OrderCertificate o2 = order_Ominus(T_contract(s, 0), m + 1);
    if (!o2.pass) {
        c.pass = false;
        c.witness = "clause 2 fails: " + o2.witness;
        return c;
    }
    AmbientTensor scaled = r_multiply(s, -m);
    RestrictTMResult tm = restrict_TM(scaled);
    if (!tm.ok) {
        c.pass = false;
        c.witness = "clause 2 fails (restriction undefined): " + tm.witness;
        return c;
    }
    RatFn tr = trace_g(A.base, tm.field);
    if (!tr.is_zero()) {
        c.pass = false;
        c.witness = "clause 3 fails: g-trace of (r^{-m} sigma)|_TM is " + tr.str();
        return c;
    }
    c.pass = true;
    return c;
}

// ---------------------------------------------------------------------------
// straightness

struct StraightnessReport {
    bool nabla_T_is_id = false;
    bool dr_is_2Tg = false;
    std::string witness;
};

/// nabla T = id and dr = 2 T contracted with g~, with r = |T|^2 = 2 rho t^2.
inline StraightnessReport straightness_check(const AmbientSpace& A) {
    StraightnessReport rep;
    AmbientTensor T = dilation_field(A);
    AmbientTensor dT = cov_deriv_ambient(A, T);  // slots: (cov d, contra j)
    const int dims = A.n + 2;
    rep.nabla_T_is_id = true;
    for (int d = 0; d < dims && rep.nabla_T_is_id; ++d)
        for (int j = 0; j < dims; ++j) {
            RhoJet expect = (d == j) ? RhoJet::constant(RatFn(1), dT.at({d, j}).order())
                                     : RhoJet::zero(dT.at({d, j}).order());
            if (!(dT.at({d, j}) - expect).is_zero()) {
                rep.nabla_T_is_id = false;
                rep.witness = "nabla_" + std::to_string(d) + " T^" + std::to_string(j) +
                              " = " + dT.at({d, j}).str();
                break;
            }
        }
    AmbientTensor r = r_scalar(A);
    AmbientTensor dr = partial_ambient(A, r);
    AmbientTensor Tg = T_contract(A.g, 0).scaled(Rat(2));
    AmbientTensor diff = dr - Tg;
    rep.dr_is_2Tg = diff.is_zero();
    if (!rep.dr_is_2Tg && rep.witness.empty()) rep.witness = "dr - 2 T.g nonzero";
    return rep;
}

}  // namespace gjms
