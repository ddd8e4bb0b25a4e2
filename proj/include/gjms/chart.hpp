#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gjms/scalar_traits.hpp"

namespace gjms {

/// Dense tensor field in a coordinate chart over a scalar ring K.
/// Slot variance: true = contravariant (upper), false = covariant (lower).
template <class K>
class TensorField {
  public:
    TensorField() : n_(0) {}
    TensorField(int n, std::vector<bool> contra)
        : n_(n), contra_(std::move(contra)) {
        std::size_t sz = 1;
        for (std::size_t s = 0; s < contra_.size(); ++s) sz *= static_cast<std::size_t>(n_);
        c_.assign(sz, K());
    }
    static TensorField scalar(int n, const K& v) {
        TensorField t(n, {});
        t.c_[0] = v;
        return t;
    }

    int dim() const { return n_; }
    int rank() const { return static_cast<int>(contra_.size()); }
    const std::vector<bool>& variance() const { return contra_; }
    bool is_contra(int slot) const { return contra_[static_cast<std::size_t>(slot)]; }

    std::size_t flat_size() const { return c_.size(); }
    K& flat(std::size_t i) { return c_[i]; }
    const K& flat(std::size_t i) const { return c_[i]; }

    std::size_t offset(const std::vector<int>& idx) const {
        std::size_t o = 0;
        for (int i : idx) o = o * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
        return o;
    }
    K& at(const std::vector<int>& idx) { return c_[offset(idx)]; }
    const K& at(const std::vector<int>& idx) const { return c_[offset(idx)]; }

    /// Unpacks a flat offset into a multi-index.
    std::vector<int> unpack(std::size_t o) const {
        std::vector<int> idx(static_cast<std::size_t>(rank()));
        for (int s = rank() - 1; s >= 0; --s) {
            idx[static_cast<std::size_t>(s)] = static_cast<int>(o % static_cast<std::size_t>(n_));
            o /= static_cast<std::size_t>(n_);
        }
        return idx;
    }

    bool is_zero() const {
        for (const auto& v : c_)
            if (!scalar_ops<K>::is_zero(v)) return false;
        return true;
    }

    TensorField operator-() const {
        TensorField r(*this);
        for (auto& v : r.c_) v = K() - v;
        return r;
    }
    friend TensorField operator+(TensorField a, const TensorField& b) {
        a.check_same_shape(b);
        for (std::size_t i = 0; i < a.c_.size(); ++i) a.c_[i] += b.c_[i];
        return a;
    }
    friend TensorField operator-(TensorField a, const TensorField& b) {
        a.check_same_shape(b);
        for (std::size_t i = 0; i < a.c_.size(); ++i) a.c_[i] -= b.c_[i];
        return a;
    }
    TensorField& operator+=(const TensorField& o) { *this = *this + o; return *this; }
    TensorField& operator-=(const TensorField& o) { *this = *this - o; return *this; }
    TensorField scaled(const K& f) const {
        TensorField r(*this);
        for (auto& v : r.c_) v = v * f;
        return r;
    }
    friend bool operator==(const TensorField& a, const TensorField& b) {
        return a.n_ == b.n_ && a.contra_ == b.contra_ && a.c_ == b.c_;
    }

    void check_same_shape(const TensorField& o) const {
        if (n_ != o.n_ || contra_ != o.contra_)
            throw math_error("tensor shape mismatch");
    }

    /// Symmetrizes over two slots of equal variance.
    TensorField symmetrized(int s1, int s2) const {
        TensorField r(n_, contra_);
        std::vector<int> idx;
        for (std::size_t o = 0; o < c_.size(); ++o) {
            idx = unpack(o);
            std::vector<int> swapped = idx;
            std::swap(swapped[static_cast<std::size_t>(s1)], swapped[static_cast<std::size_t>(s2)]);
            // (T_ij + T_ji)/2 without division: K is a Q-algebra, use rational scale
            r.c_[o] = (c_[o] + at(swapped)) * half();
        }
        return r;
    }
    bool symmetric_in(int s1, int s2) const {
        std::vector<int> idx;
        for (std::size_t o = 0; o < c_.size(); ++o) {
            idx = unpack(o);
            std::vector<int> swapped = idx;
            std::swap(swapped[static_cast<std::size_t>(s1)], swapped[static_cast<std::size_t>(s2)]);
            if (!scalar_ops<K>::is_zero(c_[o] - at(swapped))) return false;
        }
        return true;
    }

  private:
    static K half() {
        K one = scalar_ops<K>::from_int(1);
        K two = scalar_ops<K>::from_int(2);
        return one / two;
    }
    int n_;
    std::vector<bool> contra_;
    std::vector<K> c_;
};

/// Pseudo-Riemannian metric in a single chart.
template <class K>
struct ChartMetric {
    int n = 0;
    std::pair<int, int> signature{0, 0};
    std::vector<int> coords;        // variable ids of the chart coordinates
    std::vector<Rat> base_point;    // where nondegeneracy is certified
    TensorField<K> g;               // (0,2)
    TensorField<K> ginv;            // (2,0)
    K det{};
};

namespace chartdet {

/// Inverts a symmetric matrix over K by Gauss-Jordan with unit pivots.
template <class K>
std::pair<std::vector<std::vector<K>>, K> invert_matrix(std::vector<std::vector<K>> m) {
    const std::size_t n = m.size();
    std::vector<std::vector<K>> inv(n, std::vector<K>(n, K()));
    K det = scalar_ops<K>::from_int(1);
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = scalar_ops<K>::from_int(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && !scalar_ops<K>::is_unit(m[p][c])) ++p;
        if (p == n) throw math_error("matrix is not invertible over the scalar ring");
        if (p != c) {
            std::swap(m[p], m[c]);
            std::swap(inv[p], inv[c]);
            det = K() - det;
        }
        K piv = m[c][c];
        det = det * piv;
        for (std::size_t j = 0; j < n; ++j) {
            m[c][j] = m[c][j] / piv;
            inv[c][j] = inv[c][j] / piv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || scalar_ops<K>::is_zero(m[r][c])) continue;
            K f = m[r][c];
            for (std::size_t j = 0; j < n; ++j) {
                m[r][j] = m[r][j] - f * m[c][j];
                inv[r][j] = inv[r][j] - f * inv[c][j];
            }
        }
    }
    return {inv, det};
}

}  // namespace chartdet

template <class K>
ChartMetric<K> make_chart_metric(int n, const TensorField<K>& g,
                                 std::vector<int> coords,
                                 std::vector<Rat> base_point,
                                 std::pair<int, int> signature = {-1, -1}) {
    if (g.rank() != 2 || g.is_contra(0) || g.is_contra(1))
        throw math_error("metric must be a (0,2) tensor");
    if (!g.symmetric_in(0, 1)) throw math_error("metric must be symmetric");
    if (static_cast<int>(coords.size()) != n) throw math_error("coordinate list size mismatch");
    ChartMetric<K> m;
    m.n = n;
    m.signature = signature.first < 0 ? std::make_pair(n, 0) : signature;
    m.coords = std::move(coords);
    m.base_point = std::move(base_point);
    m.g = g;
    std::vector<std::vector<K>> rows(static_cast<std::size_t>(n), std::vector<K>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g.at({i, j});
    auto [inv, det] = chartdet::invert_matrix<K>(rows);
    m.ginv = TensorField<K>(n, {true, true});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.ginv.at({i, j}) = inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    m.det = det;
    return m;
}

/// Raw coordinate partial derivatives: a new covariant slot in position 0.
template <class K>
TensorField<K> partial_deriv(const ChartMetric<K>& m, const TensorField<K>& t) {
    std::vector<bool> var = t.variance();
    var.insert(var.begin(), false);
    TensorField<K> r(m.n, var);
    for (std::size_t o = 0; o < t.flat_size(); ++o) {
        std::vector<int> idx = t.unpack(o);
        std::vector<int> ridx(idx.size() + 1);
        std::copy(idx.begin(), idx.end(), ridx.begin() + 1);
        for (int d = 0; d < m.n; ++d) {
            ridx[0] = d;
            r.at(ridx) = scalar_ops<K>::dx(t.flat(o), m.coords[static_cast<std::size_t>(d)]);
        }
    }
    return r;
}

/// Levi-Civita connection coefficients as a (1,2) field, symmetric lower pair.
template <class K>
TensorField<K> christoffel(const ChartMetric<K>& m) {
    TensorField<K> dg = partial_deriv(m, m.g);  // dg[l][i][j] = d_l g_ij
    TensorField<K> gamma(m.n, {true, false, false});
    K half = scalar_ops<K>::from_int(1) / scalar_ops<K>::from_int(2);
    for (int k = 0; k < m.n; ++k)
        for (int i = 0; i < m.n; ++i)
            for (int j = i; j < m.n; ++j) {
                K acc{};
                for (int l = 0; l < m.n; ++l) {
                    if (scalar_ops<K>::is_zero(m.ginv.at({k, l}))) continue;
                    K s = dg.at({i, l, j}) + dg.at({j, l, i}) - dg.at({l, i, j});
                    acc += m.ginv.at({k, l}) * s;
                }
                acc = acc * half;
                gamma.at({k, i, j}) = acc;
                gamma.at({k, j, i}) = acc;
            }
    return gamma;
}

/// Covariant derivative; the derivative index is slot 0 of the result.
template <class K>
TensorField<K> cov_deriv(const ChartMetric<K>& m, const TensorField<K>& gamma,
                         const TensorField<K>& t) {
    TensorField<K> r = partial_deriv(m, t);
    const int rk = t.rank();
    std::vector<int> ridx(static_cast<std::size_t>(rk) + 1);
    for (std::size_t o = 0; o < t.flat_size(); ++o) {
        std::vector<int> idx = t.unpack(o);
        std::copy(idx.begin(), idx.end(), ridx.begin() + 1);
        for (int d = 0; d < m.n; ++d) {
            ridx[0] = d;
            K corr{};
            std::vector<int> jidx = idx;
            for (int s = 0; s < rk; ++s) {
                const int is = idx[static_cast<std::size_t>(s)];
                for (int l = 0; l < m.n; ++l) {
                    jidx[static_cast<std::size_t>(s)] = l;
                    const K& tv = t.at(jidx);
                    if (scalar_ops<K>::is_zero(tv)) continue;
                    if (t.is_contra(s))
                        corr += gamma.at({is, d, l}) * tv;
                    else
                        corr -= gamma.at({l, d, is}) * tv;
                }
                jidx[static_cast<std::size_t>(s)] = is;
            }
            r.at(ridx) += corr;
        }
    }
    return r;
}

/// Contraction of one contravariant and one covariant slot.
template <class K>
TensorField<K> contract(const TensorField<K>& t, int s1, int s2) {
    if (t.is_contra(s1) == t.is_contra(s2))
        throw math_error("contraction needs opposite variances");
    const int n = t.dim();
    std::vector<bool> var;
    for (int s = 0; s < t.rank(); ++s)
        if (s != s1 && s != s2) var.push_back(t.is_contra(s));
    TensorField<K> r(n, var);
    for (std::size_t o = 0; o < r.flat_size(); ++o) {
        std::vector<int> ridx = r.unpack(o);
        std::vector<int> idx(static_cast<std::size_t>(t.rank()));
        int q = 0;
        for (int s = 0; s < t.rank(); ++s)
            if (s != s1 && s != s2) idx[static_cast<std::size_t>(s)] = ridx[static_cast<std::size_t>(q++)];
        K acc{};
        for (int l = 0; l < n; ++l) {
            idx[static_cast<std::size_t>(s1)] = l;
            idx[static_cast<std::size_t>(s2)] = l;
            acc += t.at(idx);
        }
        r.flat(o) = acc;
    }
    return r;
}

/// Raises (cov->contra) or lowers a slot with the metric.
template <class K>
TensorField<K> raise_slot(const ChartMetric<K>& m, const TensorField<K>& t, int slot) {
    if (t.is_contra(slot)) throw math_error("raise_slot: slot already contravariant");
    std::vector<bool> var = t.variance();
    var[static_cast<std::size_t>(slot)] = true;
    TensorField<K> r(m.n, var);
    for (std::size_t o = 0; o < r.flat_size(); ++o) {
        std::vector<int> ridx = r.unpack(o);
        std::vector<int> idx = ridx;
        K acc{};
        for (int l = 0; l < m.n; ++l) {
            const K& gv = m.ginv.at({ridx[static_cast<std::size_t>(slot)], l});
            if (scalar_ops<K>::is_zero(gv)) continue;
            idx[static_cast<std::size_t>(slot)] = l;
            acc += gv * t.at(idx);
        }
        r.flat(o) = acc;
    }
    return r;
}

template <class K>
TensorField<K> lower_slot(const ChartMetric<K>& m, const TensorField<K>& t, int slot) {
    if (!t.is_contra(slot)) throw math_error("lower_slot: slot already covariant");
    std::vector<bool> var = t.variance();
    var[static_cast<std::size_t>(slot)] = false;
    TensorField<K> r(m.n, var);
    for (std::size_t o = 0; o < r.flat_size(); ++o) {
        std::vector<int> ridx = r.unpack(o);
        std::vector<int> idx = ridx;
        K acc{};
        for (int l = 0; l < m.n; ++l) {
            const K& gv = m.g.at({ridx[static_cast<std::size_t>(slot)], l});
            if (scalar_ops<K>::is_zero(gv)) continue;
            idx[static_cast<std::size_t>(slot)] = l;
            acc += gv * t.at(idx);
        }
        r.flat(o) = acc;
    }
    return r;
}

/// Trace of two covariant slots with the inverse metric.
template <class K>
TensorField<K> metric_trace(const ChartMetric<K>& m, const TensorField<K>& t, int s1, int s2) {
    return contract(raise_slot(m, t, s1), s1, s2);
}

/// Curvature package of a chart metric.
template <class K>
struct ChartGeometry {
    ChartMetric<K> metric;
    TensorField<K> gamma;     // (1,2)
    TensorField<K> riem;      // (1,3): R^l_{kij}, field slots (l,k,i,j)
    TensorField<K> riem4;     // (0,4): R_{lkij} = g_lm R^m_{kij}
    TensorField<K> ric;       // (0,2)
    K scalar_curv{};
    std::optional<TensorField<K>> schouten;  // n >= 3 only
    std::optional<TensorField<K>> weyl;
};

/// Curvature convention: Riem^l_{kij} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
/// + Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik}, Ric_{kj} = Riem^i_{kij}.
/// With this sign the round sphere of sectional curvature 1 has Ric = (n-1) g.
template <class K>
ChartGeometry<K> analyze_metric(const ChartMetric<K>& m) {
    ChartGeometry<K> geo;
    geo.metric = m;
    geo.gamma = christoffel(m);
    TensorField<K> dg = partial_deriv(m, geo.gamma);  // dg[d][l][i][j] = d_d Gamma^l_ij
    const int n = m.n;
    geo.riem = TensorField<K>(n, {true, false, false, false});
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < i; ++j) {
                    K acc = dg.at({i, l, j, k}) - dg.at({j, l, i, k});
                    for (int mm = 0; mm < n; ++mm)
                        acc += geo.gamma.at({l, i, mm}) * geo.gamma.at({mm, j, k}) -
                               geo.gamma.at({l, j, mm}) * geo.gamma.at({mm, i, k});
                    geo.riem.at({l, k, i, j}) = acc;
                    geo.riem.at({l, k, j, i}) = K() - acc;
                }
    geo.riem4 = lower_slot(m, geo.riem, 0);
    geo.ric = TensorField<K>(n, {false, false});
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            K acc{};
            for (int i = 0; i < n; ++i) acc += geo.riem.at({i, k, i, j});
            geo.ric.at({k, j}) = acc;
        }
    TensorField<K> ric_tr = metric_trace(m, geo.ric, 0, 1);
    geo.scalar_curv = ric_tr.flat(0);
    if (n >= 3) {
        K den1 = scalar_ops<K>::from_int(2 * (n - 1));
        K den2 = scalar_ops<K>::from_int(n - 2);
        TensorField<K> p = (geo.ric - m.g.scaled(geo.scalar_curv / den1)).scaled(
            scalar_ops<K>::from_int(1) / den2);
        geo.schouten = p;
        // Weyl = Riem4 - P (Kulkarni-Nomizu) g in the pair ordering (a,b),(c,d)
        TensorField<K> w(n, {false, false, false, false});
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        K kn = p.at({a, c}) * m.g.at({b, d}) + p.at({b, d}) * m.g.at({a, c}) -
                               p.at({a, d}) * m.g.at({b, c}) - p.at({b, c}) * m.g.at({a, d});
                        w.at({a, b, c, d}) = geo.riem4.at({a, b, c, d}) - kn;
                    }
        geo.weyl = w;
    }
    return geo;
}

/// Connection Laplacian Delta = nabla^* nabla = -g^{ij} nabla_i nabla_j
/// (nonnegative convention).
template <class K>
TensorField<K> laplacian(const ChartGeometry<K>& geo, const TensorField<K>& t) {
    TensorField<K> dd = cov_deriv(geo.metric, geo.gamma, cov_deriv(geo.metric, geo.gamma, t));
    return -metric_trace(geo.metric, dd, 0, 1);
}

/// Ricci action (Ric o sigma)_ij = (Ric_i^k sigma_jk + Ric_j^k sigma_ik)/2.
template <class K>
TensorField<K> ricci_action(const ChartGeometry<K>& geo, const TensorField<K>& s) {
    const int n = geo.metric.n;
    TensorField<K> ric_up = raise_slot(geo.metric, geo.ric, 1);  // Ric_i^k
    TensorField<K> r(n, {false, false});
    K half = scalar_ops<K>::from_int(1) / scalar_ops<K>::from_int(2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            K acc{};
            for (int k = 0; k < n; ++k)
                acc += ric_up.at({i, k}) * s.at({j, k}) + ric_up.at({j, k}) * s.at({i, k});
            r.at({i, j}) = acc * half;
        }
    return r;
}

/// Riemann action (R o sigma)_ij = R_{ikjl} sigma^{kl}.
template <class K>
TensorField<K> riemann_action(const ChartGeometry<K>& geo, const TensorField<K>& s) {
    const int n = geo.metric.n;
    TensorField<K> sup = raise_slot(geo.metric, raise_slot(geo.metric, s, 0), 1);
    TensorField<K> r(n, {false, false});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            K acc{};
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const K& rv = geo.riem4.at({i, k, j, l});
                    if (scalar_ops<K>::is_zero(rv)) continue;
                    acc += rv * sup.at({k, l});
                }
            r.at({i, j}) = acc;
        }
    return r;
}

/// Weyl action, same shape as riemann_action but with the Weyl tensor.
template <class K>
TensorField<K> weyl_action(const ChartGeometry<K>& geo, const TensorField<K>& s) {
    if (!geo.weyl) throw math_error("Weyl tensor needs n >= 3");
    const int n = geo.metric.n;
    TensorField<K> sup = raise_slot(geo.metric, raise_slot(geo.metric, s, 0), 1);
    TensorField<K> r(n, {false, false});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            K acc{};
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const K& rv = geo.weyl->at({i, k, j, l});
                    if (scalar_ops<K>::is_zero(rv)) continue;
                    acc += rv * sup.at({k, l});
                }
            r.at({i, j}) = acc;
        }
    return r;
}

/// Lichnerowicz Laplacian Delta_L = Delta + 2 Ric o - 2 R o on symmetric
/// (0,2) tensors.
template <class K>
TensorField<K> lichnerowicz(const ChartGeometry<K>& geo, const TensorField<K>& s) {
    if (s.rank() != 2 || s.is_contra(0) || s.is_contra(1))
        throw math_error("lichnerowicz expects a (0,2) tensor");
    if (!s.symmetric_in(0, 1)) throw math_error("lichnerowicz expects a symmetric tensor");
    K two = scalar_ops<K>::from_int(2);
    return laplacian(geo, s) + ricci_action(geo, s).scaled(two) -
           riemann_action(geo, s).scaled(two);
}

template <class K>
K trace_g(const ChartMetric<K>& m, const TensorField<K>& s) {
    return metric_trace(m, s, 0, 1).flat(0);
}

/// Trace-free part of a symmetric (0,2) tensor.
template <class K>
TensorField<K> trace_free_part(const ChartMetric<K>& m, const TensorField<K>& s) {
    K tr = trace_g(m, s);
    K nk = scalar_ops<K>::from_int(m.n);
    return s - m.g.scaled(tr / nk);
}

/// Divergence (delta sigma)_i = -nabla^j sigma_{ji} (first slot contracted).
template <class K>
TensorField<K> divergence(const ChartGeometry<K>& geo, const TensorField<K>& s) {
    TensorField<K> ds = cov_deriv(geo.metric, geo.gamma, s);
    TensorField<K> up = raise_slot(geo.metric, ds, 0);
    return -contract(up, 0, 1);
}

/// Symmetrized gradient (delta* tau)_ij = nabla_(i tau_j).
template <class K>
TensorField<K> delta_star(const ChartGeometry<K>& geo, const TensorField<K>& tau) {
    TensorField<K> d = cov_deriv(geo.metric, geo.gamma, tau);
    return d.symmetrized(0, 1);
}

/// Killing operator K xi = 2 nabla_(i xi_j) on 1-forms.
template <class K>
TensorField<K> killing_op(const ChartGeometry<K>& geo, const TensorField<K>& xi) {
    return delta_star(geo, xi).scaled(scalar_ops<K>::from_int(2));
}

/// Hodge Laplacian on 1-forms via d delta + delta d (codifferential signs
/// consistent with delta sigma = -div).
template <class K>
TensorField<K> hodge_laplacian_1form(const ChartGeometry<K>& geo, const TensorField<K>& tau) {
    const auto& m = geo.metric;
    // delta_c tau = -nabla^i tau_i
    TensorField<K> dtau = cov_deriv(m, geo.gamma, tau);
    K div = K() - contract(raise_slot(m, dtau, 0), 0, 1).flat(0);
    TensorField<K> d_of_div(m.n, {false});
    for (int i = 0; i < m.n; ++i)
        d_of_div.at({i}) = scalar_ops<K>::dx(div, m.coords[static_cast<std::size_t>(i)]);
    // (d tau)_ij = nabla_i tau_j - nabla_j tau_i
    TensorField<K> dt(m.n, {false, false});
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) dt.at({i, j}) = dtau.at({i, j}) - dtau.at({j, i});
    // (delta_c dt)_j = -nabla^i dt_{ij}
    TensorField<K> ddt = cov_deriv(m, geo.gamma, dt);
    TensorField<K> del_dt = -contract(raise_slot(m, ddt, 0), 0, 1);
    return d_of_div + del_dt;
}

/// TT check: trace and divergence both identically zero.
template <class K>
struct TTVerdict {
    bool is_tt = false;
    K trace_residual{};
    TensorField<K> divergence_residual;
};

template <class K>
TTVerdict<K> is_TT(const ChartGeometry<K>& geo, const TensorField<K>& phi) {
    if (phi.rank() != 2 || phi.is_contra(0) || phi.is_contra(1) || !phi.symmetric_in(0, 1))
        throw math_error("is_TT expects a symmetric (0,2) tensor");
    TTVerdict<K> v;
    v.trace_residual = trace_g(geo.metric, phi);
    v.divergence_residual = divergence(geo, phi);
    v.is_tt = scalar_ops<K>::is_zero(v.trace_residual) && v.divergence_residual.is_zero();
    return v;
}

/// Linearization of the Ricci operator at the metric:
/// Ric' sigma = (1/2) Delta_L sigma - delta* (B sigma),
/// B sigma = delta sigma + (1/2) d tr sigma.
template <class K>
TensorField<K> ricci_prime(const ChartGeometry<K>& geo, const TensorField<K>& s) {
    const auto& m = geo.metric;
    K half = scalar_ops<K>::from_int(1) / scalar_ops<K>::from_int(2);
    K tr = trace_g(m, s);
    TensorField<K> dtr(m.n, {false});
    for (int i = 0; i < m.n; ++i)
        dtr.at({i}) = scalar_ops<K>::dx(tr, m.coords[static_cast<std::size_t>(i)]);
    TensorField<K> b = divergence(geo, s) + dtr.scaled(half);
    return lichnerowicz(geo, s).scaled(half) - delta_star(geo, b);
}

/// Einstein certificate: lambda with P = lambda g, valid iff the residual
/// P - lambda g vanishes identically and lambda is x-constant.
struct EinsteinCertificate {
    RatFn lambda;
    TensorField<RatFn> residual;
    bool valid = false;
};

inline EinsteinCertificate einstein_certificate(const ChartGeometry<RatFn>& geo) {
    EinsteinCertificate cert;
    if (!geo.schouten) throw math_error("Schouten tensor needs n >= 3");
    const auto& p = *geo.schouten;
    const auto& g = geo.metric.g;
    RatFn lam = p.at({0, 0}) / g.at({0, 0});
    cert.lambda = lam;
    cert.residual = p - g.scaled(lam);
    cert.valid = cert.residual.is_zero();
    for (int v = 0; v < kMaxChartDim; ++v)
        if (lam.depends_on(v)) cert.valid = false;
    return cert;
}

/// Space form chart: g_ij = delta_ij / (1 + (c/4)|x|^2)^2, Einstein with
/// Schouten P = (c/2) g. Accepts an exact rational c or a symbolic RatFn.
inline ChartMetric<RatFn> space_form_metric(int n, const RatFn& c) {
    if (n < 2 || n > kMaxChartDim) throw math_error("space form dimension out of range");
    Poly x2;
    for (int i = 0; i < n; ++i) x2 += Poly::variable(i, 2);
    RatFn u = RatFn(1) + (c / RatFn(4)) * RatFn(x2);
    RatFn f = (RatFn(1) / u).pow(2);
    TensorField<RatFn> g(n, {false, false});
    for (int i = 0; i < n; ++i) g.at({i, i}) = f;
    std::vector<int> coords(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) coords[static_cast<std::size_t>(i)] = i;
    return make_chart_metric(n, g, coords, std::vector<Rat>(static_cast<std::size_t>(n), Rat(0)),
                             {n, 0});
}

inline ChartMetric<RatFn> flat_metric(int n) { return space_form_metric(n, RatFn(0)); }

}  // namespace gjms
