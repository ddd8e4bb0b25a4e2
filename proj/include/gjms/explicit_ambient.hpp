#pragma once

#include "gjms/chart.hpp"

namespace gjms {

/// Ambient metric written out in explicit coordinates (t, x^1..x^n, rho),
/// with t and rho as honest polynomial variables. This route is independent
/// of the graded jet machinery: the same chart tensor calculus that runs on
/// the base runs here in n+2 dimensions. Used to audit the graded Christoffel
/// tables and to test candidate metrics that are not graded-homogeneous (like
/// the 2 rho dt drho misprint form, which cannot even be represented in the
/// graded encoding).
struct ExplicitAmbient {
    int n = 0;
    ChartMetric<RatFn> chart;  // dimension n + 2, coords {t, x..., rho}
};

namespace explicitdet {

inline std::vector<int> ambient_coords(const ChartMetric<RatFn>& base) {
    std::vector<int> coords;
    coords.push_back(kVarT);
    coords.insert(coords.end(), base.coords.begin(), base.coords.end());
    coords.push_back(kVarRho);
    return coords;
}

inline ExplicitAmbient assemble(const ChartMetric<RatFn>& base, const RatFn& g_t_rho_entry,
                                const RatFn& conf) {
    const int n = base.n;
    const int d = n + 2;
    RatFn t = RatFn::variable(kVarT);
    RatFn rho = RatFn::variable(kVarRho);
    TensorField<RatFn> g(d, {false, false});
    g.at({0, 0}) = RatFn(2) * rho;
    g.at({0, d - 1}) = g_t_rho_entry;
    g.at({d - 1, 0}) = g_t_rho_entry;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.at({i + 1, j + 1}) = t * t * conf * base.g.at({i, j});
    std::vector<Rat> bp;
    bp.push_back(Rat(1));
    bp.insert(bp.end(), base.base_point.begin(), base.base_point.end());
    bp.push_back(Rat(0));
    ExplicitAmbient ea;
    ea.n = n;
    ea.chart = make_chart_metric(d, g, ambient_coords(base), bp);
    return ea;
}

}  // namespace explicitdet

/// g~ = 2 rho dt^2 + 2t dt drho + t^2 (1+lambda rho)^2 g  -- the straight,
/// Ricci-flat closed form over an Einstein base.
inline ExplicitAmbient explicit_normal_form(const ChartMetric<RatFn>& base, const RatFn& lambda) {
    RatFn conf = (RatFn(1) + lambda * RatFn::variable(kVarRho)).pow(2);
    return explicitdet::assemble(base, RatFn::variable(kVarT), conf);
}

/// The same data with the dt-drho coefficient read as rho instead of t.
/// This candidate is not even dilation-homogeneous; straightness fails.
inline ExplicitAmbient explicit_misprint_form(const ChartMetric<RatFn>& base, const RatFn& lambda) {
    RatFn conf = (RatFn(1) + lambda * RatFn::variable(kVarRho)).pow(2);
    return explicitdet::assemble(base, RatFn::variable(kVarRho), conf);
}

struct ExplicitStraightness {
    bool nabla_T_is_id = false;
    bool dr_is_2Tg = false;
    std::string witness;
};

/// Checks nabla T = id and d(|T|^2) = 2 T . g~ for T = t d/dt, all exact.
inline ExplicitStraightness explicit_straightness(const ExplicitAmbient& ea) {
    ExplicitStraightness rep;
    const auto& m = ea.chart;
    const int d = m.n;
    TensorField<RatFn> T(d, {true});
    T.at({0}) = RatFn::variable(kVarT);
    auto gamma = christoffel(m);
    auto dT = cov_deriv(m, gamma, T);  // (cov i, contra j)
    rep.nabla_T_is_id = true;
    for (int i = 0; i < d && rep.nabla_T_is_id; ++i)
        for (int j = 0; j < d; ++j) {
            RatFn expect = (i == j) ? RatFn(1) : RatFn(0);
            if (dT.at({i, j}) != expect) {
                rep.nabla_T_is_id = false;
                rep.witness = "nabla_" + std::to_string(i) + " T^" + std::to_string(j) + " = " +
                              dT.at({i, j}).str() + " (expected " + expect.str() + ")";
                break;
            }
        }
    // r = g~(T,T); dr vs 2 T . g~
    TensorField<RatFn> Tlow = lower_slot(m, T, 0);
    RatFn r;
    for (int i = 0; i < d; ++i) r += Tlow.at({i}) * T.at({i});
    rep.dr_is_2Tg = true;
    for (int i = 0; i < d; ++i) {
        RatFn lhs = r.derivative(m.coords[static_cast<std::size_t>(i)]);
        RatFn rhs = RatFn(2) * Tlow.at({i});
        if (lhs != rhs) {
            rep.dr_is_2Tg = false;
            if (rep.witness.empty())
                rep.witness = "(dr)_" + std::to_string(i) + " = " + lhs.str() +
                              " but 2(T.g)_" + std::to_string(i) + " = " + rhs.str();
            break;
        }
    }
    return rep;
}

}  // namespace gjms
