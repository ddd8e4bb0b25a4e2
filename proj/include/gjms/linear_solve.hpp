#pragma once

#include <optional>
#include <vector>

#include "gjms/rational.hpp"

namespace gjms {

/// Exact dense linear system A x = b over the rationals.
struct LinearSystem {
    std::vector<std::vector<Rat>> a;  // m rows, k columns
    std::vector<Rat> b;               // m entries

    std::size_t rows() const { return a.size(); }
    std::size_t cols() const { return a.empty() ? 0 : a[0].size(); }
};

struct LinearSolution {
    enum class Status { unique, underdetermined, inconsistent };
    Status status = Status::unique;
    int rank = 0;
    std::vector<Rat> particular;                 // empty when inconsistent
    std::vector<std::vector<Rat>> nullspace;     // basis vectors (may be skipped)
    // For inconsistent systems: a row combination y with y^T A = 0 and
    // y^T b != 0, when the system was small enough to track it.
    std::optional<std::vector<Rat>> witness_combination;
    std::optional<std::size_t> witness_row;  // echelon row where 0 = nonzero appeared
};

/// Fraction-free Gaussian elimination (Bareiss) on the denominator-cleared
/// integer matrix, followed by rational back-substitution. Reports rank, a
/// particular solution, a nullspace basis when underdetermined, and an
/// inconsistency certificate otherwise.
inline LinearSolution solve_exact(const LinearSystem& sys, bool want_nullspace = true) {
    const std::size_t m = sys.rows(), k = sys.cols();
    if (sys.b.size() != m) throw math_error("linear system dimension mismatch");
    for (const auto& row : sys.a)
        if (row.size() != k) throw math_error("ragged linear system");

    // Clear denominators rowwise into mpz and keep the rhs in the last column.
    std::vector<std::vector<mpz_class>> w(m, std::vector<mpz_class>(k + 1));
    std::vector<mpz_class> rowscale(m);
    for (std::size_t i = 0; i < m; ++i) {
        mpz_class l = 1;
        for (std::size_t j = 0; j < k; ++j)
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), sys.a[i][j].den().get_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), sys.b[i].den().get_mpz_t());
        rowscale[i] = l;
        for (std::size_t j = 0; j < k; ++j)
            w[i][j] = sys.a[i][j].num() * (l / sys.a[i][j].den());
        w[i][k] = sys.b[i].num() * (l / sys.b[i].den());
    }

    const bool track = m <= 512;
    std::vector<std::vector<Rat>> combo;
    if (track) {
        combo.assign(m, std::vector<Rat>(m, Rat(0)));
        for (std::size_t i = 0; i < m; ++i) combo[i][i] = Rat(1);
    }

    std::vector<std::size_t> pivot_cols;
    mpz_class prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < k && r < m; ++c) {
        std::size_t p = r;
        while (p < m && w[p][c] == 0) ++p;
        if (p == m) continue;
        std::swap(w[p], w[r]);
        if (track) std::swap(combo[p], combo[r]);
        for (std::size_t i = r + 1; i < m; ++i) {
            if (track) {
                Rat piv(w[r][c]), cur(w[i][c]), pr(prev);
                for (std::size_t t = 0; t < m; ++t)
                    combo[i][t] = (combo[i][t] * piv - combo[r][t] * cur) / pr;
            }
            for (std::size_t j = c + 1; j <= k; ++j) {
                mpz_class v = w[r][c] * w[i][j] - w[i][c] * w[r][j];
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                w[i][j] = v;
            }
            w[i][c] = 0;
        }
        prev = w[r][c];
        pivot_cols.push_back(c);
        ++r;
    }

    LinearSolution out;
    out.rank = static_cast<int>(r);

    // Inconsistency: a fully zeroed row with nonzero rhs.
    for (std::size_t i = r; i < m; ++i) {
        bool zero = true;
        for (std::size_t j = 0; j < k; ++j)
            if (w[i][j] != 0) { zero = false; break; }
        if (zero && w[i][k] != 0) {
            out.status = LinearSolution::Status::inconsistent;
            out.witness_row = i;
            if (track) {
                // Rescale to certify the original (uncleared) system:
                // y^T A = 0 and y^T b != 0.
                auto y = combo[i];
                for (std::size_t t = 0; t < m; ++t) y[t] *= Rat(rowscale[t]);
                out.witness_combination = std::move(y);
            }
            return out;
        }
    }

    // Back-substitution over Rat on the echelon form.
    std::vector<Rat> x(k, Rat(0));
    std::vector<bool> is_pivot(k, false);
    for (auto c : pivot_cols) is_pivot[c] = true;
    for (std::size_t ri = r; ri-- > 0;) {
        std::size_t c = pivot_cols[ri];
        Rat s(w[ri][k]);
        for (std::size_t j = c + 1; j < k; ++j)
            if (w[ri][j] != 0) s -= Rat(w[ri][j]) * x[j];
        x[c] = s / Rat(w[ri][c]);
    }
    out.particular = x;
    out.status = (r == k) ? LinearSolution::Status::unique
                          : LinearSolution::Status::underdetermined;

    if (out.status == LinearSolution::Status::underdetermined && want_nullspace) {
        for (std::size_t f = 0; f < k; ++f) {
            if (is_pivot[f]) continue;
            std::vector<Rat> v(k, Rat(0));
            v[f] = Rat(1);
            for (std::size_t ri = r; ri-- > 0;) {
                std::size_t c = pivot_cols[ri];
                Rat s(0);
                for (std::size_t j = c + 1; j < k; ++j)
                    if (w[ri][j] != 0) s -= Rat(w[ri][j]) * v[j];
                v[c] = s / Rat(w[ri][c]);
            }
            out.nullspace.push_back(std::move(v));
        }
    }
    return out;
}

}  // namespace gjms
