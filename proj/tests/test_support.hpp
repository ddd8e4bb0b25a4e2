#pragma once

#include <cstdint>
#include <vector>

#include "gjms/ratfn.hpp"

namespace gjms::testsupport {

/// Deterministic, platform-independent PRNG (splitmix64). Test data must be
/// byte-identical across runs and toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : s_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) { return next() % n; }
    /// Small rational with numerator in [-range, range] and denominator in [1, dmax].
    Rat rat(int range = 6, int dmax = 3) {
        long num = static_cast<long>(below(static_cast<std::uint64_t>(2 * range + 1))) - range;
        long den = 1 + static_cast<long>(below(static_cast<std::uint64_t>(dmax)));
        return Rat(num, den);
    }
    Rat nonzero_rat(int range = 6, int dmax = 3) {
        for (;;) {
            Rat r = rat(range, dmax);
            if (!r.is_zero()) return r;
        }
    }
    /// Sparse random polynomial in the first `nvars` chart variables.
    Poly poly(int nvars, int max_deg, int nterms) {
        Poly p;
        for (int t = 0; t < nterms; ++t) {
            Mono m;
            int deg = static_cast<int>(below(static_cast<std::uint64_t>(max_deg + 1)));
            for (int d = 0; d < deg; ++d) {
                int v = static_cast<int>(below(static_cast<std::uint64_t>(nvars)));
                m.set_exp(v, m.exp(v) + 1);
            }
            p += Poly::monomial(m, rat());
        }
        return p;
    }
    RatFn ratfn(int nvars, int max_deg = 2, int nterms = 3) {
        Poly den = poly(nvars, max_deg, nterms) + Poly(1 + static_cast<int>(below(4)));
        return RatFn(poly(nvars, max_deg, nterms), den);
    }

  private:
    std::uint64_t s_;
};

}  // namespace gjms::testsupport
