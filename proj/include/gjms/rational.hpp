#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gjms {

/// Error for genuinely undefined arithmetic (division by zero, non-invertible
/// jets, valence mismatches and the like).
struct math_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a computation would need more rho-orders (or jet orders) than
/// the inputs guarantee. Carries what was needed and what was available so a
/// caller can rerun with a larger truncation.
struct truncation_error : std::runtime_error {
    int needed;
    int available;
    truncation_error(const std::string& what, int needed_, int available_)
        : std::runtime_error(what + " (needed order " + std::to_string(needed_) +
                             ", available " + std::to_string(available_) + ")"),
          needed(needed_),
          available(available_) {}
};

/// Exact rational number: reduced fraction with positive denominator.
///
/// A thin value wrapper around GMP's mpq_class. The wrapper keeps the
/// canonical-form invariant after every operation and shields generic code
/// from gmpxx expression templates.
class Rat {
  public:
    Rat() : v_(0) {}
    Rat(int n) : v_(n) {}
    Rat(long n) : v_(static_cast<long>(n)) {}
    Rat(const mpz_class& n) : v_(n) {}
    Rat(const mpq_class& q) : v_(q) { v_.canonicalize(); }
    Rat(long num, long den) : v_(num, den) {
        if (den == 0) throw math_error("rational with zero denominator");
        v_.canonicalize();
    }
    Rat(const mpz_class& num, const mpz_class& den) : v_(num, den) {
        if (den == 0) throw math_error("rational with zero denominator");
        v_.canonicalize();
    }

    /// Parses "a", "-a", or "a/b". Throws math_error on malformed input.
    static Rat parse(const std::string& s) {
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rat(mpz_class(s));
            mpz_class num(s.substr(0, slash));
            mpz_class den(s.substr(slash + 1));
            if (den == 0) throw math_error("rational with zero denominator: " + s);
            return Rat(num, den);
        } catch (const std::invalid_argument&) {
            throw math_error("malformed rational: '" + s + "'");
        }
    }

    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }

    bool is_zero() const { return v_ == 0; }
    bool is_one() const { return v_ == 1; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    Rat operator-() const { return Rat(mpq_class(-v_)); }
    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
    Rat& operator/=(const Rat& o) {
        if (o.is_zero()) throw math_error("rational division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rat operator+(Rat a, const Rat& b) { a += b; return a; }
    friend Rat operator-(Rat a, const Rat& b) { a -= b; return a; }
    friend Rat operator*(Rat a, const Rat& b) { a *= b; return a; }
    friend Rat operator/(Rat a, const Rat& b) { a /= b; return a; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

    Rat inv() const {
        if (is_zero()) throw math_error("inverse of zero rational");
        return Rat(mpq_class(1 / v_));
    }

    Rat abs() const { return Rat(mpq_class(::abs(v_))); }

    /// Integer power, negative exponents allowed for nonzero values.
    Rat pow(int e) const {
        if (e < 0) return inv().pow(-e);
        Rat r(1), b(*this);
        while (e > 0) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    std::string str() const { return v_.get_str(); }

    double to_double() const { return v_.get_d(); }

  private:
    mpq_class v_;
};

inline Rat rat_gcd(const Rat& a, const Rat& b) {
    // gcd of rationals: gcd of numerators over lcm of denominators; the
    // convenient normalization for extracting polynomial content.
    if (a.is_zero()) return b.abs();
    if (b.is_zero()) return a.abs();
    mpz_class gn, ld;
    mpz_gcd(gn.get_mpz_t(), a.num().get_mpz_t(), b.num().get_mpz_t());
    mpz_lcm(ld.get_mpz_t(), a.den().get_mpz_t(), b.den().get_mpz_t());
    return Rat(gn, ld);
}

}  // namespace gjms
