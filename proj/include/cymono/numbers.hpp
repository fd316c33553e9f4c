#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace cymono {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

/// Arbitrary-precision real; the working precision is the thread's current
/// default (see PrecisionScope).
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

inline unsigned current_digits() { return Real::default_precision(); }

/// RAII working-precision switch (decimal digits).
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned digits10)
        : saved_(Real::default_precision()) {
        Real::default_precision(digits10);
    }
    ~PrecisionScope() { Real::default_precision(saved_); }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_;
};

inline Real to_real(const Rat& q) { return Real(q); }
inline Real to_real(const Int& n) { return Real(n); }

inline Real const_pi() {
    Real p;
    mpfr_const_pi(p.backend().data(), MPFR_RNDN);
    return p;
}

/// zeta(3) by the central-binomial series 5/2 * sum (-1)^(n-1) / (n^3 C(2n,n)).
inline Real const_zeta3() {
    unsigned digits = current_digits();
    size_t terms = static_cast<size_t>(digits / 0.60206) + 8;  // 4^-n decay
    Rat sum = 0;
    Int binom = 2;  // C(2,1)
    for (size_t n = 1; n <= terms; ++n) {
        Rat term(1, Int(n) * n * n * binom);
        if (n % 2 == 0) term = -term;
        sum += term;
        binom = binom * (2 * n + 1) * (2 * n + 2) / ((n + 1) * (n + 1));
    }
    return Real(Rat(5, 2) * sum);
}

/// Complex number over Real.  std::complex is not usable with a
/// multiprecision backend, so we carry our own.
struct Cplx {
    Real re, im;

    Cplx() : re(0), im(0) {}
    Cplx(Real r) : re(std::move(r)), im(0) {}
    Cplx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    Cplx(int n) : re(n), im(0) {}
    Cplx(const Rat& q) : re(to_real(q)), im(0) {}

    Cplx& operator+=(const Cplx& o) { re += o.re; im += o.im; return *this; }
    Cplx& operator-=(const Cplx& o) { re -= o.re; im -= o.im; return *this; }
    Cplx& operator*=(const Cplx& o) {
        Real r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    Cplx& operator/=(const Cplx& o) {
        Real d = o.re * o.re + o.im * o.im;
        Real r = (re * o.re + im * o.im) / d;
        im = (im * o.re - re * o.im) / d;
        re = r;
        return *this;
    }
    Cplx operator-() const { return Cplx(-re, -im); }
};

inline Cplx operator+(Cplx a, const Cplx& b) { return a += b; }
inline Cplx operator-(Cplx a, const Cplx& b) { return a -= b; }
inline Cplx operator*(Cplx a, const Cplx& b) { return a *= b; }
inline Cplx operator/(Cplx a, const Cplx& b) { return a /= b; }
inline Cplx operator*(const Real& s, Cplx a) { a.re *= s; a.im *= s; return a; }
inline Cplx operator*(Cplx a, const Real& s) { a.re *= s; a.im *= s; return a; }
inline Cplx operator/(Cplx a, const Real& s) { a.re /= s; a.im /= s; return a; }
inline bool operator==(const Cplx& a, const Cplx& b) { return a.re == b.re && a.im == b.im; }

inline Cplx conj(const Cplx& a) { return Cplx(a.re, -a.im); }
inline Real norm(const Cplx& a) { return a.re * a.re + a.im * a.im; }
inline Real abs(const Cplx& a) { return hypot(a.re, a.im); }
inline Real arg(const Cplx& a) { return atan2(a.im, a.re); }

inline Cplx exp(const Cplx& a) {
    Real m = exp(a.re);
    return Cplx(m * cos(a.im), m * sin(a.im));
}

/// Principal branch.
inline Cplx log(const Cplx& a) { return Cplx(log(abs(a)), arg(a)); }

inline Cplx sqrt(const Cplx& a) {
    Real r = abs(a);
    if (r == 0) return Cplx();
    Real x = sqrt((r + a.re) / 2);
    Real y = sqrt((r - a.re) / 2);
    if (a.im < 0) y = -y;
    return Cplx(x, y);
}

inline Cplx pow_i(Cplx base, long e) {
    Cplx acc(Real(1));
    bool inv = e < 0;
    unsigned long k = inv ? -static_cast<unsigned long>(e) : e;
    while (k) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    if (inv) acc = Cplx(Real(1)) / acc;
    return acc;
}

inline Cplx to_cplx(const Rat& q) { return Cplx(to_real(q)); }

inline Real pow10(long e) {
    Real t(10);
    Real acc(1);
    bool inv = e < 0;
    unsigned long k = inv ? -static_cast<unsigned long>(e) : e;
    while (k) {
        if (k & 1) acc *= t;
        t *= t;
        k >>= 1;
    }
    if (inv) return Real(1) / acc;
    return acc;
}

/// Continued-fraction rational reconstruction: best convergent p/q with
/// q <= max_den and |x - p/q| < tol.  Throws if no convergent qualifies.
inline Rat rationalize(const Real& x, const Int& max_den, const Real& tol) {
    Real v = x;
    Int p0 = 1, q0 = 0;          // p(-1)/q(-1)
    Int p1 = Int(floor(v));      // p(0)/q(0)
    Int q1 = 1;
    for (int it = 0; it < 300; ++it) {
        Rat cand(p1, q1);
        if (abs(x - to_real(cand)) < tol && q1 <= max_den) return cand;
        Real fl = floor(v);
        Real frac = v - fl;
        if (frac == 0) break;
        v = Real(1) / frac;
        if (v > pow10(static_cast<long>(current_digits()))) break;  // ran out of digits
        Int a = Int(floor(v));
        Int p2 = a * p1 + p0, q2 = a * q1 + q0;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (q1 > max_den) break;
    }
    Rat cand(p1, q1);
    if (abs(x - to_real(cand)) < tol && q1 <= max_den) return cand;
    throw std::runtime_error("rationalize: not rational at this precision");
}

inline Int round_to_int(const Real& x) {
    Real r = floor(x + Real(1) / 2);
    return Int(r);
}

inline std::string real_to_string(const Real& x, unsigned digits) {
    return x.str(digits);
}

}  // namespace cymono
