#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cymono/numbers.hpp"

namespace cymono {

/// Dense univariate polynomial, little-endian coefficients.
template <class T>
struct Poly {
    std::vector<T> c;

    Poly() = default;
    explicit Poly(std::vector<T> cc) : c(std::move(cc)) { trim(); }
    static Poly constant(T v) {
        Poly p;
        p.c.push_back(std::move(v));
        p.trim();
        return p;
    }
    static Poly x() { return Poly(std::vector<T>{T(0), T(1)}); }

    void trim() {
        while (!c.empty() && c.back() == T(0)) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; }
    const T& operator[](size_t i) const { return c[i]; }
    T coeff(size_t i) const { return i < c.size() ? c[i] : T(0); }
    T lead() const { return c.empty() ? T(0) : c.back(); }

    Poly& operator+=(const Poly& o) {
        if (o.c.size() > c.size()) c.resize(o.c.size(), T(0));
        for (size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
        trim();
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        if (o.c.size() > c.size()) c.resize(o.c.size(), T(0));
        for (size_t i = 0; i < o.c.size(); ++i) c[i] -= o.c[i];
        trim();
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    Poly operator-() const {
        Poly r = *this;
        for (auto& v : r.c) v = -v;
        return r;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<T> r(a.c.size() + b.c.size() - 1, T(0));
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
        return Poly(std::move(r));
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }
    Poly& operator*=(const T& s) {
        for (auto& v : c) v *= s;
        trim();
        return *this;
    }
    friend Poly operator*(Poly a, const T& s) { return a *= s; }
    friend Poly operator*(const T& s, Poly a) { return a *= s; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.c == b.c; }

    Poly derivative() const {
        if (c.size() <= 1) return Poly();
        std::vector<T> r(c.size() - 1);
        for (size_t i = 1; i < c.size(); ++i) r[i - 1] = c[i] * T(static_cast<int>(i));
        return Poly(std::move(r));
    }

    template <class U>
    U eval(const U& x) const {
        U acc = U(0);
        for (size_t i = c.size(); i-- > 0;) acc = acc * x + U(c[i]);
        return acc;
    }

    /// p(x + a) by repeated synthetic division (Taylor shift).
    Poly shift(const T& a) const {
        std::vector<T> w = c;
        size_t n = w.size();
        std::vector<T> out(n, T(0));
        for (size_t k = 0; k < n; ++k) {
            // synthetic division of w by (x - a); remainder = coefficient k
            for (size_t i = n - 1; i-- > k;) w[i] += w[i + 1] * a;
            out[k] = w[k];
        }
        return Poly(std::move(out));
    }

    Poly times_x_power(size_t k) const {
        if (is_zero()) return Poly();
        std::vector<T> r(c.size() + k, T(0));
        for (size_t i = 0; i < c.size(); ++i) r[i + k] = c[i];
        return Poly(std::move(r));
    }
};

template <class T>
std::pair<Poly<T>, Poly<T>> divrem(const Poly<T>& a, const Poly<T>& b) {
    if (b.is_zero()) throw std::runtime_error("polynomial division by zero");
    Poly<T> r = a;
    int db = b.degree();
    if (a.degree() < db) return {Poly<T>(), r};
    std::vector<T> q(a.degree() - db + 1, T(0));
    while (!r.is_zero() && r.degree() >= db) {
        int k = r.degree() - db;
        T f = r.lead() / b.lead();
        q[k] = f;
        for (int i = 0; i <= db; ++i) r.c[k + i] -= f * b.c[i];
        r.trim();
    }
    return {Poly<T>(std::vector<T>(std::move(q))), r};
}

template <class T>
Poly<T> poly_gcd(Poly<T> a, Poly<T> b) {
    while (!b.is_zero()) {
        auto [q, r] = divrem(a, b);
        a = b;
        b = r;
    }
    if (!a.is_zero()) {
        T l = a.lead();
        for (auto& v : a.c) v = v / l;  // monic
    }
    return a;
}

using QPoly = Poly<Rat>;

inline QPoly qpoly_from_ints(std::initializer_list<long> v) {
    std::vector<Rat> c;
    for (long x : v) c.emplace_back(x);
    return QPoly(std::move(c));
}

/// gcd of numerators over lcm of denominators; sign of leading coefficient.
inline Rat content(const QPoly& p) {
    if (p.is_zero()) return Rat(0);
    Int num = 0, den = 1;
    for (const auto& q : p.c) {
        num = gcd(num, numerator(q));
        den = lcm(den, denominator(q));
    }
    Rat c(num, den);
    if (p.lead() < 0) c = -c;
    return c;
}

/// Primitive integer-coefficient polynomial with positive leading coefficient.
inline QPoly primitive_part(const QPoly& p) {
    if (p.is_zero()) return p;
    Rat c = content(p);
    QPoly r = p;
    for (auto& v : r.c) v /= c;
    return r;
}

inline std::vector<Int> divisors_of(Int n) {
    if (n < 0) n = -n;
    if (n == 0) return {};
    std::vector<Int> small, large;
    for (Int d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            small.push_back(d);
            if (d * d != n) large.push_back(n / d);
        }
        if (d > 2000000) throw std::runtime_error("divisor enumeration: value too large");
    }
    small.insert(small.end(), large.rbegin(), large.rend());
    return small;
}

/// All rational roots (with multiplicity) of p; p is divided down in place.
inline std::vector<Rat> extract_rational_roots(QPoly& p) {
    std::vector<Rat> roots;
    if (p.degree() < 1) return roots;
    // peel off roots at 0
    size_t z = 0;
    while (z < p.c.size() && p.c[z] == 0) ++z;
    if (z > 0) {
        p.c.erase(p.c.begin(), p.c.begin() + z);
        roots.insert(roots.end(), z, Rat(0));
    }
    QPoly pp = primitive_part(p);
    auto p0 = divisors_of(numerator(pp.c.front()));
    auto pn = divisors_of(numerator(pp.lead()));
    std::vector<Rat> candidates;
    for (const auto& a : p0)
        for (const auto& b : pn) {
            Rat r(a, b);
            candidates.push_back(r);
            candidates.push_back(-r);
        }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (const auto& r : candidates) {
        while (p.degree() >= 1 && p.eval(r) == 0) {
            // exact synthetic division by (x - r)
            QPoly div(std::vector<Rat>{-r, Rat(1)});
            auto [q, rem] = divrem(p, div);
            if (!rem.is_zero()) throw std::logic_error("root division remainder");
            p = q;
            roots.push_back(r);
        }
    }
    return roots;
}

inline bool is_perfect_square(const Int& n, Int& root) {
    if (n < 0) return false;
    root = sqrt(n);
    return root * root == n;
}

namespace detail {

/// Try to split a primitive integer quartic into two rational quadratics.
inline std::optional<std::pair<QPoly, QPoly>> quartic_split(const QPoly& p) {
    Int A = numerator(p.coeff(4)), E = numerator(p.coeff(0));
    Rat p3 = p.coeff(3), p2 = p.coeff(2), p1 = p.coeff(1);
    for (const Int& a : divisors_of(A)) {
        Int d = A / a;
        for (const Int& c_abs : divisors_of(E)) {
            for (int sgn = -1; sgn <= 1; sgn += 2) {
                Int c = sgn * c_abs;
                if (c == 0) continue;
                if (E % c != 0) continue;
                Int f = E / c;
                // (a x^2 + b x + c)(d x^2 + e x + f): solve for b, e from
                //   a e + d b = p3,  c e + f b = p1  (then verify p2)
                Rat det = Rat(a) * f - Rat(c) * d;
                Rat b, e;
                if (det != 0) {
                    e = (p3 * f - Rat(d) * p1) / det;
                    b = (Rat(a) * p1 - Rat(c) * p3) / det;
                } else {
                    continue;
                }
                if (Rat(a) * f + b * e + Rat(c) * d != p2) continue;
                QPoly q1(std::vector<Rat>{Rat(c), b, Rat(a)});
                QPoly q2(std::vector<Rat>{Rat(f), e, Rat(d)});
                if (q1 * q2 == p) return std::make_pair(q1, q2);
            }
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Factor a squarefree primitive polynomial with no rational roots into
/// rational irreducibles (degree <= 4 fully handled; higher degrees are
/// returned unsplit).
inline std::vector<QPoly> factor_squarefree_rootfree(const QPoly& p) {
    int d = p.degree();
    if (d <= 3) return {p};  // no rational root: quadratic/cubic irreducible
    if (d == 4) {
        if (auto split = detail::quartic_split(p)) {
            auto out1 = factor_squarefree_rootfree(primitive_part(split->first));
            auto out2 = factor_squarefree_rootfree(primitive_part(split->second));
            out1.insert(out1.end(), out2.begin(), out2.end());
            return out1;
        }
        return {p};
    }
    return {p};
}

struct QFactor {
    QPoly factor;   // primitive, positive leading coefficient
    int multiplicity = 1;
};

/// Squarefree-and-rational factorization of p (up to a rational constant).
inline std::vector<QFactor> factor_rational(const QPoly& poly) {
    std::vector<QFactor> out;
    QPoly p = primitive_part(poly);
    if (p.degree() < 1) return out;
    // squarefree decomposition by repeated gcd with derivative
    int mult = 1;
    std::vector<std::pair<QPoly, int>> squarefree_parts;
    QPoly g = poly_gcd(p, p.derivative());
    QPoly rest = p;
    while (rest.degree() >= 1) {
        if (g.degree() == 0) {
            squarefree_parts.emplace_back(rest, mult);
            break;
        }
        auto [q, r] = divrem(rest, g);
        if (!r.is_zero()) throw std::logic_error("squarefree decomposition");
        // factors in q but not in g have multiplicity exactly mult
        QPoly only_here = q;
        QPoly shared = poly_gcd(q, g);
        if (shared.degree() >= 1) {
            auto [qq, rr] = divrem(only_here, shared);
            if (!rr.is_zero()) throw std::logic_error("squarefree decomposition");
            only_here = qq;
        }
        if (only_here.degree() >= 1) squarefree_parts.emplace_back(only_here, mult);
        rest = g;
        g = poly_gcd(rest, rest.derivative());
        ++mult;
    }
    for (auto& [sf, m] : squarefree_parts) {
        QPoly f = primitive_part(sf);
        auto roots = extract_rational_roots(f);
        for (const auto& r : roots) {
            QPoly lin(std::vector<Rat>{-r, Rat(1)});
            lin = primitive_part(lin * Rat(denominator(r)));
            bool found = false;
            for (auto& existing : out)
                if (existing.factor == lin && existing.multiplicity == 0) found = true;
            (void)found;
            out.push_back({lin, m});
        }
        if (f.degree() >= 1) {
            if (f.degree() == 2) {
                Int disc = numerator(f.coeff(1) * f.coeff(1) - 4 * f.coeff(2) * f.coeff(0));
                Int rt;
                if (is_perfect_square(disc, rt)) throw std::logic_error("missed rational root");
            }
            for (const auto& irr : factor_squarefree_rootfree(primitive_part(f)))
                out.push_back({primitive_part(irr), m});
        }
    }
    // merge equal factors
    std::vector<QFactor> merged;
    for (auto& f : out) {
        bool hit = false;
        for (auto& m : merged)
            if (m.factor == f.factor) {
                m.multiplicity += f.multiplicity;
                hit = true;
                break;
            }
        if (!hit) merged.push_back(f);
    }
    std::sort(merged.begin(), merged.end(), [](const QFactor& a, const QFactor& b) {
        if (a.factor.degree() != b.factor.degree()) return a.factor.degree() < b.factor.degree();
        return a.factor.c < b.factor.c;
    });
    return merged;
}

/// Falling factorial x(x-1)...(x-k+1) as a polynomial.
template <class T>
Poly<T> falling_factorial(int k) {
    Poly<T> p = Poly<T>::constant(T(1));
    for (int i = 0; i < k; ++i) p *= Poly<T>(std::vector<T>{T(-i), T(1)});
    return p;
}

}  // namespace cymono
