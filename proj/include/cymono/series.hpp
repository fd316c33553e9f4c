#pragma once

#include <vector>

#include "cymono/qpoly.hpp"

namespace cymono {

/// Truncated power series: coefficients of z^0 .. z^(n-1).  Operations
/// truncate to the shorter operand.
template <class T>
struct Series {
    std::vector<T> c;

    Series() = default;
    explicit Series(size_t n) : c(n, T(0)) {}
    Series(std::vector<T> cc) : c(std::move(cc)) {}
    static Series one(size_t n) {
        Series s(n);
        if (n > 0) s.c[0] = T(1);
        return s;
    }
    static Series identity(size_t n) {  // the series z
        Series s(n);
        if (n > 1) s.c[1] = T(1);
        return s;
    }

    size_t len() const { return c.size(); }
    T coeff(size_t i) const { return i < c.size() ? c[i] : T(0); }
    Series truncated(size_t n) const {
        Series s = *this;
        if (s.c.size() > n) s.c.resize(n);
        while (s.c.size() < n) s.c.push_back(T(0));
        return s;
    }

    Series& operator+=(const Series& o) {
        size_t n = std::min(c.size(), o.c.size());
        c.resize(n);
        for (size_t i = 0; i < n; ++i) c[i] += o.c[i];
        return *this;
    }
    Series& operator-=(const Series& o) {
        size_t n = std::min(c.size(), o.c.size());
        c.resize(n);
        for (size_t i = 0; i < n; ++i) c[i] -= o.c[i];
        return *this;
    }
    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    Series operator-() const {
        Series r = *this;
        for (auto& v : r.c) v = -v;
        return r;
    }
    friend Series operator*(const Series& a, const Series& b) {
        size_t n = std::min(a.c.size(), b.c.size());
        Series r(n);
        for (size_t i = 0; i < n; ++i) {
            if (a.c[i] == T(0)) continue;
            for (size_t j = 0; i + j < n; ++j) r.c[i + j] += a.c[i] * b.c[j];
        }
        return r;
    }
    Series& operator*=(const Series& o) { return *this = *this * o; }
    Series& operator*=(const T& s) {
        for (auto& v : c) v *= s;
        return *this;
    }
    friend Series operator*(Series a, const T& s) { return a *= s; }
    friend Series operator*(const T& s, Series a) { return a *= s; }

    /// Division, requires o.c[0] invertible.
    friend Series operator/(const Series& a, const Series& b) {
        size_t n = std::min(a.c.size(), b.c.size());
        Series r(n);
        if (n == 0) return r;
        if (b.c[0] == T(0)) throw std::runtime_error("series division by z-multiple");
        for (size_t i = 0; i < n; ++i) {
            T acc = a.coeff(i);
            for (size_t j = 1; j <= i; ++j) acc -= b.c[j] * r.c[i - j];
            r.c[i] = acc / b.c[0];
        }
        return r;
    }

    /// d/dz, one coefficient shorter.
    Series derivative() const {
        if (c.size() <= 1) return Series(c.size() > 0 ? c.size() - 1 : 0);
        Series r(c.size() - 1);
        for (size_t i = 1; i < c.size(); ++i) r.c[i - 1] = c[i] * T(static_cast<int>(i));
        return r;
    }

    /// z d/dz, same length.
    Series theta() const {
        Series r(c.size());
        for (size_t i = 1; i < c.size(); ++i) r.c[i] = c[i] * T(static_cast<int>(i));
        return r;
    }

    /// Antiderivative with zero constant term, same length.
    Series integral() const {
        Series r(c.size());
        for (size_t i = 1; i < c.size(); ++i) r.c[i] = c[i - 1] / T(static_cast<int>(i));
        return r;
    }

    /// exp(f), requires f(0) = 0.
    Series exp() const {
        if (!c.empty() && !(c[0] == T(0))) throw std::runtime_error("series exp: f(0) != 0");
        size_t n = c.size();
        Series r(n);
        if (n == 0) return r;
        r.c[0] = T(1);
        // r' = f' r  =>  (i+1) r_{i+1} = sum_{j} (j+1) f_{j+1} r_{i-j}
        for (size_t i = 0; i + 1 < n; ++i) {
            T acc = T(0);
            for (size_t j = 0; j <= i; ++j) acc += T(static_cast<int>(j + 1)) * coeff(j + 1) * r.c[i - j];
            r.c[i + 1] = acc / T(static_cast<int>(i + 1));
        }
        return r;
    }

    /// log(f), requires f(0) = 1.
    Series log() const {
        if (c.empty() || !(c[0] == T(1))) throw std::runtime_error("series log: f(0) != 1");
        return (derivative() / Series(std::vector<T>(c.begin(), c.end() - 1))).integral_shift();
    }

    /// f^s for rational s, requires f(0) = 1.
    Series pow_rat(const Rat& s) const {
        if (c.empty() || !(c[0] == T(1))) throw std::runtime_error("series pow: f(0) != 1");
        size_t n = c.size();
        Series r(n);
        r.c[0] = T(1);
        // r' f = s f' r
        T sT = ratio_as<T>(s);
        for (size_t i = 0; i + 1 < n; ++i) {
            T acc = T(0);
            for (size_t j = 0; j <= i; ++j)
                acc += (sT * T(static_cast<int>(j + 1)) - T(static_cast<int>(i - j))) * coeff(j + 1) * r.c[i - j];
            r.c[i + 1] = acc / (T(static_cast<int>(i + 1)) * c[0]);
        }
        return r;
    }

    /// Composition f(g(q)) with g(0) = 0 (plain Horner).
    Series compose(const Series& g) const {
        if (!g.c.empty() && !(g.c[0] == T(0)))
            throw std::runtime_error("series composition requires g(0) = 0");
        size_t n = std::min(c.size(), g.c.size());
        Series gn = g.truncated(n);
        Series r(n);
        for (size_t i = c.size(); i-- > 0;) {
            r = r * gn;
            if (n > 0) r.c[0] += coeff(i);
        }
        return r;
    }

    /// Functional inverse of f = z + O(z^2): returns g with f(g(q)) = q.
    Series reversion() const {
        size_t n = c.size();
        if (n < 2 || !(c[0] == T(0)) || !(c[1] == T(1)))
            throw std::runtime_error("reversion requires f = z + O(z^2)");
        Series g = Series::identity(n);
        Series deriv = derivative().truncated(n);
        // Newton: g <- g - (f(g) - q)/f'(g)
        for (size_t iter = 0, correct = 2; correct < 2 * n; ++iter, correct *= 2) {
            Series fg = compose(g);
            fg -= Series::identity(n);
            Series fpg = deriv.compose(g);
            g -= fg / fpg;
            if (iter > 40) break;
        }
        return g;
    }

private:
    Series integral_shift() const {  // helper for log: integrate a derivative-length series
        Series r(c.size() + 1);
        for (size_t i = 0; i < c.size(); ++i) r.c[i + 1] = c[i] / T(static_cast<int>(i + 1));
        return r;
    }

    template <class U>
    static U ratio_as(const Rat& s) {
        return U(s);
    }
};

using QSeries = Series<Rat>;

/// Series of a polynomial (coefficients embedded into T).
template <class T>
Series<T> series_of_poly(const QPoly& p, size_t n) {
    Series<T> s(n);
    for (size_t i = 0; i < std::min(n, p.c.size()); ++i) s.c[i] = T(p.c[i]);
    return s;
}

}  // namespace cymono
