#pragma once

#include <vector>

#include "cymono/numbers.hpp"
#include "cymono/qpoly.hpp"

namespace cymono {

/// Dense exact rational matrix (row-major).
struct QMat {
    size_t rows = 0, cols = 0;
    std::vector<Rat> a;

    QMat() = default;
    QMat(size_t r, size_t c) : rows(r), cols(c), a(r * c, Rat(0)) {}
    static QMat identity(size_t n) {
        QMat m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    Rat& operator()(size_t i, size_t j) { return a[i * cols + j]; }
    const Rat& operator()(size_t i, size_t j) const { return a[i * cols + j]; }

    friend QMat operator*(const QMat& x, const QMat& y) {
        QMat r(x.rows, y.cols);
        for (size_t i = 0; i < x.rows; ++i)
            for (size_t k = 0; k < x.cols; ++k) {
                const Rat& v = x(i, k);
                if (v == 0) continue;
                for (size_t j = 0; j < y.cols; ++j) r(i, j) += v * y(k, j);
            }
        return r;
    }
    friend QMat operator+(QMat x, const QMat& y) {
        for (size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
        return x;
    }
    friend QMat operator-(QMat x, const QMat& y) {
        for (size_t i = 0; i < x.a.size(); ++i) x.a[i] -= y.a[i];
        return x;
    }
    friend bool operator==(const QMat& x, const QMat& y) {
        return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
    }
    std::vector<Rat> apply(const std::vector<Rat>& v) const {
        std::vector<Rat> r(rows, Rat(0));
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }
    QMat transpose() const {
        QMat r(cols, rows);
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    bool is_integral() const {
        for (const auto& v : a)
            if (denominator(v) != 1) return false;
        return true;
    }
    bool is_identity() const {
        if (rows != cols) return false;
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j)
                if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
        return true;
    }
};

inline QMat q_inverse(const QMat& m) {
    size_t n = m.rows;
    QMat w = m, inv = QMat::identity(n);
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && w(piv, col) == 0) ++piv;
        if (piv == n) throw std::runtime_error("singular rational matrix");
        if (piv != col)
            for (size_t j = 0; j < n; ++j) {
                std::swap(w(piv, j), w(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        Rat d = w(col, col);
        for (size_t j = 0; j < n; ++j) {
            w(col, j) /= d;
            inv(col, j) /= d;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            Rat f = w(r, col);
            if (f == 0) continue;
            for (size_t j = 0; j < n; ++j) {
                w(r, j) -= f * w(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

inline size_t q_rank(QMat w) {
    size_t r = 0;
    for (size_t col = 0; col < w.cols && r < w.rows; ++col) {
        size_t piv = r;
        while (piv < w.rows && w(piv, col) == 0) ++piv;
        if (piv == w.rows) continue;
        if (piv != r)
            for (size_t j = 0; j < w.cols; ++j) std::swap(w(piv, j), w(r, j));
        Rat d = w(r, col);
        for (size_t j = 0; j < w.cols; ++j) w(r, j) /= d;
        for (size_t i = 0; i < w.rows; ++i) {
            if (i == r) continue;
            Rat f = w(i, col);
            if (f == 0) continue;
            for (size_t j = 0; j < w.cols; ++j) w(i, j) -= f * w(r, j);
        }
        ++r;
    }
    return r;
}

/// Right kernel basis of a rows x cols matrix.
inline std::vector<std::vector<Rat>> q_kernel(QMat w) {
    size_t rows = w.rows, cols = w.cols;
    std::vector<long> pivot_of_col(cols, -1);
    size_t r = 0;
    for (size_t col = 0; col < cols && r < rows; ++col) {
        size_t piv = r;
        while (piv < rows && w(piv, col) == 0) ++piv;
        if (piv == rows) continue;
        if (piv != r)
            for (size_t j = 0; j < cols; ++j) std::swap(w(piv, j), w(r, j));
        Rat d = w(r, col);
        for (size_t j = 0; j < cols; ++j) w(r, j) /= d;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            Rat f = w(i, col);
            if (f == 0) continue;
            for (size_t j = 0; j < cols; ++j) w(i, j) -= f * w(r, j);
        }
        pivot_of_col[col] = static_cast<long>(r);
        ++r;
    }
    std::vector<std::vector<Rat>> basis;
    for (size_t free_col = 0; free_col < cols; ++free_col) {
        if (pivot_of_col[free_col] >= 0) continue;
        std::vector<Rat> v(cols, Rat(0));
        v[free_col] = 1;
        for (size_t col = 0; col < cols; ++col)
            if (pivot_of_col[col] >= 0) v[col] = -w(static_cast<size_t>(pivot_of_col[col]), free_col);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Characteristic polynomial (monic, exact) by Faddeev-LeVerrier.
inline QPoly q_char_poly(const QMat& m) {
    size_t n = m.rows;
    std::vector<Rat> coeff(n + 1, Rat(0));
    coeff[n] = 1;
    QMat mk = m;
    for (size_t k = 1; k <= n; ++k) {
        Rat tr = 0;
        for (size_t i = 0; i < n; ++i) tr += mk(i, i);
        Rat ck = -tr / Rat(static_cast<long>(k));
        coeff[n - k] = ck;
        if (k < n) {
            for (size_t i = 0; i < n; ++i) mk(i, i) += ck;
            mk = m * mk;
        }
    }
    return QPoly(std::move(coeff));
}

/// Scale a rational vector to a primitive integer vector; sign such that the
/// first nonzero entry is positive.
inline std::vector<Int> primitive_integer_vector(const std::vector<Rat>& v) {
    Int den = 1;
    for (const auto& q : v) den = lcm(den, denominator(q));
    std::vector<Int> w;
    Int g = 0;
    for (const auto& q : v) {
        Int x = numerator(q) * (den / denominator(q));
        g = gcd(g, x);
        w.push_back(x);
    }
    if (g == 0) return w;
    bool flip = false;
    for (const auto& x : w)
        if (x != 0) {
            flip = x < 0;
            break;
        }
    for (auto& x : w) {
        x /= g;
        if (flip) x = -x;
    }
    return w;
}

}  // namespace cymono
