#pragma once

#include <vector>

#include "cymono/algebraic.hpp"

namespace cymono {

/// Dense complex matrix at working precision (row-major).
struct CMat {
    size_t n = 0;
    std::vector<Cplx> a;

    CMat() = default;
    explicit CMat(size_t nn) : n(nn), a(nn * nn, Cplx(Real(0))) {}
    static CMat identity(size_t nn) {
        CMat m(nn);
        for (size_t i = 0; i < nn; ++i) m(i, i) = Cplx(Real(1));
        return m;
    }
    Cplx& operator()(size_t i, size_t j) { return a[i * n + j]; }
    const Cplx& operator()(size_t i, size_t j) const { return a[i * n + j]; }

    friend CMat operator*(const CMat& x, const CMat& y) {
        CMat r(x.n);
        for (size_t i = 0; i < x.n; ++i)
            for (size_t k = 0; k < x.n; ++k) {
                const Cplx& v = x(i, k);
                if (v == Cplx(0)) continue;
                for (size_t j = 0; j < x.n; ++j) r(i, j) += v * y(k, j);
            }
        return r;
    }
    friend CMat operator-(CMat x, const CMat& y) {
        for (size_t i = 0; i < x.a.size(); ++i) x.a[i] -= y.a[i];
        return x;
    }
    friend CMat operator+(CMat x, const CMat& y) {
        for (size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
        return x;
    }
    std::vector<Cplx> apply(const std::vector<Cplx>& v) const {
        std::vector<Cplx> r(n, Cplx(Real(0)));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }
    Real max_abs() const {
        Real m(0);
        for (const auto& v : a) m = std::max(m, abs(v));
        return m;
    }
    CMat transpose() const {
        CMat r(n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    CMat adjoint() const {
        CMat r(n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) r(j, i) = conj((*this)(i, j));
        return r;
    }
};

inline CMat inverse(const CMat& m) {
    size_t n = m.n;
    CMat w = m, inv = CMat::identity(n);
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        Real best = abs(w(col, col));
        for (size_t r = col + 1; r < n; ++r)
            if (abs(w(r, col)) > best) {
                best = abs(w(r, col));
                piv = r;
            }
        if (best == 0) throw std::runtime_error("singular matrix");
        if (piv != col)
            for (size_t j = 0; j < n; ++j) {
                std::swap(w(piv, j), w(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        Cplx d = w(col, col);
        for (size_t j = 0; j < n; ++j) {
            w(col, j) /= d;
            inv(col, j) /= d;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            Cplx f = w(r, col);
            if (f == Cplx(0)) continue;
            for (size_t j = 0; j < n; ++j) {
                w(r, j) -= f * w(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

inline Cplx det(CMat w) {
    size_t n = w.n;
    Cplx d(Real(1));
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        Real best = abs(w(col, col));
        for (size_t r = col + 1; r < n; ++r)
            if (abs(w(r, col)) > best) {
                best = abs(w(r, col));
                piv = r;
            }
        if (best == 0) return Cplx(Real(0));
        if (piv != col) {
            for (size_t j = col; j < n; ++j) std::swap(w(piv, j), w(col, j));
            d = -d;
        }
        d *= w(col, col);
        for (size_t r = col + 1; r < n; ++r) {
            Cplx f = w(r, col) / w(col, col);
            for (size_t j = col; j < n; ++j) w(r, j) -= f * w(col, j);
        }
    }
    return d;
}

/// Characteristic polynomial (monic) by the Faddeev-LeVerrier recursion.
inline Poly<Cplx> char_poly(const CMat& m) {
    size_t n = m.n;
    std::vector<Cplx> coeff(n + 1, Cplx(Real(0)));
    coeff[n] = Cplx(Real(1));
    CMat mk = m;
    for (size_t k = 1; k <= n; ++k) {
        Cplx tr(Real(0));
        for (size_t i = 0; i < n; ++i) tr += mk(i, i);
        Cplx ck = -(tr / Cplx(Real(static_cast<long>(k))));
        coeff[n - k] = ck;
        if (k < n) {
            for (size_t i = 0; i < n; ++i) mk(i, i) += ck;
            mk = m * mk;
        }
    }
    return Poly<Cplx>(std::move(coeff));
}

/// Singular values (descending) of a set of columns by one-sided Jacobi;
/// relatively accurate even for nearly rank-deficient input.
inline std::vector<Real> singular_values_of_columns(std::vector<std::vector<Cplx>> col) {
    size_t k = col.size();
    if (k == 0) return {};
    size_t rows = col[0].size();
    Real tol = pow10(-static_cast<long>(current_digits()) + 2);
    for (int sweep = 0; sweep < 64; ++sweep) {
        bool converged = true;
        for (size_t i = 0; i < k; ++i)
            for (size_t j = i + 1; j < k; ++j) {
                Cplx g(Real(0));
                Real a(0), b(0);
                for (size_t r = 0; r < rows; ++r) {
                    g += conj(col[i][r]) * col[j][r];
                    a += norm(col[i][r]);
                    b += norm(col[j][r]);
                }
                Real gm = abs(g);
                if (gm == 0 || gm * gm <= tol * tol * a * b) continue;
                converged = false;
                Cplx phase = g / gm;
                Real tau = (b - a) / (2 * gm);
                Real t = (tau >= 0 ? Real(1) : Real(-1)) / (abs(tau) + sqrt(1 + tau * tau));
                Real c = Real(1) / sqrt(1 + t * t);
                Real s = c * t;
                for (size_t r = 0; r < rows; ++r) {
                    Cplx w = conj(phase) * col[j][r];
                    Cplx u = col[i][r];
                    col[i][r] = c * u - s * w;
                    col[j][r] = phase * (s * u + c * w);
                }
            }
        if (converged) break;
    }
    std::vector<Real> sv;
    for (size_t i = 0; i < k; ++i) {
        Real a(0);
        for (size_t r = 0; r < rows; ++r) a += norm(col[i][r]);
        sv.push_back(sqrt(a));
    }
    std::sort(sv.begin(), sv.end(), std::greater<Real>());
    return sv;
}

inline std::vector<Real> singular_values(const CMat& m) {
    std::vector<std::vector<Cplx>> col(m.n, std::vector<Cplx>(m.n));
    for (size_t j = 0; j < m.n; ++j)
        for (size_t i = 0; i < m.n; ++i) col[j][i] = m(i, j);
    return singular_values_of_columns(std::move(col));
}

}  // namespace cymono
