#pragma once

#include <array>

#include "cymono/opcore.hpp"
#include "cymono/series.hpp"

namespace cymono {

namespace frob {

/// Truncated polynomial in rho modulo rho^4.
template <class T>
struct Rho4 {
    std::array<T, 4> a{T(0), T(0), T(0), T(0)};

    static Rho4 scalar(T v) {
        Rho4 r;
        r.a[0] = std::move(v);
        return r;
    }
    Rho4& operator+=(const Rho4& o) {
        for (int i = 0; i < 4; ++i) a[i] += o.a[i];
        return *this;
    }
    friend Rho4 operator*(const Rho4& x, const Rho4& y) {
        Rho4 r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; i + j < 4; ++j) r.a[i + j] += x.a[i] * y.a[j];
        return r;
    }
    Rho4 operator-() const {
        Rho4 r;
        for (int i = 0; i < 4; ++i) r.a[i] = -a[i];
        return r;
    }
    /// Multiplicative inverse; requires a[0] != 0.
    Rho4 inverse() const {
        Rho4 r;
        r.a[0] = T(1) / a[0];
        for (int i = 1; i < 4; ++i) {
            T acc = T(0);
            for (int j = 1; j <= i; ++j) acc += a[j] * r.a[i - j];
            r.a[i] = -acc / a[0];
        }
        return r;
    }
};

/// P(x0 + rho) mod rho^4 via derivatives of P at x0.
template <class T>
Rho4<T> eval_shifted(const QPoly& p, const T& x0) {
    Rho4<T> r;
    QPoly d = p;
    Rat fact = 1;
    for (int k = 0; k < 4; ++k) {
        if (k > 0) {
            d = d.derivative();
            fact *= k;
        }
        if (d.is_zero()) break;
        r.a[k] = d.template eval<T>(x0) / T(fact);
    }
    return r;
}

}  // namespace frob

/// theta-form coefficient data z^k -> P_k(theta), k = 0..max.
inline std::vector<QPoly> theta_layers(const DifferentialOperator& opIn) {
    DifferentialOperator op = opIn.form == OpForm::theta ? opIn : convert_form(opIn, OpForm::theta);
    int maxk = 0;
    for (int i = 0; i <= 4; ++i) maxk = std::max(maxk, op.coeffs[i].degree());
    std::vector<QPoly> layers(static_cast<size_t>(maxk) + 1);
    for (int k = 0; k <= maxk; ++k) {
        std::vector<Rat> lam(5, Rat(0));
        for (int i = 0; i <= 4; ++i) lam[i] = op.coeffs[i].coeff(k);
        layers[k] = QPoly(std::move(lam));
    }
    return layers;
}

inline void require_mum_at_zero(const std::vector<QPoly>& layers) {
    const QPoly& p0 = layers.at(0);
    if (p0.degree() != 4) throw std::runtime_error("z=0 is not a MUM point (indicial degree < 4)");
    for (int i = 0; i < 4; ++i)
        if (p0.coeff(i) != 0)
            throw std::runtime_error("z=0 is not a MUM point (indicial polynomial not lambda^4)");
}

/// Frobenius basis at the MUM point z=0: y_i = sum_{j<=i} log(z)^j/j! f_{i-j}.
template <class T>
struct FrobeniusBasisT {
    size_t order = 0;
    std::array<Series<T>, 4> f;

    Series<T> f_ratio(int i) const { return f[i] / f[0]; }
};

using FrobeniusBasis = FrobeniusBasisT<Rat>;
using FrobeniusBasisC = FrobeniusBasisT<Cplx>;

/// A(n,rho) recursion over the ring T[rho]/rho^4 with A(0,rho) = 1.
template <class T>
FrobeniusBasisT<T> frobenius_basis_t(const DifferentialOperator& op, size_t n_terms) {
    auto layers = theta_layers(op);
    require_mum_at_zero(layers);
    size_t kmax = layers.size() - 1;
    FrobeniusBasisT<T> fb;
    fb.order = n_terms;
    for (auto& s : fb.f) s = Series<T>(n_terms);
    std::vector<frob::Rho4<T>> A(n_terms);
    A[0] = frob::Rho4<T>::scalar(T(1));
    for (size_t n = 1; n < n_terms; ++n) {
        frob::Rho4<T> acc;
        for (size_t j = 1; j <= std::min(n, kmax); ++j) {
            if (layers[j].is_zero()) continue;
            frob::Rho4<T> pj = frob::eval_shifted<T>(layers[j], T(static_cast<int>(n - j)));
            acc += pj * A[n - j];
        }
        frob::Rho4<T> p0 = frob::eval_shifted<T>(layers[0], T(static_cast<int>(n)));
        if (p0.a[0] == T(0)) throw std::runtime_error("frobenius: resonant denominator at n=" + std::to_string(n));
        A[n] = (-acc) * p0.inverse();
    }
    for (size_t n = 0; n < n_terms; ++n)
        for (int i = 0; i < 4; ++i) fb.f[i].c[n] = A[n].a[i];
    return fb;
}

inline FrobeniusBasis frobenius_basis(const DifferentialOperator& op, size_t n_terms) {
    return frobenius_basis_t<Rat>(op, n_terms);
}
inline FrobeniusBasisC frobenius_basis_numeric(const DifferentialOperator& op, size_t n_terms) {
    return frobenius_basis_t<Cplx>(op, n_terms);
}

/// Mirror map data around the MUM point.  q = e^t with t = log z + f1/f0, so
/// q = z exp(f1/f0).  The 2 pi i rescaled coordinate is t_hat = t/(2 pi i),
/// q = exp(2 pi i t_hat); instanton formulas are coefficient extractions in q.
struct MirrorMap {
    QSeries g;       // f1/f0 (t = log z + g)
    QSeries q_of_z;  // q/z, unit constant term
    QSeries z_of_q;  // z/q as a series in q, unit constant term
    std::string normalization =
        "q = exp(t), t = log z + f1/f0; t_hat = t/(2*pi*i), q = exp(2*pi*i*t_hat)";
};

inline MirrorMap mirror_map(const FrobeniusBasis& fb) {
    MirrorMap mm;
    mm.g = fb.f[1] / fb.f[0];
    mm.q_of_z = mm.g.exp();  // q/z
    // invert q(z) = z * q_of_z(z): work with full series q(z) shifted by one
    size_t n = fb.order;
    QSeries qz(n + 1);  // q as series in z, vanishing constant term
    for (size_t i = 0; i + 1 <= n; ++i) qz.c[i + 1] = mm.q_of_z.coeff(i);
    QSeries zq = qz.reversion();  // z as series in q
    mm.z_of_q = QSeries(n);
    for (size_t i = 0; i < n; ++i) mm.z_of_q.c[i] = zq.coeff(i + 1);
    return mm;
}

/// Substitute z = z(q) into a z-series, yielding a q-series.
inline QSeries to_q_series(const QSeries& in_z, const MirrorMap& mm) {
    size_t n = in_z.len();
    QSeries zq(n);  // z(q) with zero constant term, truncated to n
    for (size_t i = 1; i < n; ++i) zq.c[i] = mm.z_of_q.coeff(i - 1);
    return in_z.compose(zq);
}

/// Laurent-aware numeric series value: z^off * sum c_i z^i at a point.
struct LaurentC {
    long off = 0;
    Series<Cplx> s;

    LaurentC() = default;
    LaurentC(long o, Series<Cplx> ser) : off(o), s(std::move(ser)) { normalize(); }
    void normalize() {
        size_t lead = 0;
        while (lead < s.c.size() && s.c[lead] == Cplx(0)) ++lead;
        if (lead > 0 && lead < s.c.size()) {
            s.c.erase(s.c.begin(), s.c.begin() + lead);
            off += static_cast<long>(lead);
        }
    }
    LaurentC derivative() const {  // d/dz of z^off * s(z)
        Series<Cplx> r(s.len());
        for (size_t i = 0; i < s.len(); ++i)
            r.c[i] = s.c[i] * Cplx(Real(static_cast<long>(i) + off));
        return LaurentC(off - 1, std::move(r));
    }
    LaurentC div_z() const { return LaurentC(off - 1, s); }
    bool empty() const {
        for (const auto& v : s.c)
            if (!(v == Cplx(0))) return false;
        return true;
    }
    Cplx eval(const Cplx& z) const {
        Cplx acc(Real(0));
        for (size_t i = s.c.size(); i-- > 0;) acc = acc * z + s.c[i];
        return acc * pow_i(z, off);
    }
};

/// Values and first three derivatives of the Frobenius solutions y_0..y_3 at
/// a point inside the disc of convergence: out[d][j] = y_j^(d)(b).
/// Uses the principal branch of log.
inline std::array<std::array<Cplx, 4>, 4> frobenius_values(const FrobeniusBasisC& fb,
                                                           const Cplx& b) {
    // y_j^(d) = sum_m log^m z / m! * h[d][j][m],
    // h[0][j][m] = f_{j-m},  h[d+1][j][m] = h[d][j][m]' + h[d][j][m+1]/z
    std::array<std::array<Cplx, 4>, 4> out;
    Cplx lg = log(b);
    std::array<Cplx, 4> logpow;
    logpow[0] = Cplx(Real(1));
    for (int m = 1; m < 4; ++m) logpow[m] = logpow[m - 1] * lg / Cplx(Real(m));
    for (int j = 0; j < 4; ++j) {
        std::array<LaurentC, 4> h;
        for (int m = 0; m <= j; ++m) h[m] = LaurentC(0, fb.f[j - m]);
        for (int d = 0; d < 4; ++d) {
            Cplx val(Real(0));
            for (int m = 0; m < 4; ++m) {
                if (h[m].empty()) continue;
                val += logpow[m] * h[m].eval(b);
            }
            out[d][j] = val;
            if (d < 3) {
                std::array<LaurentC, 4> nh;
                for (int m = 0; m < 4; ++m) {
                    nh[m] = h[m].derivative();
                    if (m + 1 < 4 && !h[m + 1].empty()) {
                        LaurentC add = h[m + 1].div_z();
                        // align offsets and sum
                        long o = std::min(nh[m].off, add.off);
                        size_t n = std::max(nh[m].s.len() + (nh[m].off - o),
                                            add.s.len() + (add.off - o));
                        Series<Cplx> sum(n);
                        for (size_t i = 0; i < nh[m].s.len(); ++i)
                            sum.c[i + (nh[m].off - o)] += nh[m].s.c[i];
                        for (size_t i = 0; i < add.s.len(); ++i)
                            sum.c[i + (add.off - o)] += add.s.c[i];
                        nh[m] = LaurentC(o, std::move(sum));
                    }
                }
                h = std::move(nh);
            }
        }
    }
    return out;
}

}  // namespace cymono
