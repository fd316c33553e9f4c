#pragma once

#include <algorithm>
#include <climits>

#include "cymono/algebraic.hpp"
#include "cymono/operator.hpp"

namespace cymono {

/// Rational function over Q, kept in lowest terms with monic denominator.
struct RatFun {
    QPoly num, den = QPoly::constant(Rat(1));

    RatFun() = default;
    explicit RatFun(QPoly n) : num(std::move(n)) {}
    RatFun(QPoly n, QPoly d) : num(std::move(n)), den(std::move(d)) { normalize(); }

    void normalize() {
        if (den.is_zero()) throw std::runtime_error("rational function: zero denominator");
        if (num.is_zero()) {
            den = QPoly::constant(Rat(1));
            return;
        }
        QPoly g = poly_gcd(num, den);
        if (g.degree() >= 1) {
            num = divrem(num, g).first;
            den = divrem(den, g).first;
        }
        Rat l = den.lead();
        for (auto& v : num.c) v /= l;
        for (auto& v : den.c) v /= l;
    }
    bool is_zero() const { return num.is_zero(); }

    friend RatFun operator+(const RatFun& a, const RatFun& b) {
        return RatFun(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend RatFun operator-(const RatFun& a, const RatFun& b) {
        return RatFun(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend RatFun operator*(const RatFun& a, const RatFun& b) {
        return RatFun(a.num * b.num, a.den * b.den);
    }
    friend RatFun operator*(const Rat& s, const RatFun& a) { return RatFun(a.num * s, a.den); }
    RatFun derivative() const {
        return RatFun(num.derivative() * den - num * den.derivative(), den * den);
    }
    std::string str() const {
        return "(" + poly_to_string(num, "z") + ")/(" + poly_to_string(den, "z") + ")";
    }
};

struct SpectrumResult {
    std::vector<Rat> exponents;       // rational exponents with multiplicity, sorted
    std::vector<Cplx> irrational;     // non-rational indicial roots, if any
    bool all_rational() const { return irrational.empty(); }

    bool is_mum() const {
        return all_rational() && exponents.size() == 4 &&
               std::all_of(exponents.begin(), exponents.end(), [](const Rat& r) { return r == 0; });
    }
    bool is_conifold_spectrum() const {
        return all_rational() && exponents.size() == 4 && exponents[0] == 0 &&
               exponents[1] == 1 && exponents[2] == 1 && exponents[3] == 2;
    }
};

namespace opdetail {

template <class Ring>
bool ring_is_zero(const Ring& r) {
    return r == Ring(0);
}
inline bool ring_is_zero(const NF& r) { return r.rep.is_zero(); }

/// Indicial polynomial from operator coefficients already shifted to the
/// local coordinate (point at u = 0): lowest u-order part of
/// sum b_i(u) u^-i theta(theta-1)...(theta-i+1).
template <class Ring>
Poly<Ring> indicial_from_shifted(const std::array<Poly<Ring>, 5>& b) {
    long best = LONG_MAX;
    std::array<long, 5> ord{};
    for (int i = 0; i <= 4; ++i) {
        ord[i] = -1;
        for (size_t j = 0; j < b[i].c.size(); ++j)
            if (!ring_is_zero(b[i].c[j])) {
                ord[i] = static_cast<long>(j);
                break;
            }
        if (ord[i] >= 0) best = std::min(best, ord[i] - i);
    }
    if (best == LONG_MAX) throw std::runtime_error("zero operator");
    Poly<Ring> q;
    for (int i = 0; i <= 4; ++i) {
        if (ord[i] < 0 || ord[i] - i != best) continue;
        QPoly ff = falling_factorial<Rat>(i);
        Poly<Ring> ffr;
        ffr.c.reserve(ff.c.size());
        for (const auto& v : ff.c) ffr.c.push_back(Ring(v));
        ffr.trim();
        q += ffr * b[i].c[static_cast<size_t>(ord[i])];
    }
    return q;
}

inline SpectrumResult spectrum_from_rational_indicial(QPoly q) {
    SpectrumResult out;
    auto roots = extract_rational_roots(q);
    out.exponents = std::move(roots);
    std::sort(out.exponents.begin(), out.exponents.end());
    if (q.degree() >= 1) out.irrational = complex_roots(q);
    return out;
}

}  // namespace opdetail

/// Roots of the indicial polynomial at the given point (with multiplicity);
/// exponents are certified exactly, also over the number field of an
/// algebraic location.  Ordinary points yield {0,1,2,3}.
inline SpectrumResult indicial_spectrum(const DifferentialOperator& op, const SingularPoint& pt) {
    PrecisionScope prec(std::max(current_digits(), 64u));
    if (pt.is_infinity()) {
        // indicial at w=0 of the theta_w-form operator: P_0(lambda)
        DifferentialOperator w = infinity_form(op);
        std::vector<Rat> cs(5, Rat(0));
        for (int i = 0; i <= 4; ++i) cs[i] = w.coeffs[i].coeff(0);
        QPoly p0{std::vector<Rat>(cs)};
        if (p0.degree() < 4)
            throw std::runtime_error("irregular singular point at infinity (indicial degree < 4)");
        return opdetail::spectrum_from_rational_indicial(p0);
    }
    auto adz = dz_coeffs(op);
    if (pt.is_rational()) {
        std::array<QPoly, 5> b;
        for (int i = 0; i <= 4; ++i) b[i] = adz[i].shift(pt.rat());
        QPoly q = opdetail::indicial_from_shifted<Rat>(b);
        if (q.degree() < 4)
            throw std::runtime_error("irregular singular point (indicial degree < 4)");
        return opdetail::spectrum_from_rational_indicial(q);
    }
    // algebraic point: work in Q[alpha]/(minpoly)
    const QPoly& m = pt.minpoly();
    NF alpha(QPoly::x(), &m);
    std::array<Poly<NF>, 5> b;
    for (int i = 0; i <= 4; ++i) {
        Poly<NF> lifted;
        lifted.c.reserve(adz[i].c.size());
        for (const auto& v : adz[i].c) lifted.c.push_back(NF(v));
        lifted.trim();
        b[i] = lifted.shift(alpha);
    }
    Poly<NF> q = opdetail::indicial_from_shifted<NF>(b);
    if (q.degree() < 4)
        throw std::runtime_error("irregular singular point (indicial degree < 4)");
    // numeric roots -> rational candidates -> exact certification in the field
    Cplx av = pt.value();
    SpectrumResult out;
    Poly<NF> rem = q;
    auto numeric_poly = [&av](const Poly<NF>& p) {
        Poly<Cplx> pc;
        pc.c.reserve(p.c.size());
        for (const auto& e : p.c) pc.c.push_back(e.eval(av));
        pc.trim();
        return pc;
    };
    for (int pass = 0; pass < 8 && rem.degree() >= 1; ++pass) {
        std::vector<Cplx> capprox = complex_roots_numeric(numeric_poly(rem));
        bool progressed = false;
        for (const auto& r : capprox) {
            if (abs(r.im) > Real("1e-12")) continue;
            Rat cand;
            try {
                cand = rationalize(r.re, Int(1000000), Real("1e-12"));
            } catch (const std::exception&) {
                continue;
            }
            // exact check and deflation
            while (rem.degree() >= 1) {
                NF val(0);
                for (size_t i = rem.c.size(); i-- > 0;) val = val * NF(cand) + rem.c[i];
                if (!val.rep.is_zero()) break;
                // synthetic division by the monic (lambda - cand)
                std::vector<NF> qq(rem.c.size() - 1, NF(0));
                NF carry = rem.c.back();
                for (size_t i = rem.c.size() - 1; i-- > 0;) {
                    qq[i] = carry;
                    carry = rem.c[i] + carry * NF(cand);
                }
                rem = Poly<NF>(std::move(qq));
                out.exponents.push_back(cand);
                progressed = true;
            }
        }
        if (!progressed) break;
    }
    if (rem.degree() >= 1) out.irrational = complex_roots_numeric(numeric_poly(rem));
    std::sort(out.exponents.begin(), out.exponents.end());
    return out;
}

/// Sort key for the generator ordering: (Re, Im) lexicographic, matching the
/// published monodromy products.
inline bool point_order_less(const Cplx& a, const Cplx& b) {
    if (a.re < b.re) return true;
    if (a.re > b.re) return false;
    return a.im < b.im;
}

/// All finite singular points (roots of the leading d/dz coefficient),
/// sorted by (Re, Im), followed by the point at infinity.
inline std::vector<SingularPoint> singular_points(const DifferentialOperator& op) {
    PrecisionScope prec(std::max(current_digits(), 64u));
    QPoly a4 = dz_coeffs(op)[4];
    std::vector<SingularPoint> pts;
    size_t zp = 0;
    while (zp < a4.c.size() && a4.c[zp] == 0) ++zp;
    if (zp > 0) pts.push_back(SingularPoint::rational(Rat(0)));
    QPoly rest(std::vector<Rat>(a4.c.begin() + zp, a4.c.end()));
    for (const auto& f : factor_rational(rest)) {
        if (f.factor.degree() == 1) {
            Rat root = -f.factor.coeff(0) / f.factor.coeff(1);
            if (root == 0) continue;  // already counted
            pts.push_back(SingularPoint::rational(root));
        } else {
            for (const auto& r : complex_roots(f.factor))
                pts.push_back(SingularPoint::algebraic(f.factor, r));
        }
    }
    std::vector<std::pair<Cplx, SingularPoint>> keyed;
    for (auto& p : pts) keyed.emplace_back(p.value(), p);
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return point_order_less(a.first, b.first); });
    std::vector<SingularPoint> out;
    for (auto& [k, p] : keyed) out.push_back(p);
    out.push_back(SingularPoint::infinity());
    return out;
}

struct SchemePoint {
    SingularPoint location;
    SpectrumResult spectrum;
    bool apparent = false;  // decided downstream from the computed monodromy
};

struct RiemannScheme {
    std::vector<SchemePoint> points;  // finite points sorted, infinity last

    const SchemePoint* at_location(const SingularPoint& p) const {
        for (const auto& sp : points)
            if (sp.location.same_location(p)) return &sp;
        return nullptr;
    }
};

inline RiemannScheme riemann_scheme(const DifferentialOperator& op) {
    RiemannScheme rs;
    for (const auto& p : singular_points(op)) rs.points.push_back({p, indicial_spectrum(op, p), false});
    return rs;
}

struct DiscFactor {
    QPoly delta;                        // irreducible over Q, primitive
    int multiplicity = 1;
    std::vector<SingularPoint> roots;   // the singular points this factor vanishes at
};

struct DiscriminantFactorization {
    std::vector<DiscFactor> factors;
    int z_power = 0;
};

/// a4(z) = z^z_power * prod delta_i^{k_i} up to a rational constant.
inline DiscriminantFactorization discriminant_factorization(const DifferentialOperator& op) {
    PrecisionScope prec(std::max(current_digits(), 64u));
    QPoly a4 = dz_coeffs(op)[4];
    DiscriminantFactorization out;
    size_t zp = 0;
    while (zp < a4.c.size() && a4.c[zp] == 0) ++zp;
    out.z_power = static_cast<int>(zp);
    QPoly rest(std::vector<Rat>(a4.c.begin() + zp, a4.c.end()));
    if (rest.degree() < 1) return out;
    for (const auto& f : factor_rational(rest)) {
        DiscFactor df;
        df.delta = f.factor;
        df.multiplicity = f.multiplicity;
        if (f.factor.degree() == 1) {
            Rat root = -f.factor.coeff(0) / f.factor.coeff(1);
            df.roots.push_back(SingularPoint::rational(root));
        } else {
            for (const auto& r : complex_roots(f.factor))
                df.roots.push_back(SingularPoint::algebraic(f.factor, r));
        }
        out.factors.push_back(std::move(df));
    }
    return out;
}

struct CyCheck {
    bool holds = false;
    RatFun residual;
};

/// The fourth-order Calabi-Yau coefficient identity, in monic d/dz
/// normalization: a1 = a2 a3 / 2 - a3^3 / 8 + a2' - 3/4 a3 a3' - a3''/2.
inline CyCheck check_cy_condition(const DifferentialOperator& op) {
    auto a = dz_coeffs(op);
    RatFun a1(a[1], a[4]), a2(a[2], a[4]), a3(a[3], a[4]);
    RatFun a3p = a3.derivative();
    RatFun rhs = Rat(1, 2) * (a2 * a3) - Rat(1, 8) * (a3 * a3 * a3) + a2.derivative() -
                 Rat(3, 4) * (a3 * a3p) - Rat(1, 2) * a3p.derivative();
    CyCheck out;
    out.residual = a1 - rhs;
    out.holds = out.residual.is_zero();
    return out;
}

}  // namespace cymono
