#pragma once

#include <memory>
#include <vector>

#include "cymono/operator.hpp"
#include "cymono/qpoly.hpp"

namespace cymono {

/// Element of Q[x]/(m) with lazily attached modulus context; elements built
/// from plain integers carry no context until combined with one that does.
struct NF {
    QPoly rep;
    const QPoly* modulus = nullptr;

    NF() = default;
    NF(int v) : rep(QPoly::constant(Rat(v))) {}
    NF(const Rat& v) : rep(QPoly::constant(v)) {}
    NF(QPoly r, const QPoly* m) : rep(std::move(r)), modulus(m) { reduce(); }

    void adopt(const NF& o) {
        if (!modulus) modulus = o.modulus;
    }
    void reduce() {
        if (modulus && rep.degree() >= modulus->degree()) rep = divrem(rep, *modulus).second;
    }
    bool operator==(const NF& o) const { return rep == o.rep; }
    bool operator==(int v) const { return rep == QPoly::constant(Rat(v)); }

    NF& operator+=(const NF& o) {
        adopt(o);
        rep += o.rep;
        return *this;
    }
    NF& operator-=(const NF& o) {
        adopt(o);
        rep -= o.rep;
        return *this;
    }
    NF& operator*=(const NF& o) {
        adopt(o);
        rep *= o.rep;
        reduce();
        return *this;
    }
    NF operator-() const {
        NF r = *this;
        r.rep = -r.rep;
        return r;
    }
    friend NF operator+(NF a, const NF& b) { return a += b; }
    friend NF operator-(NF a, const NF& b) { return a -= b; }
    friend NF operator*(NF a, const NF& b) { return a *= b; }

    Cplx eval(const Cplx& alpha) const { return rep.eval<Cplx>(alpha); }
};

inline Poly<Cplx> to_cplx_poly(const QPoly& p) {
    std::vector<Cplx> c;
    c.reserve(p.c.size());
    for (const auto& q : p.c) c.push_back(to_cplx(q));
    return Poly<Cplx>(std::move(c));
}

/// Durand-Kerner on a monic-normalizable numeric polynomial with simple
/// roots.  Returns all complex roots at roughly working precision.
inline std::vector<Cplx> complex_roots_numeric(Poly<Cplx> p) {
    int n = p.degree();
    if (n <= 0) return {};
    Cplx lead = p.c.back();
    for (auto& c : p.c) c /= lead;
    // Cauchy root bound
    Real bound(1);
    for (int i = 0; i < n; ++i) bound = std::max(bound, Real(1) + abs(p.c[i]));
    std::vector<Cplx> x(n);
    Cplx seed(Real("0.4"), Real("0.9"));
    Cplx acc(Real(1));
    for (int i = 0; i < n; ++i) {
        acc *= seed;
        x[i] = bound * acc;
    }
    Real tol = pow10(-static_cast<long>(current_digits()) + 4);
    for (int it = 0; it < 2000; ++it) {
        Real worst(0);
        for (int i = 0; i < n; ++i) {
            Cplx num = p.eval(x[i]);
            Cplx den(Real(1));
            for (int j = 0; j < n; ++j)
                if (j != i) den *= (x[i] - x[j]);
            Cplx delta = num / den;
            x[i] -= delta;
            worst = std::max(worst, abs(delta));
        }
        if (worst < tol) break;
    }
    return x;
}

/// Roots of a rational polynomial (made squarefree first, so each distinct
/// root appears once); conjugate pairs are symmetrized exactly.
inline std::vector<Cplx> complex_roots(const QPoly& poly) {
    QPoly sf = poly;
    QPoly g = poly_gcd(sf, sf.derivative());
    if (g.degree() >= 1) sf = divrem(sf, g).first;
    if (sf.degree() <= 0) return {};
    std::vector<Cplx> x = complex_roots_numeric(to_cplx_poly(sf));
    Real tol = pow10(-static_cast<long>(current_digits()) / 2);
    for (size_t i = 0; i < x.size(); ++i) {
        if (abs(x[i].im) < tol * std::max(Real(1), abs(x[i].re))) {
            x[i].im = 0;
            continue;
        }
        for (size_t j = i + 1; j < x.size(); ++j) {
            if (abs(x[j] - conj(x[i])) < tol) {
                Real re = (x[i].re + x[j].re) / 2;
                Real im = (x[i].im - x[j].im) / 2;
                x[i] = Cplx(re, im);
                x[j] = conj(x[i]);
            }
        }
    }
    return x;
}

/// Exact location on P^1: rational, algebraic (minimal polynomial plus an
/// isolating approximation), or the point at infinity.
class SingularPoint {
public:
    static SingularPoint infinity() {
        SingularPoint p;
        p.at_infinity_ = true;
        return p;
    }
    static SingularPoint rational(Rat v) {
        SingularPoint p;
        p.rational_ = true;
        p.rat_ = std::move(v);
        return p;
    }
    static SingularPoint algebraic(QPoly minpoly, const Cplx& approx) {
        SingularPoint p;
        p.minpoly_ = std::make_shared<QPoly>(primitive_part(minpoly));
        p.approx_ = approx;
        return p;
    }

    bool is_infinity() const { return at_infinity_; }
    bool is_rational() const { return rational_; }
    const Rat& rat() const { return rat_; }
    const QPoly& minpoly() const { return *minpoly_; }
    bool is_algebraic() const { return static_cast<bool>(minpoly_); }

    /// Numeric value at the current working precision (Newton refinement).
    Cplx value() const {
        if (at_infinity_) throw std::runtime_error("value() at infinity");
        if (rational_) return to_cplx(rat_);
        Poly<Cplx> p = to_cplx_poly(*minpoly_);
        Poly<Cplx> dp = p.derivative();
        Cplx x = approx_;
        for (int it = 0; it < 64; ++it) {
            Cplx step = p.eval(x) / dp.eval(x);
            x -= step;
            if (abs(step) < pow10(-static_cast<long>(current_digits()) + 2)) break;
        }
        return x;
    }

    bool same_location(const SingularPoint& o) const {
        if (at_infinity_ || o.at_infinity_) return at_infinity_ == o.at_infinity_;
        if (rational_ && o.rational_) return rat_ == o.rat_;
        if (rational_ != o.rational_) return false;
        if (!(*minpoly_ == *o.minpoly_)) return false;
        return abs(approx_ - o.approx_) < Real("1e-10");
    }

    std::string str() const {
        if (at_infinity_) return "inf";
        if (rational_) return rat_to_string(rat_);
        std::ostringstream os;
        os << "root(" << poly_to_string(*minpoly_, "z") << ") near "
           << approx_.re.str(8) << (approx_.im >= 0 ? "+" : "") << approx_.im.str(8) << "i";
        return os.str();
    }

private:
    bool at_infinity_ = false;
    bool rational_ = false;
    Rat rat_;
    std::shared_ptr<QPoly> minpoly_;
    Cplx approx_;
};

}  // namespace cymono
