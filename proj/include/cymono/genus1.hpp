#pragma once

#include "cymono/genus0.hpp"
#include "cymono/lattice.hpp"

namespace cymono {

struct Genus1Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Discriminant-factor exponents for the genus-1 ansatz f(z) = prod
/// Delta_i^{s_i}: s_i = -lambda_i/6 at an S_{lambda,v} point, 0 at a point
/// with trivial monodromy.  Points of any other kind have no sensible guess
/// and abort the genus-1 computation.
struct ExponentAssignment {
    std::vector<Rat> s;  // aligned with the discriminant factors
};

inline ExponentAssignment assign_exponents(const DiscriminantFactorization& disc,
                                           const std::vector<SingularPoint>& points,
                                           const std::vector<PLEntry>& classification) {
    ExponentAssignment out;
    for (const auto& factor : disc.factors) {
        bool have = false;
        Rat s;
        for (const auto& root : factor.roots) {
            size_t idx = points.size();
            for (size_t i = 0; i < points.size(); ++i)
                if (points[i].same_location(root)) idx = i;
            if (idx == points.size())
                throw Genus1Error("discriminant factor root is not a known singular point");
            const PLEntry& pl = classification[idx];
            Rat here;
            switch (pl.kind) {
                case PLEntry::Kind::identity: here = 0; break;
                case PLEntry::Kind::conifold_like: here = Rat(-pl.lambda, 6); break;
                default:
                    throw Genus1Error("no exponent rule for the monodromy at " + root.str() +
                                      " (kind " + pl.kind_name() + ")");
            }
            if (have && here != s)
                throw Genus1Error("inconsistent factor: roots of one irreducible factor have "
                                  "different monodromy types");
            s = here;
            have = true;
        }
        if (!have) throw Genus1Error("discriminant factor with no roots");
        out.s.push_back(s);
    }
    return out;
}

struct Genus1Result {
    std::map<long, Int> genus1;
    Int c3 = 0;
    bool c3_solved_here = false;  // true when c3 came from n1_1 = 0
    std::vector<long> nonintegral;
};

/// Genus-1 instanton numbers from the holomorphic-anomaly ansatz.  The
/// computed relation (fixed against the published tables) is
///   d/dt log[ z^{(1+c2H/12)/2} prod Delta_i^{-s_i/2} y_0^{(4-c3/12)/2}
///             (dt/dz)^{1/2} ]
///     = c2H/24 - sum_d sum_k (n0_d/12 + n1_d) d q^{kd},
/// with s_i from assign_exponents.  When c3 is unknown it is solved from
/// n1_1 = 0; non-integral n1_d are rounded and flagged.
inline Genus1Result genus1_instantons(const DifferentialOperator& op, const FrobeniusBasis& fb,
                                      const MirrorMap& mm, const DiscriminantFactorization& disc,
                                      const ExponentAssignment& exponents, const Int& c2h,
                                      std::optional<Int> c3, const std::map<long, Int>& genus0,
                                      long order) {
    size_t n = fb.order;
    QSeries g = mm.g;
    QSeries t_factor = g.theta();
    t_factor.c[0] += 1;  // T = z dt/dz
    QSeries one(n);
    one.c[0] = 1;
    QSeries zg2(n);
    {
        QSeries gdd = g.derivative().derivative();
        for (size_t i = 0; i + 2 < n; ++i) zg2.c[i + 2] = gdd.c[i];
    }
    QSeries e_term = to_q_series(one / t_factor, mm);
    QSeries b_term = to_q_series((fb.f[0].theta() / fb.f[0]) / t_factor, mm);
    QSeries c_term = to_q_series((zg2 - one) / (t_factor * t_factor), mm);
    QSeries a_term(n);
    for (size_t i = 0; i < disc.factors.size(); ++i) {
        QSeries sp = series_of_poly<Rat>(disc.factors[i].delta, n);
        // bracket exponent is -s_i/2 = lambda_i/12
        a_term += to_q_series((sp.theta() / sp) / t_factor, mm) * (exponents.s[i] * Rat(-1, 2));
    }
    Rat ez = (Rat(1) + Rat(c2h, Int(12))) / 2;
    QSeries base = e_term * ez + a_term + b_term * Rat(2) + c_term * Rat(1, 2);
    QSeries c3_part = b_term * Rat(-1, 24);

    Genus1Result out;
    Rat c3_rat;
    if (c3) {
        c3_rat = Rat(*c3);
        out.c3 = *c3;
    } else {
        // n1_1 = 0: -(base_1 + c3 c3part_1) = n0_1/12
        Rat n0_1 = genus0.count(1) ? Rat(genus0.at(1)) : Rat(0);
        if (c3_part.c[1] == 0) throw Genus1Error("cannot solve c3: degenerate coefficient");
        c3_rat = (-n0_1 / 12 - base.c[1]) / c3_part.c[1];
        if (denominator(c3_rat) != 1)
            throw Genus1Error("c3 solved from n1_1 = 0 is not an integer: " + rat_to_string(c3_rat));
        out.c3 = numerator(c3_rat);
        out.c3_solved_here = true;
    }
    QSeries series = base + c3_part * c3_rat;
    if (series.c[0] != Rat(c2h, Int(24)))
        throw Genus1Error("genus-1 series has the wrong constant term");
    std::map<long, Rat> n1;
    for (long m = 1; m <= order && m + 1 < static_cast<long>(n); ++m) {
        Rat acc = -series.c[static_cast<size_t>(m)];
        for (long d = 1; d <= m; ++d) {
            if (m % d) continue;
            Rat n0 = genus0.count(d) ? Rat(genus0.at(d)) : Rat(0);
            acc -= Rat(d) * n0 / 12;
            if (d < m) acc -= Rat(d) * n1[d];
        }
        n1[m] = acc / m;
        if (denominator(n1[m]) == 1) {
            out.genus1[m] = numerator(n1[m]);
        } else {
            out.genus1[m] = round_to_int(to_real(n1[m]));
            out.nonintegral.push_back(m);
        }
    }
    return out;
}

}  // namespace cymono
