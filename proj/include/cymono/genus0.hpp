#pragma once

#include <map>
#include <optional>

#include "cymono/frobenius.hpp"

namespace cymono {

/// Genus 0 and genus 1 instanton numbers with the invariants they carry.
struct InstantonTable {
    std::map<long, Int> genus0;
    std::map<long, Int> genus1;
    Int n00 = 0;                       // = H^3
    std::optional<Int> c3;
    std::vector<long> genus0_nonintegral;
    std::vector<long> genus1_nonintegral;
};

namespace g0detail {

/// Laurent decomposition p = z^ord * unit(z) of a polynomial.
inline std::pair<size_t, QSeries> poly_unit(const QPoly& p, size_t n) {
    size_t ord = 0;
    while (ord < p.c.size() && p.c[ord] == 0) ++ord;
    QSeries s(n);
    for (size_t i = 0; i < n && ord + i < p.c.size(); ++i) s.c[i] = p.c[ord + i];
    return {ord, s};
}

}  // namespace g0detail

/// The third derivative of the genus-0 prepotential as a q-series, with the
/// constant term normalized to h3 = H^3.  Computed two ways and required to
/// agree exactly: (i) from the Yukawa coupling exp(-1/2 int a3 dz)
/// transformed to the t coordinate, (ii) as d^2/dt^2 (y_2/y_0).  Route (ii)
/// is returned.
inline QSeries d3F0(const DifferentialOperator& op, const FrobeniusBasis& fb,
                    const MirrorMap& mm, const Int& h3) {
    size_t n = fb.order;
    QSeries g = mm.g;
    QSeries y = fb.f[2] / fb.f[0] - g * g * Rat(1, 2);  // y2/y0 - t^2/2
    QSeries yq = to_q_series(y, mm);
    QSeries route2 = yq.theta().theta();
    route2.c[0] += 1;

    // route (i): K_zzz = exp(-1/2 int a3/a4 dz) = z^-3 * K~(z) at a MUM point
    auto adz = dz_coeffs(op);
    auto [o3, s3] = g0detail::poly_unit(adz[3], n);
    auto [o4, s4] = g0detail::poly_unit(adz[4], n);
    if (o4 != o3 + 1)
        throw std::runtime_error("d3F0: unexpected pole structure of a3/a4 at z=0");
    QSeries u = s3 / s4;  // a3/a4 = u(z)/z
    if (u.c[0] != 6)
        throw std::runtime_error("d3F0: residue of a3/a4 at 0 is not 6 (not MUM-normalized)");
    QSeries v(n);  // -1/2 (u - 6)/z
    for (size_t i = 0; i + 1 < n; ++i) v.c[i] = u.c[i + 1] * Rat(-1, 2);
    QSeries ktilde = v.integral().exp();
    QSeries tfac = Rat(1) * g.theta();  // z g'
    tfac.c[0] += 1;                     // T = z t'(z)
    QSeries route1 = ktilde / (fb.f[0] * fb.f[0] * tfac * tfac * tfac);
    QSeries route1q = to_q_series(route1, mm);
    // routes agree up to the integration-constant scale, which must be rational
    Rat kappa = route1q.c[0];
    if (kappa == 0) throw std::runtime_error("d3F0: vanishing Yukawa normalization");
    for (size_t i = 0; i < n; ++i)
        if (route1q.c[i] != kappa * route2.c[i])
            throw std::runtime_error("d3F0: Yukawa routes disagree at order " + std::to_string(i) +
                                     " (operator not of Calabi-Yau type?)");
    return route2 * Rat(h3);
}

/// Invert d^3F0 = n0 + sum_l n_l l^3 q^l / (1 - q^l): coefficient of q^m is
/// sum_{d | m} n_d d^3.
inline void genus0_instantons(const QSeries& series, long D, InstantonTable& table) {
    std::map<long, Rat> n;
    Rat c0 = series.coeff(0);
    table.n00 = numerator(c0);
    if (denominator(c0) != 1) table.genus0_nonintegral.push_back(0);
    for (long m = 1; m <= D && m < static_cast<long>(series.len()); ++m) {
        Rat acc = series.coeff(static_cast<size_t>(m));
        for (long d = 1; d < m; ++d)
            if (m % d == 0) acc -= n[d] * d * d * d;
        n[m] = acc / (Rat(m) * m * m);
        if (denominator(n[m]) == 1) {
            table.genus0[m] = numerator(n[m]);
        } else {
            table.genus0[m] = round_to_int(to_real(n[m]));
            table.genus0_nonintegral.push_back(m);
        }
    }
}

/// Rebuild the Lambert series from an integer table (oracle direction).
inline QSeries lambert_series(const Int& n00, const std::map<long, Int>& n, size_t len) {
    QSeries s(len);
    s.c[0] = Rat(n00);
    for (const auto& [d, nd] : n) {
        if (d <= 0) continue;
        for (long m = d; m < static_cast<long>(len); m += d)
            s.c[static_cast<size_t>(m)] += Rat(nd) * d * d * d;
    }
    return s;
}

}  // namespace cymono
