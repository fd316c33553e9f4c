#pragma once

#include <optional>

#include "cymono/clinalg.hpp"
#include "cymono/frobenius.hpp"
#include "cymono/opcore.hpp"

namespace cymono {

/// Piecewise-linear path; for loops the first and last vertex equal the
/// basepoint and the final circuit encircles exactly the target point.
struct Path {
    std::vector<Cplx> vertices;
    Cplx basepoint;
    std::optional<size_t> encircled;  // index into the finite singular list
};

struct LoopSystem {
    Cplx basepoint;
    std::vector<Cplx> values;             // finite singular values, (Re,Im)-sorted
    std::vector<Path> loops;              // loops[i] encircles values[i]
    std::vector<size_t> composition_order;  // point indices, first-applied first
    Real margin;
};

namespace geo {

inline Real dist_point_segment(const Cplx& p, const Cplx& a, const Cplx& b, Real* tbest = nullptr) {
    Cplx d = b - a;
    Real dd = norm(d);
    if (dd == 0) {
        if (tbest) *tbest = Real(0);
        return abs(p - a);
    }
    Real t = ((p.re - a.re) * d.re + (p.im - a.im) * d.im) / dd;
    if (t < 0) t = Real(0);
    if (t > 1) t = Real(1);
    if (tbest) *tbest = t;
    Cplx f = a + t * d;
    return abs(p - f);
}

/// Winding number of a closed polygon about p (sum of turn angles / 2 pi).
inline long winding_number(const std::vector<Cplx>& poly, const Cplx& p) {
    Real total(0);
    for (size_t i = 0; i + 1 < poly.size(); ++i) {
        Cplx u = poly[i] - p, v = poly[i + 1] - p;
        // angle of v relative to u
        Cplx r = v / u;
        total += atan2(r.im, r.re);
    }
    Real two_pi = 2 * const_pi();
    return static_cast<long>(round_to_int(total / two_pi));
}

}  // namespace geo

struct LoopOptions {
    double basepoint_fraction = 0.9;
    double basepoint_angle = -0.1;  // radians, off the real axis
    double circle_fraction = 0.35;  // of the distance to the nearest other point
};

namespace loopdetail {

/// Straight segment from..to, detouring around singular circles it clips.
/// Detours stay on the side the segment already passes, so the homotopy
/// class of the straight chord is preserved.
inline void route(std::vector<Cplx>& out, const Cplx& from, const Cplx& to,
                  const std::vector<Cplx>& values, const std::vector<Real>& clearance,
                  size_t skip, int depth) {
    if (depth > 12) throw std::runtime_error("build_loops: routing recursion too deep");
    size_t hit = values.size();
    Real hit_t;
    for (size_t j = 0; j < values.size(); ++j) {
        if (j == skip) continue;
        Real t;
        Real d = geo::dist_point_segment(values[j], from, to, &t);
        if (d < clearance[j] && t > 0 && t < 1) {
            if (hit == values.size() || t < hit_t) {
                hit = j;
                hit_t = t;
            }
        }
    }
    if (hit == values.size()) {
        out.push_back(to);
        return;
    }
    Cplx d = to - from;
    Cplx foot = from + hit_t * d;
    Cplx off = foot - values[hit];
    Real offlen = abs(off);
    Cplx dir;
    if (offlen > clearance[hit] / 1000) {
        dir = off / offlen;
    } else {
        // nearly collinear: pass on the right of the direction of travel
        Cplx u = d / abs(d);
        dir = Cplx(u.im, -u.re);
    }
    Cplx detour = values[hit] + (clearance[hit] * Real(13) / 10) * dir;
    route(out, from, detour, values, clearance, skip, depth + 1);
    route(out, detour, to, values, clearance, skip, depth + 1);
}

}  // namespace loopdetail

/// One piecewise-linear loop per finite singular point, all based at the
/// point 0.9 |z_min| e^{-0.1 i} on the rotated ray toward the nearest
/// nonzero singular point.  Loops are straight spokes (with clearance
/// detours) plus a counterclockwise octagon; the composition order realizing
/// (M_l ... M_1) M_inf = Id is the spoke fan order, later normalized to the
/// (Re, Im) order of the points.
inline LoopSystem build_loops(const std::vector<Cplx>& sorted_values, const LoopOptions& opt = {}) {
    if (sorted_values.empty()) throw std::runtime_error("build_loops: no finite singular points");
    LoopSystem sys;
    sys.values = sorted_values;
    size_t n = sorted_values.size();
    // basepoint
    Real best_abs(0);
    Cplx zmin;
    bool found = false;
    for (const auto& z : sorted_values) {
        Real m = abs(z);
        if (m == 0) continue;
        if (!found || m < best_abs) {
            best_abs = m;
            zmin = z;
            found = true;
        }
    }
    if (!found) {
        zmin = Cplx(Real(1));  // only z=0 is singular; any unit basepoint direction works
        best_abs = Real(1);
    }
    Real ang(opt.basepoint_angle);
    Cplx rot(cos(ang), sin(ang));
    Cplx b = Real(opt.basepoint_fraction) * zmin * rot;
    sys.basepoint = b;

    // circle radii and clearances
    std::vector<Real> radius(n), clearance(n);
    Real margin(-1);
    for (size_t i = 0; i < n; ++i) {
        Real mind(-1);
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            Real d = abs(sorted_values[i] - sorted_values[j]);
            if (mind < 0 || d < mind) mind = d;
        }
        Real to_b = abs(sorted_values[i] - b);
        Real r = mind < 0 ? to_b / 2 : Real(opt.circle_fraction) * mind;
        if (r > to_b * 6 / 10) r = to_b * 6 / 10;
        radius[i] = r;
        clearance[i] = r / 2;
        if (margin < 0 || clearance[i] < margin) margin = clearance[i];
    }
    sys.margin = margin;

    // spokes + octagons
    for (size_t i = 0; i < n; ++i) {
        const Cplx& z = sorted_values[i];
        Cplx toward_b = b - z;
        Cplx entry = z + radius[i] * (toward_b / abs(toward_b));
        std::vector<Cplx> approach;
        approach.push_back(b);
        loopdetail::route(approach, b, entry, sorted_values, clearance, i, 0);
        Path loop;
        loop.basepoint = b;
        loop.encircled = i;
        loop.vertices = approach;
        // counterclockwise octagon
        Cplx offset = entry - z;
        Real pi = const_pi();
        Cplx turn(cos(pi / 4), sin(pi / 4));
        for (int k = 1; k <= 8; ++k) {
            offset *= turn;
            loop.vertices.push_back(z + offset);
        }
        for (size_t k = approach.size(); k-- > 0;)
            if (k + 1 < approach.size() || approach.size() == 1) loop.vertices.push_back(approach[k]);
        // certify winding numbers
        for (size_t j = 0; j < n; ++j) {
            long w = geo::winding_number(loop.vertices, sorted_values[j]);
            long expect = (j == i) ? 1 : 0;
            if (w != expect)
                throw std::runtime_error("build_loops: winding certification failed for loop " +
                                         std::to_string(i) + " about point " + std::to_string(j));
        }
        sys.loops.push_back(std::move(loop));
    }

    // fan (composition) order: spoke angles, cut placed in the largest gap,
    // then descending angle
    std::vector<std::pair<Real, size_t>> spokes;
    Real two_pi = 2 * const_pi();
    for (size_t i = 0; i < n; ++i) spokes.emplace_back(arg(sorted_values[i] - b), i);
    std::sort(spokes.begin(), spokes.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    Real best_gap(-1);
    size_t gap_at = 0;
    for (size_t k = 0; k < n; ++k) {
        Real next = (k + 1 < n) ? spokes[k + 1].first : spokes[0].first + two_pi;
        Real gap = next - spokes[k].first;
        if (gap > best_gap) {
            best_gap = gap;
            gap_at = k;
        }
    }
    // ascending angle starting just after the gap; the composite in this
    // order equals the big counterclockwise circle around all finite points
    std::vector<size_t> order;
    for (size_t k = 0; k < n; ++k) order.push_back(spokes[(gap_at + 1 + k) % n].second);
    sys.composition_order = order;
    return sys;
}

struct PathTooClose : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace stepdetail {

inline std::array<Poly<Cplx>, 5> to_cplx_coeffs(const std::array<QPoly, 5>& a) {
    std::array<Poly<Cplx>, 5> out;
    for (int i = 0; i <= 4; ++i) out[i] = to_cplx_poly(a[i]);
    return out;
}

/// Transfer matrix of one Taylor step of size h from the expansion point of
/// the shifted coefficients b_i(u) = a_i(p + u); maps (y,y',y'',y''') at p
/// to p + h.  The expansion point must be ordinary: b_4(0) != 0.
inline CMat taylor_step(const std::array<Poly<Cplx>, 5>& b, const Cplx& h, unsigned digits,
                        size_t max_terms) {
    using Vec4 = std::array<Cplx, 4>;
    const Cplx& lead = b[4].c.empty() ? Cplx(0) : b[4].c[0];
    if (lead == Cplx(0)) throw PathTooClose("taylor step at singular point");
    Real eps = pow10(-static_cast<long>(digits) - 8);
    std::vector<Vec4> c;
    c.reserve(256);
    for (int j = 0; j < 4; ++j) {
        Vec4 v{Cplx(0), Cplx(0), Cplx(0), Cplx(0)};
        // initial data y^(j)(0) = delta: series coefficient = 1/j!
        Real fact(1);
        for (int t = 2; t <= j; ++t) fact *= t;
        v[static_cast<size_t>(j)] = Cplx(Real(1) / fact);
        c.push_back(v);
    }
    CMat out(4);
    std::array<std::array<Cplx, 4>, 4> acc{};  // acc[d][sol]
    std::array<Real, 4> rowscale{Real(0), Real(0), Real(0), Real(0)};
    Real habs = abs(h);
    // h^(n-d) maintained per derivative order
    std::array<Cplx, 4> hpow{Cplx(Real(1)), Cplx(Real(1)), Cplx(Real(1)), Cplx(Real(1))};
    // falling factorials ff[d] = n(n-1)...(n-d+1) updated per n
    size_t quiet = 0;
    size_t n = 0;
    while (true) {
        if (n >= c.size()) {
            // recursion for c[n]: sum_{i,j} b_{i,j} FF(m-j+i, i) c_{m-j+i} = 0 with m = n-4
            long m = static_cast<long>(n) - 4;
            Vec4 acc_new{Cplx(0), Cplx(0), Cplx(0), Cplx(0)};
            for (int i = 0; i <= 4; ++i) {
                for (size_t j = 0; j < b[i].c.size(); ++j) {
                    if (b[i].c[j] == Cplx(0)) continue;
                    long idx = m - static_cast<long>(j) + i;
                    if (idx < 0 || idx >= static_cast<long>(n)) continue;  // skip unknown (i=4,j=0)
                    Real ff(1);
                    for (int t = 0; t < i; ++t) ff *= Real(idx - t);
                    if (i > 0 && ff == 0) continue;
                    Cplx w = b[i].c[j] * ff;
                    for (int s = 0; s < 4; ++s) acc_new[s] += w * c[static_cast<size_t>(idx)][s];
                }
            }
            Real ff4(1);
            for (int t = 0; t < 4; ++t) ff4 *= Real(static_cast<long>(n) - t);
            Cplx div = lead * ff4;
            Vec4 cn;
            for (int s = 0; s < 4; ++s) cn[s] = -(acc_new[s] / div);
            c.push_back(cn);
        }
        // accumulate value and derivative rows at h
        Real contrib(0);
        for (int d = 0; d < 4; ++d) {
            if (static_cast<long>(n) - d < 0) continue;
            Real ff(1);
            for (int t = 0; t < d; ++t) ff *= Real(static_cast<long>(n) - t);
            if (d > 0 && ff == 0) {
                continue;
            }
            for (int s = 0; s < 4; ++s) {
                Cplx term = c[n][s] * ff * hpow[d];
                acc[d][s] += term;
                Real m = abs(term);
                if (m > rowscale[d]) rowscale[d] = m;
                Real rel = rowscale[d] > 0 ? m / rowscale[d] : Real(0);
                if (rel > contrib) contrib = rel;
            }
        }
        for (int d = 0; d < 4; ++d)
            if (static_cast<long>(n) - d >= 0) hpow[d] *= h;
        if (n >= 24 && contrib < eps) {
            if (++quiet >= 8) break;
        } else {
            quiet = 0;
        }
        ++n;
        if (n > max_terms)
            throw PathTooClose("taylor step did not converge (path too close to a singularity)");
    }
    for (int d = 0; d < 4; ++d)
        for (int s = 0; s < 4; ++s) out(static_cast<size_t>(d), static_cast<size_t>(s)) = acc[d][s];
    (void)habs;
    return out;
}

}  // namespace stepdetail

/// Analytic continuation of the solution 4-vector (y, y', y'', y''') along a
/// piecewise-linear path by power-series stepping; step length is bounded by
/// safety x (distance to the nearest singular point).
inline CMat transfer_along(const std::array<QPoly, 5>& adz, const std::vector<Cplx>& vertices,
                           const std::vector<Cplx>& singular_values, unsigned digits,
                           double safety = 0.5) {
    auto bc = stepdetail::to_cplx_coeffs(adz);
    CMat total = CMat::identity(4);
    if (vertices.size() < 2) return total;
    Real saf(safety);
    size_t max_terms = 60 * (digits + 16);
    for (size_t seg = 0; seg + 1 < vertices.size(); ++seg) {
        Cplx p = vertices[seg];
        const Cplx& target = vertices[seg + 1];
        int steps_here = 0;
        while (true) {
            Cplx rem = target - p;
            Real remlen = abs(rem);
            if (remlen == 0) break;
            Real mind(-1);
            for (const auto& s : singular_values) {
                Real d = abs(p - s);
                if (mind < 0 || d < mind) mind = d;
            }
            if (mind <= 0)
                throw PathTooClose("segment " + std::to_string(seg) + " passes through a singular point");
            Real hlen = saf * mind;
            Cplx h = (hlen >= remlen) ? rem : (rem / remlen) * hlen;
            std::array<Poly<Cplx>, 5> shifted;
            for (int i = 0; i <= 4; ++i) shifted[i] = bc[i].shift(p);
            CMat step = stepdetail::taylor_step(shifted, h, digits, max_terms);
            total = step * total;
            p += h;
            if (++steps_here > 4000)
                throw PathTooClose("segment " + std::to_string(seg) + " requires too many steps");
        }
    }
    return total;
}

/// Transfer matrix along a path, in the (y, y', y'', y''') basis.
inline CMat transfer_matrix(const DifferentialOperator& op, const Path& path, unsigned digits,
                            double safety = 0.5) {
    PrecisionScope prec(digits + 15);
    auto adz = dz_coeffs(op);
    std::vector<Cplx> sv;
    for (const auto& p : singular_points(op))
        if (!p.is_infinity()) sv.push_back(p.value());
    return transfer_along(adz, path.vertices, sv, digits, safety);
}

struct MonodromyOptions {
    unsigned digits = 100;
    double basepoint_fraction = 0.9;
    double basepoint_angle = -0.1;
    double safety = 0.5;
    bool estimate_precision = true;
};

/// Monodromy representation: one matrix per finite singular point, expressed
/// in the Frobenius basis y_0..y_3 at 0, ordered and normalized so that
/// (M_l ... M_1) M_inf = Id with points sorted by (Re, Im).
struct MonodromyRep {
    std::vector<SingularPoint> points;  // finite, sorted (Re, Im)
    std::vector<Cplx> values;
    Cplx basepoint;
    std::vector<Path> loops;
    std::vector<CMat> matrices;
    CMat m_infinity;
    unsigned digits = 0;
    double precision_estimate = 0;  // agreement (decimal digits) with a digits/2 rerun
};

namespace monodetail {

inline size_t frobenius_terms_needed(double ratio, unsigned digits) {
    double need = (static_cast<double>(digits) + 12.0) * 2.302585 / -std::log(ratio);
    return static_cast<size_t>(need) + 48;
}

inline MonodromyRep monodromy_rep_once(const DifferentialOperator& op,
                                       const std::vector<SingularPoint>& finite,
                                       const MonodromyOptions& opt) {
    PrecisionScope prec(opt.digits + 15);
    MonodromyRep rep;
    rep.digits = opt.digits;
    rep.points = finite;
    for (const auto& p : finite) rep.values.push_back(p.value());

    LoopOptions lo;
    lo.basepoint_fraction = opt.basepoint_fraction;
    lo.basepoint_angle = opt.basepoint_angle;
    LoopSystem sys = build_loops(rep.values, lo);
    rep.basepoint = sys.basepoint;
    rep.loops = sys.loops;

    // Frobenius fundamental matrix at the basepoint
    Real babs = abs(sys.basepoint);
    Real radius(-1);
    for (const auto& v : rep.values) {
        Real m = abs(v);
        if (m == 0) continue;
        if (radius < 0 || m < radius) radius = m;
    }
    if (radius < 0) radius = babs * 2;
    double ratio = static_cast<double>(babs / radius);
    size_t n_terms = frobenius_terms_needed(ratio, opt.digits);
    FrobeniusBasisC fb = frobenius_basis_numeric(op, n_terms);
    // convergence sanity: the neglected tail must be far below the target
    {
        Real tail(0);
        Cplx bp = pow_i(sys.basepoint, static_cast<long>(n_terms - 4));
        for (size_t k = n_terms - 4; k < n_terms; ++k) {
            for (int j = 0; j < 4; ++j) tail = std::max(tail, abs(fb.f[j].c[k] * bp));
            bp *= sys.basepoint;
        }
        if (tail > pow10(-static_cast<long>(opt.digits) - 4))
            throw std::runtime_error("frobenius series not converged at basepoint");
    }
    auto vals = frobenius_values(fb, sys.basepoint);
    CMat F(4);
    for (int d = 0; d < 4; ++d)
        for (int j = 0; j < 4; ++j) F(d, j) = vals[d][j];
    CMat Finv = inverse(F);

    auto adz = dz_coeffs(op);
    std::vector<CMat> loop_matrices(finite.size());
    for (size_t i = 0; i < finite.size(); ++i) {
        CMat T = transfer_along(adz, sys.loops[i].vertices, rep.values, opt.digits, opt.safety);
        loop_matrices[i] = Finv * T * F;
    }

    // normalize the composition order from the fan order to (Re, Im) order
    std::vector<size_t> order = sys.composition_order;
    std::vector<CMat> mats = loop_matrices;
    for (bool moved = true; moved;) {
        moved = false;
        for (size_t k = 0; k + 1 < order.size(); ++k) {
            if (order[k] > order[k + 1]) {
                // earlier loop a = order[k], later loop b = order[k+1]:
                // M_b M_a = (M_b M_a M_b^-1) M_b, so b moves earlier and a
                // becomes conjugated by M_b
                size_t a = order[k], btgt = order[k + 1];
                mats[a] = mats[btgt] * mats[a] * inverse(mats[btgt]);
                std::swap(order[k], order[k + 1]);
                moved = true;
            }
        }
    }
    rep.matrices = mats;
    CMat prod = CMat::identity(4);
    for (size_t i = 0; i < mats.size(); ++i) prod = mats[i] * prod;
    rep.m_infinity = inverse(prod);
    return rep;
}

}  // namespace monodetail

inline MonodromyRep monodromy_rep(const DifferentialOperator& op, const MonodromyOptions& opt = {}) {
    std::vector<SingularPoint> finite;
    {
        PrecisionScope prec(opt.digits + 15);
        for (const auto& p : singular_points(op))
            if (!p.is_infinity()) finite.push_back(p);
    }
    MonodromyOptions o = opt;
    MonodromyRep rep;
    // shrink the basepoint radius when the Frobenius series will not converge
    for (double frac : {opt.basepoint_fraction, 0.7, 0.5}) {
        o.basepoint_fraction = frac;
        try {
            rep = monodetail::monodromy_rep_once(op, finite, o);
            break;
        } catch (const std::runtime_error& e) {
            if (std::string(e.what()).find("not converged") == std::string::npos || frac == 0.5)
                throw;
        }
    }
    if (opt.estimate_precision) {
        MonodromyOptions half = o;
        half.digits = opt.digits / 2;
        half.estimate_precision = false;
        MonodromyRep rep2 = monodetail::monodromy_rep_once(op, finite, half);
        PrecisionScope prec(opt.digits + 15);
        Real worst(0);
        for (size_t i = 0; i < rep.matrices.size(); ++i) {
            Real scale = std::max(Real(1), rep.matrices[i].max_abs());
            Real diff = (rep.matrices[i] - rep2.matrices[i]).max_abs() / scale;
            worst = std::max(worst, diff);
        }
        rep.precision_estimate =
            worst == 0 ? static_cast<double>(half.digits)
                       : static_cast<double>(-log10(worst));
    }
    return rep;
}

/// Per-point diagnostic: integrality of the characteristic polynomial and
/// agreement of its roots with exp(2 pi i lambda) over the local exponents.
struct ConsistencyEntry {
    std::string location;
    Real charpoly_integrality_deviation;  // distance of coefficients to integers
    Real exponent_match_deviation;        // vs prod (x - e^{2 pi i lambda})
    bool ok = false;
};

struct ConsistencyReport {
    std::vector<ConsistencyEntry> entries;
    bool all_ok = true;
};

inline ConsistencyReport consistency_check(const MonodromyRep& rep, const RiemannScheme& scheme,
                                           double tol_digits_fraction = 0.5) {
    PrecisionScope prec(rep.digits + 15);
    ConsistencyReport report;
    Real tol = pow10(-static_cast<long>(rep.digits * tol_digits_fraction));
    Real two_pi = 2 * const_pi();
    auto handle = [&](const CMat& m, const SchemePoint& sp, const std::string& loc) {
        ConsistencyEntry e;
        e.location = loc;
        Poly<Cplx> cp = char_poly(m);
        Real dev(0);
        for (const auto& c : cp.c) {
            dev = std::max(dev, abs(c.re - to_real(Rat(round_to_int(c.re)))));
            dev = std::max(dev, abs(c.im));
        }
        e.charpoly_integrality_deviation = dev;
        // expected char poly from the exponents
        Poly<Cplx> expect = Poly<Cplx>::constant(Cplx(Real(1)));
        if (sp.spectrum.all_rational()) {
            for (const auto& lam : sp.spectrum.exponents) {
                Real th = two_pi * to_real(lam);
                Cplx ev(cos(th), sin(th));
                expect *= Poly<Cplx>(std::vector<Cplx>{-ev, Cplx(Real(1))});
            }
            Real d2(0);
            for (int i = 0; i <= 4; ++i) d2 = std::max(d2, abs(cp.coeff(i) - expect.coeff(i)));
            e.exponent_match_deviation = d2;
            e.ok = dev < tol && d2 < tol;
        } else {
            e.exponent_match_deviation = Real(-1);
            e.ok = dev < tol;
        }
        report.entries.push_back(e);
        report.all_ok = report.all_ok && e.ok;
    };
    for (size_t i = 0; i < rep.points.size(); ++i) {
        const SchemePoint* sp = scheme.at_location(rep.points[i]);
        if (!sp) continue;
        handle(rep.matrices[i], *sp, rep.points[i].str());
    }
    for (const auto& spt : scheme.points)
        if (spt.location.is_infinity()) handle(rep.m_infinity, spt, "inf");
    return report;
}

}  // namespace cymono
