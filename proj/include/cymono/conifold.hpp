#pragma once

#include "cymono/lattice.hpp"

namespace cymono {

struct ConifoldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation point z_* for matching the conifold-side and MUM-side
/// expansions: z_c/2, nudged when another singular point interferes.
struct MidpointChoice {
    Cplx z_star;
    bool overlap_ok = true;      // both discs of convergence reach z_*
    bool not_closest = false;    // z_c is not the singular point closest to 0
};

inline MidpointChoice midpoint_select(const Cplx& z_c, const std::vector<Cplx>& finite_values) {
    MidpointChoice out;
    Real r_mum(-1), r_coni(-1);
    for (const auto& v : finite_values) {
        Real m = abs(v);
        if (m > 0 && (r_mum < 0 || m < r_mum)) r_mum = m;
        Real d = abs(v - z_c);
        if (d > 0 && (r_coni < 0 || d < r_coni)) r_coni = d;
    }
    if (r_mum > 0 && abs(z_c) > r_mum * Real(10001) / 10000) out.not_closest = true;
    std::vector<Cplx> candidates;
    candidates.push_back(z_c / Real(2));
    Real a("0.15");
    candidates.push_back((z_c / Real(2)) * Cplx(cos(a), sin(a)));
    candidates.push_back((z_c / Real(2)) * Cplx(cos(a), -sin(a)));
    candidates.push_back(z_c * (Real(2) / 5));
    candidates.push_back(z_c * (Real(3) / 5));
    for (const auto& c : candidates) {
        if (abs(c) < r_mum * Real(95) / 100 && abs(c - z_c) < r_coni * Real(95) / 100) {
            out.z_star = c;
            return out;
        }
    }
    out.z_star = z_c / Real(2);
    out.overlap_ok = false;
    return out;
}

namespace conidetail {

/// Local theta-form layers at u = z - z_c: u^s L = sum_k u^k Q_k(theta_u).
inline std::vector<Poly<Cplx>> local_theta_layers(const std::array<QPoly, 5>& adz, const Cplx& z_c) {
    std::map<long, Poly<Cplx>> acc;
    long min_off = 0;
    for (int i = 0; i <= 4; ++i) {
        Poly<Cplx> b = to_cplx_poly(adz[i]).shift(z_c);
        Poly<Cplx> ff = falling_factorial<Cplx>(i);
        for (size_t j = 0; j < b.c.size(); ++j) {
            if (b.c[j] == Cplx(0)) continue;
            long off = static_cast<long>(j) - i;
            auto& slot = acc[off];
            Poly<Cplx> term = ff;
            for (auto& cc : term.c) cc *= b.c[j];
            slot += term;
            min_off = std::min(min_off, off);
        }
    }
    long max_off = acc.empty() ? 0 : acc.rbegin()->first;
    std::vector<Poly<Cplx>> layers(static_cast<size_t>(max_off - min_off) + 1);
    for (auto& [off, p] : acc) layers[static_cast<size_t>(off - min_off)] = std::move(p);
    return layers;
}

/// Linear form in the six local parameters, together with a running
/// magnitude bound used as the cancellation ceiling (rows of very different
/// scales appear; a row is numerically zero relative to its own magnitude).
struct ParamRow {
    std::array<Cplx, 6> c{Cplx(0), Cplx(0), Cplx(0), Cplx(0), Cplx(0), Cplx(0)};
    Real mag = Real(0);

    Real linf() const {
        Real m(0);
        for (const auto& v : c) m = std::max(m, abs(v));
        return m;
    }
};

inline void add_scaled(ParamRow& a, const ParamRow& b, const Cplx& s) {
    for (int i = 0; i < 6; ++i) a.c[i] += s * b.c[i];
    a.mag += abs(s) * std::max(b.mag, b.linf());
}

}  // namespace conidetail

/// The power series f(u) multiplying log(z - z_c) in the local solution
/// y = f log(z - z_c) + g at a point with exponents {0,1,1,2}; f is the
/// conifold period, normalized so its u^1 coefficient is 1.
inline Series<Cplx> conifold_log_coefficient(const std::array<QPoly, 5>& adz, const Cplx& z_c,
                                             size_t n_terms, unsigned digits) {
    using namespace conidetail;
    auto layers = local_theta_layers(adz, z_c);
    size_t kmax = layers.size() - 1;
    const Poly<Cplx>& q0 = layers[0];
    std::vector<Poly<Cplx>> dlayers;
    for (auto& q : layers) dlayers.push_back(q.derivative());
    // seek y = phi log u + psi:
    //   log part:   sum_{k+m=n} Q_k(m) phi_m = 0
    //   plain part: sum_{k+m=n} [Q_k(m) psi_m + Q_k'(m) phi_m] = 0
    // parameters: phi_0, phi_1, phi_2, psi_0, psi_1, psi_2 at the resonant
    // indices {0,1,2} (the roots of Q_0); the resonance equations become
    // linear constraints on the parameters.
    std::vector<ParamRow> phi(n_terms, zero_row()), psi(n_terms, zero_row());
    std::vector<ParamRow> constraints;
    for (size_t n = 0; n < n_terms; ++n) {
        Cplx nn(Real(static_cast<long>(n)));
        Cplx q0n = q0.eval(nn);
        ParamRow log_rhs = zero_row();
        for (size_t k = 1; k <= std::min(n, kmax); ++k) {
            if (layers[k].is_zero()) continue;
            Cplx w = layers[k].eval(Cplx(Real(static_cast<long>(n - k))));
            if (!(w == Cplx(0))) add_scaled(log_rhs, phi[n - k], w);
        }
        bool resonant = n <= 2;
        if (resonant) {
            constraints.push_back(log_rhs);
            phi[n] = zero_row();
            phi[n][n] = Cplx(Real(1));
        } else {
            phi[n] = zero_row();
            add_scaled(phi[n], log_rhs, Cplx(Real(-1)) / q0n);
        }
        ParamRow plain_rhs = zero_row();
        for (size_t k = 1; k <= std::min(n, kmax); ++k) {
            Cplx m(Real(static_cast<long>(n - k)));
            if (!layers[k].is_zero()) {
                Cplx w = layers[k].eval(m);
                if (!(w == Cplx(0))) add_scaled(plain_rhs, psi[n - k], w);
            }
            if (!dlayers[k].is_zero()) {
                Cplx w = dlayers[k].eval(m);
                if (!(w == Cplx(0))) add_scaled(plain_rhs, phi[n - k], w);
            }
        }
        Cplx q0d = dlayers[0].eval(nn);
        if (!(q0d == Cplx(0))) add_scaled(plain_rhs, phi[n], q0d);
        if (resonant) {
            constraints.push_back(plain_rhs);
            psi[n] = zero_row();
            psi[n][3 + n] = Cplx(Real(1));
        } else {
            psi[n] = zero_row();
            add_scaled(psi[n], plain_rhs, Cplx(Real(-1)) / q0n);
        }
    }
    // nullspace of the constraint rows; pivots measured against the global
    // scale so that numerically-zero rows are not eliminated against
    Real thresh = pow10(-static_cast<long>(digits) / 2);
    std::vector<ParamRow> rows = constraints;
    Real scale0(0);
    for (const auto& r : rows)
        for (int j = 0; j < 6; ++j) scale0 = std::max(scale0, abs(r[j]));
    std::vector<int> pivot_col;
    size_t rank = 0;
    for (int col = 0; col < 6 && rank < rows.size(); ++col) {
        size_t piv = rank;
        Real best(0);
        for (size_t r = rank; r < rows.size(); ++r)
            if (abs(rows[r][col]) > best) {
                best = abs(rows[r][col]);
                piv = r;
            }
        if (scale0 == 0 || best < thresh * scale0) continue;
        std::swap(rows[piv], rows[rank]);
        Cplx d = rows[rank][col];
        for (int j = 0; j < 6; ++j) rows[rank][j] /= d;
        for (size_t r = 0; r < rows.size(); ++r) {
            if (r == rank) continue;
            Cplx f = rows[r][col];
            if (f == Cplx(0)) continue;
            for (int j = 0; j < 6; ++j) rows[r][j] -= f * rows[rank][j];
        }
        pivot_col.push_back(col);
        ++rank;
    }
    std::vector<std::array<Cplx, 6>> basis;
    for (int free_col = 0; free_col < 6; ++free_col) {
        if (std::find(pivot_col.begin(), pivot_col.end(), free_col) != pivot_col.end()) continue;
        std::array<Cplx, 6> v{Cplx(0), Cplx(0), Cplx(0), Cplx(0), Cplx(0), Cplx(0)};
        v[free_col] = Cplx(Real(1));
        for (size_t r = 0; r < rank; ++r) v[pivot_col[r]] = -rows[r][free_col];
        basis.push_back(v);
    }
    if (basis.empty()) throw ConifoldError("no local log solution (constraints have full rank)");
    // f-direction: any solution with nonzero phi part
    size_t best_idx = basis.size();
    Real best_phi(0);
    for (size_t b = 0; b < basis.size(); ++b) {
        Real pn(0), par(0);
        for (int i = 0; i < 6; ++i) par += norm(basis[b][i]);
        for (size_t n = 0; n < std::min<size_t>(n_terms, 12); ++n) {
            Cplx val(Real(0));
            for (int i = 0; i < 6; ++i) val += phi[n][i] * basis[b][i];
            pn += norm(val);
        }
        pn /= par;
        if (pn > best_phi) {
            best_phi = pn;
            best_idx = b;
        }
    }
    if (best_idx == basis.size() || best_phi < thresh * thresh)
        throw ConifoldError("not a log-type point: the log coefficient vanishes");
    Series<Cplx> f(n_terms);
    for (size_t n = 0; n < n_terms; ++n) {
        Cplx val(Real(0));
        for (int i = 0; i < 6; ++i) val += phi[n][i] * basis[best_idx][i];
        f.c[n] = val;
    }
    if (abs(f.c[1]) < thresh) throw ConifoldError("conifold period does not start at u^1");
    Cplx lead = f.c[1];
    for (auto& c : f.c) c /= lead;
    return f;
}

/// Conifold period data: z2 = sum c_i y_i, its t-hat expansion, and c3.
struct ConifoldPeriod {
    size_t point_index = 0;
    std::array<Cplx, 4> c_vector{};    // primary (image method), Frobenius coords
    std::array<Cplx, 4> c_vector_b{};  // matching method
    Real method_agreement;             // relative deviation between the two
    Cplx cubic, quadratic, linear, constant;  // t-hat expansion, normalized
    Int c3 = 0;
    Int c2h_from_period = 0;
    Real quadratic_residual, c2h_residual, c3_residual;
    bool image_method_only = false;
    bool not_closest_warning = false;
};

/// Computes z2 = sum c_i y_i by two routes and extracts (H^3/6) t^3 +
/// (c2 H/24) t + c3 zeta(3)/(2 pi i)^3 from its polynomial part.
inline ConifoldPeriod conifold_period(const DifferentialOperator& op, const MonodromyRep& rep,
                                      const LatticeResult& lattice) {
    unsigned digits = rep.digits;
    PrecisionScope prec(digits + 15);
    ConifoldPeriod out;
    out.point_index = lattice.conifold_index;
    Cplx z_c = rep.values[lattice.conifold_index];

    // method (a): the image of M_c - Id in Frobenius coordinates
    const CMat& m = rep.matrices[lattice.conifold_index];
    CMat dm = m - CMat::identity(4);
    size_t cj = 0;
    Real best(0);
    for (size_t j = 0; j < 4; ++j) {
        Real s(0);
        for (size_t i = 0; i < 4; ++i) s += norm(dm(i, j));
        if (s > best) {
            best = s;
            cj = j;
        }
    }
    for (size_t i = 0; i < 4; ++i) out.c_vector[i] = dm(i, cj);

    // method (b): local log solution matched at z_*
    MidpointChoice mid = midpoint_select(z_c, rep.values);
    out.not_closest_warning = mid.not_closest;
    out.image_method_only = !mid.overlap_ok;
    if (mid.overlap_ok) {
        Real r_coni(-1);
        for (const auto& v : rep.values) {
            Real d = abs(v - z_c);
            if (d > 0 && (r_coni < 0 || d < r_coni)) r_coni = d;
        }
        Cplx u_star = mid.z_star - z_c;
        double ratio = static_cast<double>(abs(u_star) / r_coni);
        size_t n_local = static_cast<size_t>((digits + 12) * 2.302585 / -std::log(ratio)) + 60;
        auto adz = dz_coeffs(op);
        Series<Cplx> f = conifold_log_coefficient(adz, z_c, n_local, digits);
        // f and derivatives at z_*
        std::array<Cplx, 4> fk{};
        for (int k = 0; k < 4; ++k) {
            Cplx acc(Real(0));
            Cplx up(Real(1));
            for (size_t n = static_cast<size_t>(k); n < f.len(); ++n) {
                Real ff(1);
                for (int t = 0; t < k; ++t) ff *= Real(static_cast<long>(n) - t);
                acc += f.c[n] * ff * up;
                up *= u_star;
            }
            fk[static_cast<size_t>(k)] = acc;
        }
        // Frobenius values at z_*
        Real r_mum(-1);
        for (const auto& v : rep.values) {
            Real mv = abs(v);
            if (mv > 0 && (r_mum < 0 || mv < r_mum)) r_mum = mv;
        }
        double ratio_m = static_cast<double>(abs(mid.z_star) / r_mum);
        size_t n_mum = static_cast<size_t>((digits + 12) * 2.302585 / -std::log(ratio_m)) + 60;
        FrobeniusBasisC fb = frobenius_basis_numeric(op, n_mum);
        auto vals = frobenius_values(fb, mid.z_star);
        CMat fmat(4);
        for (int d = 0; d < 4; ++d)
            for (int j = 0; j < 4; ++j) fmat(d, j) = vals[d][j];
        CMat finv = inverse(fmat);
        std::vector<Cplx> cb = finv.apply({fk[0], fk[1], fk[2], fk[3]});
        for (size_t i = 0; i < 4; ++i) out.c_vector_b[i] = cb[i];
        // agreement up to scale
        Cplx num(Real(0)), den(Real(0));
        for (size_t i = 0; i < 4; ++i) {
            num += conj(cb[i]) * out.c_vector[i];
            den += conj(cb[i]) * cb[i];
        }
        Cplx kappa = num / den;
        Real dev(0), scale(0);
        for (size_t i = 0; i < 4; ++i) {
            dev += norm(out.c_vector[i] - kappa * cb[i]);
            scale += norm(out.c_vector[i]);
        }
        out.method_agreement = sqrt(dev / scale);
        Real tol = pow10(-static_cast<long>(digits) / 2);
        if (!(out.method_agreement < tol))
            throw ConifoldError("conifold period methods disagree (relative deviation " +
                                out.method_agreement.str(6) + ")");
    } else {
        out.method_agreement = Real(-1);
    }

    // t-hat expansion: y_j/y_0 -> (2 pi i t_hat)^j / j! as q -> 0, so the
    // polynomial part of z2/y0 is sum c_j (2 pi i)^j t_hat^j / j!.
    Real two_pi = 2 * const_pi();
    Cplx tpi(Real(0), two_pi);  // 2 pi i
    Cplx tpi2 = tpi * tpi, tpi3 = tpi2 * tpi;
    const auto& c = out.c_vector;
    if (abs(c[3]) == 0) throw ConifoldError("conifold period has no t^3 part");
    Rat h3_over_6(lattice.d, 6);
    Cplx sigma = to_cplx(h3_over_6) * Cplx(Real(6)) / (c[3] * tpi3);  // so cubic = H^3/6
    out.cubic = sigma * c[3] * tpi3 / Cplx(Real(6));
    out.quadratic = sigma * c[2] * tpi2 / Cplx(Real(2));
    out.linear = sigma * c[1] * tpi;
    out.constant = sigma * c[0];
    Real tol_round("1e-6");
    out.quadratic_residual = abs(out.quadratic) / to_real(Rat(lattice.d, 6));
    if (!(out.quadratic_residual < tol_round))
        throw ConifoldError("t^2 coefficient of the conifold period does not vanish");
    Cplx lin24 = out.linear * Real(24);
    out.c2h_from_period = round_to_int(lin24.re);
    out.c2h_residual = std::max(abs(lin24.re - to_real(Rat(out.c2h_from_period))), abs(lin24.im));
    if (!(out.c2h_residual < tol_round) || out.c2h_from_period != lattice.c2h)
        throw ConifoldError("c2.H from the conifold period does not match the lattice value");
    Cplx c3c = out.constant * tpi3 / Cplx(const_zeta3());
    out.c3 = round_to_int(c3c.re);
    out.c3_residual = std::max(abs(c3c.re - to_real(Rat(out.c3))), abs(c3c.im));
    if (!(out.c3_residual < tol_round)) throw ConifoldError("c3 extraction failed (not integral)");
    return out;
}

}  // namespace cymono
