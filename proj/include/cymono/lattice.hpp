#pragma once

#include <map>
#include <set>

#include "cymono/continuation.hpp"
#include "cymono/qlinalg.hpp"

namespace cymono {

struct NoConifoldCandidate : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoRationalLattice : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Standard forms: T_DM is the MUM monodromy, S_DM the conifold monodromy,
/// Q_DM the invariant symplectic form; d = H^3, k = dim |H|.
inline QMat t_dm(const Int& d) {
    QMat m = QMat::identity(4);
    m(0, 1) = 1;
    m(1, 2) = Rat(d);
    m(2, 3) = 1;
    return m;
}
inline QMat s_dm(const Int& k) {
    QMat m = QMat::identity(4);
    m(1, 0) = Rat(-k);
    m(2, 0) = -1;
    m(3, 0) = -1;
    return m;
}
inline QMat q_dm(const Int& k) {
    QMat q(4, 4);
    q(0, 3) = 1;
    q(1, 2) = -1;
    q(1, 3) = 1;
    q(2, 1) = 1;
    q(2, 3) = Rat(-k);
    q(3, 0) = -1;
    q(3, 1) = -1;
    q(3, 2) = Rat(k);
    return q;
}

/// Indices (into the finite-point list) of spectrum {0,1,1,2} points, sorted
/// by modulus, closest to the origin first.
inline std::vector<size_t> find_conifold_candidates(const RiemannScheme& scheme,
                                                    const std::vector<Cplx>& values) {
    std::vector<std::pair<Real, size_t>> hits;
    size_t finite_count = 0;
    for (const auto& sp : scheme.points) {
        if (sp.location.is_infinity()) continue;
        size_t idx = finite_count++;
        if (sp.spectrum.is_conifold_spectrum()) hits.emplace_back(abs(values[idx]), idx);
    }
    std::sort(hits.begin(), hits.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<size_t> out;
    for (auto& [m, i] : hits) out.push_back(i);
    if (out.empty())
        throw NoConifoldCandidate("no singular point with spectrum {0,1,1,2}");
    return out;
}

/// Direction of the rank-1 image of M - Id, from a fixed all-ones probe.
/// Requires the second singular value of M - Id to be negligible.
inline std::vector<Cplx> extract_vanishing_vector(const CMat& m) {
    CMat d = m - CMat::identity(4);
    std::vector<Cplx> v = d.apply({Cplx(Real(1)), Cplx(Real(1)), Cplx(Real(1)), Cplx(Real(1))});
    Real nrm(0);
    for (const auto& x : v) nrm += norm(x);
    nrm = sqrt(nrm);
    if (nrm < Real("1e-40")) throw std::runtime_error("not a PL-type point (M = Id to precision)");
    auto sv = singular_values(d);
    if (!(sv[1] / sv[0] < Real("1e-20")))
        throw std::runtime_error("not a PL-type point (M - Id has rank > 1)");
    for (auto& x : v) x = x / nrm;
    return v;
}

namespace latdetail {

inline Real vec_norm(const std::vector<Cplx>& v) {
    Real s(0);
    for (const auto& x : v) s += norm(x);
    return sqrt(s);
}

/// Smallest singular value of the 4 x k matrix with the given columns.
inline Real smallest_sv(const std::vector<std::vector<Cplx>>& cols) {
    auto sv = singular_values_of_columns(cols);
    return sv.empty() ? Real(0) : sv.back();
}

}  // namespace latdetail

/// Breadth-first words in the monodromy generators applied to v0; returns
/// candidate basis matrices (columns), best-conditioned first.
inline std::vector<CMat> generate_lattice_bases(const MonodromyRep& rep,
                                                const std::vector<Cplx>& v0,
                                                size_t word_length = 6,
                                                size_t max_quadruples = 20) {
    // All pooled vectors keep the common scalar of v0, so a basis of them
    // differs from a rational matrix by one overall scale; only normalized
    // copies are used for deduplication and conditioning scores.
    const size_t pool_cap = 96;
    auto normalized = [](const std::vector<Cplx>& v) {
        Real n = latdetail::vec_norm(v);
        std::vector<Cplx> w = v;
        for (auto& x : w) x = x / n;
        return w;
    };
    std::vector<std::vector<Cplx>> pool{v0};
    std::vector<std::vector<Cplx>> pool_dir{normalized(v0)};
    std::vector<std::vector<Cplx>> frontier{v0};
    for (size_t depth = 0; depth < word_length && pool.size() < pool_cap; ++depth) {
        std::vector<std::vector<Cplx>> next;
        for (const auto& m : rep.matrices) {
            for (const auto& v : frontier) {
                if (pool.size() + next.size() >= pool_cap) break;
                std::vector<Cplx> w = m.apply(v);
                Real nw = latdetail::vec_norm(w);
                if (nw < Real("1e-40")) continue;
                std::vector<Cplx> dir = w;
                for (auto& x : dir) x = x / nw;
                bool dup = false;
                for (const auto& u : pool_dir) {
                    Cplx ip(Real(0));
                    for (size_t r = 0; r < 4; ++r) ip += conj(u[r]) * dir[r];
                    if (abs(ip) > Real(1) - Real("1e-24")) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) {
                    pool.push_back(w);
                    pool_dir.push_back(std::move(dir));
                    next.push_back(std::move(w));
                }
            }
        }
        if (next.empty()) break;
        frontier = std::move(next);
    }
    if (pool.size() < 4) throw std::runtime_error("lattice generation failed: span too small");

    // greedy growth on directions, then deterministic alternates for the
    // retry ladder
    auto grow = [&](std::vector<size_t> chosen, size_t avoid_rank) {
        while (chosen.size() < 4) {
            std::vector<std::pair<Real, size_t>> scored;
            for (size_t cidx = 0; cidx < pool.size(); ++cidx) {
                if (std::find(chosen.begin(), chosen.end(), cidx) != chosen.end()) continue;
                std::vector<std::vector<Cplx>> cols;
                for (size_t s : chosen) cols.push_back(pool_dir[s]);
                cols.push_back(pool_dir[cidx]);
                scored.emplace_back(latdetail::smallest_sv(cols), cidx);
            }
            std::sort(scored.begin(), scored.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
            size_t pick = 0;
            if (chosen.size() == 3 && avoid_rank > 0 && avoid_rank < scored.size())
                pick = avoid_rank;
            if (scored.empty() || scored[pick].first < Real("1e-30")) return std::vector<size_t>();
            chosen.push_back(scored[pick].second);
        }
        return chosen;
    };
    std::vector<std::vector<size_t>> quadruples;
    for (size_t alt = 0; alt < max_quadruples; ++alt) {
        auto q = grow({0}, alt);
        if (q.empty()) break;
        if (std::find(quadruples.begin(), quadruples.end(), q) == quadruples.end())
            quadruples.push_back(q);
    }
    std::vector<CMat> out;
    for (const auto& q : quadruples) {
        CMat b(4);
        for (size_t col = 0; col < 4; ++col)
            for (size_t row = 0; row < 4; ++row) b(row, col) = pool[q[col]][row];
        out.push_back(b);
    }
    if (out.empty()) throw std::runtime_error("lattice generation failed: no independent quadruple");
    return out;
}

/// Entrywise rational reconstruction of a numeric matrix.
inline QMat rationalize_matrix(const CMat& m, const Int& max_den, const Real& tol) {
    QMat r(m.n, m.n);
    for (size_t i = 0; i < m.n; ++i)
        for (size_t j = 0; j < m.n; ++j) {
            const Cplx& e = m(i, j);
            Real scale = std::max(Real(1), abs(e));
            if (abs(e.im) > tol * scale)
                throw std::runtime_error("rationalize: entry has a nonreal part");
            r(i, j) = rationalize(e.re, max_den, tol * scale);
        }
    return r;
}

/// Solve M^T Q M = Q over all generators for antisymmetric Q; unique up to
/// scale in the generic case, returned primitive integer.
struct InvariantFormResult {
    QMat q;
    bool unique = true;
};

inline InvariantFormResult invariant_form(const std::vector<QMat>& gens) {
    // antisymmetric basis: (i,j) with i<j
    std::vector<std::pair<size_t, size_t>> idx;
    for (size_t i = 0; i < 4; ++i)
        for (size_t j = i + 1; j < 4; ++j) idx.emplace_back(i, j);
    QMat sys(16 * gens.size(), 6);
    size_t row = 0;
    for (const auto& m : gens) {
        for (size_t a = 0; a < 4; ++a)
            for (size_t b = 0; b < 4; ++b) {
                for (size_t t = 0; t < 6; ++t) {
                    auto [i, j] = idx[t];
                    // (M^T E M - E)_{ab} with E = e_i e_j^T - e_j e_i^T
                    Rat val = m(i, a) * m(j, b) - m(j, a) * m(i, b);
                    if (a == i && b == j) val -= 1;
                    if (a == j && b == i) val += 1;
                    sys(row, t) = val;
                }
                ++row;
            }
    }
    auto kernel = q_kernel(sys);
    if (kernel.empty()) throw std::runtime_error("invariant form: no antisymmetric solution");
    InvariantFormResult out;
    out.unique = kernel.size() == 1;
    auto v = primitive_integer_vector(kernel[0]);
    out.q = QMat(4, 4);
    for (size_t t = 0; t < 6; ++t) {
        auto [i, j] = idx[t];
        out.q(i, j) = Rat(v[t]);
        out.q(j, i) = Rat(-v[t]);
    }
    return out;
}

struct StandardizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Result of the integral-lattice reconstruction.
struct LatticeResult {
    CMat basis;                      // numeric lattice basis (columns, Frobenius coords)
    std::vector<QMat> rational;      // monodromies in the rational basis, per finite point
    QMat rational_minf;
    std::vector<QMat> standardized;  // in the Doran-Morgan basis
    QMat standardized_minf;
    QMat dm_transform;               // basis change applied to the rational matrices
    bool integral = false;
    Int d = 0, k = 0, c2h = 0;
    size_t conifold_index = 0;       // into the finite point list
    QMat q;                          // invariant form in the standardized basis
    bool q_unique = true;
};

namespace latdetail {

inline std::vector<Rat> mat_apply(const QMat& m, const std::vector<Rat>& v) { return m.apply(v); }

}  // namespace latdetail

/// Basis change to the Doran-Morgan normal form from the pair (T at the MUM
/// point, S at the conifold point): T -> T_DM(d), S -> S_DM(k) exactly.
inline void standardize(LatticeResult& result, size_t mum_index, size_t conifold_index) {
    const QMat& t = result.rational[mum_index];
    const QMat& s = result.rational[conifold_index];
    QMat n = t - QMat::identity(4);
    // MUM structure: (T - Id)^3 != 0, (T - Id)^4 = 0
    QMat n2 = n * n, n3 = n2 * n, n4 = n3 * n;
    bool n3_zero = true, n4_zero = true;
    for (const auto& v : n3.a) n3_zero = n3_zero && v == 0;
    for (const auto& v : n4.a) n4_zero = n4_zero && v == 0;
    if (n3_zero || !n4_zero)
        throw StandardizeError("MUM matrix does not have the maximally unipotent Jordan form");
    QMat ds = s - QMat::identity(4);
    if (q_rank(ds) != 1) throw StandardizeError("conifold matrix is not a rank-1 deviation from Id");
    // S - Id = u phi^T
    std::vector<Rat> u(4, Rat(0));
    size_t col_pick = 0;
    Rat best = 0;
    for (size_t j = 0; j < 4; ++j) {
        Rat mag = 0;
        for (size_t i = 0; i < 4; ++i) mag += abs(ds(i, j));
        if (mag > best) {
            best = mag;
            col_pick = j;
        }
    }
    for (size_t i = 0; i < 4; ++i) u[i] = ds(i, col_pick);
    {
        auto uprim = primitive_integer_vector(u);
        for (size_t i = 0; i < 4; ++i) u[i] = Rat(uprim[i]);
    }
    size_t pivot_row = 0;
    while (pivot_row < 4 && u[pivot_row] == 0) ++pivot_row;
    std::vector<Rat> phi(4, Rat(0));
    for (size_t j = 0; j < 4; ++j) phi[j] = ds(pivot_row, j) / u[pivot_row];
    for (size_t i = 0; i < 4; ++i)
        for (size_t j = 0; j < 4; ++j)
            if (ds(i, j) != u[i] * phi[j])
                throw StandardizeError("conifold deviation is not exactly rank 1");
    auto pair_with = [&phi](const std::vector<Rat>& x) {
        Rat acc = 0;
        for (size_t i = 0; i < 4; ++i) acc += phi[i] * x[i];
        return acc;
    };
    std::vector<Rat> nu = n.apply(u), n2u = n2.apply(u), n3u = n3.apply(u);
    bool n3u_zero = true;
    for (const auto& v : n3u) n3u_zero = n3u_zero && v == 0;
    if (n3u_zero) throw StandardizeError("incompatible MUM/conifold pair: u is not cyclic for T - Id");
    Rat d_rat = -pair_with(n3u);
    Rat k_rat = -pair_with(nu);
    if (pair_with(u) != 0 || pair_with(n2u) != -d_rat)
        throw StandardizeError("incompatible MUM/conifold pair: pairing consistency failed");
    if (denominator(d_rat) != 1 || denominator(k_rat) != 1 || d_rat <= 0 || k_rat <= 0)
        throw StandardizeError("non-standard lattice: d = " + rat_to_string(d_rat) +
                               ", k = " + rat_to_string(k_rat));
    Rat inv_d = Rat(1) / d_rat;
    Rat kd = k_rat * inv_d;
    std::vector<std::vector<Rat>> b(4, std::vector<Rat>(4));
    for (size_t i = 0; i < 4; ++i) {
        b[0][i] = n3u[i] * inv_d;
        b[1][i] = (n2u[i] - n3u[i]) * inv_d;
        b[2][i] = nu[i] - n2u[i] + (1 - kd) * n3u[i];
        b[3][i] = u[i] - nu[i] + (1 - kd) * n2u[i] + (2 * kd - 1) * n3u[i];
    }
    QMat w(4, 4);
    for (size_t col = 0; col < 4; ++col)
        for (size_t row = 0; row < 4; ++row) w(row, col) = b[col][row];
    QMat winv;
    try {
        winv = q_inverse(w);
    } catch (const std::runtime_error&) {
        throw StandardizeError("incompatible MUM/conifold pair: flag basis is singular");
    }
    result.dm_transform = w;
    result.standardized.clear();
    for (const auto& m : result.rational) result.standardized.push_back(winv * m * w);
    result.standardized_minf = winv * result.rational_minf * w;
    result.d = numerator(d_rat);
    result.k = numerator(k_rat);
    result.c2h = 12 * result.k - 2 * result.d;
    if (!(result.standardized[mum_index] == t_dm(result.d)))
        throw StandardizeError("standardized MUM matrix is not T_DM(d)");
    if (!(result.standardized[conifold_index] == s_dm(result.k)))
        throw StandardizeError("standardized conifold matrix is not S_DM(k)");
    result.integral = true;
    for (const auto& m : result.standardized) result.integral = result.integral && m.is_integral();
    result.integral = result.integral && result.standardized_minf.is_integral();
    result.conifold_index = conifold_index;
    // invariant form in the standardized basis, sign fixed by <e1, e4> >= 0
    std::vector<QMat> gens = result.standardized;
    gens.push_back(result.standardized_minf);
    auto qf = invariant_form(gens);
    if (qf.q(0, 3) < 0)
        for (auto& v : qf.q.a) v = -v;
    result.q = qf.q;
    result.q_unique = qf.unique;
}

/// Picard-Lefschetz classification of an integral monodromy matrix.
struct PLEntry {
    enum class Kind { identity, conifold_like, mum, other };
    Kind kind = Kind::other;
    Int lambda = 0;
    std::vector<Int> v;  // primitive, first nonzero entry positive

    std::string kind_name() const {
        switch (kind) {
            case Kind::identity: return "identity";
            case Kind::conifold_like: return "S_{lambda,v}";
            case Kind::mum: return "MUM";
            default: return "other";
        }
    }
};

/// Test M(alpha) = alpha - lambda <v, alpha> v with <v, alpha> = alpha^T Q v.
inline PLEntry classify_pl(const QMat& m, const QMat& q) {
    PLEntry e;
    QMat d = m - QMat::identity(4);
    bool zero = true;
    for (const auto& x : d.a) zero = zero && x == 0;
    if (zero) {
        e.kind = PLEntry::Kind::identity;
        e.lambda = 0;
        return e;
    }
    if (q_rank(d) == 1) {
        // image direction: the largest column of M - Id
        std::vector<Rat> img(4, Rat(0));
        size_t cj = 0;
        Rat best = 0;
        for (size_t j = 0; j < 4; ++j) {
            Rat mag = 0;
            for (size_t i = 0; i < 4; ++i) mag += abs(d(i, j));
            if (mag > best) {
                best = mag;
                cj = j;
            }
        }
        for (size_t i = 0; i < 4; ++i) img[i] = d(i, cj);
        auto v = primitive_integer_vector(img);
        std::vector<Rat> vr;
        for (const auto& x : v) vr.emplace_back(x);
        std::vector<Rat> qv = q.apply(vr);
        // columns: (M - Id) e_j = -lambda (Qv)_j v
        Rat lambda = 0;
        bool found = false;
        size_t row = 0;
        while (row < 4 && vr[row] == 0) ++row;
        for (size_t j = 0; j < 4; ++j) {
            if (qv[j] == 0) continue;
            lambda = -d(row, j) / (qv[j] * vr[row]);
            found = true;
            break;
        }
        if (found) {
            bool exact = true;
            for (size_t i = 0; i < 4 && exact; ++i)
                for (size_t j = 0; j < 4 && exact; ++j)
                    exact = d(i, j) == -lambda * qv[j] * vr[i];
            if (exact && denominator(lambda) == 1 && lambda >= 1) {
                e.kind = PLEntry::Kind::conifold_like;
                e.lambda = numerator(lambda);
                e.v = v;
                return e;
            }
        }
        e.kind = PLEntry::Kind::other;
        return e;
    }
    QMat n2 = d * d, n3 = n2 * d, n4 = n3 * d;
    bool n3z = true, n4z = true;
    for (const auto& x : n3.a) n3z = n3z && x == 0;
    for (const auto& x : n4.a) n4z = n4z && x == 0;
    if (!n3z && n4z) {
        e.kind = PLEntry::Kind::mum;
        return e;
    }
    e.kind = PLEntry::Kind::other;
    return e;
}

/// Integral matrices commuting with both T_DM(d) and S_DM(k) with |det| = 1:
/// the conjugation freedom left after standardization.
inline std::vector<QMat> dm_stabilizer(const Int& d, const Int& k, int coeff_bound = 2) {
    QMat t = t_dm(d), s = s_dm(k);
    QMat sys(32, 16);
    size_t row = 0;
    for (const QMat* g : {&t, &s}) {
        for (size_t a = 0; a < 4; ++a)
            for (size_t b = 0; b < 4; ++b) {
                // (G X - X G)_{ab} as linear form in X entries
                for (size_t i = 0; i < 4; ++i)
                    for (size_t j = 0; j < 4; ++j) {
                        Rat coeff = 0;
                        if (j == b) coeff += (*g)(a, i);
                        if (i == a) coeff -= (*g)(j, b);
                        sys(row, i * 4 + j) = coeff;
                    }
                ++row;
            }
    }
    auto kernel = q_kernel(sys);
    std::vector<QMat> out;
    std::vector<int> combo(kernel.size(), -coeff_bound);
    if (kernel.empty()) return out;
    while (true) {
        std::vector<Rat> x(16, Rat(0));
        for (size_t t2 = 0; t2 < kernel.size(); ++t2)
            for (size_t e2 = 0; e2 < 16; ++e2) x[e2] += Rat(combo[t2]) * kernel[t2][e2];
        QMat m(4, 4);
        for (size_t i = 0; i < 4; ++i)
            for (size_t j = 0; j < 4; ++j) m(i, j) = x[i * 4 + j];
        if (m.is_integral()) {
            Rat det = q_char_poly(m).coeff(0);  // det = charpoly(0) for n = 4
            if (det == 1 || det == -1) out.push_back(m);
        }
        size_t pos = 0;
        while (pos < combo.size() && combo[pos] == coeff_bound) combo[pos++] = -coeff_bound;
        if (pos == combo.size()) break;
        ++combo[pos];
    }
    return out;
}

struct LatticeOptions {
    Int max_den = 100000000;       // continued-fraction denominator bound
    size_t word_length = 6;
    size_t max_quadruples = 20;    // per conifold candidate
};

/// Full reconstruction with the retry ladder: conifold candidates closest
/// first, up to max_quadruples basis choices each; a candidate succeeds when
/// every matrix rationalizes with an integral characteristic polynomial and
/// the (T, S) pair standardizes.
inline LatticeResult reconstruct_lattice(const MonodromyRep& rep, const RiemannScheme& scheme,
                                         const LatticeOptions& opt = {}) {
    PrecisionScope prec(rep.digits + 15);
    auto candidates = find_conifold_candidates(scheme, rep.values);
    size_t mum_index = rep.points.size();
    for (size_t i = 0; i < rep.points.size(); ++i)
        if (rep.points[i].is_rational() && rep.points[i].rat() == 0) mum_index = i;
    if (mum_index == rep.points.size())
        throw std::runtime_error("reconstruct_lattice: z=0 is not a singular point");
    Real tol = pow10(-static_cast<long>(rep.digits) / 2);
    std::string diagnostics;
    for (size_t cand : candidates) {
        std::vector<Cplx> v0;
        try {
            v0 = extract_vanishing_vector(rep.matrices[cand]);
        } catch (const std::runtime_error& e) {
            diagnostics += std::string("candidate ") + rep.points[cand].str() + ": " + e.what() + "; ";
            continue;
        }
        std::vector<CMat> bases;
        try {
            bases = generate_lattice_bases(rep, v0, opt.word_length, opt.max_quadruples);
        } catch (const std::runtime_error& e) {
            diagnostics += std::string("candidate ") + rep.points[cand].str() + ": " + e.what() + "; ";
            continue;
        }
        for (const auto& basis : bases) {
            LatticeResult result;
            result.basis = basis;
            try {
                CMat binv = inverse(basis);
                for (const auto& m : rep.matrices) {
                    QMat r = rationalize_matrix(binv * m * basis, opt.max_den, tol);
                    for (const auto& c : q_char_poly(r).c)
                        if (denominator(c) != 1)
                            throw std::runtime_error("characteristic polynomial not integral");
                    result.rational.push_back(std::move(r));
                }
                QMat prod = QMat::identity(4);
                for (const auto& r : result.rational) prod = r * prod;
                result.rational_minf = q_inverse(prod);
                standardize(result, mum_index, cand);
                return result;
            } catch (const std::exception& e) {
                diagnostics += std::string("candidate ") + rep.points[cand].str() + ": " + e.what() + "; ";
            }
        }
    }
    throw NoRationalLattice("no rational lattice found: " + diagnostics);
}

/// Grouping of lattice results by (H^3, c2 H) with genus-0 table comparison.
struct InvariantGroup {
    Int d, c2h;
    std::vector<size_t> members;
    bool genus0_equal = true;
};

inline std::vector<InvariantGroup> group_by_invariants(
    const std::vector<std::pair<std::pair<Int, Int>, std::map<long, Int>>>& items) {
    std::vector<InvariantGroup> groups;
    for (size_t i = 0; i < items.size(); ++i) {
        bool placed = false;
        for (auto& g : groups) {
            if (g.d == items[i].first.first && g.c2h == items[i].first.second) {
                if (!(items[g.members.front()].second == items[i].second)) g.genus0_equal = false;
                g.members.push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back({items[i].first.first, items[i].first.second, {i}, true});
    }
    std::sort(groups.begin(), groups.end(), [](const InvariantGroup& a, const InvariantGroup& b) {
        if (a.d != b.d) return a.d < b.d;
        return a.c2h < b.c2h;
    });
    return groups;
}

}  // namespace cymono
