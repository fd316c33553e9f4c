#include <catch2/catch_amalgamated.hpp>

#include <cymono/continuation.hpp>

using namespace cymono;

namespace {

const char* kQuintic = "theta^4 - 5*z*(5*theta+1)*(5*theta+2)*(5*theta+3)*(5*theta+4)";
const unsigned kDigits = 40;

std::vector<Cplx> quintic_singulars() {
    return {Cplx(Real(0)), to_cplx(Rat(1, 3125))};
}

}  // namespace

TEST_CASE("empty path gives the identity") {
    PrecisionScope prec(kDigits + 15);
    auto op = parse_operator(kQuintic);
    Path p;
    p.vertices = {to_cplx(Rat(1, 10000))};
    CMat t = transfer_matrix(op, p, kDigits);
    REQUIRE((t - CMat::identity(4)).max_abs() == 0);
}

TEST_CASE("contractible loop is the identity to precision") {
    PrecisionScope prec(kDigits + 15);
    auto op = parse_operator(kQuintic);
    auto adz = dz_coeffs(op);
    auto sv = quintic_singulars();
    Cplx b = to_cplx(Rat(1, 10000));
    std::vector<Cplx> tri = {b, b + Cplx(Real(1) / 10000, Real(1) / 20000),
                             b + Cplx(Real(0), Real(1) / 10000), b};
    CMat t = transfer_along(adz, tri, sv, kDigits);
    CMat dev = t - CMat::identity(4);
    // scale-relative: rows grow like derivatives
    REQUIRE(dev.max_abs() / t.max_abs() < pow10(-(long(kDigits) - 5)));
}

TEST_CASE("transfer matrices compose") {
    PrecisionScope prec(kDigits + 15);
    auto op = parse_operator(kQuintic);
    auto adz = dz_coeffs(op);
    auto sv = quintic_singulars();
    Cplx a = to_cplx(Rat(1, 10000));
    Cplx m = Cplx(Real(2) / 10000, Real(1) / 30000);
    Cplx c = Cplx(Real(1) / 20000, -Real(1) / 25000);
    CMat direct = transfer_along(adz, {a, m, c}, sv, kDigits);
    CMat split = transfer_along(adz, {m, c}, sv, kDigits) * transfer_along(adz, {a, m}, sv, kDigits);
    REQUIRE((direct - split).max_abs() / direct.max_abs() < pow10(-(long(kDigits) - 5)));
    REQUIRE(abs(det(direct)) > 0);
}

TEST_CASE("homotopy invariance of loop transfer") {
    PrecisionScope prec(kDigits + 15);
    auto op = parse_operator(kQuintic);
    auto adz = dz_coeffs(op);
    auto sv = quintic_singulars();
    LoopSystem sys = build_loops(sv);
    const Path& loop = sys.loops[1];
    CMat t1 = transfer_along(adz, loop.vertices, sv, kDigits);
    // perturb a mid vertex without crossing anything
    std::vector<Cplx> moved = loop.vertices;
    size_t mid = moved.size() / 2;
    moved[mid] += Cplx(Real(1), Real(1)) * (abs(moved[mid] - sv[1]) / 20);
    CMat t2 = transfer_along(adz, moved, sv, kDigits);
    REQUIRE((t1 - t2).max_abs() / t1.max_abs() < pow10(-(long(kDigits) - 5)));
}

TEST_CASE("doubling the working precision changes transfer matrices marginally") {
    auto op = parse_operator(kQuintic);
    auto adz = dz_coeffs(op);
    auto sv = quintic_singulars();
    CMat t1, t2;
    {
        PrecisionScope prec(kDigits + 15);
        LoopSystem sys = build_loops(sv);
        t1 = transfer_along(adz, sys.loops[1].vertices, sv, kDigits);
    }
    {
        PrecisionScope prec(2 * kDigits + 15);
        LoopSystem sys = build_loops(sv);
        t2 = transfer_along(adz, sys.loops[1].vertices, sv, 2 * kDigits);
        REQUIRE((t1 - t2).max_abs() / t2.max_abs() < pow10(-(long(kDigits) - 5)));
    }
}

TEST_CASE("paths through singular points are rejected") {
    PrecisionScope prec(kDigits + 15);
    auto op = parse_operator(kQuintic);
    auto adz = dz_coeffs(op);
    auto sv = quintic_singulars();
    std::vector<Cplx> through = {to_cplx(Rat(-1, 1000)), to_cplx(Rat(1, 1000))};
    REQUIRE_THROWS_AS(transfer_along(adz, through, sv, kDigits), PathTooClose);
}

TEST_CASE("loop construction: winding certified, basepoint convention") {
    PrecisionScope prec(kDigits + 15);
    auto sv = quintic_singulars();
    LoopSystem sys = build_loops(sv);
    REQUIRE(sys.loops.size() == 2);
    // basepoint = 0.9 |zmin| e^{-0.1 i} along the direction of zmin
    Real ang(-1);
    ang /= 10;
    Cplx expect = Real(9) / 10 * to_cplx(Rat(1, 3125)) * Cplx(cos(ang), sin(ang));
    REQUIRE(abs(sys.basepoint - expect) < Real("1e-30"));
    for (auto& loop : sys.loops) {
        REQUIRE(loop.vertices.front() == sys.basepoint);
        REQUIRE(loop.vertices.back() == sys.basepoint);
    }
    // a single singular point yields one loop
    LoopSystem one = build_loops({to_cplx(Rat(1, 2))});
    REQUIRE(one.loops.size() == 1);
}

TEST_CASE("quintic monodromy: MUM structure, conifold char poly, product relation") {
    auto op = parse_operator(kQuintic);
    MonodromyOptions mo;
    mo.digits = kDigits;
    mo.estimate_precision = true;
    MonodromyRep rep = monodromy_rep(op, mo);
    PrecisionScope prec(kDigits + 15);
    REQUIRE(rep.points.size() == 2);
    REQUIRE(rep.precision_estimate > kDigits / 2 - 6);

    // MUM matrix in the Frobenius basis: y_j -> sum (2 pi i)^m/m! y_{j-m}
    Real two_pi = 2 * const_pi();
    const CMat& m0 = rep.matrices[0];
    REQUIRE(abs(m0(0, 1) - Cplx(Real(0), two_pi)) < pow10(-(long(kDigits) - 8)));
    REQUIRE(abs(m0(0, 2) - Cplx(-two_pi * two_pi / 2, Real(0))) < pow10(-(long(kDigits) - 8)));
    REQUIRE(abs(m0(1, 0)) < pow10(-(long(kDigits) - 8)));

    // conifold loop: characteristic polynomial (1 - lambda)^4
    Poly<Cplx> cp = char_poly(rep.matrices[1]);
    std::vector<Rat> expect = {1, -4, 6, -4, 1};
    for (int i = 0; i <= 4; ++i)
        REQUIRE(abs(cp.coeff(i) - to_cplx(expect[i])) < pow10(-(long(kDigits) - 8)));

    // defining relation: (M_l ... M_1) M_inf = Id
    CMat prod = CMat::identity(4);
    for (const auto& m : rep.matrices) prod = m * prod;
    prod = prod * rep.m_infinity;
    REQUIRE((prod - CMat::identity(4)).max_abs() < pow10(-(long(kDigits) / 2)));

    // det of a CY monodromy is 1 to precision
    REQUIRE(abs(det(rep.matrices[1]) - Cplx(Real(1))) < pow10(-(long(kDigits) - 8)));

    // eigenvalue/exponent consistency report
    auto scheme = riemann_scheme(op);
    auto report = consistency_check(rep, scheme);
    REQUIRE(report.all_ok);
    REQUIRE(report.entries.size() == 3);  // 0, 1/3125, inf
}
