#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <cymono/genus0.hpp>

using namespace cymono;

namespace {

const char* kQuintic = "theta^4 - 5*z*(5*theta+1)*(5*theta+2)*(5*theta+3)*(5*theta+4)";
const char* kAesz28 =
    "theta^4 - z*(65*theta^4 + 130*theta^3 + 105*theta^2 + 40*theta + 6)"
    " + 4*z^2*(4*theta+3)*(theta+1)^2*(4*theta+5)";

// closed-form oracle for the quintic holomorphic period: (5n)!/(n!)^5
Rat quintic_f0(size_t n) {
    Int num = 1, den = 1;
    for (size_t i = 1; i <= 5 * n; ++i) num *= i;
    for (size_t i = 1; i <= n; ++i) den *= i;
    Int d5 = den * den * den * den * den;
    return Rat(num, d5);
}

// oracle for f1: 5 (5n)!/(n!)^5 (H_{5n} - H_n)
Rat quintic_f1(size_t n) {
    Rat h = 0;
    for (size_t i = n + 1; i <= 5 * n; ++i) h += Rat(1, Int(i));
    return 5 * quintic_f0(n) * h;
}

// independent series inversion of q(z) = z exp(f1/f0) by naive fixed-point
// iteration on plain coefficient vectors
std::vector<Rat> invert_mirror_oracle(const std::vector<Rat>& g, size_t n) {
    // z_{k+1}(q) = q * exp(-g(z_k(q))), all series truncated at n terms
    auto mul = [n](const std::vector<Rat>& a, const std::vector<Rat>& b) {
        std::vector<Rat> r(n, Rat(0));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; i + j < n; ++j) r[i + j] += a[i] * b[j];
        return r;
    };
    std::vector<Rat> z(n, Rat(0));
    if (n > 1) z[1] = 1;
    for (size_t it = 0; it < n; ++it) {
        // e = exp(-g(z)) via exp series on composed argument
        std::vector<Rat> comp(n, Rat(0));
        std::vector<Rat> zp(n, Rat(0));
        zp[0] = 1;
        for (size_t k = 0; k < g.size() && k < n; ++k) {
            for (size_t i = 0; i < n; ++i) comp[i] += g[k] * zp[i];
            zp = mul(zp, z);
        }
        std::vector<Rat> e(n, Rat(0)), term(n, Rat(0));
        e[0] = 1;
        term[0] = 1;
        for (size_t k = 1; k < n; ++k) {
            term = mul(term, comp);
            for (size_t i = 0; i < n; ++i) e[i] -= 0;  // keep shape
            Rat fact = 1;
            for (size_t t = 1; t <= k; ++t) fact *= t;
            for (size_t i = 0; i < n; ++i) e[i] += term[i] * (k % 2 ? Rat(-1) : Rat(1)) / fact;
        }
        std::vector<Rat> znew(n, Rat(0));
        for (size_t i = 0; i + 1 < n; ++i) znew[i + 1] = e[i];
        z = znew;
    }
    return z;
}

}  // namespace

TEST_CASE("series arithmetic basics") {
    QSeries a(6);
    a.c = {1, 2, 3, 0, 0, 0};
    QSeries b = a * a;
    REQUIRE(b.c == std::vector<Rat>{1, 4, 10, 12, 9, 0});
    REQUIRE((b / a).c == a.c);
    QSeries l = a.log();
    REQUIRE(l.c[0] == 0);
    QSeries e = l.exp();
    REQUIRE(e.c == a.c);
    QSeries p = a.pow_rat(Rat(1, 2));
    REQUIRE((p * p).c == a.c);
}

TEST_CASE("series reversion inverts composition") {
    QSeries f(8);
    f.c = {0, 1, -3, 5, 7, -11, 2, 1};
    QSeries g = f.reversion();
    QSeries comp = f.compose(g);
    for (size_t i = 0; i < 8; ++i) REQUIRE(comp.c[i] == (i == 1 ? Rat(1) : Rat(0)));
}

TEST_CASE("quintic Frobenius basis matches the closed-form oracle") {
    auto op = parse_operator(kQuintic);
    auto fb = frobenius_basis(op, 8);
    for (size_t n = 0; n < 8; ++n) {
        REQUIRE(fb.f[0].c[n] == quintic_f0(n));
        REQUIRE(fb.f[1].c[n] == quintic_f1(n));
    }
    REQUIRE(fb.f[1].c[0] == 0);
    REQUIRE(fb.f[2].c[0] == 0);
    REQUIRE(fb.f[3].c[0] == 0);
}

TEST_CASE("trivial operator theta^4 has constant Frobenius basis") {
    auto fb = frobenius_basis(parse_operator("theta^4"), 5);
    for (size_t n = 1; n < 5; ++n)
        for (int i = 0; i < 4; ++i) REQUIRE(fb.f[i].c[n] == 0);
    REQUIRE(fb.f[0].c[0] == 1);
}

TEST_CASE("frobenius rejects a non-MUM origin") {
    REQUIRE_THROWS(frobenius_basis(parse_operator("theta^4 + z*theta^4 - theta"), 5));
}

TEST_CASE("doubling the truncation order never changes computed coefficients") {
    auto op = parse_operator(kAesz28);
    auto fb1 = frobenius_basis(op, 10);
    auto fb2 = frobenius_basis(op, 20);
    for (int i = 0; i < 4; ++i)
        for (size_t n = 0; n < 10; ++n) REQUIRE(fb1.f[i].c[n] == fb2.f[i].c[n]);
}

TEST_CASE("mirror map: quintic z(q) and inversion oracle") {
    auto op = parse_operator(kQuintic);
    auto fb = frobenius_basis(op, 8);
    auto mm = mirror_map(fb);
    REQUIRE(mm.q_of_z.c[0] == 1);  // q = z(1 + O(z))
    REQUIRE(mm.z_of_q.c[0] == 1);
    REQUIRE(mm.z_of_q.c[1] == -770);
    REQUIRE(mm.z_of_q.c[2] == 171525);
    // independent fixed-point inversion oracle
    std::vector<Rat> g(fb.order);
    QSeries gs = fb.f[1] / fb.f[0];
    for (size_t i = 0; i < fb.order; ++i) g[i] = gs.c[i];
    auto z_oracle = invert_mirror_oracle(g, 8);
    for (size_t i = 1; i < 8; ++i) REQUIRE(mm.z_of_q.c[i - 1] == z_oracle[i]);
    // round trip z(q(z)) = z
    QSeries qz(8);
    for (size_t i = 0; i + 1 < 8; ++i) qz.c[i + 1] = mm.q_of_z.c[i];
    QSeries zq(8);
    for (size_t i = 0; i + 1 < 8; ++i) zq.c[i + 1] = mm.z_of_q.c[i];
    auto round = zq.compose(qz);
    for (size_t i = 0; i < 8; ++i) REQUIRE(round.c[i] == (i == 1 ? Rat(1) : Rat(0)));
    // mirror map with f1 = 0 is the identity
    auto fbt = frobenius_basis(parse_operator("theta^4"), 6);
    auto mmt = mirror_map(fbt);
    for (size_t i = 0; i < 6; ++i) REQUIRE(mmt.q_of_z.c[i] == (i == 0 ? Rat(1) : Rat(0)));
}

TEST_CASE("Yukawa coupling by two routes, quintic and AESZ-28") {
    auto op = parse_operator(kQuintic);
    auto fb = frobenius_basis(op, 8);
    auto mm = mirror_map(fb);
    auto yuk = d3F0(op, fb, mm, Int(5));
    REQUIRE(yuk.c[0] == 5);
    REQUIRE(yuk.c[1] == 2875);
    REQUIRE(yuk.c[2] == 4876875);

    auto op28 = parse_operator(kAesz28);
    auto fb28 = frobenius_basis(op28, 8);
    auto yuk28 = d3F0(op28, fb28, mirror_map(fb28), Int(42));
    REQUIRE(yuk28.c[0] == 42);

    auto t4 = parse_operator("theta^4");
    auto fbt = frobenius_basis(t4, 6);
    auto yt = d3F0(t4, fbt, mirror_map(fbt), Int(1));
    for (size_t i = 1; i < 6; ++i) REQUIRE(yt.c[i] == 0);

    // a non-CY operator fails the two-route consistency check
    auto bad = parse_operator("theta^4 - z*theta");
    auto fbb = frobenius_basis(bad, 8);
    REQUIRE_THROWS(d3F0(bad, fbb, mirror_map(fbb), Int(1)));
}

TEST_CASE("genus-0 Lambert inversion") {
    QSeries s(3);
    s.c = {5, 2875, 4876875};
    InstantonTable tab;
    genus0_instantons(s, 2, tab);
    REQUIRE(tab.n00 == 5);
    REQUIRE(tab.genus0[1] == 2875);
    REQUIRE(tab.genus0[2] == 609250);  // (4876875 - 2875)/8

    QSeries zero(5);
    InstantonTable tz;
    genus0_instantons(zero, 4, tz);
    for (auto& [d, v] : tz.genus0) REQUIRE(v == 0);

    QSeries c(5);
    c.c[0] = 7;
    InstantonTable tc;
    genus0_instantons(c, 4, tc);
    REQUIRE(tc.n00 == 7);
    for (auto& [d, v] : tc.genus0) REQUIRE(v == 0);
}

TEST_CASE("Lambert inversion round-trips random integer tables") {
    std::mt19937 rng(20240817);
    std::uniform_int_distribution<long> dist(-1000000, 1000000);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<long, Int> table;
        for (long d = 1; d <= 8; ++d) table[d] = Int(dist(rng));
        Int n00 = Int(dist(rng));
        QSeries s = lambert_series(n00, table, 9);
        InstantonTable tab;
        genus0_instantons(s, 8, tab);
        REQUIRE(tab.n00 == n00);
        REQUIRE(tab.genus0_nonintegral.empty());
        for (long d = 1; d <= 8; ++d) REQUIRE(tab.genus0[d] == table[d]);
    }
}

TEST_CASE("normalized period structure of CY operators") {
    // 2 (f2/f0 - g^2/2) + d/dt (g^3/3 - g h2 + h3) is constant for operators
    // satisfying the CY identity (the y3/y0 structure); h_i = f_i/f0
    for (const char* text : {kQuintic, kAesz28}) {
        auto op = parse_operator(text);
        auto fb = frobenius_basis(op, 10);
        auto mm = mirror_map(fb);
        QSeries g = mm.g;
        QSeries h2 = fb.f[2] / fb.f[0];
        QSeries h3 = fb.f[3] / fb.f[0];
        QSeries A = h2 - g * g * Rat(1, 2);
        QSeries B = g * g * g * Rat(1, 3) - g * h2 + h3;
        // check in q: 2 A(z(q)) + theta_q B(z(q)) == const
        QSeries Aq = to_q_series(A, mm);
        QSeries Bq = to_q_series(B, mm);
        QSeries check = Aq * Rat(2) + Bq.theta();
        for (size_t i = 1; i < check.len(); ++i) REQUIRE(check.c[i] == 0);
    }
}
