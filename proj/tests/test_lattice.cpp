#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <cymono/lattice.hpp>

using namespace cymono;

namespace {

QMat from_rows(std::initializer_list<std::initializer_list<long>> rows) {
    QMat m(4, 4);
    size_t i = 0;
    for (auto& r : rows) {
        size_t j = 0;
        for (long v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

// published AESZ-28 matrices (Doran-Morgan basis)
QMat published_t1() {
    return from_rows({{37, 12, -252, 156}, {-126, -41, 882, -546}, {-12, -4, 85, -52},
                      {-18, -6, 126, -77}});
}

CMat to_cmat(const QMat& q) {
    CMat m(4);
    for (size_t i = 0; i < 4; ++i)
        for (size_t j = 0; j < 4; ++j) m(i, j) = to_cplx(q(i, j));
    return m;
}

std::vector<Int> iv(std::initializer_list<long> v) {
    std::vector<Int> out;
    for (long x : v) out.emplace_back(x);
    return out;
}

}  // namespace

TEST_CASE("continued-fraction rationalization") {
    PrecisionScope prec(40);
    REQUIRE(rationalize(Real("0.5"), Int(1000), Real("1e-12")) == Rat(1, 2));
    REQUIRE(rationalize(Real("-0.33333333333333333333333333"), Int(1000), Real("1e-20")) ==
            Rat(-1, 3));
    Real sqrt2 = sqrt(Real(2));
    REQUIRE_THROWS(rationalize(sqrt2, Int(1000000), Real("1e-20")));
    REQUIRE(rationalize(Real(42), Int(10), Real("1e-20")) == Rat(42));
}

TEST_CASE("vanishing vector extraction") {
    PrecisionScope prec(60);
    CMat s = to_cmat(s_dm(Int(14)));
    auto v = extract_vanishing_vector(s);
    // direction (0, -14, -1, -1)/norm: proportional to the S_DM image
    REQUIRE(abs(v[0]) < Real("1e-40"));
    REQUIRE(abs(v[1] / v[2] - Cplx(Real(14))) < Real("1e-40"));
    REQUIRE(abs(v[3] / v[2] - Cplx(Real(1))) < Real("1e-40"));

    REQUIRE_THROWS_WITH(extract_vanishing_vector(CMat::identity(4)),
                        Catch::Matchers::ContainsSubstring("Id"));
    // rank-2 deviation: the MUM form
    REQUIRE_THROWS_WITH(extract_vanishing_vector(to_cmat(t_dm(Int(5)))),
                        Catch::Matchers::ContainsSubstring("rank"));
}

TEST_CASE("invariant form from standard generators") {
    auto result = invariant_form({t_dm(Int(42)), s_dm(Int(14)), published_t1()});
    REQUIRE(result.unique);
    QMat q = result.q;
    if (q(0, 3) < 0)
        for (auto& v : q.a) v = -v;
    REQUIRE(q == q_dm(Int(14)));

    // identity alone leaves the full 6-dimensional antisymmetric space
    auto degenerate = invariant_form({QMat::identity(4)});
    REQUIRE_FALSE(degenerate.unique);
}

TEST_CASE("symplectic invariance of the standard forms") {
    for (auto [d, k] : std::vector<std::pair<long, long>>{{5, 5}, {42, 14}, {24, 10}}) {
        QMat q = q_dm(Int(k));
        for (const QMat& m : {t_dm(Int(d)), s_dm(Int(k))}) {
            REQUIRE(m.transpose() * q * m == q);
        }
    }
}

TEST_CASE("standardize: synthetic numerical lattice is recovered exactly") {
    PrecisionScope prec(100);
    // build a synthetic rep from exact integral matrices + 1e-80 noise
    QMat t = t_dm(Int(42)), s = s_dm(Int(14)), t1 = published_t1();
    QMat prod = t1 * (s * t);
    QMat minf = q_inverse(prod);
    // conjugate by a harmless rational basis to hide the integral structure
    QMat g(4, 4);
    g(0, 0) = Rat(2, 3); g(0, 1) = 1; g(1, 1) = Rat(5, 7); g(1, 3) = Rat(-1, 2);
    g(2, 2) = 3; g(2, 0) = Rat(1, 5); g(3, 3) = Rat(7, 2); g(3, 1) = 1;
    QMat gi = q_inverse(g);
    MonodromyRep rep;
    rep.digits = 100;
    rep.points = {SingularPoint::rational(Rat(0)), SingularPoint::rational(Rat(1, 64)),
                  SingularPoint::rational(Rat(1))};
    rep.values = {Cplx(Real(0)), to_cplx(Rat(1, 64)), to_cplx(Rat(1))};
    Real noise = pow10(-80);
    for (const QMat& m : {gi * t * g, gi * s * g, gi * t1 * g}) {
        CMat c = to_cmat(m);
        c(1, 2) += Cplx(noise, -noise);
        c(3, 0) += Cplx(-noise, noise);
        rep.matrices.push_back(c);
    }
    CMat p = CMat::identity(4);
    for (auto& m : rep.matrices) p = m * p;
    rep.m_infinity = inverse(p);

    RiemannScheme scheme;
    SpectrumResult mum;
    mum.exponents = {0, 0, 0, 0};
    SpectrumResult coni;
    coni.exponents = {0, 1, 1, 2};
    scheme.points.push_back({rep.points[0], mum, false});
    scheme.points.push_back({rep.points[1], coni, false});
    scheme.points.push_back({rep.points[2], coni, false});

    auto lattice = reconstruct_lattice(rep, scheme);
    REQUIRE(lattice.d == 42);
    REQUIRE(lattice.k == 14);
    REQUIRE(lattice.c2h == 84);
    REQUIRE(lattice.integral);
    REQUIRE(lattice.standardized[0] == t);
    REQUIRE(lattice.standardized[1] == s);
    REQUIRE(lattice.standardized[2] == t1);
    REQUIRE(lattice.q == q_dm(Int(14)));

    // product relation preserved exactly in the standardized matrices
    QMat acc = QMat::identity(4);
    for (auto& m : lattice.standardized) acc = m * acc;
    REQUIRE((acc * lattice.standardized_minf).is_identity());
}

TEST_CASE("standardize is idempotent on an already-standard pair") {
    PrecisionScope prec(60);
    LatticeResult r;
    r.rational = {t_dm(Int(24)), s_dm(Int(10))};
    QMat prod = s_dm(Int(10)) * t_dm(Int(24));
    r.rational_minf = q_inverse(prod);
    standardize(r, 0, 1);
    REQUIRE(r.d == 24);
    REQUIRE(r.k == 10);
    REQUIRE(r.standardized[0] == t_dm(Int(24)));
    REQUIRE(r.standardized[1] == s_dm(Int(10)));
    REQUIRE(r.dm_transform.is_identity());
}

TEST_CASE("standardize rejects incompatible pairs") {
    PrecisionScope prec(60);
    LatticeResult r;
    // u = image of S_DM - Id is killed by (T-Id)^3 when T is the inverse MUM
    r.rational = {q_inverse(t_dm(Int(5))) * q_inverse(t_dm(Int(5))), s_dm(Int(5))};
    // that first matrix is unipotent but its pairing data gives negative d
    QMat prod = r.rational[1] * r.rational[0];
    r.rational_minf = q_inverse(prod);
    REQUIRE_THROWS_AS(standardize(r, 0, 1), StandardizeError);
}

TEST_CASE("Picard-Lefschetz classification of the published matrices") {
    QMat q = q_dm(Int(14));
    auto pl_s = classify_pl(s_dm(Int(14)), q);
    REQUIRE(pl_s.kind == PLEntry::Kind::conifold_like);
    REQUIRE(pl_s.lambda == 1);
    REQUIRE(pl_s.v == iv({0, 14, 1, 1}));

    auto pl_t1 = classify_pl(published_t1(), q);
    REQUIRE(pl_t1.kind == PLEntry::Kind::conifold_like);
    REQUIRE(pl_t1.lambda == 2);
    REQUIRE(pl_t1.v == iv({6, -21, -2, -3}));

    REQUIRE(classify_pl(QMat::identity(4), q).kind == PLEntry::Kind::identity);
    REQUIRE(classify_pl(t_dm(Int(42)), q).kind == PLEntry::Kind::mum);

    // M(alpha) = alpha - lambda <v,alpha> v, <v,alpha> = alpha^T Q v, exactly
    std::vector<Rat> vr;
    for (auto& x : pl_t1.v) vr.emplace_back(x);
    auto qv = q.apply(vr);
    QMat m = published_t1();
    for (size_t j = 0; j < 4; ++j)
        for (size_t i = 0; i < 4; ++i) {
            Rat expect = (i == j ? 1 : 0) - Rat(pl_t1.lambda) * qv[j] * vr[i];
            REQUIRE(m(i, j) == expect);
        }
}

TEST_CASE("S_{lambda,v} composition law") {
    // S_{l,v} . S_{l',v} = S_{l+l',v}
    QMat q = q_dm(Int(14));
    std::mt19937 rng(7);
    std::uniform_int_distribution<long> dist(-5, 5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Rat> v = {Rat(dist(rng)), Rat(dist(rng)), Rat(dist(rng)), Rat(dist(rng))};
        bool zero = true;
        for (auto& x : v) zero = zero && x == 0;
        if (zero) continue;
        long l1 = std::abs(dist(rng)) + 1, l2 = std::abs(dist(rng)) + 1;
        auto make = [&](long l) {
            QMat m = QMat::identity(4);
            auto qv = q.apply(v);
            for (size_t i = 0; i < 4; ++i)
                for (size_t j = 0; j < 4; ++j) m(i, j) -= Rat(l) * qv[j] * v[i];
            return m;
        };
        REQUIRE(make(l1) * make(l2) == make(l1 + l2));
    }
}

TEST_CASE("lattice generation fails gracefully on degenerate input") {
    PrecisionScope prec(60);
    MonodromyRep rep;
    rep.digits = 60;
    rep.matrices = {CMat::identity(4)};
    std::vector<Cplx> v0 = {Cplx(Real(1)), Cplx(Real(0)), Cplx(Real(0)), Cplx(Real(0))};
    REQUIRE_THROWS_WITH(generate_lattice_bases(rep, v0),
                        Catch::Matchers::ContainsSubstring("lattice generation failed"));
}

TEST_CASE("stabilizer of the standard pair is only +-identity") {
    auto stab = dm_stabilizer(Int(42), Int(14), 1);
    // every element acts trivially by conjugation
    for (const auto& x : stab) {
        bool plus = x == QMat::identity(4);
        QMat neg = QMat::identity(4);
        for (auto& v : neg.a) v = -v;
        bool minus = x == neg;
        REQUIRE((plus || minus));
    }
}

TEST_CASE("grouping by invariants") {
    std::map<long, Int> tab1 = {{1, Int(210)}, {2, Int(1176)}};
    std::map<long, Int> tab2 = {{1, Int(210)}, {2, Int(1176)}};
    std::map<long, Int> tab3 = {{1, Int(2875)}};
    auto groups = group_by_invariants({{{Int(42), Int(84)}, tab1},
                                       {{Int(5), Int(50)}, tab3},
                                       {{Int(42), Int(84)}, tab2}});
    REQUIRE(groups.size() == 2);
    REQUIRE(groups[0].d == 5);
    REQUIRE(groups[1].members.size() == 2);
    REQUIRE(groups[1].genus0_equal);
    REQUIRE(group_by_invariants({}).empty());
}
