#include <catch2/catch_amalgamated.hpp>

#include <cymono/opcore.hpp>

using namespace cymono;

namespace {

// Independent oracle for theta -> d/dz rewriting: an operator is a list of
// terms a(z) (d/dz)^i; applying theta = z d/dz term by term uses only the
// product rule, no Stirling numbers.
using TermList = std::map<int, QPoly>;  // derivative order -> coefficient

TermList apply_theta(const TermList& t) {
    TermList out;
    for (const auto& [i, a] : t) {
        QPoly za = QPoly::x() * a;            // z * a
        QPoly zap = QPoly::x() * a.derivative();  // z * a'
        out[i] += zap;
        out[i + 1] += za;
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

TermList theta_power(int k) {
    TermList t;
    t[0] = QPoly::constant(Rat(1));
    for (int i = 0; i < k; ++i) t = apply_theta(t);
    return t;
}

const char* kQuintic = "theta^4 - 5*z*(5*theta+1)*(5*theta+2)*(5*theta+3)*(5*theta+4)";
const char* kAesz28 =
    "theta^4 - z*(65*theta^4 + 130*theta^3 + 105*theta^2 + 40*theta + 6)"
    " + 4*z^2*(4*theta+3)*(theta+1)^2*(4*theta+5)";
const char* kAesz29 =
    "theta^4 - 2*z*(2*theta+1)^2*(17*theta^2+17*theta+5)"
    " + 4*z^2*(2*theta+1)*(theta+1)^2*(2*theta+3)";

}  // namespace

TEST_CASE("parser produces the expected theta-form coefficients") {
    auto op = parse_operator(kAesz29);
    REQUIRE(op.form == OpForm::theta);
    // theta^4 coefficient: 1 - 136 z + 16 z^2
    REQUIRE(op.coeffs[4] == QPoly(std::vector<Rat>{1, -136, 16}));
    // theta^0 coefficient: -10 z + 12 z^2
    REQUIRE(op.coeffs[0] == QPoly(std::vector<Rat>{0, -10, 12}));

    auto mono = parse_operator("theta^4");
    for (int i = 0; i < 4; ++i) REQUIRE(mono.coeffs[i].is_zero());
    REQUIRE(mono.coeffs[4] == QPoly::constant(Rat(1)));
}

TEST_CASE("parser reports syntax errors with their position") {
    REQUIRE_THROWS_AS(parse_operator("theta^4 - (2*theta+1"), ParseError);
    try {
        parse_operator("theta^4 - (2*theta+1");
    } catch (const ParseError& e) {
        REQUIRE(e.position == 10);  // the unclosed parenthesis
    }
    REQUIRE_THROWS_WITH(parse_operator("theta^3 + z"),
                        Catch::Matchers::ContainsSubstring("unsupported order"));
    REQUIRE_THROWS(parse_operator("theta^4 + $"));
}

TEST_CASE("round trip parse -> print -> parse is the identity on coefficients") {
    for (const char* text : {kQuintic, kAesz28, kAesz29}) {
        auto op = parse_operator(text);
        auto reparsed = parse_operator(to_string(op));
        REQUIRE(reparsed.form == op.form);
        for (int i = 0; i <= 4; ++i) REQUIRE(reparsed.coeffs[i] == op.coeffs[i]);
    }
}

TEST_CASE("theta to d/dz conversion matches the product-rule oracle") {
    // theta^4 = z^4 D^4 + 6 z^3 D^3 + 7 z^2 D^2 + z D
    auto t4 = convert_form(parse_operator("theta^4"), OpForm::dz);
    TermList oracle = theta_power(4);
    for (int i = 0; i <= 4; ++i) {
        QPoly expect = oracle.count(i) ? oracle[i] : QPoly();
        REQUIRE(t4.coeffs[i] == expect);
    }
    REQUIRE(t4.coeffs[4] == QPoly(std::vector<Rat>{0, 0, 0, 0, 1}));
    REQUIRE(t4.coeffs[3] == QPoly(std::vector<Rat>{0, 0, 0, 6}));
    REQUIRE(t4.coeffs[2] == QPoly(std::vector<Rat>{0, 0, 7}));
    REQUIRE(t4.coeffs[1] == QPoly(std::vector<Rat>{0, 1}));

    // theta^2 = z^2 D^2 + z D
    auto t2full = convert_form(parse_operator("theta^4 + theta^2"), OpForm::dz);
    TermList o4 = theta_power(4), o2 = theta_power(2);
    for (int i = 0; i <= 4; ++i) {
        QPoly expect = (o4.count(i) ? o4[i] : QPoly()) + (o2.count(i) ? o2[i] : QPoly());
        REQUIRE(t2full.coeffs[i] == expect);
    }
}

TEST_CASE("conversion round trip preserves coefficients after clearing factors") {
    for (const char* text : {kQuintic, kAesz28, kAesz29}) {
        auto op = parse_operator(text);
        auto back = clear_common_factors(convert_form(convert_form(op, OpForm::dz), OpForm::theta));
        auto orig = clear_common_factors(op);
        for (int i = 0; i <= 4; ++i) REQUIRE(back.coeffs[i] == orig.coeffs[i]);
    }
}

TEST_CASE("singular points of the corpus operators") {
    PrecisionScope prec(64);
    auto qs = singular_points(parse_operator(kQuintic));
    REQUIRE(qs.size() == 3);
    REQUIRE(qs[0].rat() == 0);
    REQUIRE(qs[1].rat() == Rat(1, 3125));
    REQUIRE(qs[2].is_infinity());

    auto s28 = singular_points(parse_operator(kAesz28));
    REQUIRE(s28.size() == 4);
    REQUIRE(s28[0].rat() == 0);
    REQUIRE(s28[1].rat() == Rat(1, 64));
    REQUIRE(s28[2].rat() == 1);
    REQUIRE(s28[3].is_infinity());

    auto s29 = singular_points(parse_operator(kAesz29));
    REQUIRE(s29.size() == 4);
    REQUIRE(s29[0].rat() == 0);
    REQUIRE(s29[1].is_algebraic());
    REQUIRE(s29[1].minpoly() == QPoly(std::vector<Rat>{1, -136, 16}));
    REQUIRE(s29[2].is_algebraic());
    // zeta_1 < zeta_2, both real
    REQUIRE(s29[1].value().re < s29[2].value().re);
    REQUIRE(abs(s29[1].value().im) == 0);
}

TEST_CASE("indicial spectra match the published Riemann schemes") {
    PrecisionScope prec(64);
    auto op28 = parse_operator(kAesz28);
    auto sp = indicial_spectrum(op28, SingularPoint::rational(Rat(1, 64)));
    REQUIRE(sp.exponents == std::vector<Rat>{0, 1, 1, 2});
    REQUIRE(sp.is_conifold_spectrum());
    auto spinf = indicial_spectrum(op28, SingularPoint::infinity());
    REQUIRE(spinf.exponents == std::vector<Rat>{Rat(3, 4), 1, 1, Rat(5, 4)});

    auto op29 = parse_operator(kAesz29);
    auto pts = singular_points(op29);
    REQUIRE(indicial_spectrum(op29, pts[1]).is_conifold_spectrum());
    REQUIRE(indicial_spectrum(op29, pts[2]).is_conifold_spectrum());
    auto spinf29 = indicial_spectrum(op29, SingularPoint::infinity());
    REQUIRE(spinf29.exponents == std::vector<Rat>{Rat(1, 2), 1, 1, Rat(3, 2)});

    // any theta^4 + z(...) operator is MUM at 0
    REQUIRE(indicial_spectrum(op28, SingularPoint::rational(Rat(0))).is_mum());

    // ordinary points always give {0,1,2,3}
    auto ord = indicial_spectrum(op28, SingularPoint::rational(Rat(1, 7)));
    REQUIRE(ord.exponents == std::vector<Rat>{0, 1, 2, 3});
}

TEST_CASE("Fuchs relation holds on the corpus") {
    PrecisionScope prec(64);
    for (const char* text : {kQuintic, kAesz28, kAesz29}) {
        auto op = parse_operator(text);
        Rat total = 0;
        for (const auto& sp : riemann_scheme(op).points) {
            Rat s = 0;
            for (const auto& e : sp.spectrum.exponents) s += e;
            total += s - 6;
        }
        REQUIRE(total == -12);
    }
}

TEST_CASE("discriminant factorizations") {
    PrecisionScope prec(64);
    auto dq = discriminant_factorization(parse_operator(kQuintic));
    REQUIRE(dq.z_power == 4);
    REQUIRE(dq.factors.size() == 1);
    REQUIRE(dq.factors[0].delta == QPoly(std::vector<Rat>{-1, 3125}));
    REQUIRE(dq.factors[0].multiplicity == 1);

    auto d29 = discriminant_factorization(parse_operator(kAesz29));
    REQUIRE(d29.factors.size() == 1);
    REQUIRE(d29.factors[0].delta == QPoly(std::vector<Rat>{1, -136, 16}));

    auto t4 = discriminant_factorization(parse_operator("theta^4"));
    REQUIRE(t4.factors.empty());

    // the AESZ-222 discriminant has a double rational root at 1/3
    auto op222 = parse_operator(
        "theta^4 - z*(295*theta^4+572*theta^3+424*theta^2+138*theta+17)"
        " + 2*z^2*(843*theta^4+744*theta^3-473*theta^2-481*theta-101)"
        " - 2*z^3*(1129*theta^4-516*theta^3-725*theta^2-159*theta+4)"
        " - 3*z^4*(173*theta^4+352*theta^3+290*theta^2+114*theta+18)"
        " + 3^2*z^5*(theta+1)^4");
    auto d222 = discriminant_factorization(op222);
    bool found_double = false;
    for (const auto& f : d222.factors)
        if (f.delta == QPoly(std::vector<Rat>{-1, 3}) && f.multiplicity == 2) found_double = true;
    REQUIRE(found_double);
    // product z^4 (1-3z)^2 (z^3 - 57 z^2 - 289 z + 1) reproduces a4 up to a constant
    QPoly prod = QPoly::constant(Rat(1));
    for (const auto& f : d222.factors)
        for (int k = 0; k < f.multiplicity; ++k) prod *= f.delta;
    QPoly a4 = dz_coeffs(op222)[4];
    QPoly shifted = prod.times_x_power(static_cast<size_t>(d222.z_power));
    REQUIRE(primitive_part(shifted) == primitive_part(a4));
}

TEST_CASE("Calabi-Yau coefficient identity") {
    REQUIRE(check_cy_condition(parse_operator(kQuintic)).holds);
    REQUIRE(check_cy_condition(parse_operator(kAesz28)).holds);
    auto bad = check_cy_condition(parse_operator("theta^4 - z*theta"));
    REQUIRE_FALSE(bad.holds);
    REQUIRE_FALSE(bad.residual.is_zero());
}

TEST_CASE("rational polynomial factorization utilities") {
    // squarefree split with rational roots
    QPoly p = QPoly(std::vector<Rat>{-1, 3}) * QPoly(std::vector<Rat>{-1, 3}) *
              QPoly(std::vector<Rat>{1, 0, 1});
    auto fs = factor_rational(p);
    REQUIRE(fs.size() == 2);
    // irreducible quadratic with rational-square discriminant must split
    QPoly q = QPoly(std::vector<Rat>{-1, 1}) * QPoly(std::vector<Rat>{-2, 1});
    auto fq = factor_rational(q);
    REQUIRE(fq.size() == 2);
    // quartic = product of two irrational-root quadratics over Q
    QPoly quartic = QPoly(std::vector<Rat>{1, -4, 1}) * QPoly(std::vector<Rat>{2, -6, 1});
    auto f4 = factor_rational(quartic);
    REQUIRE(f4.size() == 2);
}
