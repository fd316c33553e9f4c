#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include <cymono/pipeline.hpp>

using namespace cymono;

namespace {

std::string write_temp(const std::string& content) {
    std::string path = "cymono_test_corpus.jsonl";
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("corpus loading") {
    auto path = write_temp(
        "# comment\n"
        "{\"id\": \"a\", \"operator\": \"theta^4\"}\n"
        "\n"
        "{\"id\": \"b\", \"operator\": \"theta^4 - z*theta^2\", \"metadata\": {\"k\": \"v\"}}\n");
    auto recs = load_corpus(path);
    REQUIRE(recs.size() == 2);
    REQUIRE(recs[0].id == "a");
    REQUIRE(recs[1].metadata.at("k") == "v");
    std::remove(path.c_str());

    auto dup = write_temp(
        "{\"id\": \"a\", \"operator\": \"theta^4\"}\n"
        "{\"id\": \"a\", \"operator\": \"theta^4\"}\n");
    REQUIRE_THROWS_WITH(load_corpus(dup), Catch::Matchers::ContainsSubstring("duplicate id 'a'"));
    std::remove(dup.c_str());

    auto empty = write_temp("");
    REQUIRE(load_corpus(empty).empty());
    std::remove(empty.c_str());
}

TEST_CASE("order-3 operators are a hard input error") {
    EquationRecord rec{"bad", "theta^3 - z", {}};
    PipelineOptions opt;
    opt.digits = 30;
    REQUIRE_THROWS(run_pipeline(rec, opt));
}

TEST_CASE("no conifold candidate: flagged, no fabricated invariants") {
    // hypergeometric with exponents (1/7, 2/7, 3/7, 4/7): the finite singular
    // point has spectrum {0, 1, 11/7, 2}, no {0,1,1,2} point exists
    EquationRecord rec{"no-conifold",
                       "theta^4 - z*(7*theta+1)*(7*theta+2)*(7*theta+3)*(7*theta+4)", {}};
    PipelineOptions opt;
    opt.digits = 30;
    auto result = run_pipeline(rec, opt);
    REQUIRE(result.flags == std::vector<std::string>{"noConifoldCandidate"});
    REQUIRE_FALSE(result.have_invariants);
    REQUIRE(result.genus0.empty());
    REQUIRE(result.genus1.empty());
}

TEST_CASE("pipeline determinism: identical record and options give identical output") {
    EquationRecord rec{"quintic",
                       "theta^4 - 5*z*(5*theta+1)*(5*theta+2)*(5*theta+3)*(5*theta+4)", {}};
    PipelineOptions opt;
    opt.digits = 40;
    opt.order = 4;
    opt.estimate_precision = false;
    auto r1 = run_pipeline(rec, opt);
    auto r2 = run_pipeline(rec, opt);
    REQUIRE(serialize_result(r1).dump() == serialize_result(r2).dump());
}

TEST_CASE("doubling the precision changes no integer field") {
    EquationRecord rec{"quintic",
                       "theta^4 - 5*z*(5*theta+1)*(5*theta+2)*(5*theta+3)*(5*theta+4)", {}};
    PipelineOptions opt;
    opt.digits = 40;
    opt.order = 3;
    opt.estimate_precision = false;
    auto r1 = run_pipeline(rec, opt);
    opt.digits = 80;
    auto r2 = run_pipeline(rec, opt);
    REQUIRE(r1.h3 == r2.h3);
    REQUIRE(r1.c2h == r2.c2h);
    REQUIRE(r1.kdim == r2.kdim);
    REQUIRE(r1.c3_conifold == r2.c3_conifold);
    REQUIRE(r1.genus0 == r2.genus0);
    REQUIRE(r1.genus1 == r2.genus1);
    for (size_t i = 0; i < r1.points.size(); ++i)
        REQUIRE(r1.points[i].matrix == r2.points[i].matrix);
}

TEST_CASE("quintic pipeline record content and serialization round trip") {
    EquationRecord rec{"quintic",
                       "theta^4 - 5*z*(5*theta+1)*(5*theta+2)*(5*theta+3)*(5*theta+4)", {}};
    PipelineOptions opt;
    opt.digits = 40;
    opt.order = 3;
    opt.estimate_precision = false;
    auto r = run_pipeline(rec, opt);
    REQUIRE(r.flags.empty());
    REQUIRE(r.have_invariants);
    REQUIRE(r.h3 == 5);
    REQUIRE(r.c2h == 50);
    REQUIRE(r.kdim == 5);
    REQUIRE(r.lattice_integral);
    REQUIRE(r.c3_conifold.value() == -200);
    REQUIRE(r.c3_genus1.value() == -200);
    REQUIRE(r.genus0.at(1) == 2875);
    REQUIRE(r.cy_condition);
    Json j = serialize_result(r);
    // parse back and re-dump: byte-identical (deterministic serialization)
    Json j2 = Json::parse(j.dump());
    REQUIRE(j.dump() == j2.dump());
    REQUIRE(j["invariants"]["H3"] == "5");

    // table report has one row with the right invariants
    std::ostringstream os;
    emit_report({r}, "table", os);
    REQUIRE(os.str().find("quintic") != std::string::npos);
    REQUIRE(os.str().find("-200") != std::string::npos);
    std::ostringstream os2;
    emit_report({}, "table", os2);
    REQUIRE(os2.str().find("no results") != std::string::npos);
}
