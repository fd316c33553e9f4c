#pragma once

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cymono/conifold.hpp"
#include "cymono/genus1.hpp"

namespace cymono {

using Json = nlohmann::ordered_json;

struct EquationRecord {
    std::string id;
    std::string operator_text;
    std::map<std::string, std::string> metadata;
};

struct PipelineOptions {
    unsigned digits = 100;
    long order = 30;           // instanton series truncation
    Int max_den = 100000000;   // continued-fraction denominator bound
    size_t word_length = 6;
    bool skip_genus1 = false;
    bool estimate_precision = true;
};

/// Everything the pipeline learned about one equation.  Partial results and
/// a status flag per defined failure mode; hard exceptions only escape for
/// malformed input.
struct ResultRecord {
    std::string id;
    std::vector<std::string> flags;
    std::vector<std::string> notes;
    unsigned digits = 0;
    double precision_estimate = 0;

    struct PointInfo {
        std::string location;
        std::vector<std::string> spectrum;
        bool apparent = false;
        std::string pl_kind;
        std::string lambda;
        std::vector<std::string> v;
        std::vector<std::vector<std::string>> matrix;  // standardized, rational entries
    };
    std::vector<PointInfo> points;  // finite points in order, then "inf"

    bool cy_condition = false;
    bool have_invariants = false;
    Int h3 = 0, c2h = 0, kdim = 0;
    bool lattice_integral = false;
    std::vector<std::vector<std::string>> q_form;
    std::optional<Int> c3_conifold;
    std::optional<Int> c3_genus1;
    std::map<long, Int> genus0;
    std::map<long, Int> genus1;
};

namespace pipedetail {

inline std::string mat_entry(const Rat& r) { return rat_to_string(r); }

inline std::vector<std::vector<std::string>> qmat_to_strings(const QMat& m) {
    std::vector<std::vector<std::string>> out;
    for (size_t i = 0; i < m.rows; ++i) {
        std::vector<std::string> row;
        for (size_t j = 0; j < m.cols; ++j) row.push_back(mat_entry(m(i, j)));
        out.push_back(std::move(row));
    }
    return out;
}

inline std::string spectrum_string(const Rat& r) { return rat_to_string(r); }

}  // namespace pipedetail

/// Full pipeline for one equation: local analysis, monodromy, lattice,
/// instantons.  Deterministic for fixed options.
inline ResultRecord run_pipeline(const EquationRecord& record, const PipelineOptions& opt = {}) {
    ResultRecord out;
    out.id = record.id;
    out.digits = opt.digits;
    DifferentialOperator op = parse_operator(record.operator_text, record.id);  // throws on bad input

    PrecisionScope prec(opt.digits + 15);
    RiemannScheme scheme = riemann_scheme(op);
    DiscriminantFactorization disc = discriminant_factorization(op);
    out.cy_condition = check_cy_condition(op).holds;
    if (!out.cy_condition) out.notes.push_back("operator fails the Calabi-Yau coefficient identity");
    for (const auto& sp : scheme.points) {
        ResultRecord::PointInfo info;
        info.location = sp.location.is_infinity() ? "inf" : sp.location.str();
        for (const auto& e : sp.spectrum.exponents) info.spectrum.push_back(pipedetail::spectrum_string(e));
        for (size_t i = 0; i < sp.spectrum.irrational.size(); ++i) info.spectrum.push_back("non-rational");
        out.points.push_back(std::move(info));
    }

    // conifold candidates are a precondition for the whole lattice pipeline
    std::vector<Cplx> finite_values;
    for (const auto& sp : scheme.points)
        if (!sp.location.is_infinity()) finite_values.push_back(sp.location.value());
    try {
        find_conifold_candidates(scheme, finite_values);
    } catch (const NoConifoldCandidate&) {
        out.flags.push_back("noConifoldCandidate");
        return out;
    }

    MonodromyOptions mo;
    mo.digits = opt.digits;
    mo.estimate_precision = opt.estimate_precision;
    MonodromyRep rep = monodromy_rep(op, mo);
    out.precision_estimate = rep.precision_estimate;

    LatticeOptions lo;
    lo.max_den = opt.max_den;
    lo.word_length = opt.word_length;
    LatticeResult lattice;
    try {
        lattice = reconstruct_lattice(rep, scheme, lo);
    } catch (const NoRationalLattice& e) {
        out.flags.push_back("noRationalLattice");
        out.notes.push_back(e.what());
        return out;
    }
    out.have_invariants = true;
    out.h3 = lattice.d;
    out.kdim = lattice.k;
    out.c2h = lattice.c2h;
    out.lattice_integral = lattice.integral;
    if (!lattice.integral) out.flags.push_back("nonIntegralLattice");
    out.q_form = pipedetail::qmat_to_strings(lattice.q);

    std::vector<PLEntry> classification;
    for (size_t i = 0; i < rep.points.size(); ++i) {
        PLEntry pl = lattice.integral ? classify_pl(lattice.standardized[i], lattice.q) : PLEntry{};
        classification.push_back(pl);
        auto& info = out.points[i];
        info.apparent = pl.kind == PLEntry::Kind::identity;
        if (lattice.integral) {
            info.pl_kind = pl.kind_name();
            info.lambda = pl.lambda.str();
            for (const auto& x : pl.v) info.v.push_back(x.str());
        }
        info.matrix = pipedetail::qmat_to_strings(lattice.standardized[i]);
    }
    out.points.back().matrix = pipedetail::qmat_to_strings(lattice.standardized_minf);
    if (lattice.integral)
        out.points.back().pl_kind = classify_pl(lattice.standardized_minf, lattice.q).kind_name();

    // instantons
    size_t series_order = static_cast<size_t>(opt.order) + 4;
    FrobeniusBasis fb = frobenius_basis(op, series_order);
    MirrorMap mm = mirror_map(fb);
    InstantonTable table;
    QSeries yukawa = d3F0(op, fb, mm, lattice.d);
    genus0_instantons(yukawa, opt.order, table);
    out.genus0 = table.genus0;
    if (!table.genus0_nonintegral.empty()) out.notes.push_back("non-integral genus-0 numbers");

    try {
        ConifoldPeriod cp = conifold_period(op, rep, lattice);
        out.c3_conifold = cp.c3;
        if (cp.not_closest_warning)
            out.notes.push_back("conifold point is not the singular point closest to the origin");
        if (cp.image_method_only)
            out.notes.push_back("conifold period: convergence discs do not overlap; image method only");
    } catch (const ConifoldError& e) {
        out.flags.push_back("c3Failed");
        out.notes.push_back(e.what());
    }

    if (!opt.skip_genus1) {
        try {
            ExponentAssignment exps = assign_exponents(disc, rep.points, classification);
            // c3 is solved independently from n1_1 = 0 and cross-checked
            // against the conifold period when both are available
            Genus1Result g1 = genus1_instantons(op, fb, mm, disc, exps, lattice.c2h,
                                                std::nullopt, table.genus0, opt.order);
            out.genus1 = g1.genus1;
            out.c3_genus1 = g1.c3;
            if (!g1.nonintegral.empty()) out.flags.push_back("nonIntegralN1");
            if (out.c3_conifold && g1.c3 != *out.c3_conifold)
                out.notes.push_back("c3 from genus 1 disagrees with the conifold period");
        } catch (const Genus1Error& e) {
            out.flags.push_back("genus1Aborted");
            out.notes.push_back(e.what());
        }
    }
    return out;
}

inline Json serialize_result(const ResultRecord& r) {
    Json j;
    j["id"] = r.id;
    j["flags"] = r.flags;
    j["digits"] = r.digits;
    {
        std::ostringstream os;
        os << std::fixed << std::setprecision(1) << r.precision_estimate;
        j["precisionEstimate"] = os.str();
    }
    j["cyCondition"] = r.cy_condition;
    Json pts = Json::array();
    for (const auto& p : r.points) {
        Json pj;
        pj["location"] = p.location;
        pj["spectrum"] = p.spectrum;
        pj["apparent"] = p.apparent;
        if (!p.pl_kind.empty()) pj["pl"] = p.pl_kind;
        if (!p.v.empty()) {
            pj["lambda"] = p.lambda;
            pj["v"] = p.v;
        }
        if (!p.matrix.empty()) pj["matrix"] = p.matrix;
        pts.push_back(pj);
    }
    j["points"] = pts;
    if (r.have_invariants) {
        Json inv;
        inv["H3"] = r.h3.str();
        inv["c2H"] = r.c2h.str();
        inv["k"] = r.kdim.str();
        if (r.c3_conifold) inv["c3Conifold"] = r.c3_conifold->str();
        if (r.c3_genus1) inv["c3Genus1"] = r.c3_genus1->str();
        j["invariants"] = inv;
        j["latticeIntegral"] = r.lattice_integral;
        j["Q"] = r.q_form;
    }
    if (!r.genus0.empty()) {
        Json g0;
        for (const auto& [d, v] : r.genus0) g0[std::to_string(d)] = v.str();
        j["genus0"] = g0;
    }
    if (!r.genus1.empty()) {
        Json g1;
        for (const auto& [d, v] : r.genus1) g1[std::to_string(d)] = v.str();
        j["genus1"] = g1;
    }
    j["notes"] = r.notes;
    return j;
}

/// Corpus files are JSON lines: {"id": ..., "operator": ..., "metadata": {...}}.
/// Blank lines and lines starting with # are skipped.
inline std::vector<EquationRecord> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    std::vector<EquationRecord> out;
    std::set<std::string> seen;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty() || trimmed[0] == '#') continue;
        Json j;
        try {
            j = Json::parse(trimmed);
        } catch (const std::exception& e) {
            throw std::runtime_error("corpus line " + std::to_string(lineno) +
                                     ": malformed JSON: " + e.what());
        }
        EquationRecord rec;
        if (!j.contains("id") || !j.contains("operator"))
            throw std::runtime_error("corpus line " + std::to_string(lineno) +
                                     ": record needs 'id' and 'operator'");
        rec.id = j["id"].get<std::string>();
        rec.operator_text = j["operator"].get<std::string>();
        if (j.contains("metadata"))
            for (auto& [k, v] : j["metadata"].items()) rec.metadata[k] = v.get<std::string>();
        if (!seen.insert(rec.id).second)
            throw std::runtime_error("corpus line " + std::to_string(lineno) + ": duplicate id '" +
                                     rec.id + "'");
        out.push_back(std::move(rec));
    }
    return out;
}

/// Machine format: one serialized record per line.  Table format: rows
/// sorted by (H^3, c2 H) with equal-invariant groups marked.
inline void emit_report(const std::vector<ResultRecord>& results, const std::string& format,
                        std::ostream& os) {
    if (format == "machine") {
        for (const auto& r : results) os << serialize_result(r).dump() << "\n";
        return;
    }
    if (format != "table") throw std::runtime_error("unknown report format: " + format);
    std::vector<std::pair<std::pair<Int, Int>, std::map<long, Int>>> keyed;
    std::vector<size_t> with_inv;
    for (size_t i = 0; i < results.size(); ++i)
        if (results[i].have_invariants) {
            keyed.push_back({{results[i].h3, results[i].c2h}, results[i].genus0});
            with_inv.push_back(i);
        }
    auto groups = group_by_invariants(keyed);
    os << std::left << std::setw(12) << "id" << std::right << std::setw(6) << "H^3" << std::setw(7)
       << "c2.H" << std::setw(7) << "c3" << std::setw(5) << "|H|" << std::setw(7) << "sings"
       << std::setw(7) << "group" << "  flags\n";
    size_t gid = 0;
    std::vector<std::string> group_of(results.size(), "");
    for (const auto& g : groups) {
        ++gid;
        for (size_t m : g.members) {
            std::string label = "g" + std::to_string(gid);
            if (g.members.size() > 1) label += g.genus0_equal ? "=" : "!";
            group_of[with_inv[m]] = label;
        }
    }
    std::vector<size_t> order(results.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const auto& ra = results[a];
        const auto& rb = results[b];
        if (ra.have_invariants != rb.have_invariants) return ra.have_invariants;
        if (ra.h3 != rb.h3) return ra.h3 < rb.h3;
        return ra.c2h < rb.c2h;
    });
    for (size_t idx : order) {
        const auto& r = results[idx];
        os << std::left << std::setw(12) << r.id << std::right;
        if (r.have_invariants) {
            os << std::setw(6) << r.h3.str() << std::setw(7) << r.c2h.str();
            std::string c3 = r.c3_conifold   ? r.c3_conifold->str()
                             : r.c3_genus1   ? r.c3_genus1->str()
                                             : "?";
            os << std::setw(7) << c3 << std::setw(5) << r.kdim.str();
        } else {
            os << std::setw(6) << "-" << std::setw(7) << "-" << std::setw(7) << "-" << std::setw(5)
               << "-";
        }
        os << std::setw(7) << (r.points.empty() ? 0 : r.points.size());
        os << std::setw(7) << (group_of[idx].empty() ? "-" : group_of[idx]);
        os << "  ";
        for (size_t i = 0; i < r.flags.size(); ++i) os << (i ? "," : "") << r.flags[i];
        os << "\n";
    }
    if (results.empty()) os << "(no results)\n";
}

}  // namespace cymono
