#include <CLI11.hpp>

#include <cymono/pipeline.hpp>

#include <fstream>
#include <iostream>

using namespace cymono;

namespace {

int cmd_analyze(const std::string& text) {
    PrecisionScope prec(80);
    DifferentialOperator op = parse_operator(text);
    std::cout << "operator: " << to_string(op) << "\n";
    std::cout << "d/dz form: " << to_string(convert_form(op, OpForm::dz)) << "\n";
    CyCheck cy = check_cy_condition(op);
    std::cout << "Calabi-Yau coefficient identity: " << (cy.holds ? "holds" : "fails") << "\n";
    DiscriminantFactorization disc = discriminant_factorization(op);
    std::cout << "leading coefficient: z^" << disc.z_power;
    for (const auto& f : disc.factors) {
        std::cout << " * (" << poly_to_string(f.delta, "z") << ")";
        if (f.multiplicity > 1) std::cout << "^" << f.multiplicity;
    }
    std::cout << "  (up to a constant)\n";
    RiemannScheme scheme = riemann_scheme(op);
    std::cout << "Riemann scheme:\n";
    for (const auto& sp : scheme.points) {
        std::cout << "  " << (sp.location.is_infinity() ? "inf" : sp.location.str()) << " : {";
        bool first = true;
        for (const auto& e : sp.spectrum.exponents) {
            std::cout << (first ? "" : ", ") << e;
            first = false;
        }
        for (size_t i = 0; i < sp.spectrum.irrational.size(); ++i)
            std::cout << (first ? "" : ", ") << "non-rational";
        std::cout << "}";
        if (sp.spectrum.is_mum()) std::cout << "  (MUM)";
        if (sp.spectrum.is_conifold_spectrum()) std::cout << "  (conifold candidate)";
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"monodromy, integral lattices and instanton numbers for fourth-order "
                 "Calabi-Yau operators"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run the full pipeline over a corpus file");
    std::string corpus_path, output_path, format = "table";
    std::vector<std::string> only_ids;
    unsigned digits = 100;
    long order = 30;
    std::string max_den_str = "100000000";
    size_t word_length = 6;
    bool skip_genus1 = false;
    run->add_option("--corpus", corpus_path, "corpus file (JSON lines)")->required();
    run->add_option("--id", only_ids, "process only these ids (repeatable)");
    run->add_option("--digits", digits, "working precision in decimal digits");
    run->add_option("--order", order, "instanton series truncation order");
    run->add_option("--max-denominator", max_den_str, "continued-fraction denominator bound");
    run->add_option("--word-length", word_length, "monodromy word length bound for lattice search");
    run->add_flag("--skip-genus1", skip_genus1, "skip the genus-1 stage");
    run->add_option("--output", output_path, "write the report to a file instead of stdout");
    run->add_option("--format", format, "report format: table or machine")
        ->check(CLI::IsMember({"table", "machine"}));

    auto* analyze = app.add_subcommand("analyze", "local analysis of a single operator");
    std::string op_text;
    analyze->add_option("--operator", op_text, "operator expression in z and theta (or D)")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(op_text);

        PipelineOptions opt;
        opt.digits = digits;
        opt.order = order;
        opt.max_den = Int(max_den_str);
        opt.word_length = word_length;
        opt.skip_genus1 = skip_genus1;
        auto corpus = load_corpus(corpus_path);
        std::vector<ResultRecord> results;
        for (const auto& rec : corpus) {
            if (!only_ids.empty() &&
                std::find(only_ids.begin(), only_ids.end(), rec.id) == only_ids.end())
                continue;
            std::cerr << "[" << rec.id << "] running at " << digits << " digits...\n";
            try {
                results.push_back(run_pipeline(rec, opt));
                const auto& r = results.back();
                std::cerr << "[" << rec.id << "] done";
                if (r.have_invariants)
                    std::cerr << ": H^3=" << r.h3 << " c2.H=" << r.c2h
                              << " c3=" << (r.c3_conifold ? r.c3_conifold->str() : "?");
                for (const auto& f : r.flags) std::cerr << " [" << f << "]";
                std::cerr << "\n";
            } catch (const std::exception& e) {
                std::cerr << "[" << rec.id << "] input error: " << e.what() << "\n";
                return 2;
            }
        }
        if (!output_path.empty()) {
            std::ofstream out(output_path);
            if (!out) throw std::runtime_error("cannot open output file: " + output_path);
            emit_report(results, format, out);
        } else {
            emit_report(results, format, std::cout);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
