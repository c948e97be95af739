#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covstat/bootstrap.hpp"
#include "covstat/csv.hpp"
#include "covstat/dgp.hpp"
#include "covstat/errors.hpp"
#include "covstat/mc.hpp"
#include "covstat/parallel.hpp"
#include "covstat/rng.hpp"

namespace {

using namespace covstat;

// stream-purpose tags; generation and bootstrap substreams never collide
constexpr std::uint64_t tag_generate = 0x67656eULL;
constexpr std::uint64_t tag_bootstrap = 0xb007ULL;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmtg(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

struct TestArgs {
    std::string input;
    std::string column;
    std::string model;
    std::string errors = "gauss";
    std::size_t t = 0;
    bool alt_burnin = false;

    std::string basis = "walsh";
    std::string grid_case = "case1";
    std::size_t hmax = 0;
    std::size_t kmax = 0;
    bool explicit_grid = false;

    std::string variant = "plain";
    double penalty_a = 0.25;
    std::size_t m = 200;
    std::size_t block = 0;
    double level = 0.05;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::string centering = "product";

    std::string out_diff;
    std::string out_draws;
};

Centering centering_from_name(const std::string& name) {
    if (name == "full") return Centering::FullTerm;
    if (name == "product") return Centering::ProductOnly;
    throw ConfigError("unknown centering: " + name + " (expected full or product)");
}

int cmd_test(const TestArgs& a) {
    std::vector<double> raw;
    if (!a.input.empty()) {
        std::optional<std::string> col;
        if (!a.column.empty()) col = a.column;
        raw = read_series_file(a.input, col);
    } else {
        if (a.model.empty() || a.t == 0)
            throw ConfigError("test needs --input FILE or --model NAME with --t T");
        DgpSpec spec{model_from_name(a.model), error_from_name(a.errors), a.t, a.alt_burnin};
        Rng rng = Rng::stream(a.seed, tag_generate);
        raw = generate(spec, rng);
    }
    if (raw.size() < 16)
        throw InputError("input series too short: need at least 16 observations, got " +
                         std::to_string(raw.size()));
    const Series x = center(std::move(raw));
    const std::size_t T = x.values.size();

    std::vector<BasisKind> kinds;
    const BasisChoice choice = basis_choice_from_name(a.basis);
    if (choice == BasisChoice::Walsh || choice == BasisChoice::Both)
        kinds.push_back(BasisKind::Walsh);
    if (choice == BasisChoice::Haar || choice == BasisChoice::Both)
        kinds.push_back(BasisKind::HaarComposite);

    std::vector<BasisMatrix> mats;
    std::vector<BasisPlan> plans;
    mats.reserve(kinds.size());
    for (BasisKind kind : kinds) {
        Grid g;
        if (a.explicit_grid) {
            g = Grid{a.hmax, a.kmax};
        } else {
            const SchedulePair sp = schedule_lookup(case_from_name(a.grid_case), kind, T);
            g = Grid{sp.max_lag, sp.max_counter};
            if (sp.clipped)
                std::cerr << "note: counter bound clipped to " << sp.max_counter
                          << " (finer counters alias at T = " << T << ")\n";
        }
        mats.push_back(basis_matrix(kind, g.max_counter, T));
        plans.push_back({&mats.back(), g});
    }

    BootstrapConfig boot;
    boot.m = a.m;
    if (a.block > 0) boot.block_size = a.block;
    boot.centering = centering_from_name(a.centering);
    boot.seed = mix_keys(a.seed, tag_bootstrap);
    boot.workers = default_workers(a.workers);

    const std::vector<VariantSpec> variants{
        VariantSpec::make(variant_from_name(a.variant), a.penalty_a)};
    const TestResult res = run_test_multi(x, plans, variants, boot, a.level)[0];

    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";

    std::cout << "variant\t" << variant_name(res.variant.kind) << "\n";
    std::cout << "basis\t" << a.basis << "\n";
    std::cout << "basis_argmax\t"
              << (res.basis == BasisKind::Walsh ? "walsh" : "haar") << "\n";
    std::cout << "T\t" << T << "\n";
    std::cout << "hmax\t" << res.grid.max_lag << "\n";
    std::cout << "kmax\t" << res.grid.max_counter << "\n";
    std::cout << "block\t" << res.block_size << "\n";
    std::cout << "m\t" << a.m << "\n";
    std::cout << "seed\t" << a.seed << "\n";
    std::cout << "statistic\t" << fmt17(res.statistic) << "\n";
    std::cout << "p_value\t" << fmt17(res.p_value) << "\n";
    std::cout << "level\t" << fmtg(a.level) << "\n";
    std::cout << "argmax_h\t" << res.argmax.h << "\n";
    std::cout << "argmax_k\t" << res.argmax.k << "\n";
    std::cout << "decision\t" << (res.reject ? "reject" : "fail to reject") << "\n";

    if (!a.out_diff.empty()) write_diff_tsv_file(a.out_diff, res.diff);
    if (!a.out_draws.empty()) write_draws_tsv_file(a.out_draws, res.draws);
    return 0;
}

int cmd_gen(const std::string& model, const std::string& errors, std::size_t t,
            std::uint64_t seed, bool alt_burnin, const std::string& out) {
    DgpSpec spec{model_from_name(model), error_from_name(errors), t, alt_burnin};
    Rng rng = Rng::stream(seed, tag_generate);
    const std::vector<double> x = generate(spec, rng);
    if (out.empty())
        write_series_csv(std::cout, x);
    else
        write_series_csv_file(out, x);
    return 0;
}

int cmd_basis(const std::string& kind, std::size_t k, std::size_t t, const std::string& out) {
    BasisKind bk;
    if (kind == "walsh") bk = BasisKind::Walsh;
    else if (kind == "haar") bk = BasisKind::HaarComposite;
    else throw ConfigError("unknown basis kind: " + kind + " (expected walsh or haar)");
    const BasisMatrix b = basis_matrix(bk, k, t);
    if (out.empty()) {
        write_basis_tsv(std::cout, b);
    } else {
        std::ofstream f(out);
        if (!f) throw InputError("cannot open output file: " + out);
        write_basis_tsv(f, b);
    }
    return 0;
}

int cmd_mc(const std::string& config_path, std::optional<std::uint64_t> seed, unsigned workers,
           bool full_scale, const std::string& out, bool human) {
    McConfig cfg;
    if (config_path == "-") {
        cfg = parse_mc_config(std::cin);
    } else {
        std::ifstream f(config_path);
        if (!f) throw InputError("cannot open config file: " + config_path);
        cfg = parse_mc_config(f);
    }
    if (seed) cfg.seed = *seed;
    cfg.workers = default_workers(workers);
    if (full_scale) {
        cfg.reps = 1000;
        cfg.bootstrap_m = 500;
    }

    const McReport report = run_mc(cfg);
    const std::string tsv = report_tsv(report);
    if (out.empty()) {
        std::cout << tsv;
    } else {
        std::ofstream f(out);
        if (!f) throw InputError("cannot open output file: " + out);
        f << tsv;
        if (!f) throw InputError("write failed: " + out);
    }
    if (human) std::cerr << report_human(report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bootstrapped max-correlation tests of covariance stationarity"};
    app.require_subcommand(1);

    TestArgs ta;
    CLI::App* test = app.add_subcommand("test", "Run the stationarity test on one series");
    auto* in_opt = test->add_option("--input", ta.input, "CSV file with the series");
    test->add_option("--column", ta.column, "column name or 0-based index for multi-column CSV")
        ->needs(in_opt);
    auto* model_opt =
        test->add_option("--model", ta.model, "generate the input from this model instead");
    model_opt->excludes(in_opt);
    test->add_option("--errors", ta.errors, "error kind for --model: gauss|t5|garch");
    test->add_option("--t", ta.t, "series length for --model");
    test->add_flag("--alt-burnin", ta.alt_burnin, "burn in alternatives over a doubled clock");
    test->add_option("--basis", ta.basis, "walsh|haar|both (both = max over bases)");
    test->add_option("--case", ta.grid_case, "grid schedule: case1|case2");
    auto* hmax_opt = test->add_option("--hmax", ta.hmax, "explicit max lag (with --kmax)");
    auto* kmax_opt = test->add_option("--kmax", ta.kmax, "explicit max counter (with --hmax)");
    hmax_opt->needs(kmax_opt);
    kmax_opt->needs(hmax_opt);
    test->add_option("--variant", ta.variant,
                     "plain|penalized|weighted|weighted-penalized|jww");
    test->add_option("--penalty-a", ta.penalty_a, "penalty exponent (default 0.25)");
    test->add_option("--m", ta.m, "bootstrap replications (default 200)");
    test->add_option("--block", ta.block, "block size (default floor(sqrt(T)) rule)");
    test->add_option("--level", ta.level, "significance level (default 0.05)");
    test->add_option("--seed", ta.seed, "master seed");
    test->add_option("--workers", ta.workers, "worker threads (0 = COVSTAT_WORKERS or 1)");
    test->add_option("--centering", ta.centering, "bootstrap centering: full|product");
    test->add_option("--out-diff", ta.out_diff, "write the scaled-difference matrix (TSV)");
    test->add_option("--out-draws", ta.out_draws, "write the bootstrap draws (TSV)");

    std::string gen_model, gen_errors = "gauss", gen_out;
    std::size_t gen_t = 0;
    std::uint64_t gen_seed = 0;
    bool gen_burnin = false;
    CLI::App* gen = app.add_subcommand("gen", "Generate one simulated series as CSV");
    gen->add_option("--model", gen_model, "null1..null4 or alt1..alt9")->required();
    gen->add_option("--errors", gen_errors, "gauss|t5|garch");
    gen->add_option("--t", gen_t, "series length")->required();
    gen->add_option("--seed", gen_seed, "seed");
    gen->add_flag("--alt-burnin", gen_burnin, "burn in alternatives over a doubled clock");
    gen->add_option("--out", gen_out, "output path (default stdout)");

    std::string basis_kind, basis_out;
    std::size_t basis_k = 0, basis_t = 0;
    CLI::App* basis = app.add_subcommand("basis", "Dump a basis matrix as TSV");
    basis->add_option("--kind", basis_kind, "walsh|haar")->required();
    basis->add_option("--k", basis_k, "number of rows (counters 1..K)")->required();
    basis->add_option("--t", basis_t, "number of grid points")->required();
    basis->add_option("--out", basis_out, "output path (default stdout)");

    std::string mc_config, mc_out;
    std::uint64_t mc_seed = 0;
    bool mc_seed_set = false, mc_full = false, mc_human = false;
    unsigned mc_workers = 0;
    CLI::App* mc = app.add_subcommand("mc", "Run a Monte Carlo experiment from a config file");
    mc->add_option("--config", mc_config, "key = value config file ('-' for stdin)")->required();
    mc->add_option("--seed", mc_seed, "override the config seed")
        ->each([&](const std::string&) { mc_seed_set = true; });
    mc->add_option("--workers", mc_workers, "worker threads (0 = COVSTAT_WORKERS or 1)");
    mc->add_flag("--full-scale", mc_full, "full experiment scale: reps=1000, m=500");
    mc->add_option("--out", mc_out, "TSV output path (default stdout)");
    mc->add_flag("--human", mc_human, "also print a readable summary to stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 4;
    }
    ta.explicit_grid = hmax_opt->count() > 0;

    try {
        if (*test) return cmd_test(ta);
        if (*gen) return cmd_gen(gen_model, gen_errors, gen_t, gen_seed, gen_burnin, gen_out);
        if (*basis) return cmd_basis(basis_kind, basis_k, basis_t, basis_out);
        if (*mc)
            return cmd_mc(mc_config,
                          mc_seed_set ? std::optional<std::uint64_t>(mc_seed) : std::nullopt,
                          mc_workers, mc_full, mc_out, mc_human);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateSeriesError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
