#include "covstat/mc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <memory>
#include <sstream>

#include "covstat/errors.hpp"
#include "covstat/parallel.hpp"

namespace covstat {

namespace {

// stream-purpose tags folded into the substream keys
constexpr std::uint64_t tag_generate = 0x67656eULL;  // series generation
constexpr std::uint64_t tag_bootstrap = 0xb007ULL;   // bootstrap seed
constexpr std::uint64_t tag_critical = 0xc41cULL;    // critical-value simulator

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

} // namespace

std::string case_name(ScheduleCase c) { return c == ScheduleCase::Case1 ? "case1" : "case2"; }

ScheduleCase case_from_name(const std::string& name) {
    if (name == "case1") return ScheduleCase::Case1;
    if (name == "case2") return ScheduleCase::Case2;
    throw ConfigError("unknown schedule case: " + name + " (expected case1 or case2)");
}

std::string basis_choice_name(BasisChoice b) {
    switch (b) {
    case BasisChoice::Walsh: return "walsh";
    case BasisChoice::Haar: return "haar";
    case BasisChoice::Both: return "both";
    }
    return "walsh";
}

BasisChoice basis_choice_from_name(const std::string& name) {
    if (name == "walsh") return BasisChoice::Walsh;
    if (name == "haar") return BasisChoice::Haar;
    if (name == "both") return BasisChoice::Both;
    throw ConfigError("unknown basis choice: " + name + " (expected walsh, haar, or both)");
}

SchedulePair schedule_lookup(ScheduleCase c, BasisKind basis, std::size_t T) {
    if (T < 16) throw ConfigError("schedule lookup needs T >= 16");

    struct Row {
        std::size_t T, H, K;
    };
    // published table, authoritative for these sample sizes
    static constexpr Row walsh_case1[] = {{64, 2, 4}, {128, 3, 5}, {256, 4, 6}, {512, 5, 8}};
    static constexpr Row walsh_case2[] = {{64, 14, 3}, {128, 20, 5}, {256, 30, 7}, {512, 42, 10}};
    static constexpr Row haar_case1[] = {{64, 2, 4}, {128, 3, 5}, {256, 4, 5}, {512, 5, 6}};
    static constexpr Row haar_case2[] = {{64, 14, 4}, {128, 20, 5}, {256, 30, 5}, {512, 42, 6}};

    const Row* table = basis == BasisKind::Walsh
                           ? (c == ScheduleCase::Case1 ? walsh_case1 : walsh_case2)
                           : (c == ScheduleCase::Case1 ? haar_case1 : haar_case2);
    for (std::size_t i = 0; i < 4; ++i)
        if (table[i].T == T) return {table[i].H, table[i].K, false};

    // off-table: column-head formulas with floor rounding
    const double Td = static_cast<double>(T);
    double h = c == ScheduleCase::Case1
                   ? std::floor(std::pow(std::log2(Td), 0.99) - 3.0)
                   : std::floor(2.0 * std::pow(Td, 0.49));
    if (h < 0.0) h = 0.0;

    double k;
    if (basis == BasisKind::Walsh)
        k = c == ScheduleCase::Case1 ? std::floor(std::cbrt(Td))
                                     : std::floor(0.5 * std::pow(Td, 0.49));
    else
        k = std::floor(std::pow(std::log(Td), 0.99));
    if (k < 1.0) k = 1.0;

    SchedulePair out;
    out.max_lag = std::min(static_cast<std::size_t>(h), T - 2);
    out.max_counter = static_cast<std::size_t>(k);
    const std::size_t kmax = max_counters(basis, T);
    if (out.max_counter > kmax) {
        out.max_counter = kmax;
        out.clipped = true;
    }
    return out;
}

McConfig parse_mc_config(std::istream& in) {
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_mc_config_text(text);
}

McConfig parse_mc_config_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    McConfig cfg;
    cfg.variants.clear();
    std::vector<std::string> variant_names{"plain"};
    double penalty_a = 0.25;

    auto to_size = [](const std::string& key, const std::string& v) -> std::size_t {
        try {
            return std::stoull(v);
        } catch (...) {
            throw ConfigError("config key " + key + ": not a valid count: " + v);
        }
    };
    auto to_double = [](const std::string& key, const std::string& v) -> double {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (...) {
            throw ConfigError("config key " + key + ": not a number: " + v);
        }
    };
    auto to_bool = [](const std::string& key, const std::string& v) -> bool {
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("config key " + key + ": expected boolean, got " + v);
    };

    for (const auto& [key, value] : kv) {
        if (key == "models") {
            for (const auto& tok : split_list(value)) {
                const auto colon = tok.find(':');
                const std::string mname = colon == std::string::npos ? tok : tok.substr(0, colon);
                const ErrorKind err = colon == std::string::npos
                                          ? ErrorKind::Gaussian
                                          : error_from_name(tok.substr(colon + 1));
                cfg.models.emplace_back(model_from_name(mname), err);
            }
        } else if (key == "ts") {
            for (const auto& tok : split_list(value)) cfg.ts.push_back(to_size(key, tok));
        } else if (key == "case") {
            cfg.schedule_case = case_from_name(value);
        } else if (key == "basis") {
            cfg.basis = basis_choice_from_name(value);
        } else if (key == "variants") {
            variant_names = split_list(value);
        } else if (key == "reps") {
            cfg.reps = to_size(key, value);
        } else if (key == "m") {
            cfg.bootstrap_m = to_size(key, value);
        } else if (key == "levels") {
            cfg.levels.clear();
            for (const auto& tok : split_list(value)) cfg.levels.push_back(to_double(key, tok));
        } else if (key == "seed") {
            cfg.seed = to_size(key, value);
        } else if (key == "block_size") {
            cfg.block_size = to_size(key, value);
        } else if (key == "centering") {
            if (value == "full") cfg.centering = Centering::FullTerm;
            else if (value == "product") cfg.centering = Centering::ProductOnly;
            else throw ConfigError("config key centering: expected full or product");
        } else if (key == "alt_burnin") {
            cfg.alt_burnin = to_bool(key, value);
        } else if (key == "penalty_a") {
            penalty_a = to_double(key, value);
        } else if (key == "jww_cv_reps") {
            cfg.jww_cv_reps = to_size(key, value);
        } else {
            throw ConfigError("unknown config key: " + key);
        }
    }

    for (const auto& name : variant_names)
        cfg.variants.push_back(VariantSpec::make(variant_from_name(name), penalty_a));

    if (cfg.models.empty()) throw ConfigError("config needs at least one model");
    if (cfg.ts.empty()) throw ConfigError("config needs at least one sample size");
    if (cfg.reps < 1) throw ConfigError("reps must be >= 1");
    for (double lv : cfg.levels)
        if (!(lv > 0.0 && lv < 1.0))
            throw ConfigError("levels must lie strictly inside (0,1)");
    if (cfg.levels.empty()) throw ConfigError("config needs at least one level");
    return cfg;
}

McReport run_mc(const McConfig& cfg) {
    if (cfg.models.empty()) throw ConfigError("mc needs at least one model");
    if (cfg.ts.empty()) throw ConfigError("mc needs at least one sample size");
    if (cfg.reps < 1) throw ConfigError("reps must be >= 1");
    if (cfg.variants.empty()) throw ConfigError("mc needs at least one variant");
    for (double lv : cfg.levels)
        if (!(lv > 0.0 && lv < 1.0)) throw ConfigError("levels must lie strictly inside (0,1)");

    const auto t0 = std::chrono::steady_clock::now();
    McReport report;
    report.config = cfg;

    std::vector<BasisKind> kinds;
    if (cfg.basis == BasisChoice::Walsh || cfg.basis == BasisChoice::Both)
        kinds.push_back(BasisKind::Walsh);
    if (cfg.basis == BasisChoice::Haar || cfg.basis == BasisChoice::Both)
        kinds.push_back(BasisKind::HaarComposite);

    // per-T basis plans, built once
    struct Setup {
        std::vector<std::unique_ptr<BasisMatrix>> mats;
        std::vector<BasisPlan> plans;
        std::size_t block = 0;
    };
    std::vector<Setup> setups(cfg.ts.size());
    for (std::size_t ti = 0; ti < cfg.ts.size(); ++ti) {
        const std::size_t T = cfg.ts[ti];
        for (BasisKind kind : kinds) {
            const SchedulePair sp = schedule_lookup(cfg.schedule_case, kind, T);
            const std::string label = "T=" + std::to_string(T) + " basis=" +
                                      (kind == BasisKind::Walsh ? "walsh" : "haar");
            report.schedules.emplace_back(label, sp);
            if (sp.clipped)
                report.diagnostics.push_back(label + ": Haar counter clipped to log2(T) = " +
                                             std::to_string(sp.max_counter));
            auto m = std::make_unique<BasisMatrix>(basis_matrix(kind, sp.max_counter, T));
            setups[ti].plans.push_back({m.get(), Grid{sp.max_lag, sp.max_counter}});
            setups[ti].mats.push_back(std::move(m));
        }
        setups[ti].block = cfg.block_size.value_or(block_size_default(T));
    }

    const std::size_t nvar = cfg.variants.size();
    std::size_t cell_id = 0;
    for (const auto& [model, err] : cfg.models) {
        for (std::size_t ti = 0; ti < cfg.ts.size(); ++ti, ++cell_id) {
            const std::size_t T = cfg.ts[ti];
            const Setup& setup = setups[ti];

            std::vector<double> pv(cfg.reps * nvar,
                                   std::numeric_limits<double>::quiet_NaN());
            std::vector<std::string> rep_errors(cfg.reps);

            parallel_for(cfg.reps, cfg.workers, [&](std::size_t r) {
                try {
                    Rng gen_rng = Rng::stream(cfg.seed, tag_generate, cell_id, r);
                    DgpSpec spec{model, err, T, cfg.alt_burnin};
                    const Series x = center(generate(spec, gen_rng));

                    BootstrapConfig boot;
                    boot.m = cfg.bootstrap_m;
                    boot.block_size = setup.block;
                    boot.centering = cfg.centering;
                    boot.seed = mix_keys(cfg.seed, tag_bootstrap, cell_id, r);
                    boot.workers = 1; // parallelism lives at the replication level

                    const auto results = run_test_multi(
                        x, setup.plans, cfg.variants, boot, 0.5 /* p-values tallied below */);
                    for (std::size_t v = 0; v < nvar; ++v)
                        pv[r * nvar + v] = results[v].p_value;
                } catch (const std::exception& e) {
                    rep_errors[r] = e.what();
                }
            });

            std::size_t failures = 0;
            std::string first_error;
            for (std::size_t r = 0; r < cfg.reps; ++r)
                if (!rep_errors[r].empty()) {
                    ++failures;
                    if (first_error.empty()) first_error = rep_errors[r];
                }

            for (std::size_t v = 0; v < nvar; ++v) {
                McCell cell;
                cell.model = model;
                cell.errors = err;
                cell.T = T;
                cell.variant = variant_name(cfg.variants[v].kind);
                cell.reps = cfg.reps;
                cell.failures = failures;
                cell.block_size = setup.block;
                cell.rejections.assign(cfg.levels.size(), 0);
                for (std::size_t r = 0; r < cfg.reps; ++r) {
                    const double p = pv[r * nvar + v];
                    if (std::isnan(p)) continue;
                    for (std::size_t li = 0; li < cfg.levels.size(); ++li)
                        if (p < cfg.levels[li]) ++cell.rejections[li];
                }
                report.cells.push_back(std::move(cell));
            }
            if (failures > 0)
                report.diagnostics.push_back(
                    "model=" + model_name(model) + " errors=" + error_name(err) +
                    " T=" + std::to_string(T) + ": " + std::to_string(failures) +
                    " failed replication(s); first: " + first_error);
        }
    }

    // optional approximate critical values for the Wald comparison statistic
    bool any_jww = false;
    for (const auto& v : cfg.variants) any_jww = any_jww || v.kind == Variant::Jww;
    if (any_jww && cfg.jww_cv_reps > 0 && cfg.basis != BasisChoice::Both) {
        const BasisKind kind = cfg.basis == BasisChoice::Walsh ? BasisKind::Walsh
                                                               : BasisKind::HaarComposite;
        for (std::size_t ti = 0; ti < cfg.ts.size(); ++ti) {
            const std::size_t T = cfg.ts[ti];
            const SchedulePair sp = schedule_lookup(cfg.schedule_case, kind, T);
            const auto cv = jww_critical_values(
                T, Grid{sp.max_lag, sp.max_counter}, kind, cfg.levels, cfg.jww_cv_reps,
                cfg.bootstrap_m, mix_keys(cfg.seed, tag_critical, ti), cfg.workers);
            std::string line = "approximate jww critical values (" +
                               std::to_string(cfg.jww_cv_reps) + " sims) T=" +
                               std::to_string(T) + ":";
            for (std::size_t li = 0; li < cfg.levels.size(); ++li)
                line += " " + format_double(cfg.levels[li]) + "->" + format_double(cv[li]);
            report.diagnostics.push_back(line);
        }
    }

    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

std::string report_tsv(const McReport& report) {
    const McConfig& cfg = report.config;
    std::string out;
    out += "# covariance stationarity mc report\n";
    out += "# seed=" + std::to_string(cfg.seed) + "\n";
    out += "# case=" + case_name(cfg.schedule_case) + "\n";
    out += "# basis=" + basis_choice_name(cfg.basis) + "\n";
    out += "# reps=" + std::to_string(cfg.reps) + "\n";
    out += "# m=" + std::to_string(cfg.bootstrap_m) + "\n";
    out += "# centering=";
    out += cfg.centering == Centering::FullTerm ? "full" : "product";
    out += "\n";
    out += "# alt_burnin=";
    out += cfg.alt_burnin ? "1" : "0";
    out += "\n";
    std::string levels;
    for (double lv : cfg.levels) {
        if (!levels.empty()) levels += ",";
        levels += format_double(lv);
    }
    out += "# levels=" + levels + "\n";
    for (const auto& [label, sp] : report.schedules)
        out += "# schedule " + label + " H=" + std::to_string(sp.max_lag) +
               " K=" + std::to_string(sp.max_counter) + (sp.clipped ? " clipped" : "") + "\n";
    for (const auto& d : report.diagnostics) out += "# " + d + "\n";

    out += "model\terrors\tT\tbasis\tcase\tvariant\tlevel\treps\tm\tb\trejections\tfailures\t"
           "frequency\n";
    char buf[64];
    for (const auto& cell : report.cells)
        for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
            out += model_name(cell.model) + "\t" + error_name(cell.errors) + "\t" +
                   std::to_string(cell.T) + "\t" + basis_choice_name(cfg.basis) + "\t" +
                   case_name(cfg.schedule_case) + "\t" + cell.variant + "\t" +
                   format_double(cfg.levels[li]) + "\t" + std::to_string(cell.reps) + "\t" +
                   std::to_string(cfg.bootstrap_m) + "\t" + std::to_string(cell.block_size) +
                   "\t" + std::to_string(cell.rejections[li]) + "\t" +
                   std::to_string(cell.failures) + "\t";
            std::snprintf(buf, sizeof(buf), "%.6f\n",
                          static_cast<double>(cell.rejections[li]) /
                              static_cast<double>(cell.reps));
            out += buf;
        }
    return out;
}

std::string report_human(const McReport& report) {
    const McConfig& cfg = report.config;
    std::ostringstream os;
    os << "Monte Carlo rejection frequencies (" << cfg.reps << " replications, M="
       << cfg.bootstrap_m << " bootstrap draws, " << case_name(cfg.schedule_case) << ", "
       << basis_choice_name(cfg.basis) << " basis)\n";
    os << "model      errors  T     variant             ";
    for (double lv : cfg.levels) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%8s", (format_double(lv) + "  ").c_str());
        os << buf;
    }
    os << "fail\n";
    for (const auto& cell : report.cells) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-10s %-7s %-5zu %-19s", model_name(cell.model).c_str(),
                      error_name(cell.errors).c_str(), cell.T, cell.variant.c_str());
        os << buf;
        for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
            std::snprintf(buf, sizeof(buf), "%8.4f",
                          static_cast<double>(cell.rejections[li]) /
                              static_cast<double>(cell.reps));
            os << buf;
        }
        std::snprintf(buf, sizeof(buf), "%5zu\n", cell.failures);
        os << buf;
    }
    for (const auto& d : report.diagnostics) os << "note: " << d << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "runtime: %.1f s\n", report.runtime_seconds);
    os << buf;
    return os.str();
}

std::vector<double> jww_critical_values(std::size_t T, const Grid& grid, BasisKind basis,
                                        std::span<const double> levels, std::size_t reps,
                                        std::size_t bootstrap_m, std::uint64_t seed,
                                        unsigned workers) {
    if (reps < 1) throw ConfigError("critical-value simulation needs reps >= 1");
    const BasisMatrix b = basis_matrix(basis, grid.max_counter, T);
    const VariantSpec variant = VariantSpec::make(Variant::Jww);

    std::vector<double> stats(reps);
    parallel_for(reps, workers, [&](std::size_t r) {
        Rng rng = Rng::stream(seed, tag_generate, r);
        std::vector<double> z = gen_errors(ErrorKind::Gaussian, T, rng);
        BootstrapConfig boot;
        boot.m = bootstrap_m;
        boot.seed = mix_keys(seed, tag_bootstrap, r);
        boot.workers = 1;
        stats[r] = run_test(center(std::move(z)), grid, b, variant, boot).statistic;
    });
    std::sort(stats.begin(), stats.end());

    std::vector<double> cv(levels.size());
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const double q = (1.0 - levels[li]) * static_cast<double>(reps);
        std::size_t idx = static_cast<std::size_t>(q);
        if (idx >= reps) idx = reps - 1;
        cv[li] = stats[idx];
    }
    return cv;
}

} // namespace covstat
