#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "covstat/bootstrap.hpp"
#include "covstat/dgp.hpp"

namespace covstat {

enum class ScheduleCase { Case1, Case2 };

std::string case_name(ScheduleCase c);
ScheduleCase case_from_name(const std::string& name);

struct SchedulePair {
    std::size_t max_lag = 0;
    std::size_t max_counter = 1;
    bool clipped = false; // Haar counter clipped to log2(T)
};

// (H_T, K_T) for the sample size: the published table is authoritative for
// T in {64,128,256,512}; other T fall back to the column-head formulas with
// floor rounding. A Haar counter beyond log2(T) is clipped and flagged.
SchedulePair schedule_lookup(ScheduleCase c, BasisKind basis, std::size_t T);

enum class BasisChoice { Walsh, Haar, Both };

std::string basis_choice_name(BasisChoice b);
BasisChoice basis_choice_from_name(const std::string& name);

struct McConfig {
    std::vector<std::pair<Model, ErrorKind>> models;
    std::vector<std::size_t> ts;
    ScheduleCase schedule_case = ScheduleCase::Case1;
    BasisChoice basis = BasisChoice::Walsh;
    std::vector<VariantSpec> variants{VariantSpec::make(Variant::Plain)};
    std::size_t reps = 500;
    std::vector<double> levels{0.01, 0.05, 0.10};
    std::size_t bootstrap_m = 200;
    std::optional<std::size_t> block_size;
    Centering centering = Centering::ProductOnly;
    bool alt_burnin = false;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::size_t jww_cv_reps = 0; // >0 adds approximate critical values for jww runs
};

// Key = value text; '#' starts a comment. models takes model[:errors] tokens;
// lists are comma separated. Keys mirror McConfig fields.
McConfig parse_mc_config(std::istream& in);
McConfig parse_mc_config_text(const std::string& text);

struct McCell {
    Model model = Model::Null1;
    ErrorKind errors = ErrorKind::Gaussian;
    std::size_t T = 0;
    std::string variant;
    std::vector<std::size_t> rejections; // parallel to config levels
    std::size_t reps = 0;
    std::size_t failures = 0;
    std::size_t block_size = 0;
};

struct McReport {
    McConfig config;
    std::vector<std::pair<std::string, SchedulePair>> schedules; // per (T, basis)
    std::vector<McCell> cells;
    std::vector<std::string> diagnostics; // failures, clipping, approximations
    double runtime_seconds = 0.0;         // excluded from the TSV
};

McReport run_mc(const McConfig& cfg);

// One TSV row per (model, errors, T, variant, level); config echo and
// schedule lines as '#' comments. Byte-stable for a given config and seed;
// runtime and worker count never appear.
std::string report_tsv(const McReport& report);

// Wide per-cell table with level columns, plus runtime and diagnostics.
std::string report_human(const McReport& report);

// Approximate critical values for the Wald comparison statistic, simulated
// from iid N(0,1) samples of length T (one bootstrap per sample supplies the
// draw covariance). Returned per level as the empirical upper quantile.
std::vector<double> jww_critical_values(std::size_t T, const Grid& grid, BasisKind basis,
                                        std::span<const double> levels, std::size_t reps,
                                        std::size_t bootstrap_m, std::uint64_t seed,
                                        unsigned workers);

} // namespace covstat
