#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "covstat/basis.hpp"
#include "covstat/stats.hpp"

namespace covstat {

// Reads one numeric column. Accepts a single-column file (optional header) or a
// multi-column CSV with `column` naming the header or giving a 0-based index.
// Missing/non-numeric entries are rejected; complete series are assumed.
std::vector<double> read_series(std::istream& in,
                                const std::optional<std::string>& column = std::nullopt);
std::vector<double> read_series_file(const std::string& path,
                                     const std::optional<std::string>& column = std::nullopt);

// Single-column CSV with header "x"; values round-trip exactly (%.17g).
void write_series_csv(std::ostream& out, const std::vector<double>& values);
void write_series_csv_file(const std::string& path, const std::vector<double>& values);

// One row per lag h = 0..H: columns h, then the scaled difference at k = 1..K.
void write_diff_tsv(std::ostream& out, const DiffMatrix& d);
void write_diff_tsv_file(const std::string& path, const DiffMatrix& d);

// Single column "draw", one bootstrap draw per line (%.17g).
void write_draws_tsv(std::ostream& out, const std::vector<double>& draws);
void write_draws_tsv_file(const std::string& path, const std::vector<double>& draws);

// Rows k = 1..K, columns t = 1..T, entries -1/1, tab-separated, no header.
void write_basis_tsv(std::ostream& out, const BasisMatrix& b);

} // namespace covstat
