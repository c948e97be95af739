#include "covstat/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "covstat/errors.hpp"

namespace covstat {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename Fn>
void with_output_file(const std::string& path, Fn&& fn) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open output file: " + path);
    fn(out);
    if (!out) throw InputError("write failed: " + path);
}

} // namespace

std::vector<double> read_series(std::istream& in, const std::optional<std::string>& column) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split_csv(line));
    }
    if (rows.empty()) throw InputError("input series is empty");

    // header = first row with any non-numeric field
    bool has_header = false;
    for (const auto& f : rows.front()) {
        double tmp;
        if (!parse_number(f, tmp)) has_header = true;
    }

    const std::size_t ncol = rows.front().size();
    std::size_t col = 0;
    if (column) {
        bool found = false;
        if (has_header)
            for (std::size_t j = 0; j < ncol; ++j)
                if (rows.front()[j] == *column) {
                    col = j;
                    found = true;
                    break;
                }
        if (!found) {
            try {
                std::size_t pos = 0;
                const unsigned long idx = std::stoul(*column, &pos);
                if (pos == column->size() && idx < ncol) {
                    col = idx;
                    found = true;
                }
            } catch (...) {
            }
        }
        if (!found) throw InputError("column not found: " + *column);
    } else if (ncol != 1) {
        throw InputError("input has " + std::to_string(ncol) +
                         " columns; use --column to select one");
    }

    std::vector<double> values;
    values.reserve(rows.size());
    for (std::size_t i = has_header ? 1 : 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (col >= row.size() || row[col].empty())
            throw InputError("missing value at data row " + std::to_string(i + 1));
        double v;
        if (!parse_number(row[col], v))
            throw InputError("non-numeric value at data row " + std::to_string(i + 1) + ": " +
                             row[col]);
        if (!std::isfinite(v))
            throw InputError("non-finite value at data row " + std::to_string(i + 1));
        values.push_back(v);
    }
    if (values.empty()) throw InputError("input series has no data rows");
    return values;
}

std::vector<double> read_series_file(const std::string& path,
                                     const std::optional<std::string>& column) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file: " + path);
    return read_series(in, column);
}

void write_series_csv(std::ostream& out, const std::vector<double>& values) {
    out << "x\n";
    for (double v : values) out << fmt17(v) << "\n";
}

void write_series_csv_file(const std::string& path, const std::vector<double>& values) {
    with_output_file(path, [&](std::ostream& out) { write_series_csv(out, values); });
}

void write_diff_tsv(std::ostream& out, const DiffMatrix& d) {
    out << "h";
    for (std::size_t k = 1; k <= d.grid().max_counter; ++k) out << "\tk" << k;
    out << "\n";
    for (std::size_t h = 0; h <= d.grid().max_lag; ++h) {
        out << h;
        for (std::size_t k = 1; k <= d.grid().max_counter; ++k)
            out << "\t" << fmt17(d.entry(h, k));
        out << "\n";
    }
}

void write_diff_tsv_file(const std::string& path, const DiffMatrix& d) {
    with_output_file(path, [&](std::ostream& out) { write_diff_tsv(out, d); });
}

void write_draws_tsv(std::ostream& out, const std::vector<double>& draws) {
    out << "draw\n";
    for (double v : draws) out << fmt17(v) << "\n";
}

void write_draws_tsv_file(const std::string& path, const std::vector<double>& draws) {
    with_output_file(path, [&](std::ostream& out) { write_draws_tsv(out, draws); });
}

void write_basis_tsv(std::ostream& out, const BasisMatrix& b) {
    for (std::size_t k = 1; k <= b.counters(); ++k) {
        for (std::size_t t = 1; t <= b.length(); ++t) {
            if (t > 1) out << '\t';
            out << static_cast<int>(b.at(k, t));
        }
        out << "\n";
    }
}

} // namespace covstat
