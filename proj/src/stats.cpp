#include "covstat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "covstat/errors.hpp"

namespace covstat {

namespace {

// Relative variance floor: gamma0 at or below (1e-12 * scale)^2 is
// indistinguishable from a constant series after centering roundoff.
double degenerate_tol(const Series& x) {
    const double eps = 1e-12 * x.scale;
    return eps * eps;
}

void require_centered(const Series& x) {
    if (!x.centered) throw InputError("series must be centered first");
}

void check_lag(const Series& x, std::size_t h) {
    if (x.size() < 4) throw InputError("series too short, need T >= 4");
    if (h + 2 > x.size())
        throw InputError("lag h = " + std::to_string(h) + " out of range for T = " +
                          std::to_string(x.size()));
}

void check_basis_row(const Series& x, std::size_t k, const BasisMatrix& b) {
    if (b.length() != x.size()) throw InputError("basis matrix length does not match series");
    if (k < 1 || k > b.counters())
        throw InputError("counter k = " + std::to_string(k) + " outside basis matrix");
}

// (1/sqrt(T)) sum_{t=1}^{T-h} X_t X_{t+h} B_k(t): the cross sum behind both
// the observed differences and their bootstrap counterparts.
double cross_sum(const Series& x, std::size_t h, std::span<const std::int8_t> row) {
    const std::size_t T = x.size();
    double s = 0.0;
    for (std::size_t t = 0; t + h < T; ++t) s += x.values[t] * x.values[t + h] * row[t];
    return s / std::sqrt(static_cast<double>(T));
}

} // namespace

Series center(std::vector<double> values) {
    if (values.size() < 4) throw InputError("series too short, need T >= 4");
    double scale = 0.0;
    double sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw InputError("series contains a non-finite value");
        scale = std::max(scale, std::abs(v));
        sum += v;
    }
    const double mean = sum / static_cast<double>(values.size());
    for (double& v : values) v -= mean;
    Series s;
    s.values = std::move(values);
    s.centered = true;
    s.scale = scale;
    return s;
}

Series center(Series s) {
    if (s.centered) return s;
    return center(std::move(s.values));
}

double autocov(const Series& x, std::size_t h) {
    require_centered(x);
    check_lag(x, h);
    const std::size_t T = x.size();
    double s = 0.0;
    for (std::size_t t = 0; t + h < T; ++t) s += x.values[t] * x.values[t + h];
    return s / static_cast<double>(T);
}

double systematic_cov(const Series& x, std::size_t h, std::size_t k, const BasisMatrix& b) {
    require_centered(x);
    check_lag(x, h);
    check_basis_row(x, k, b);
    const std::size_t T = x.size();
    const auto row = b.row(k);
    double s = 0.0;
    for (std::size_t t = 0; t + h < T; ++t)
        s += x.values[t] * x.values[t + h] * (1.0 + row[t]);
    return s / static_cast<double>(T);
}

void validate_grid(const Grid& g, std::size_t T, BasisKind kind) {
    if (g.max_counter < 1) throw ConfigError("grid needs at least one counter");
    if (g.max_lag + 2 > T)
        throw ConfigError("grid max lag " + std::to_string(g.max_lag) +
                          " too deep for T = " + std::to_string(T));
    const std::size_t kmax = max_counters(kind, T);
    if (g.max_counter > kmax)
        throw ConfigError("grid max counter " + std::to_string(g.max_counter) +
                          " exceeds basis limit " + std::to_string(kmax) +
                          " at T = " + std::to_string(T));
}

DiffMatrix diff_matrix(const Series& x, const Grid& grid, const BasisMatrix& b) {
    require_centered(x);
    if (b.length() != x.size()) throw InputError("basis matrix length does not match series");
    validate_grid(grid, x.size(), b.kind());
    if (grid.max_counter > b.counters())
        throw ConfigError("grid max counter exceeds basis matrix rows");

    const double gamma0 = autocov(x, 0);
    if (gamma0 <= degenerate_tol(x))
        throw DegenerateSeriesError("degenerate series: zero sample variance");

    std::vector<double> entries(grid.cells());
    for (std::size_t h = 0; h <= grid.max_lag; ++h)
        for (std::size_t k = 1; k <= grid.max_counter; ++k)
            entries[h * grid.max_counter + (k - 1)] = cross_sum(x, h, b.row(k)) / gamma0;
    return DiffMatrix(grid, x.size(), gamma0, std::move(entries));
}

double rho2_diff(const Series& x, std::size_t h, std::size_t k, const BasisMatrix& b) {
    const double g0k = systematic_cov(x, 0, k, b);
    if (g0k <= degenerate_tol(x))
        throw DegenerateSeriesError("degenerate systematic sample: zero variance on sample k = " +
                                    std::to_string(k));
    const double T = static_cast<double>(x.size());
    return cross_sum(x, h, b.row(k)) / std::sqrt(T) / g0k;
}

ArgmaxCell max_stat(const DiffMatrix& d) {
    return reduce_cells(d.entries(), d.grid(), nullptr, PenaltyScheme::none());
}

double PenaltyScheme::operator()(std::size_t h, std::size_t k) const {
    switch (kind) {
    case Kind::None:
        return 0.0;
    case Kind::AddPower:
        return 0.5 * std::pow(static_cast<double>(h + 1), a) +
               0.5 * std::pow(static_cast<double>(k), a);
    case Kind::SqrtProd:
        return std::sqrt(static_cast<double>((h + 1) * k));
    }
    return 0.0;
}

ArgmaxCell penalized_stat(const DiffMatrix& d, const PenaltyScheme& p) {
    return reduce_cells(d.entries(), d.grid(), nullptr, p);
}

double hac_kernel_weight(HacKernel kernel, double u) {
    switch (kernel) {
    case HacKernel::Bartlett:
        return std::abs(u) <= 1.0 ? 1.0 - std::abs(u) : 0.0;
    }
    return 0.0;
}

std::size_t hac_bandwidth_default(std::size_t T) {
    // Smallest integer beta with beta^3 >= T, i.e. ceil(T^(1/3)) without the
    // floating-point wobble that rounds perfect cubes up.
    std::size_t beta = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(T))));
    while (beta > 1 && (beta - 1) * (beta - 1) * (beta - 1) >= T) --beta;
    return beta;
}

HacVariance hac_variance(const Series& x, std::size_t h, std::size_t k, const BasisMatrix& b,
                         HacKernel kernel, std::size_t bandwidth) {
    require_centered(x);
    check_lag(x, h);
    check_basis_row(x, k, b);
    if (bandwidth < 1) throw ConfigError("HAC bandwidth must be >= 1");

    const std::size_t T = x.size();
    const std::size_t n = T - h;
    const auto row = b.row(k);
    std::vector<double> z(n);
    double mean = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        z[t] = x.values[t] * x.values[t + h] * row[t];
        mean += z[t];
    }
    mean /= static_cast<double>(T); // divisor T, matching every other estimator
    for (double& v : z) v -= mean;

    const double gamma0 = autocov(x, 0);
    auto vhat = [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t t = 0; t + i < n; ++t) s += z[t] * z[t + i];
        return s / static_cast<double>(T);
    };

    double longrun = vhat(0);
    for (std::size_t i = 1; i < n; ++i) {
        const double w = hac_kernel_weight(kernel, static_cast<double>(i) /
                                                       static_cast<double>(bandwidth));
        if (w == 0.0 && kernel == HacKernel::Bartlett) break; // compact support
        longrun += 2.0 * w * vhat(i);
    }

    HacVariance out;
    const double floor = 1e-8 * gamma0 * gamma0;
    if (longrun < floor) {
        longrun = floor;
        out.floored = true;
    }
    out.v2 = longrun / (gamma0 * gamma0);
    return out;
}

WeightMatrix weight_matrix(const Series& x, const Grid& grid, const BasisMatrix& b,
                           const WeightScheme& w) {
    WeightMatrix out;
    out.grid = grid;
    out.values.assign(grid.cells(), 1.0);
    if (w.kind == WeightScheme::Kind::None) return out;

    const std::size_t T = x.size();
    if (w.kind == WeightScheme::Kind::LjungBox) {
        for (std::size_t h = 0; h <= grid.max_lag; ++h) {
            const double wh = std::sqrt(static_cast<double>(T - h) / static_cast<double>(T + 2));
            for (std::size_t k = 1; k <= grid.max_counter; ++k)
                out.values[h * grid.max_counter + (k - 1)] = wh;
        }
        return out;
    }

    const std::size_t beta = w.bandwidth > 0 ? w.bandwidth : hac_bandwidth_default(T);
    for (std::size_t h = 0; h <= grid.max_lag; ++h)
        for (std::size_t k = 1; k <= grid.max_counter; ++k) {
            const HacVariance v = hac_variance(x, h, k, b, w.kernel, beta);
            out.any_floored = out.any_floored || v.floored;
            out.values[h * grid.max_counter + (k - 1)] = 1.0 / std::sqrt(v.v2);
        }
    return out;
}

ArgmaxCell reduce_cells(std::span<const double> cells, const Grid& grid,
                        const WeightMatrix* w, const PenaltyScheme& p) {
    ArgmaxCell best;
    bool first = true;
    for (std::size_t h = 0; h <= grid.max_lag; ++h)
        for (std::size_t k = 1; k <= grid.max_counter; ++k) {
            const std::size_t idx = h * grid.max_counter + (k - 1);
            double v = std::abs(cells[idx]);
            if (w) {
                if (!(w->values[idx] > 0.0))
                    throw ConfigError("weight must be positive at every grid cell");
                v *= w->values[idx];
            }
            v -= p(h, k);
            if (first || v > best.value) {
                best = {v, h, k};
                first = false;
            }
        }
    return best;
}

ArgmaxCell weighted_penalized_stat(const DiffMatrix& d, const Series& x, const BasisMatrix& b,
                                   const WeightScheme& w, const PenaltyScheme& p) {
    const WeightMatrix wm = weight_matrix(x, d.grid(), b, w);
    for (double v : wm.values)
        if (!(v > 0.0)) throw ConfigError("statistic weights must be strictly positive");
    return reduce_cells(d.entries(), d.grid(), &wm, p);
}

double max_max(std::span<const double> values) {
    if (values.empty()) throw InputError("max_max needs at least one statistic value");
    return *std::max_element(values.begin(), values.end());
}

} // namespace covstat
