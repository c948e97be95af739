#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "covstat/basis.hpp"

namespace covstat {

// A demeaned sample path. `scale` keeps the pre-centering magnitude so that
// degeneracy checks (zero sample variance) stay meaningful after rounding.
struct Series {
    std::vector<double> values;
    bool centered = false;
    double scale = 0.0;

    std::size_t size() const { return values.size(); }
};

// center() demeans once; centering an already centered series is a no-op,
// so center(center(X)) == center(X) bit for bit.
Series center(std::vector<double> values);
Series center(Series s);

// gamma_hat_h = (1/T) sum_{t=1}^{T-h} X_t X_{t+h}; the divisor is always T.
double autocov(const Series& x, std::size_t h);

// gamma_hat_h^(k) = (1/T) sum_{t=1}^{T-h} X_t X_{t+h} (1 + B_k(t)).
double systematic_cov(const Series& x, std::size_t h, std::size_t k, const BasisMatrix& b);

// Lag/counter rectangle: h = 0..max_lag, k = 1..max_counter.
struct Grid {
    std::size_t max_lag = 0;
    std::size_t max_counter = 1;

    std::size_t rows() const { return max_lag + 1; }
    std::size_t cells() const { return rows() * max_counter; }
};

void validate_grid(const Grid& g, std::size_t T, BasisKind kind);

// entry(h,k) = sqrt(T) (gamma_hat_h^(k) - gamma_hat_h) / gamma_hat_0,
// computed through the cross sum (1/sqrt(T)) sum X_t X_{t+h} B_k(t) to avoid
// cancellation between the two covariance estimates.
class DiffMatrix {
public:
    DiffMatrix() = default;
    DiffMatrix(Grid grid, std::size_t T, double gamma0, std::vector<double> entries)
        : grid_(grid), T_(T), gamma0_(gamma0), entries_(std::move(entries)) {}

    const Grid& grid() const { return grid_; }
    std::size_t length() const { return T_; }
    double gamma0() const { return gamma0_; }

    // h in 0..max_lag, k in 1..max_counter
    double entry(std::size_t h, std::size_t k) const {
        return entries_[h * grid_.max_counter + (k - 1)];
    }
    std::span<const double> entries() const { return entries_; }

private:
    Grid grid_;
    std::size_t T_ = 0;
    double gamma0_ = 0.0;
    std::vector<double> entries_;
};

DiffMatrix diff_matrix(const Series& x, const Grid& grid, const BasisMatrix& b);

// Correlation-scaled difference using the systematic variance:
// [(1/T) sum X_t X_{t+h} B_k(t)] / gamma_hat_0^(k).
double rho2_diff(const Series& x, std::size_t h, std::size_t k, const BasisMatrix& b);

struct ArgmaxCell {
    double value = 0.0;
    std::size_t h = 0;
    std::size_t k = 1;
};

// max |entry| with first-in-(h asc, k asc) tie break.
ArgmaxCell max_stat(const DiffMatrix& d);

// Penalty p(h,k) subtracted from |entry| before the max. AddPower uses
// (h+1)^a / 2 + k^a / 2 (a = 1/4 by default); SqrtProd uses sqrt((h+1) k).
struct PenaltyScheme {
    enum class Kind { None, AddPower, SqrtProd };
    Kind kind = Kind::None;
    double a = 0.25;

    static PenaltyScheme none() { return {Kind::None, 0.0}; }
    static PenaltyScheme add_power(double a = 0.25) { return {Kind::AddPower, a}; }
    static PenaltyScheme sqrt_prod() { return {Kind::SqrtProd, 0.0}; }

    double operator()(std::size_t h, std::size_t k) const;
};

ArgmaxCell penalized_stat(const DiffMatrix& d, const PenaltyScheme& p);

enum class HacKernel { Bartlett };

double hac_kernel_weight(HacKernel kernel, double u);
std::size_t hac_bandwidth_default(std::size_t T); // ceil(T^(1/3))

struct HacVariance {
    double v2 = 0.0;   // long-run variance of z_t(h,k), normalized by gamma0^2
    bool floored = false;
};

// z_t(h,k) = X_t X_{t+h} B_k(t) - (1/T) sum_s X_s X_{s+h} B_k(s);
// v2 = gamma0^-2 [v(0) + 2 sum_i K(i/beta) v(i)], v(i) = (1/T) sum z_t z_{t+i}.
// The long-run sum is floored at 1e-8 gamma0^2 before normalizing so the
// inverse weight stays finite; `floored` records when that guard bound.
HacVariance hac_variance(const Series& x, std::size_t h, std::size_t k, const BasisMatrix& b,
                         HacKernel kernel, std::size_t bandwidth);

struct WeightScheme {
    enum class Kind { None, Hac, LjungBox };
    Kind kind = Kind::None;
    HacKernel kernel = HacKernel::Bartlett;
    std::size_t bandwidth = 0; // 0 = default rule

    static WeightScheme none() { return {}; }
    static WeightScheme hac(HacKernel k = HacKernel::Bartlett, std::size_t beta = 0) {
        return {Kind::Hac, k, beta};
    }
    static WeightScheme ljung_box() { return {Kind::LjungBox, HacKernel::Bartlett, 0}; }
};

struct WeightMatrix {
    Grid grid;
    std::vector<double> values; // (max_lag+1) x max_counter, row-major in h
    bool any_floored = false;

    double at(std::size_t h, std::size_t k) const {
        return values[h * grid.max_counter + (k - 1)];
    }
};

WeightMatrix weight_matrix(const Series& x, const Grid& grid, const BasisMatrix& b,
                           const WeightScheme& w);

// max over cells of w(h,k) |cell(h,k)| - p(h,k); shared by the observed
// statistic and the bootstrap draws so both sides see identical weighting.
ArgmaxCell reduce_cells(std::span<const double> cells, const Grid& grid,
                        const WeightMatrix* w, const PenaltyScheme& p);

ArgmaxCell weighted_penalized_stat(const DiffMatrix& d, const Series& x, const BasisMatrix& b,
                                   const WeightScheme& w, const PenaltyScheme& p);

double max_max(std::span<const double> values);

} // namespace covstat
