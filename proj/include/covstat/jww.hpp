#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>

#include "covstat/stats.hpp"

namespace covstat {

// Supplies the h x h covariance matrix of sqrt(T)(gamma_h^(k) - gamma_h)
// for lags 1..h at counter k.
using GammaSupplier = std::function<Eigen::MatrixXd(std::size_t h, std::size_t k)>;

// v' G^{-1} v via Cholesky; exposed for oracle comparisons.
double quad_form_inv(const Eigen::MatrixXd& g, const Eigen::VectorXd& v);

// Wald-style comparison statistic
//   max_k [ max_h { T (gdiff_h)' Gamma_hk^{-1} (gdiff_h) - 2h } - sqrt(k-1) ]
// with gdiff stacking lags 1..h. Factors every Gamma(h,k) once so the
// observed statistic and all bootstrap draws reuse the same Cholesky solves.
// A ridge of 1e-8 trace/h is added when the smallest eigenvalue drops below
// that threshold; `ridged()` reports whether any cell needed it.
class JwwEvaluator {
public:
    JwwEvaluator(const Grid& grid, const GammaSupplier& gamma);

    // cells: (max_lag+1) x max_counter row-major values of
    // sqrt(T)(gamma_h^(k) - gamma_h); the h = 0 row is ignored.
    double evaluate(std::span<const double> cells, ArgmaxCell* arg = nullptr) const;

    bool ridged() const { return ridged_; }

private:
    Grid grid_;
    std::vector<Eigen::MatrixXd> factors_; // lower Cholesky of Gamma(h,k)
    bool ridged_ = false;
};

double jww_stat(const Series& x, const Grid& grid, const BasisMatrix& b,
                const GammaSupplier& gamma);

} // namespace covstat
