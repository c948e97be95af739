#include "covstat/jww.hpp"

#include <cmath>
#include <string>

#include "covstat/errors.hpp"

namespace covstat {

double quad_form_inv(const Eigen::MatrixXd& g, const Eigen::VectorXd& v) {
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success)
        throw DegenerateSeriesError("covariance matrix is not positive definite");
    return v.dot(llt.solve(v));
}

JwwEvaluator::JwwEvaluator(const Grid& grid, const GammaSupplier& gamma) : grid_(grid) {
    if (grid.max_lag < 1) throw ConfigError("comparison statistic needs max lag >= 1");
    const std::size_t H = grid.max_lag;
    const std::size_t K = grid.max_counter;
    factors_.reserve(H * K);
    for (std::size_t h = 1; h <= H; ++h)
        for (std::size_t k = 1; k <= K; ++k) {
            Eigen::MatrixXd g = gamma(h, k);
            if (g.rows() != static_cast<Eigen::Index>(h) || g.cols() != g.rows())
                throw ConfigError("covariance supplier returned a matrix of wrong size");
            g = 0.5 * (g + g.transpose().eval());
            const double tau = 1e-8 * g.trace() / static_cast<double>(h);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
            if (eig.eigenvalues().minCoeff() < tau) {
                g.diagonal().array() += tau;
                ridged_ = true;
            }
            Eigen::LLT<Eigen::MatrixXd> llt(g);
            if (llt.info() != Eigen::Success) {
                // covariance collapsed entirely (e.g. constant draws); a tiny
                // absolute jitter keeps the factorization defined
                g.diagonal().array() += 1e-12 * (1.0 + std::abs(g.trace()) / static_cast<double>(h));
                ridged_ = true;
                llt.compute(g);
                if (llt.info() != Eigen::Success)
                    throw DegenerateSeriesError("draw covariance for lag block h = " +
                                                std::to_string(h) + ", k = " + std::to_string(k) +
                                                " is singular");
            }
            factors_.push_back(llt.matrixL());
        }
}

double JwwEvaluator::evaluate(std::span<const double> cells, ArgmaxCell* arg) const {
    const std::size_t H = grid_.max_lag;
    const std::size_t K = grid_.max_counter;
    ArgmaxCell best;
    bool first = true;
    Eigen::VectorXd v(H);
    for (std::size_t h = 1; h <= H; ++h)
        for (std::size_t k = 1; k <= K; ++k) {
            for (std::size_t j = 1; j <= h; ++j) v[j - 1] = cells[j * K + (k - 1)];
            const auto& L = factors_[(h - 1) * K + (k - 1)];
            const Eigen::VectorXd y =
                L.triangularView<Eigen::Lower>().solve(v.head(static_cast<Eigen::Index>(h)));
            const double value = y.squaredNorm() - 2.0 * static_cast<double>(h) -
                                 std::sqrt(static_cast<double>(k - 1));
            if (first || value > best.value) {
                best = {value, h, k};
                first = false;
            }
        }
    if (arg) *arg = best;
    return best.value;
}

double jww_stat(const Series& x, const Grid& grid, const BasisMatrix& b,
                const GammaSupplier& gamma) {
    const DiffMatrix d = diff_matrix(x, grid, b);
    std::vector<double> cells(d.entries().begin(), d.entries().end());
    for (double& c : cells) c *= d.gamma0(); // back to sqrt(T)(gamma^(k) - gamma) scale
    return JwwEvaluator(grid, gamma).evaluate(cells);
}

} // namespace covstat
