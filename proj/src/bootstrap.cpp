#include "covstat/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "covstat/errors.hpp"
#include "covstat/jww.hpp"
#include "covstat/parallel.hpp"

namespace covstat {

BlockPartition block_partition(std::size_t T, std::size_t b, bool allow_single_block) {
    if (T < 1) throw ConfigError("partition needs T >= 1");
    if (b < 1) throw ConfigError("block size must be >= 1");
    if (b >= T && !allow_single_block)
        throw ConfigError("block size b = " + std::to_string(b) +
                          " must be smaller than T = " + std::to_string(T) +
                          " (single-block partitions are degenerate)");
    BlockPartition p;
    p.T = T;
    p.b = b;
    p.full_blocks = T / b;
    return p;
}

std::size_t block_size_default(std::size_t T) {
    const double b = std::floor(std::pow(static_cast<double>(T), 0.5 - 1e-10));
    return std::max<std::size_t>(1, static_cast<std::size_t>(b));
}

std::vector<double> Multipliers::expand() const {
    std::vector<double> phi(partition.T);
    for (std::size_t t = 1; t <= partition.T; ++t) phi[t - 1] = xi[partition.block_of(t)];
    return phi;
}

Multipliers multipliers(const BlockPartition& part, Rng& rng) {
    Multipliers m;
    m.partition = part;
    m.xi.resize(part.count());
    for (double& v : m.xi) v = rng.normal();
    return m;
}

namespace {

// Per-cell block coefficients C_s(h,k) with
//   sqrt(T) Delta g(h,k) = T^{-3/2} sum_s xi_s C_s(h,k).
// FullTerm:    C_s = T A_s - n_s S,   A_s = sum_{t in B_s, t <= T-h} a_t,
//              a_t = X_t X_{t+h} B_k(t), S = sum_s A_s, n_s = #terms in block.
// ProductOnly: C_s = T A_s - S_P G_s, S_P = sum_t X_t X_{t+h},
//              G_s = sum_{t in B_s, t <= T-h} B_k(t).
// The one-block lag-0 case gives C_1 = T*S - T*S = 0 exactly.
class CellEngine {
public:
    CellEngine(const Series& x, const Grid& grid, const BasisMatrix& b,
               const BlockPartition& part, Centering centering)
        : grid_(grid), nb_(part.count()),
          inv_t32_(1.0 / std::pow(static_cast<double>(x.size()), 1.5)) {
        const std::size_t T = x.size();
        const std::size_t K = grid.max_counter;
        coeff_.assign(grid.cells() * nb_, 0.0);

        std::vector<double> prod(T);
        std::vector<double> block_a(nb_);
        for (std::size_t h = 0; h <= grid.max_lag; ++h) {
            const std::size_t n = T - h;
            for (std::size_t t = 0; t < n; ++t) prod[t] = x.values[t] * x.values[t + h];

            // per-block term counts and (for ProductOnly) product sums
            std::vector<double> weight(nb_, 0.0);
            double weight_total = 0.0;
            if (centering == Centering::FullTerm) {
                for (std::size_t s = 0; s < nb_; ++s) {
                    const std::size_t lo = s * part.b;
                    const std::size_t hi = std::min(lo + part.size(s + 1), n);
                    weight[s] = hi > lo ? static_cast<double>(hi - lo) : 0.0;
                }
            } else {
                for (std::size_t s = 0; s < nb_; ++s) {
                    const std::size_t lo = s * part.b;
                    const std::size_t hi = std::min(lo + part.size(s + 1), n);
                    double sum = 0.0;
                    for (std::size_t t = lo; t < hi; ++t) sum += prod[t];
                    weight[s] = sum;
                }
                for (std::size_t s = 0; s < nb_; ++s) weight_total += weight[s];
            }

            for (std::size_t k = 1; k <= K; ++k) {
                const auto row = b.row(k);
                double total = 0.0;
                for (std::size_t s = 0; s < nb_; ++s) {
                    const std::size_t lo = s * part.b;
                    const std::size_t hi = std::min(lo + part.size(s + 1), n);
                    double sum = 0.0;
                    for (std::size_t t = lo; t < hi; ++t) sum += prod[t] * row[t];
                    block_a[s] = sum;
                    total += sum;
                }
                // centering total: FullTerm recenters by its own sum, scaled by
                // term counts; ProductOnly recenters by the plain product sum,
                // scaled by basis-sign sums.
                double center_total = total;
                if (centering == Centering::ProductOnly) {
                    center_total = weight_total;
                    for (std::size_t s = 0; s < nb_; ++s) {
                        const std::size_t lo = s * part.b;
                        const std::size_t hi = std::min(lo + part.size(s + 1), n);
                        double g = 0.0;
                        for (std::size_t t = lo; t < hi; ++t) g += row[t];
                        weight[s] = g;
                    }
                }
                double* cell = coeff_.data() + ((h * K) + (k - 1)) * nb_;
                const double Td = static_cast<double>(T);
                for (std::size_t s = 0; s < nb_; ++s)
                    cell[s] = Td * block_a[s] - weight[s] * center_total;
            }
        }
    }

    std::size_t blocks() const { return nb_; }

    // out: grid.cells() raw values sqrt(T) Delta g(h,k)
    void draw(std::span<const double> xi, std::span<double> out) const {
        const std::size_t cells = grid_.cells();
        for (std::size_t c = 0; c < cells; ++c) {
            const double* coeff = coeff_.data() + c * nb_;
            double sum = 0.0;
            for (std::size_t s = 0; s < nb_; ++s) sum += xi[s] * coeff[s];
            out[c] = sum * inv_t32_;
        }
    }

private:
    Grid grid_;
    std::size_t nb_;
    double inv_t32_;
    std::vector<double> coeff_;
};

} // namespace

double delta_g(const Series& x, std::size_t h, std::size_t k, const BasisMatrix& b,
               const Multipliers& m, Centering centering) {
    if (!x.centered) throw InputError("series must be centered first");
    if (b.length() != x.size()) throw InputError("basis matrix length does not match series");
    if (m.partition.T != x.size()) throw InputError("partition length does not match series");
    if (h + 2 > x.size()) throw InputError("lag out of range");
    if (k < 1 || k > b.counters()) throw InputError("counter out of range");

    Grid g{h, k};
    CellEngine engine(x, g, b, m.partition, centering);
    std::vector<double> cells(g.cells());
    engine.draw(m.xi, cells);
    // engine emits sqrt(T) Delta g; the operation itself is Delta g
    return cells[h * g.max_counter + (k - 1)] / std::sqrt(static_cast<double>(x.size()));
}

std::string variant_name(Variant v) {
    switch (v) {
    case Variant::Plain: return "plain";
    case Variant::Penalized: return "penalized";
    case Variant::Weighted: return "weighted";
    case Variant::WeightedPenalized: return "weighted-penalized";
    case Variant::Jww: return "jww";
    }
    return "plain";
}

Variant variant_from_name(const std::string& name) {
    if (name == "plain") return Variant::Plain;
    if (name == "penalized") return Variant::Penalized;
    if (name == "weighted") return Variant::Weighted;
    if (name == "weighted-penalized") return Variant::WeightedPenalized;
    if (name == "jww") return Variant::Jww;
    throw ConfigError("unknown statistic variant: " + name);
}

VariantSpec VariantSpec::make(Variant v, double penalty_a) {
    VariantSpec s;
    s.kind = v;
    switch (v) {
    case Variant::Penalized:
        s.penalty = PenaltyScheme::add_power(penalty_a);
        break;
    case Variant::Weighted:
        s.weights = WeightScheme::hac();
        break;
    case Variant::WeightedPenalized:
        s.weights = WeightScheme::hac();
        s.penalty = PenaltyScheme::add_power(penalty_a);
        break;
    case Variant::Plain:
    case Variant::Jww:
        break;
    }
    return s;
}

double bootstrap_pvalue(std::span<const double> draws, double statistic) {
    if (draws.empty()) throw ConfigError("bootstrap needs at least one draw");
    std::size_t count = 0;
    for (double d : draws)
        if (d >= statistic) ++count;
    return static_cast<double>(count) / static_cast<double>(draws.size());
}

std::vector<TestResult> run_test_multi(const Series& input, std::span<const BasisPlan> bases,
                                       std::span<const VariantSpec> variants,
                                       const BootstrapConfig& cfg, double level) {
    if (bases.empty()) throw ConfigError("at least one basis is required");
    if (variants.empty()) throw ConfigError("at least one statistic variant is required");
    if (cfg.m < 1) throw ConfigError("bootstrap replication count must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("significance level must lie in (0,1)");

    const Series x = center(input);
    const std::size_t T = x.size();
    const std::size_t nbases = bases.size();

    bool any_jww = false;
    for (const auto& v : variants) any_jww = any_jww || v.kind == Variant::Jww;
    if (any_jww && nbases > 1)
        throw ConfigError("the Wald comparison statistic is defined for a single basis");

    const std::size_t b = cfg.block_size.value_or(block_size_default(T));
    if (b >= T)
        throw ConfigError("block size b = " + std::to_string(b) + " must be smaller than T = " +
                          std::to_string(T));
    const BlockPartition part = block_partition(T, b);

    std::vector<std::string> warnings;
    if (T < 4 * b)
        warnings.push_back("T = " + std::to_string(T) + " is below 4*b_T = " +
                           std::to_string(4 * b) + "; bootstrap blocks are coarse");

    std::vector<DiffMatrix> diffs;
    std::vector<CellEngine> engines;
    diffs.reserve(nbases);
    engines.reserve(nbases);
    for (const auto& plan : bases) {
        diffs.push_back(diff_matrix(x, plan.grid, *plan.matrix));
        engines.emplace_back(x, plan.grid, *plan.matrix, part, cfg.centering);
        if (any_jww && plan.grid.max_lag < 1)
            throw ConfigError("the Wald comparison statistic needs max lag >= 1");
    }

    // weight matrices are data functionals: computed once, applied to the
    // observed statistic and every draw alike
    const std::size_t nvar = variants.size();
    std::vector<std::vector<WeightMatrix>> weights(nvar);
    for (std::size_t v = 0; v < nvar; ++v) {
        const auto& spec = variants[v];
        if (spec.kind == Variant::Weighted || spec.kind == Variant::WeightedPenalized) {
            weights[v].reserve(nbases);
            for (std::size_t j = 0; j < nbases; ++j) {
                weights[v].push_back(weight_matrix(x, bases[j].grid, *bases[j].matrix,
                                                   spec.weights));
                if (weights[v][j].any_floored)
                    warnings.push_back("HAC long-run variance floored on some cells (" +
                                       variant_name(spec.kind) + ")");
            }
        }
    }

    auto penalty_of = [&](std::size_t v) -> const PenaltyScheme& {
        static const PenaltyScheme no_penalty = PenaltyScheme::none();
        const auto& spec = variants[v];
        if (spec.kind == Variant::Penalized || spec.kind == Variant::WeightedPenalized)
            return spec.penalty;
        return no_penalty;
    };
    auto weight_of = [&](std::size_t v, std::size_t j) -> const WeightMatrix* {
        return weights[v].empty() ? nullptr : &weights[v][j];
    };

    // observed statistic per variant (max-max across bases); Jww is deferred
    // until the draw covariance exists
    struct StatSide {
        double value = 0.0;
        ArgmaxCell argmax;
        std::size_t basis = 0;
    };
    std::vector<StatSide> stat(nvar);
    for (std::size_t v = 0; v < nvar; ++v) {
        if (variants[v].kind == Variant::Jww) continue;
        bool first = true;
        for (std::size_t j = 0; j < nbases; ++j) {
            const ArgmaxCell c =
                reduce_cells(diffs[j].entries(), bases[j].grid, weight_of(v, j), penalty_of(v));
            if (first || c.value > stat[v].value) {
                stat[v] = {c.value, c, j};
                first = false;
            }
        }
    }

    // bootstrap draws; every basis and variant shares one multiplier array
    // per replication, keyed by (seed, replication index)
    const std::size_t M = cfg.m;
    std::vector<std::vector<double>> draws(nvar, std::vector<double>(M));
    const std::size_t cells0 = bases[0].grid.cells();
    std::vector<double> jww_cells(any_jww ? M * cells0 : 0);

    std::vector<std::size_t> offset(nbases + 1, 0);
    for (std::size_t j = 0; j < nbases; ++j) offset[j + 1] = offset[j] + bases[j].grid.cells();
    const std::size_t total_cells = offset[nbases];

    parallel_for(M, cfg.workers, [&](std::size_t i) {
        Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(i));
        std::vector<double> xi(part.count());
        for (double& v : xi) v = rng.normal();

        std::vector<double> raw(total_cells);
        std::vector<double> norm(total_cells);
        for (std::size_t j = 0; j < nbases; ++j) {
            engines[j].draw(xi, std::span<double>(raw.data() + offset[j],
                                                  bases[j].grid.cells()));
            const double g0 = diffs[j].gamma0();
            for (std::size_t c = offset[j]; c < offset[j + 1]; ++c) norm[c] = raw[c] / g0;
        }
        if (any_jww)
            std::copy(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(cells0),
                      jww_cells.begin() + static_cast<std::ptrdiff_t>(i * cells0));

        for (std::size_t v = 0; v < nvar; ++v) {
            if (variants[v].kind == Variant::Jww) continue;
            double best = 0.0;
            bool first = true;
            for (std::size_t j = 0; j < nbases; ++j) {
                const ArgmaxCell c = reduce_cells(
                    std::span<const double>(norm.data() + offset[j], bases[j].grid.cells()),
                    bases[j].grid, weight_of(v, j), penalty_of(v));
                if (first || c.value > best) {
                    best = c.value;
                    first = false;
                }
            }
            draws[v][i] = best;
        }
    });

    // Wald variant: covariance of the stored draws supplies Gamma(h,k)
    std::vector<TestResult> results;
    results.reserve(nvar);
    for (std::size_t v = 0; v < nvar; ++v) {
        const auto& spec = variants[v];
        TestResult r;
        r.variant = spec;
        r.level = level;
        r.block_size = b;
        r.seed = cfg.seed;
        r.warnings = warnings;

        if (spec.kind == Variant::Jww) {
            const Grid& grid = bases[0].grid;
            const std::size_t H = grid.max_lag;
            const std::size_t K = grid.max_counter;
            // empirical covariance over the M draws, per counter k
            std::vector<Eigen::MatrixXd> cov(K, Eigen::MatrixXd::Zero(H, H));
            Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(H, K);
            for (std::size_t i = 0; i < M; ++i) {
                const double* row = jww_cells.data() + i * cells0;
                for (std::size_t h = 1; h <= H; ++h)
                    for (std::size_t k = 1; k <= K; ++k)
                        mean(h - 1, k - 1) += row[h * K + (k - 1)];
            }
            mean /= static_cast<double>(M);
            for (std::size_t i = 0; i < M; ++i) {
                const double* row = jww_cells.data() + i * cells0;
                for (std::size_t k = 1; k <= K; ++k)
                    for (std::size_t h1 = 1; h1 <= H; ++h1)
                        for (std::size_t h2 = h1; h2 <= H; ++h2)
                            cov[k - 1](h1 - 1, h2 - 1) +=
                                (row[h1 * K + (k - 1)] - mean(h1 - 1, k - 1)) *
                                (row[h2 * K + (k - 1)] - mean(h2 - 1, k - 1));
            }
            for (std::size_t k = 0; k < K; ++k) {
                cov[k] /= static_cast<double>(M);
                cov[k] = cov[k].selfadjointView<Eigen::Upper>();
            }
            GammaSupplier supplier = [&cov](std::size_t h, std::size_t k) {
                return Eigen::MatrixXd(
                    cov[k - 1].topLeftCorner(static_cast<Eigen::Index>(h),
                                             static_cast<Eigen::Index>(h)));
            };
            JwwEvaluator eval(grid, supplier);
            if (eval.ridged())
                r.warnings.push_back("draw covariance ridged for the comparison statistic");

            std::vector<double> stat_cells(diffs[0].entries().begin(), diffs[0].entries().end());
            for (double& c : stat_cells) c *= diffs[0].gamma0();
            r.statistic = eval.evaluate(stat_cells, &r.argmax);
            for (std::size_t i = 0; i < M; ++i)
                draws[v][i] = eval.evaluate(
                    std::span<const double>(jww_cells.data() + i * cells0, cells0));
            r.basis = bases[0].matrix->kind();
            r.grid = grid;
            r.diff = diffs[0];
        } else {
            r.statistic = stat[v].value;
            r.argmax = stat[v].argmax;
            r.basis = bases[stat[v].basis].matrix->kind();
            r.grid = bases[stat[v].basis].grid;
            r.diff = diffs[stat[v].basis];
        }

        r.draws = std::move(draws[v]);
        r.p_value = bootstrap_pvalue(r.draws, r.statistic);
        r.reject = r.p_value < level;
        results.push_back(std::move(r));
    }
    return results;
}

TestResult run_test(const Series& x, const Grid& grid, const BasisMatrix& b,
                    const VariantSpec& variant, const BootstrapConfig& cfg, double level) {
    const BasisPlan plan{&b, grid};
    auto results = run_test_multi(x, std::span<const BasisPlan>(&plan, 1),
                                  std::span<const VariantSpec>(&variant, 1), cfg, level);
    return std::move(results.front());
}

} // namespace covstat
