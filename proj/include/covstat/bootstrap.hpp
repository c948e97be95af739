#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covstat/basis.hpp"
#include "covstat/rng.hpp"
#include "covstat/stats.hpp"

namespace covstat {

// Contiguous blocks {(s-1)b+1 .. sb}, s = 1..floor(T/b), plus a remainder
// block {floor(T/b)*b+1 .. T} when b does not divide T. The remainder gets
// its own multiplier draw like any other block.
struct BlockPartition {
    std::size_t T = 0;
    std::size_t b = 0;
    std::size_t full_blocks = 0;

    std::size_t count() const { return full_blocks + (T > full_blocks * b ? 1 : 0); }
    std::size_t start(std::size_t s) const { return (s - 1) * b + 1; } // 1-based
    std::size_t size(std::size_t s) const {
        return s <= full_blocks ? b : T - full_blocks * b;
    }
    // 0-based block index of time t in 1..T
    std::size_t block_of(std::size_t t) const {
        const std::size_t i = (t - 1) / b;
        return i < count() ? i : count() - 1;
    }
};

// allow_single_block exists for structural tests; production configs must
// keep b < T.
BlockPartition block_partition(std::size_t T, std::size_t b, bool allow_single_block = false);

// Default block size floor(T^(1/2-eta)), eta = 1e-10.
std::size_t block_size_default(std::size_t T);

// One standard-normal draw per block; phi_t repeats the draw across the block.
struct Multipliers {
    BlockPartition partition;
    std::vector<double> xi; // one per block, remainder included

    double phi(std::size_t t) const { return xi[partition.block_of(t)]; }
    std::vector<double> expand() const;
};

Multipliers multipliers(const BlockPartition& part, Rng& rng);

// Which mean is removed inside the bootstrap sum: the full term
// X_t X_{t+h} B_k(t), or only the product X_t X_{t+h} (with the basis sign
// applied to the centered product). The two agree asymptotically, but
// full-term centering subtracts a scalar mean and therefore leaves the
// deterministic oscillation B_k(t) E[X_t X_{t+h}] inside each block; with
// block length b the draw variance then carries a spurious b (E[X_t
// X_{t+h}])^2 term at every lag where the product has nonzero mean (lag 0
// always). Product centering removes the mean pointwise, so the test
// pipeline defaults to it; the full-term form remains available for
// comparison experiments and for the exact single-block degeneracy.
enum class Centering { FullTerm, ProductOnly };

// Delta g(h,k) = (1/T) sum_t phi_t { X_t X_{t+h} B_k(t) - gbar }. Evaluated
// blockwise as (1/T^2) sum_s xi_s (T A_s - n_s S) so that the one-block
// lag-0 case cancels exactly rather than up to rounding.
double delta_g(const Series& x, std::size_t h, std::size_t k, const BasisMatrix& b,
               const Multipliers& m, Centering centering = Centering::FullTerm);

enum class Variant { Plain, Penalized, Weighted, WeightedPenalized, Jww };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct VariantSpec {
    Variant kind = Variant::Plain;
    PenaltyScheme penalty = PenaltyScheme::none();  // Penalized / WeightedPenalized
    WeightScheme weights = WeightScheme::none();    // Weighted / WeightedPenalized

    static VariantSpec make(Variant v, double penalty_a = 0.25);
};

struct BootstrapConfig {
    std::size_t m = 200;                    // bootstrap replications
    std::uint64_t seed = 0;
    std::optional<std::size_t> block_size;  // default rule when unset
    Centering centering = Centering::ProductOnly;
    unsigned workers = 1;
};

struct TestResult {
    VariantSpec variant;
    BasisKind basis = BasisKind::Walsh;     // basis attaining the statistic
    Grid grid;
    double statistic = 0.0;
    double p_value = 1.0;
    double level = 0.05;
    bool reject = false;
    ArgmaxCell argmax;
    DiffMatrix diff;                        // of the basis attaining the statistic
    std::vector<double> draws;              // replication order
    std::size_t block_size = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

// (1/M) #{draws_i >= statistic}; ties count toward the p-value.
double bootstrap_pvalue(std::span<const double> draws, double statistic);

struct BasisPlan {
    const BasisMatrix* matrix = nullptr;
    Grid grid;
};

// Shared-draw engine: one multiplier array per replication feeds every basis
// and every variant, so multi-variant runs and the two-basis max-max test
// see a common bootstrap sample. Results are keyed by (seed, replication)
// and independent of worker count.
std::vector<TestResult> run_test_multi(const Series& x, std::span<const BasisPlan> bases,
                                       std::span<const VariantSpec> variants,
                                       const BootstrapConfig& cfg, double level);

TestResult run_test(const Series& x, const Grid& grid, const BasisMatrix& b,
                    const VariantSpec& variant, const BootstrapConfig& cfg,
                    double level = 0.05);

} // namespace covstat
