#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace covstat {

enum class BasisKind { Walsh, HaarComposite };

// Sign of the sequency-ordered Walsh function W_i at the exact rational
// x = num/den. Requires 0 <= num < den <= 2^62. Walsh functions are
// piecewise constant on dyadic cells, so integer halving decides every
// branch exactly; no floating thresholds are involved.
int walsh_sign_rational(std::uint64_t i, std::int64_t num, std::int64_t den);

// Sign of the composite Haar function psi_k (k >= 1, k = 1 is the mother
// wavelet) at x = num/den. psi_k(x) = psi(frac(2^(k-1) x)), evaluated by
// modular doubling of the numerator.
int haar_sign_rational(std::uint64_t k, std::int64_t num, std::int64_t den);

// Pointwise evaluation at a real x in [0,1). The double is converted to an
// exact dyadic rational first, so these agree with the rational forms.
// Throws std::domain_error for x outside [0,1) (and k = 0 for Haar).
int walsh_eval(std::uint64_t i, double x);
int haar_composite_eval(std::uint64_t k, double x);

// K x T matrix of basis values at the grid points x_t = (t-1)/T.
// Rows are counters k = 1..K, columns are time indices t = 1..T.
class BasisMatrix {
public:
    BasisMatrix(BasisKind kind, std::size_t K, std::size_t T, std::vector<std::int8_t> data)
        : kind_(kind), K_(K), T_(T), data_(std::move(data)) {}

    BasisKind kind() const { return kind_; }
    std::size_t counters() const { return K_; }
    std::size_t length() const { return T_; }

    // k in 1..K, t in 1..T
    int at(std::size_t k, std::size_t t) const {
        return data_[(k - 1) * T_ + (t - 1)];
    }
    std::span<const std::int8_t> row(std::size_t k) const {
        return {data_.data() + (k - 1) * T_, T_};
    }

private:
    BasisKind kind_;
    std::size_t K_;
    std::size_t T_;
    std::vector<std::int8_t> data_;
};

// Builds the matrix. Walsh requires K <= T-1 (distinct rows on the grid);
// HaarComposite requires 2^K <= T (finer counters alias). Violations throw
// ConfigError.
BasisMatrix basis_matrix(BasisKind kind, std::size_t K, std::size_t T);

// Largest K valid for basis_matrix at this T.
std::size_t max_counters(BasisKind kind, std::size_t T);

// 1-based time indices of the systematic half sample selected by counter k:
// Walsh keeps t with (-1)^(k-1) W_k(t) = 1, Haar keeps t with Psi_k(t) = 1.
std::vector<std::size_t> systematic_sample(BasisKind kind, std::size_t k, std::size_t T);

} // namespace covstat
