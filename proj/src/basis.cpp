#include "covstat/basis.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "covstat/errors.hpp"

namespace covstat {

namespace {

// W_0 = 1 everywhere; W_1 = +1 on [0,1/2), -1 on [1/2,1). For i >= 2 with
// i = 2j or 2j+1, the left half defers to W_j(2x) with no sign, the right
// half to W_j(2x-1) with sign (-1)^j for even i and (-1)^(j+1) for odd i.
// Doubling the numerator keeps the denominator fixed, so every branch test
// 2*num < den is exact integer arithmetic.
int walsh_core(std::uint64_t i, std::int64_t num, std::int64_t den) {
    int sign = 1;
    while (i >= 2) {
        const std::uint64_t j = i >> 1;
        if (2 * num < den) {
            num = 2 * num;
        } else {
            const bool odd = (i & 1) != 0;
            const bool j_odd = (j & 1) != 0;
            if (odd ? !j_odd : j_odd) sign = -sign;
            num = 2 * num - den;
        }
        i = j;
    }
    if (i == 1 && 2 * num >= den) sign = -sign;
    return sign;
}

// Exact dyadic decomposition of a double in [0,1): x = num/den with den a
// power of two <= 2^61. Leading zero bits of tiny x are consumed first by
// halving the index, which only ever takes the sign-free left branch.
struct DyadicPoint {
    std::int64_t num;
    std::int64_t den;
};

DyadicPoint to_rational(double x) {
    int exp = 0;
    const double f = std::frexp(x, &exp); // x = f * 2^exp, f in [0.5, 1)
    const auto num = static_cast<std::int64_t>(std::ldexp(f, 53));
    return {num, std::int64_t{1} << (53 - exp)};
}

void check_unit_interval(double x) {
    if (!(x >= 0.0 && x < 1.0))
        throw std::domain_error("basis evaluation point must lie in [0,1), got " +
                                std::to_string(x));
}

} // namespace

int walsh_sign_rational(std::uint64_t i, std::int64_t num, std::int64_t den) {
    return walsh_core(i, num, den);
}

int haar_sign_rational(std::uint64_t k, std::int64_t num, std::int64_t den) {
    // psi_k(x) = psi(frac(2^(k-1) x)); reduce the numerator mod den while doubling.
    std::int64_t r = num;
    for (std::uint64_t step = 1; step < k; ++step) {
        r *= 2;
        if (r >= den) r -= den;
    }
    return (2 * r < den) ? 1 : -1;
}

int walsh_eval(std::uint64_t i, double x) {
    check_unit_interval(x);
    if (x == 0.0) return 1; // every left branch, no sign flips
    while (i >= 2 && x < 0x1p-9) {
        i >>= 1;
        x *= 2.0;
    }
    if (x < 0x1p-9) return 1; // i is 0 or 1 and x < 1/2
    const auto [num, den] = to_rational(x);
    return walsh_core(i, num, den);
}

int haar_composite_eval(std::uint64_t k, double x) {
    if (k == 0) throw std::domain_error("composite Haar counter starts at k = 1");
    check_unit_interval(x);
    if (x == 0.0) return 1;
    while (k >= 2 && x < 0x1p-9) {
        --k;
        x *= 2.0; // psi_k(x) = psi_{k-1}(2x), exact below 1/2
    }
    if (x < 0x1p-9) return 1;
    const auto [num, den] = to_rational(x);
    return haar_sign_rational(k, num, den);
}

std::size_t max_counters(BasisKind kind, std::size_t T) {
    if (kind == BasisKind::Walsh) return T >= 2 ? T - 1 : 0;
    return T >= 2 ? static_cast<std::size_t>(std::bit_width(T) - 1) : 0; // floor(log2 T)
}

BasisMatrix basis_matrix(BasisKind kind, std::size_t K, std::size_t T) {
    if (T < 2) throw ConfigError("basis matrix needs T >= 2, got T = " + std::to_string(T));
    if (K < 1) throw ConfigError("basis matrix needs K >= 1");
    const std::size_t kmax = max_counters(kind, T);
    if (K > kmax) {
        const char* why = kind == BasisKind::Walsh
                              ? " (Walsh rows repeat beyond K = T-1)"
                              : " (composite Haar needs 2^K <= T)";
        throw ConfigError("K = " + std::to_string(K) + " exceeds limit " +
                          std::to_string(kmax) + " for T = " + std::to_string(T) + why);
    }

    std::vector<std::int8_t> data(K * T);
    const auto den = static_cast<std::int64_t>(T);
    for (std::size_t k = 1; k <= K; ++k) {
        std::int8_t* row = data.data() + (k - 1) * T;
        for (std::size_t t = 1; t <= T; ++t) {
            const auto num = static_cast<std::int64_t>(t - 1);
            row[t - 1] = static_cast<std::int8_t>(
                kind == BasisKind::Walsh ? walsh_sign_rational(k, num, den)
                                         : haar_sign_rational(k, num, den));
        }
    }
    return BasisMatrix(kind, K, T, std::move(data));
}

std::vector<std::size_t> systematic_sample(BasisKind kind, std::size_t k, std::size_t T) {
    if (k < 1 || k > max_counters(kind, T))
        throw ConfigError("systematic sample counter k = " + std::to_string(k) +
                          " invalid for T = " + std::to_string(T));
    // Walsh selects the sign (-1)^(k-1); Haar selects +1.
    const int want = (kind == BasisKind::Walsh && k % 2 == 0) ? -1 : 1;
    const auto den = static_cast<std::int64_t>(T);
    std::vector<std::size_t> idx;
    idx.reserve((T + 1) / 2);
    for (std::size_t t = 1; t <= T; ++t) {
        const auto num = static_cast<std::int64_t>(t - 1);
        const int v = kind == BasisKind::Walsh ? walsh_sign_rational(k, num, den)
                                               : haar_sign_rational(k, num, den);
        if (v == want) idx.push_back(t);
    }
    return idx;
}

} // namespace covstat
