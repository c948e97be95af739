#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "covstat/basis.hpp"
#include "covstat/errors.hpp"

using covstat::BasisKind;
using covstat::BasisMatrix;
using covstat::basis_matrix;
using covstat::haar_composite_eval;
using covstat::haar_sign_rational;
using covstat::max_counters;
using covstat::systematic_sample;
using covstat::walsh_eval;
using covstat::walsh_sign_rational;

namespace {

std::vector<int> row_of(const BasisMatrix& b, std::size_t k) {
    std::vector<int> out;
    out.reserve(b.length());
    for (std::size_t t = 1; t <= b.length(); ++t) out.push_back(b.at(k, t));
    return out;
}

int row_sum(const BasisMatrix& b, std::size_t k) {
    int s = 0;
    for (std::size_t t = 1; t <= b.length(); ++t) s += b.at(k, t);
    return s;
}

int sign_changes(const std::vector<int>& row) {
    int changes = 0;
    for (std::size_t t = 1; t < row.size(); ++t)
        if (row[t] != row[t - 1]) ++changes;
    return changes;
}

} // namespace

TEST_CASE("square-wave evaluation matches frozen pointwise values") {
    CHECK(walsh_eval(0, 0.9) == 1);
    CHECK(walsh_eval(1, 0.75) == -1);
    CHECK(walsh_eval(2, 0.25) == -1);
    CHECK(walsh_eval(3, 0.6) == 1);

    CHECK(haar_composite_eval(1, 0.3) == 1);
    CHECK(haar_composite_eval(2, 0.3) == -1);
    CHECK(haar_composite_eval(2, 0.6) == 1);
}

TEST_CASE("evaluation rejects points outside the unit interval") {
    CHECK_THROWS_AS(walsh_eval(0, 1.0), std::domain_error);
    CHECK_THROWS_AS(walsh_eval(3, -0.25), std::domain_error);
    CHECK_THROWS_AS(haar_composite_eval(1, 1.0), std::domain_error);
    CHECK_THROWS_AS(haar_composite_eval(2, -1e-9), std::domain_error);
    CHECK_THROWS_AS(haar_composite_eval(0, 0.3), std::domain_error);
}

TEST_CASE("small discretized matrices match their frozen sign patterns") {
    const BasisMatrix w = basis_matrix(BasisKind::Walsh, 3, 4);
    CHECK(row_of(w, 1) == std::vector<int>{1, 1, -1, -1});
    CHECK(row_of(w, 2) == std::vector<int>{1, -1, -1, 1});
    CHECK(row_of(w, 3) == std::vector<int>{1, -1, 1, -1});

    const BasisMatrix h = basis_matrix(BasisKind::HaarComposite, 2, 4);
    CHECK(row_of(h, 1) == std::vector<int>{1, 1, -1, -1});
    CHECK(row_of(h, 2) == std::vector<int>{1, -1, 1, -1});
}

TEST_CASE("Gram matrix of the 8x256 Walsh matrix is 256 times identity") {
    const BasisMatrix b = basis_matrix(BasisKind::Walsh, 8, 256);
    for (std::size_t j = 1; j <= 8; ++j) {
        for (std::size_t k = 1; k <= 8; ++k) {
            long dot = 0;
            for (std::size_t t = 1; t <= 256; ++t)
                dot += static_cast<long>(b.at(j, t)) * b.at(k, t);
            CHECK(dot == (j == k ? 256 : 0));
        }
        CHECK(row_sum(b, j) == 0);
    }
}

TEST_CASE("dyadic length gives exact orthogonality and zero row sums") {
    const BasisMatrix w = basis_matrix(BasisKind::Walsh, 16, 64);
    for (std::size_t j = 1; j <= 16; ++j) {
        CHECK(row_sum(w, j) == 0);
        for (std::size_t k = j + 1; k <= 16; ++k) {
            long dot = 0;
            for (std::size_t t = 1; t <= 64; ++t)
                dot += static_cast<long>(w.at(j, t)) * w.at(k, t);
            CHECK(dot == 0);
        }
    }

    const BasisMatrix h = basis_matrix(BasisKind::HaarComposite, 6, 64);
    for (std::size_t j = 1; j <= 6; ++j) {
        CHECK(row_sum(h, j) == 0);
        for (std::size_t k = j + 1; k <= 6; ++k) {
            long dot = 0;
            for (std::size_t t = 1; t <= 64; ++t)
                dot += static_cast<long>(h.at(j, t)) * h.at(k, t);
            CHECK(dot == 0);
        }
    }
}

TEST_CASE("row sums respect the counter-dependent bounds at any length") {
    const std::vector<std::size_t> lengths{16, 17, 23, 64, 100, 127, 128, 200, 255, 333, 500, 512};
    for (std::size_t T : lengths) {
        for (std::size_t k = 1; k <= 16; ++k) {
            long ws = 0;
            long hs = 0;
            for (std::size_t t = 1; t <= T; ++t) {
                const double x = static_cast<double>(t - 1) / static_cast<double>(T);
                ws += walsh_eval(k, x);
                hs += haar_composite_eval(k, x);
            }
            CHECK((ws < 0 ? -ws : ws) <= static_cast<long>(k) + 1);
            CHECK((hs < 0 ? -hs : hs) <= (1L << k));
        }
    }
    // Dyadic lengths annihilate every composite-Haar row exactly.
    for (std::size_t T : {16u, 64u, 128u, 512u}) {
        for (std::size_t k = 1; (1u << k) <= T; ++k) {
            long hs = 0;
            for (std::size_t t = 1; t <= T; ++t)
                hs += haar_composite_eval(k, static_cast<double>(t - 1) / static_cast<double>(T));
            CHECK(hs == 0);
        }
    }
}

TEST_CASE("Walsh row k shows exactly k sign changes when resolvable") {
    const BasisMatrix small = basis_matrix(BasisKind::Walsh, 7, 8);
    for (std::size_t k = 1; k <= 7; ++k)
        CHECK(sign_changes(row_of(small, k)) == static_cast<int>(k));

    const BasisMatrix big = basis_matrix(BasisKind::Walsh, 16, 512);
    for (std::size_t k = 1; k <= 16; ++k)
        CHECK(sign_changes(row_of(big, k)) == static_cast<int>(k));
}

TEST_CASE("first and third Walsh rows coincide with the two finest-free Haar rows") {
    for (std::size_t T : {16u, 37u, 64u, 101u, 256u}) {
        for (std::size_t t = 1; t <= T; ++t) {
            const double x = static_cast<double>(t - 1) / static_cast<double>(T);
            CHECK(walsh_eval(1, x) == haar_composite_eval(1, x));
            CHECK(walsh_eval(3, x) == haar_composite_eval(2, x));
        }
    }
}

TEST_CASE("systematic samples match frozen index sets") {
    CHECK(systematic_sample(BasisKind::Walsh, 1, 8) == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(systematic_sample(BasisKind::Walsh, 2, 8) == std::vector<std::size_t>{3, 4, 5, 6});
    CHECK(systematic_sample(BasisKind::HaarComposite, 2, 8) == std::vector<std::size_t>{1, 2, 5, 6});
}

TEST_CASE("systematic samples satisfy the sign rule and near-half sizing") {
    // The sign rule is the defining condition; it forces the sample size to
    // (T + s)/2 where s is the selected-sign row sum, so the size can only
    // deviate from T/2 by half the row-sum bound. Dyadic lengths split
    // exactly in half.
    for (std::size_t T : {16u, 21u, 33u, 40u}) {
        const bool dyadic = (T & (T - 1)) == 0;
        const BasisMatrix w = basis_matrix(BasisKind::Walsh, 8, T);
        for (std::size_t k = 1; k <= 8; ++k) {
            const auto idx = systematic_sample(BasisKind::Walsh, k, T);
            const std::set<std::size_t> in(idx.begin(), idx.end());
            const int flip = (k % 2 == 1) ? 1 : -1; // (-1)^(k-1)
            for (std::size_t t = 1; t <= T; ++t)
                CHECK(in.count(t) == (flip * w.at(k, t) == 1 ? 1u : 0u));
            const long dev = 2L * static_cast<long>(idx.size()) - static_cast<long>(T);
            CHECK((dev < 0 ? -dev : dev) <= static_cast<long>(k) + 1);
            if (dyadic) CHECK(idx.size() == T / 2);
        }
        const std::size_t kmax = max_counters(BasisKind::HaarComposite, T);
        const BasisMatrix h = basis_matrix(BasisKind::HaarComposite, kmax, T);
        for (std::size_t k = 1; k <= kmax; ++k) {
            const auto idx = systematic_sample(BasisKind::HaarComposite, k, T);
            const std::set<std::size_t> in(idx.begin(), idx.end());
            for (std::size_t t = 1; t <= T; ++t)
                CHECK(in.count(t) == (h.at(k, t) == 1 ? 1u : 0u));
            const long dev = 2L * static_cast<long>(idx.size()) - static_cast<long>(T);
            CHECK((dev < 0 ? -dev : dev) <= (1L << k));
            if (dyadic) CHECK(idx.size() == T / 2);
        }
    }
}

TEST_CASE("matrix rows agree with pointwise evaluation") {
    for (std::size_t T : {16u, 37u, 64u}) {
        const BasisMatrix w = basis_matrix(BasisKind::Walsh, 10, T);
        const std::size_t hk = max_counters(BasisKind::HaarComposite, T);
        const BasisMatrix h = basis_matrix(BasisKind::HaarComposite, hk, T);
        for (std::size_t t = 1; t <= T; ++t) {
            const double x = static_cast<double>(t - 1) / static_cast<double>(T);
            for (std::size_t k = 1; k <= 10; ++k) CHECK(w.at(k, t) == walsh_eval(k, x));
            for (std::size_t k = 1; k <= hk; ++k) CHECK(h.at(k, t) == haar_composite_eval(k, x));
        }
    }
}

TEST_CASE("rational and floating-point evaluators agree on exact dyadic points") {
    std::mt19937_64 gen(12345);
    const std::int64_t den = std::int64_t{1} << 20;
    for (int rep = 0; rep < 200; ++rep) {
        const std::int64_t num = static_cast<std::int64_t>(gen() % static_cast<std::uint64_t>(den));
        const double x = static_cast<double>(num) / static_cast<double>(den);
        for (std::uint64_t i = 0; i <= 40; ++i)
            CHECK(walsh_sign_rational(i, num, den) == walsh_eval(i, x));
        for (std::uint64_t k = 1; k <= 12; ++k)
            CHECK(haar_sign_rational(k, num, den) == haar_composite_eval(k, x));
    }
}

TEST_CASE("matrix construction rejects unrepresentable counters") {
    CHECK_THROWS_AS(basis_matrix(BasisKind::Walsh, 8, 8), covstat::ConfigError);
    CHECK_NOTHROW(basis_matrix(BasisKind::Walsh, 7, 8));
    CHECK_THROWS_AS(basis_matrix(BasisKind::HaarComposite, 4, 8), covstat::ConfigError);
    CHECK_NOTHROW(basis_matrix(BasisKind::HaarComposite, 3, 8));

    CHECK(max_counters(BasisKind::Walsh, 64) == 63);
    CHECK(max_counters(BasisKind::HaarComposite, 64) == 6);
    CHECK(max_counters(BasisKind::HaarComposite, 100) == 6);
    CHECK(max_counters(BasisKind::HaarComposite, 128) == 7);
}
