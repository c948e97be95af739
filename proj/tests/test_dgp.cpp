#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "covstat/dgp.hpp"
#include "covstat/errors.hpp"
#include "covstat/rng.hpp"

using namespace covstat;

namespace {

double sample_variance(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size());
}

constexpr double kPi = std::numbers::pi;

} // namespace

TEST_CASE("innovation generators hit their theoretical variances") {
    Rng g1 = Rng::stream(2026, 0);
    const std::vector<double> gauss = gen_errors(ErrorKind::Gaussian, 100000, g1);
    CHECK(sample_variance(gauss) == doctest::Approx(1.0).epsilon(0.02));

    Rng g2 = Rng::stream(2026, 1);
    const std::vector<double> t5 = gen_errors(ErrorKind::StudentT5, 100000, g2);
    CHECK(sample_variance(t5) == doctest::Approx(5.0 / 3.0).epsilon(0.05));
}

TEST_CASE("conditional-variance recursion matches forced-innovation arithmetic") {
    // z = 0 keeps the noise at zero while the variance recursion runs
    // deterministically: sigma2 = 1, 1.6, 1.96.
    const std::vector<double> zeros{0.0, 0.0, 0.0};
    const std::vector<double> eps0 = garch_path(zeros);
    CHECK(eps0 == std::vector<double>{0.0, 0.0, 0.0});

    // z = 1 exposes sigma_t directly: eps_t = sigma_t.
    const std::vector<double> ones{1.0, 1.0, 1.0};
    const std::vector<double> eps1 = garch_path(ones);
    REQUIRE(eps1.size() == 3);
    CHECK(eps1[0] == 1.0);
    const double s2 = 1.0 + 0.3 * eps1[0] * eps1[0] + 0.6 * 1.0;
    CHECK(eps1[1] == doctest::Approx(std::sqrt(s2)).epsilon(1e-15));
    const double s3 = 1.0 + 0.3 * eps1[1] * eps1[1] + 0.6 * s2;
    CHECK(eps1[2] == doctest::Approx(std::sqrt(s3)).epsilon(1e-15));
}

TEST_CASE("pre-sample lag counts match each model's deepest error lag") {
    CHECK(presample_lags(Model::Null1) == 0);
    CHECK(presample_lags(Model::Null4) == 0);
    CHECK(presample_lags(Model::Alt1) == 1);
    CHECK(presample_lags(Model::Alt2) == 6);
    CHECK(presample_lags(Model::Alt6) == 1);
    CHECK(presample_lags(Model::Alt9) == 25);
    CHECK(presample_lags(Model::Alt5) == 0);
}

TEST_CASE("white-noise model passes innovations through") {
    const std::vector<double> eps{0.3, -1.2, 0.7, 2.0, -0.4, 0.1, 0.9, -2.2};
    CHECK(model_path(Model::Null1, 8, 8, eps) == eps);
}

TEST_CASE("autoregressive null recursion from a forced start") {
    const std::vector<double> eps{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    const std::vector<double> x = model_path(Model::Null2, 8, 8, eps, 0.0);
    CHECK(x[0] == 1.0);
    for (std::size_t t = 1; t < 8; ++t)
        CHECK(x[t] == doctest::Approx(0.5 * x[t - 1]).epsilon(1e-15));
}

TEST_CASE("threshold null flips its slope on the sign of the lagged state") {
    const std::vector<double> zeros(8, 0.0);
    const std::vector<double> x = model_path(Model::Null3, 8, 8, zeros, 1.0);
    // X1 = .7*1 - 1.4*1 = -0.7 (positive branch), X2 = .7*(-.7) = -0.49.
    CHECK(x[0] == doctest::Approx(-0.7).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(-0.49).epsilon(1e-15));
    CHECK(x[2] == doctest::Approx(-0.343).epsilon(1e-15));
}

TEST_CASE("half-sample slope switch decays then alternates") {
    const std::vector<double> zeros(8, 0.0);
    const std::vector<double> x = model_path(Model::Alt5, 8, 8, zeros, 1.0);
    // +.5 up to t = T/2, then -.5.
    CHECK(x[0] == 0.5);
    CHECK(x[1] == 0.25);
    CHECK(x[2] == 0.125);
    CHECK(x[3] == 0.0625);
    CHECK(x[4] == -0.03125);
    CHECK(x[5] == 0.015625);
    CHECK(x[6] == -0.0078125);
    CHECK(x[7] == 0.00390625);
}

TEST_CASE("quarter-sample slope switch uses the outer-positive pattern") {
    const std::vector<double> zeros(8, 0.0);
    const std::vector<double> x = model_path(Model::Alt4, 8, 8, zeros, 1.0);
    const double expected_signs[8] = {+0.5, +0.5, -0.5, -0.5, -0.5, -0.5, +0.5, +0.5};
    double prev = 1.0;
    for (std::size_t t = 0; t < 8; ++t) {
        CHECK(x[t] == doctest::Approx(expected_signs[t] * prev).epsilon(1e-15));
        prev = x[t];
    }
}

TEST_CASE("late-sample innovation doubling kicks in after three quarters") {
    const std::vector<double> ones(8, 1.0);
    const std::vector<double> x = model_path(Model::Alt8, 8, 8, ones, 0.0);
    double prev = 0.0;
    for (std::size_t t = 1; t <= 8; ++t) {
        const double v = t > 6 ? 2.0 : 1.0; // 4t > 3T with T = 8
        CHECK(x[t - 1] == doctest::Approx(0.5 * prev + v).epsilon(1e-15));
        prev = x[t - 1];
    }

    // With live noise the late-quarter innovation variance quadruples, so the
    // segment variance ratio should comfortably exceed 2 on average.
    double ratio_sum = 0.0;
    const std::size_t reps = 40;
    for (std::size_t r = 0; r < reps; ++r) {
        Rng rng = Rng::stream(410, r);
        DgpSpec spec;
        spec.model = Model::Alt8;
        spec.T = 512;
        const std::vector<double> path = generate(spec, rng);
        const std::vector<double> head(path.begin(), path.begin() + 384);
        const std::vector<double> tail(path.begin() + 384, path.end());
        ratio_sum += sample_variance(tail) / sample_variance(head);
    }
    CHECK(ratio_sum / static_cast<double>(reps) > 2.0);
}

TEST_CASE("time-varying coefficient models follow their closed forms") {
    const std::size_t T = 16;
    const std::vector<double> ones(T + 1, 1.0); // one pre-sample lag

    // Moving averages with a cosine-of-cosine coefficient at lags 1, 6, 25.
    const std::vector<double> a1 = model_path(Model::Alt1, T, T, ones);
    for (std::size_t t = 1; t <= T; ++t) {
        const double c = 1.1 * std::cos(1.5 - std::cos(4.0 * kPi * t / T));
        CHECK(a1[t - 1] == doctest::Approx(c + 1.0).epsilon(1e-14));
    }

    const std::vector<double> ones6(T + 6, 1.0);
    const std::vector<double> a2 = model_path(Model::Alt2, T, T, ones6);
    const std::vector<double> ones25(T + 25, 1.0);
    const std::vector<double> a9 = model_path(Model::Alt9, T, T, ones25);
    for (std::size_t t = 1; t <= T; ++t) {
        const double c = 0.8 * std::cos(1.5 - std::cos(4.0 * kPi * t / T));
        CHECK(a2[t - 1] == doctest::Approx(c + 1.0).epsilon(1e-14));
        CHECK(a9[t - 1] == doctest::Approx(a2[t - 1]).epsilon(1e-15)); // same form, deeper lag
    }

    // With heterogeneous errors the deep lag actually reaches 25 back.
    std::vector<double> tagged(T + 25, 0.0);
    for (std::size_t i = 0; i < tagged.size(); ++i) tagged[i] = static_cast<double>(i + 1);
    const std::vector<double> deep = model_path(Model::Alt9, T, T, tagged);
    for (std::size_t t = 1; t <= T; ++t) {
        const double c = 0.8 * std::cos(1.5 - std::cos(4.0 * kPi * t / T));
        const double lag25 = tagged[t - 1];      // e_{t-25} sits 25 slots back
        const double cur = tagged[t + 25 - 1];   // e_t
        CHECK(deep[t - 1] == doctest::Approx(c * lag25 + cur).epsilon(1e-12));
    }

    // Sine-slope autoregression.
    const std::vector<double> zeros(T, 0.0);
    std::vector<double> seed1(T, 0.0);
    seed1[0] = 1.0;
    const std::vector<double> a3 = model_path(Model::Alt3, T, T, seed1, 0.0);
    CHECK(a3[0] == 1.0);
    for (std::size_t t = 2; t <= T; ++t)
        CHECK(a3[t - 1] ==
              doctest::Approx(0.6 * std::sin(4.0 * kPi * t / T) * a3[t - 2]).epsilon(1e-12));

    // Slowly strengthening negative autoregression.
    const std::vector<double> a7 = model_path(Model::Alt7, T, T, seed1, 0.0);
    CHECK(a7[0] == 1.0);
    for (std::size_t t = 2; t <= T; ++t)
        CHECK(a7[t - 1] ==
              doctest::Approx(-0.9 * std::sqrt(static_cast<double>(t) / T) * a7[t - 2])
                  .epsilon(1e-12));

    // Two-term moving average with cosine coefficient.
    const std::vector<double> a6 = model_path(Model::Alt6, T, T, ones);
    for (std::size_t t = 1; t <= T; ++t)
        CHECK(a6[t - 1] ==
              doctest::Approx(1.0 - 0.5 * std::cos(2.0 * kPi * t / T)).epsilon(1e-14));
}

TEST_CASE("generation is reproducible and splits nulls across a burn-in half") {
    DgpSpec spec;
    spec.model = Model::Null2;
    spec.errors = ErrorKind::Gaussian;
    spec.T = 32;

    Rng a = Rng::stream(5, 1);
    Rng b = Rng::stream(5, 1);
    const std::vector<double> run1 = generate(spec, a);
    const std::vector<double> run2 = generate(spec, b);
    CHECK(run1 == run2);
    CHECK(run1.size() == 32);

    // The null path retains the last T of a 2T simulation started at zero.
    Rng c = Rng::stream(5, 1);
    const std::vector<double> errors = gen_errors(ErrorKind::Gaussian, 64, c);
    const std::vector<double> full = model_path(Model::Null2, 64, 64, errors);
    const std::vector<double> tail(full.end() - 32, full.end());
    CHECK(run1 == tail);

    // Alternatives run directly on t = 1..T ...
    DgpSpec alt;
    alt.model = Model::Alt5;
    alt.T = 32;
    Rng d = Rng::stream(5, 2);
    const std::vector<double> altpath = generate(alt, d);
    Rng e = Rng::stream(5, 2);
    const std::vector<double> alterr = gen_errors(ErrorKind::Gaussian, 32, e);
    CHECK(altpath == model_path(Model::Alt5, 32, 32, alterr));

    // ... unless the burn-in flag runs the clock over 2T and keeps the tail.
    DgpSpec altb = alt;
    altb.alt_burnin = true;
    Rng f = Rng::stream(5, 2);
    const std::vector<double> burned = generate(altb, f);
    Rng g = Rng::stream(5, 2);
    const std::vector<double> berr = gen_errors(ErrorKind::Gaussian, 64, g);
    const std::vector<double> bfull = model_path(Model::Alt5, 64, 64, berr);
    CHECK(burned == std::vector<double>(bfull.end() - 32, bfull.end()));

    CHECK_THROWS_AS(generate(DgpSpec{Model::Null1, ErrorKind::Gaussian, 4, false}, a),
                    ConfigError);
}

TEST_CASE("the conditional-variance null ignores the configured error kind") {
    DgpSpec g1{Model::Null4, ErrorKind::Gaussian, 64, false};
    DgpSpec g2{Model::Null4, ErrorKind::StudentT5, 64, false};
    Rng a = Rng::stream(8, 0);
    Rng b = Rng::stream(8, 0);
    CHECK(generate(g1, a) == generate(g2, b));
}

TEST_CASE("model and error names round-trip") {
    for (Model m : {Model::Null1, Model::Null2, Model::Null3, Model::Null4, Model::Alt1,
                    Model::Alt2, Model::Alt3, Model::Alt4, Model::Alt5, Model::Alt6,
                    Model::Alt7, Model::Alt8, Model::Alt9})
        CHECK(model_from_name(model_name(m)) == m);
    for (ErrorKind e : {ErrorKind::Gaussian, ErrorKind::StudentT5, ErrorKind::Garch11})
        CHECK(error_from_name(error_name(e)) == e);
    CHECK_THROWS_AS(model_from_name("null9"), ConfigError);
    CHECK_THROWS_AS(error_from_name("cauchy"), ConfigError);

    CHECK(is_null_model(Model::Null3));
    CHECK_FALSE(is_null_model(Model::Alt7));
}
