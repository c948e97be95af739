#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "covstat/rng.hpp"

namespace covstat {

// Null1..Null4 are covariance stationary; Alt1..Alt9 deviate through
// rescaled-time coefficients, regime switches, or variance breaks.
enum class Model {
    Null1, Null2, Null3, Null4,
    Alt1, Alt2, Alt3, Alt4, Alt5, Alt6, Alt7, Alt8, Alt9,
};

enum class ErrorKind { Gaussian, StudentT5, Garch11 };

std::string model_name(Model m);
Model model_from_name(const std::string& name);
std::string error_name(ErrorKind e);
ErrorKind error_from_name(const std::string& name);
bool is_null_model(Model m);

struct DgpSpec {
    Model model = Model::Null1;
    ErrorKind errors = ErrorKind::Gaussian; // ignored by Null4
    std::size_t T = 0;
    // Alternatives are generated directly on t = 1..T (their coefficients
    // follow the retained sample's clock t/T); this flag instead applies the
    // simulate-2T/keep-T rule with the clock running over the full 2T span.
    bool alt_burnin = false;
};

// GARCH(1,1) recursion from forced innovations: eps_t = sigma_t z_t with
// sigma_1^2 = 1 and sigma_t^2 = 1 + .3 eps_{t-1}^2 + .6 sigma_{t-1}^2.
std::vector<double> garch_path(std::span<const double> z);

// Gaussian: iid N(0,1); StudentT5: iid t with 5 dof, unstandardized
// (variance 5/3); Garch11: the recursion above driven by iid N(0,1).
std::vector<double> gen_errors(ErrorKind kind, std::size_t n, Rng& rng);

// Pre-sample error lags a model consumes (e.g. the lag-25 moving-average
// alternative needs eps_{-24}..eps_0).
std::size_t presample_lags(Model m);

// Core recursion over t = 1..n. `errors` spans t = 1-d..n where
// d = presample_lags(m); rescaled-time coefficients use t/t_scale. For Null4
// the span is the z innovation sequence. x0 seeds X_0 (tests force it; the
// public generator always starts from zero state).
std::vector<double> model_path(Model m, std::size_t n, std::size_t t_scale,
                               std::span<const double> errors, double x0 = 0.0);

// Null models simulate 2T and keep the last T; alternatives run on t = 1..T
// directly unless spec.alt_burnin is set.
std::vector<double> generate(const DgpSpec& spec, Rng& rng);

} // namespace covstat
