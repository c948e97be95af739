#include "covstat/dgp.hpp"

#include <cmath>
#include <numbers>

#include "covstat/errors.hpp"

namespace covstat {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct ModelInfo {
    Model model;
    const char* name;
};

constexpr ModelInfo model_table[] = {
    {Model::Null1, "null1"}, {Model::Null2, "null2"}, {Model::Null3, "null3"},
    {Model::Null4, "null4"}, {Model::Alt1, "alt1"},   {Model::Alt2, "alt2"},
    {Model::Alt3, "alt3"},   {Model::Alt4, "alt4"},   {Model::Alt5, "alt5"},
    {Model::Alt6, "alt6"},   {Model::Alt7, "alt7"},   {Model::Alt8, "alt8"},
    {Model::Alt9, "alt9"},
};

} // namespace

std::string model_name(Model m) {
    for (const auto& e : model_table)
        if (e.model == m) return e.name;
    return "null1";
}

Model model_from_name(const std::string& name) {
    for (const auto& e : model_table)
        if (name == e.name) return e.model;
    throw ConfigError("unknown model id: " + name);
}

std::string error_name(ErrorKind e) {
    switch (e) {
    case ErrorKind::Gaussian: return "gauss";
    case ErrorKind::StudentT5: return "t5";
    case ErrorKind::Garch11: return "garch";
    }
    return "gauss";
}

ErrorKind error_from_name(const std::string& name) {
    if (name == "gauss") return ErrorKind::Gaussian;
    if (name == "t5") return ErrorKind::StudentT5;
    if (name == "garch") return ErrorKind::Garch11;
    throw ConfigError("unknown error kind: " + name + " (expected gauss, t5, or garch)");
}

bool is_null_model(Model m) {
    return m == Model::Null1 || m == Model::Null2 || m == Model::Null3 || m == Model::Null4;
}

std::vector<double> garch_path(std::span<const double> z) {
    std::vector<double> eps(z.size());
    double sigma2 = 1.0;
    for (std::size_t t = 0; t < z.size(); ++t) {
        eps[t] = std::sqrt(sigma2) * z[t];
        sigma2 = 1.0 + 0.3 * eps[t] * eps[t] + 0.6 * sigma2;
    }
    return eps;
}

std::vector<double> gen_errors(ErrorKind kind, std::size_t n, Rng& rng) {
    if (n < 1) throw ConfigError("error sequence length must be >= 1");
    std::vector<double> out(n);
    switch (kind) {
    case ErrorKind::Gaussian:
        for (double& v : out) v = rng.normal();
        return out;
    case ErrorKind::StudentT5:
        for (double& v : out) v = rng.student_t(5.0);
        return out;
    case ErrorKind::Garch11:
        for (double& v : out) v = rng.normal();
        return garch_path(out);
    }
    return out;
}

std::size_t presample_lags(Model m) {
    switch (m) {
    case Model::Alt1:
    case Model::Alt6:
        return 1;
    case Model::Alt2:
        return 6;
    case Model::Alt9:
        return 25;
    default:
        return 0;
    }
}

std::vector<double> model_path(Model m, std::size_t n, std::size_t t_scale,
                               std::span<const double> errors, double x0) {
    const std::size_t d = presample_lags(m);
    if (errors.size() != n + d) throw ConfigError("error sequence length must be n + presample");
    // e(t) for t = 1-d..n
    auto e = [&](std::ptrdiff_t t) {
        return errors[static_cast<std::size_t>(t + static_cast<std::ptrdiff_t>(d) - 1)];
    };
    const double Ts = static_cast<double>(t_scale);

    std::vector<double> x(n);
    double prev = x0;

    // Alt1/Alt2/Alt9 share one moving-average form c*cos{1.5 - cos(4 pi t/T)}
    // at lags 1, 6, and 25.
    auto cos_ma = [&](double coeff, std::ptrdiff_t lag) {
        for (std::size_t t = 1; t <= n; ++t) {
            const auto ts = static_cast<std::ptrdiff_t>(t);
            x[t - 1] = coeff * std::cos(1.5 - std::cos(2.0 * two_pi * t / Ts)) * e(ts - lag) + e(ts);
        }
    };

    switch (m) {
    case Model::Null1:
        for (std::size_t t = 1; t <= n; ++t) x[t - 1] = e(t);
        break;
    case Model::Null2:
        for (std::size_t t = 1; t <= n; ++t) prev = x[t - 1] = 0.5 * prev + e(t);
        break;
    case Model::Null3:
        for (std::size_t t = 1; t <= n; ++t) {
            const double indicator = prev > 0.0 ? 1.0 : 0.0;
            prev = x[t - 1] = 0.7 * prev - 1.4 * prev * indicator + e(t);
        }
        break;
    case Model::Null4: {
        double sigma2 = 1.0;
        for (std::size_t t = 1; t <= n; ++t) {
            x[t - 1] = std::sqrt(sigma2) * e(t); // e is the z sequence here
            sigma2 = 1.0 + 0.3 * x[t - 1] * x[t - 1] + 0.6 * sigma2;
        }
        break;
    }
    case Model::Alt1:
        cos_ma(1.1, 1);
        break;
    case Model::Alt2:
        cos_ma(0.8, 6);
        break;
    case Model::Alt3:
        for (std::size_t t = 1; t <= n; ++t)
            prev = x[t - 1] = 0.6 * std::sin(2.0 * two_pi * t / Ts) * prev + e(t);
        break;
    case Model::Alt4:
        for (std::size_t t = 1; t <= n; ++t) {
            const bool outer = 4 * t <= t_scale || 4 * t > 3 * t_scale;
            prev = x[t - 1] = (outer ? 0.5 : -0.5) * prev + e(t);
        }
        break;
    case Model::Alt5:
        for (std::size_t t = 1; t <= n; ++t)
            prev = x[t - 1] = (2 * t <= t_scale ? 0.5 : -0.5) * prev + e(t);
        break;
    case Model::Alt6:
        for (std::size_t t = 1; t <= n; ++t)
            x[t - 1] = 2.0 * e(t) - (1.0 + 0.5 * std::cos(two_pi * t / Ts)) * e(t - 1);
        break;
    case Model::Alt7:
        for (std::size_t t = 1; t <= n; ++t)
            prev = x[t - 1] = -0.9 * std::sqrt(static_cast<double>(t) / Ts) * prev + e(t);
        break;
    case Model::Alt8:
        for (std::size_t t = 1; t <= n; ++t) {
            const double v = (4 * t <= 3 * t_scale ? 1.0 : 2.0) * e(t);
            prev = x[t - 1] = 0.5 * prev + v;
        }
        break;
    case Model::Alt9:
        cos_ma(0.8, 25);
        break;
    }
    return x;
}

std::vector<double> generate(const DgpSpec& spec, Rng& rng) {
    if (spec.T < 8) throw ConfigError("generated series needs T >= 8");
    const std::size_t d = presample_lags(spec.model);
    const bool burn = is_null_model(spec.model) || spec.alt_burnin;
    const std::size_t n = burn ? 2 * spec.T : spec.T;

    const ErrorKind kind = spec.model == Model::Null4 ? ErrorKind::Gaussian : spec.errors;
    const std::vector<double> errors = gen_errors(kind, n + d, rng);
    std::vector<double> path = model_path(spec.model, n, n, errors);
    if (!burn) return path;
    return {path.end() - static_cast<std::ptrdiff_t>(spec.T), path.end()};
}

} // namespace covstat
