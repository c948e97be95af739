#pragma once

#include <stdexcept>
#include <string>

namespace covstat {

// Error taxonomy mirrors the CLI exit codes: input data problems,
// degenerate series (zero sample variance), and bad configuration.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateSeriesError : std::runtime_error {
    explicit DegenerateSeriesError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace covstat
