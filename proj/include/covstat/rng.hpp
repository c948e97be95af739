#pragma once

#include <cstdint>
#include <random>

namespace covstat {

// splitmix64 step; used only to mix keys into engine seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Collapses (seed, key...) into one well-mixed 64-bit value.
inline std::uint64_t mix_keys(std::uint64_t seed) {
    std::uint64_t s = seed;
    return splitmix64(s);
}

template <typename... Rest>
std::uint64_t mix_keys(std::uint64_t seed, std::uint64_t k, Rest... rest) {
    std::uint64_t s = seed ^ (k + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
    return mix_keys(splitmix64(s), rest...);
}

// Deterministic substream keyed by (seed, indices...). Streams with distinct
// keys are independent for Monte Carlo purposes, so work can be distributed
// across threads in any order without changing results.
class Rng {
public:
    explicit Rng(std::uint64_t mixed_seed) : engine_(mixed_seed) {}

    template <typename... Keys>
    static Rng stream(std::uint64_t seed, Keys... keys) {
        return Rng(mix_keys(seed, static_cast<std::uint64_t>(keys)...));
    }

    double normal() { return normal_(engine_); }
    double student_t(double dof) {
        std::student_t_distribution<double> d(dof);
        return d(engine_);
    }
    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

} // namespace covstat
