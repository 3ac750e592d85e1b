#pragma once

#include <cstdint>
#include <limits>

namespace dkw {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Independent stream seed for (seed, stream).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ull));
}

// Per-trial seed: base_seed XOR a stream id derived from the trial index.
inline std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index) {
    return base_seed ^ splitmix64(trial_index);
}

// SplitMix64 as a UniformRandomBitGenerator.
class splitmix_engine {
public:
    using result_type = std::uint64_t;

    explicit splitmix_engine(std::uint64_t seed = 0): state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform on (0,1), never exactly 0 or 1.
    double open_unit() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

} // namespace dkw
