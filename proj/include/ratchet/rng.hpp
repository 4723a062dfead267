#pragma once

#include <cstdint>
#include <random>

namespace ratchet {

/// SplitMix64 finaliser; mixes (seed, stream) into an engine seed.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

[[nodiscard]] constexpr std::uint64_t stream_seed(std::uint64_t seed,
                                                  std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

/// Gaussian source for one integration stream. Streams with different
/// (seed, stream) pairs are independent; identical pairs replay exactly.
class NormalSource {
public:
    NormalSource(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(stream_seed(seed, stream)) {}

    double operator()() { return normal_(engine_); }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ratchet
