#ifndef P300SNR_RNG_HPP
#define P300SNR_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace p300snr {

// Deterministic random source: std::mt19937_64 with 53-bit uniform doubles and
// inverse-CDF normals, so a seed pins every draw bit-for-bit across platforms.
//
// Stream splitting: substream(seed, key) seeds a fresh engine with
//   splitmix64(splitmix64(seed) ^ (key + 0x9e3779b97f4a7c15))
// The simulator uses one substream per symbol; harness code uses one per
// repetition or per subset, so results do not depend on evaluation order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static std::uint64_t splitmix64(std::uint64_t x);
    static Rng substream(std::uint64_t seed, std::uint64_t key);

    // Uniform on [0, 1) with 53 random bits.
    double uniform01();

    // Standard normal via the inverse CDF of a uniform draw.
    double normal();

    // Uniform integer in [0, n), unbiased (bitmask rejection).
    std::uint64_t integer_below(std::uint64_t n);

    // Fresh uniformly random permutation of {0, ..., n-1}.
    std::vector<int> permutation(int n);

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace p300snr

#endif
