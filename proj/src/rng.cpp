#include "p300snr/rng.hpp"

#include <bit>
#include <numeric>
#include <stdexcept>

#include "p300snr/stats.hpp"

namespace p300snr {

std::uint64_t Rng::splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t key) {
    return Rng(splitmix64(splitmix64(seed) ^ (key + 0x9e3779b97f4a7c15ULL)));
}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    // uniform01 can return exactly 0; nudge into the open interval.
    double u = uniform01();
    if (u <= 0.0) u = 0x1.0p-54;
    return normal_quantile(u);
}

std::uint64_t Rng::integer_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("integer_below: n must be positive");
    if (n == 1) return 0;
    const int bits = std::bit_width(n - 1);
    const std::uint64_t mask = (bits >= 64) ? ~0ULL : ((1ULL << bits) - 1);
    for (;;) {
        const std::uint64_t v = engine_() & mask;
        if (v < n) return v;
    }
}

std::vector<int> Rng::permutation(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(integer_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
    return p;
}

}  // namespace p300snr
