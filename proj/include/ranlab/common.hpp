#pragma once

#include <array>
#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ranlab {

// Fixed slice ordering: Embb < Mmtc < Urllc. Every per-slice vector in the
// project uses this layout.
enum class SliceId : int { Embb = 0, Mmtc = 1, Urllc = 2 };

inline constexpr int kNumSlices = 3;
inline constexpr int kTotalPrbs = 50;     // 10 MHz carrier
inline constexpr int kTtiMs = 1;
inline constexpr int kPacketBytes = 125;  // Poisson packet size and tx-packet unit

inline constexpr std::array<SliceId, 3> all_slices() {
    return {SliceId::Embb, SliceId::Mmtc, SliceId::Urllc};
}

inline std::string_view slice_name(SliceId s) {
    switch (s) {
        case SliceId::Embb: return "embb";
        case SliceId::Mmtc: return "mmtc";
        case SliceId::Urllc: return "urllc";
    }
    throw std::logic_error("bad SliceId");
}

inline SliceId slice_from_name(std::string_view name) {
    if (name == "embb") return SliceId::Embb;
    if (name == "mmtc") return SliceId::Mmtc;
    if (name == "urllc") return SliceId::Urllc;
    throw std::invalid_argument("unknown slice name: " + std::string(name));
}

template <typename T>
T& slice_at(std::array<T, 3>& a, SliceId s) { return a[static_cast<int>(s)]; }
template <typename T>
const T& slice_at(const std::array<T, 3>& a, SliceId s) { return a[static_cast<int>(s)]; }

// Deterministic RNG: xoshiro256** seeded through splitmix64. All sampling
// helpers are implemented here (not via std::distributions) so that streams
// are bit-identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : seed_(seed) {
        uint64_t x = seed;
        for (auto& s : state_) s = splitmix64(x);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, 1), 53-bit resolution
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // unbiased uniform integer in [0, n)
    uint64_t next_below(uint64_t n) {
        if (n == 0) throw std::invalid_argument("next_below(0)");
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do { x = next_u64(); } while (x >= limit);
        return x % n;
    }

    // Box-Muller, uncached
    double normal() {
        double u1;
        do { u1 = next_double(); } while (u1 <= 0.0);
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Knuth's method; arrival intensities here are << 1 per step
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        const double limit = std::exp(-lambda);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_double();
        } while (p > limit);
        return k - 1;
    }

    // Independent stream derived from the construction seed and a stream id;
    // forks of equal (seed, id) are identical regardless of draw history.
    Rng fork(uint64_t stream_id) const {
        uint64_t x = seed_ ^ (0x9E3779B97F4A7C15ull * (stream_id + 1));
        return Rng(splitmix64(x));
    }

private:
    static uint64_t splitmix64(uint64_t& x) {
        x += 0x9E3779B97F4A7C15ull;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t seed_;
    std::array<uint64_t, 4> state_{};
};

}  // namespace ranlab
