#ifndef LLSVM_RNG_HPP
#define LLSVM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace llsvm {

// SplitMix64: tiny counter-style generator with full 64-bit avalanche.
// Chosen over std::mt19937 because the stream (and the uniform/normal
// mappings below) is identical on every platform, which the determinism
// guarantees of this library rely on.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1): top 53 bits scaled by 2^-53.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]: shifted so log() is always finite.
    double next_uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double next_uniform(double a, double b) {
        return a + (b - a) * next_uniform();
    }

    // i in [0, bound). Modulo bias is < 2^-53 * bound, irrelevant for the
    // dataset sizes used here; kept simple so the stream stays reproducible.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(next_uniform() * static_cast<double>(bound)) % bound;
    }

    // Standard normal via Box-Muller (trig form): consumes exactly two
    // uniforms per pair, no rejection, so the stream position is predictable.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform_pos();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double next_normal(double mean, double sd) {
        return mean + sd * next_normal();
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Derives an independent substream seed from (base, stream). Two avalanche
// rounds are enough to decorrelate adjacent stream ids.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    SplitMix64 g(base ^ (stream * 0xd1342543de82ef95ULL));
    g.next_u64();
    return g.next_u64();
}

} // namespace llsvm

#endif
