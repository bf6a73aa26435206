#ifndef LLSVM_SYNTHETIC_HPP
#define LLSVM_SYNTHETIC_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <utility>

#include "llsvm/dataset.hpp"

namespace llsvm {

enum class Generator { TwoSpirals, Uniform1dSmooth, XorGaussians };

const char* generator_name(Generator g);
std::optional<Generator> generator_from_name(std::string_view name);

struct SyntheticSpec {
    Generator generator = Generator::Uniform1dSmooth;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    double noise_sd = 0.02;   // two_spirals
    double turns = 2.0;       // two_spirals
    double slope = 2.0;       // uniform_1d_smooth
    double separation = 1.0;  // xor_gaussians
    double sd = 0.5;          // xor_gaussians
};

// Conditional class-probability of the generating distribution, plus the
// optimal error rate where a quadrature for it is implemented.
struct GroundTruth {
    std::function<double(std::span<const double>)> eta;
    double bayes_risk = std::numeric_limits<double>::quiet_NaN();

    bool has_bayes_risk() const { return bayes_risk == bayes_risk; }

    // sign(2 eta - 1) with sign(0) = +1
    int bayes_label(std::span<const double> x) const {
        return eta(x) >= 0.5 ? 1 : -1;
    }
};

// Two interleaved Archimedean spiral arms (radius theta / 2pi, angle theta
// uniform on [pi/2, 2pi*turns]), the second arm point-negated, iid Gaussian
// coordinate noise. Labels +1 (even rows) / -1 (odd rows); n must be even.
LabeledDataset gen_two_spirals(std::size_t n, double noise_sd, double turns,
                               std::uint64_t seed);

// x uniform on [-1,1], eta(x) = 1/2 + 1/2 tanh(slope * x).
std::pair<LabeledDataset, GroundTruth> gen_uniform_1d_smooth(std::size_t n, double slope,
                                                             std::uint64_t seed);

// Four equal-weight Gaussian blobs at (+-separation, +-separation); the two
// diagonal blobs (+,+) and (-,-) are labeled +1. eta is the exact mixture
// ratio; bayes_risk is not computed for this family.
std::pair<LabeledDataset, GroundTruth> gen_xor_gaussians(std::size_t n, double separation,
                                                         double sd, std::uint64_t seed);

LabeledDataset generate(const SyntheticSpec& spec);

// Ground truth for the generating distribution (independent of n/seed);
// nullopt for TwoSpirals, whose eta has no closed form under noise.
std::optional<GroundTruth> ground_truth(const SyntheticSpec& spec);

} // namespace llsvm

#endif
