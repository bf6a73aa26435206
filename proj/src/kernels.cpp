#include "llsvm/kernels.hpp"

#include <cmath>
#include <string>

#include "llsvm/dataset.hpp"
#include "llsvm/errors.hpp"

namespace llsvm {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Gamma(k/2) for integer k >= 1 as coef * sqrt(pi)^{k odd}.
// Even k: (k/2 - 1)! which is exact in double for the dims in play.
// Odd k: product of half-integers 1/2 * 3/2 * ... * (k-2)/2, a dyadic
// rational, also exact. Keeping sqrt(pi) symbolic lets it cancel against
// the pi^{d/2} volume factor so constants like 3/4 come out bit-exact.
struct HalfGamma {
    double coef;
    bool has_sqrt_pi;
};

HalfGamma gamma_half(int k) {
    if (k % 2 == 0) {
        double f = 1.0;
        for (int j = 2; j <= k / 2 - 1; ++j) f *= j;
        return {f, false};
    }
    double f = 1.0;
    for (int j = 1; j <= k - 2; j += 2) f *= 0.5 * j;
    return {f, true};
}

// Gamma(num/2) / pi^{d/2}, exploiting the sqrt(pi) cancellation for odd d.
double gamma_over_pi_pow(int num, int d) {
    HalfGamma g = gamma_half(num);
    if (d % 2 == 0) return g.coef / std::pow(kPi, d / 2);
    // odd d: pi^{d/2} = pi^{(d-1)/2} * sqrt(pi); num has the same parity.
    return g.coef / std::pow(kPi, (d - 1) / 2);
}

} // namespace

const char* family_name(KernelFamily family) {
    switch (family) {
        case KernelFamily::Epanechnikov: return "epanechnikov";
        case KernelFamily::Triangle: return "triangle";
        case KernelFamily::Biweight: return "biweight";
        case KernelFamily::Rectangular: return "rectangular";
        case KernelFamily::NegativeOrder2: return "negative";
    }
    return "unknown";
}

std::optional<KernelFamily> family_from_name(std::string_view name) {
    if (name == "epanechnikov") return KernelFamily::Epanechnikov;
    if (name == "triangle") return KernelFamily::Triangle;
    if (name == "biweight") return KernelFamily::Biweight;
    if (name == "rectangular") return KernelFamily::Rectangular;
    if (name == "negative") return KernelFamily::NegativeOrder2;
    return std::nullopt;
}

bool kernel_is_positive(KernelFamily family) {
    return family != KernelFamily::NegativeOrder2;
}

KernelSpec make_kernel_spec(KernelFamily family, double bandwidth, int dim,
                            bool allow_negative) {
    if (dim < 1) throw InvalidSpecError("kernel dim must be >= 1, got " + std::to_string(dim));
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw InvalidSpecError("kernel bandwidth must be finite and > 0");
    if (family == KernelFamily::NegativeOrder2) {
        if (!allow_negative)
            throw InvalidSpecError("the negative kernel is an ablation device; "
                                   "pass allow_negative to opt in");
        if (dim != 1)
            throw InvalidSpecError("the negative kernel is only defined for dim == 1");
    }
    return {family, bandwidth, dim};
}

double kernel_profile(KernelFamily family, double u) {
    if (u > 1.0) return 0.0;
    switch (family) {
        case KernelFamily::Epanechnikov: return 1.0 - u * u;
        case KernelFamily::Triangle: return 1.0 - u;
        case KernelFamily::Biweight: {
            double t = 1.0 - u * u;
            return t * t;
        }
        case KernelFamily::Rectangular: return 1.0;
        case KernelFamily::NegativeOrder2: return 0.375 * (3.0 - 5.0 * u * u);
    }
    return 0.0;
}

double normalization_constant(KernelFamily family, int dim) {
    if (dim < 1) throw InvalidSpecError("normalization_constant: dim must be >= 1");
    switch (family) {
        case KernelFamily::Epanechnikov:
            return gamma_over_pi_pow(dim + 4, dim);
        case KernelFamily::Biweight:
            return 0.5 * gamma_over_pi_pow(dim + 6, dim);
        case KernelFamily::Rectangular:
            return gamma_over_pi_pow(dim + 2, dim);
        case KernelFamily::Triangle:
            return (dim + 1) * gamma_over_pi_pow(dim + 2, dim);
        case KernelFamily::NegativeOrder2:
            if (dim != 1)
                throw InvalidSpecError("the negative kernel is only defined for dim == 1");
            return 1.0;
    }
    throw InvalidSpecError("unknown kernel family");
}

double kernel_eval_at_distance(const KernelSpec& spec, double dist) {
    if (!(spec.bandwidth > 0.0) || !std::isfinite(spec.bandwidth))
        throw InvalidSpecError("kernel bandwidth must be finite and > 0");
    if (dist < 0.0 || !std::isfinite(dist))
        throw InvalidInputError("kernel distance must be finite and >= 0");
    double c = normalization_constant(spec.family, spec.dim);
    double scale = c / std::pow(spec.bandwidth, spec.dim);
    return scale * kernel_profile(spec.family, dist / spec.bandwidth);
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> x0) {
    if (static_cast<int>(x.size()) != spec.dim || static_cast<int>(x0.size()) != spec.dim)
        throw InvalidInputError("kernel_eval: point dim does not match kernel dim");
    return kernel_eval_at_distance(spec, euclidean_distance(x, x0));
}

double kernel_sup_value(const KernelSpec& spec) {
    double c = normalization_constant(spec.family, spec.dim);
    return c / std::pow(spec.bandwidth, spec.dim) * kernel_profile(spec.family, 0.0);
}

} // namespace llsvm
