#ifndef LLSVM_KERNELS_HPP
#define LLSVM_KERNELS_HPP

#include <optional>
#include <span>
#include <string_view>

namespace llsvm {

// Radial smoothing kernels with compact support (the closed unit ball after
// rescaling by the bandwidth). All except NegativeOrder2 are nonnegative and
// integrate to 1 over R^dim; NegativeOrder2 is a 1-D ablation kernel that
// takes negative values near the edge of its support.
enum class KernelFamily {
    Epanechnikov,
    Triangle,
    Biweight,
    Rectangular,
    NegativeOrder2,
};

struct KernelSpec {
    KernelFamily family = KernelFamily::Epanechnikov;
    double bandwidth = 1.0;
    int dim = 1;
};

// Validates and builds a spec. NegativeOrder2 requires dim == 1 and
// allow_negative == true (it is intentionally awkward to reach).
// Throws InvalidSpecError on bandwidth <= 0 / non-finite, dim < 1,
// or a disallowed family/dim combination.
KernelSpec make_kernel_spec(KernelFamily family, double bandwidth, int dim,
                            bool allow_negative = false);

const char* family_name(KernelFamily family);
std::optional<KernelFamily> family_from_name(std::string_view name);
bool kernel_is_positive(KernelFamily family);

// Unnormalized radial profile at u = ||x - x0|| / bandwidth; zero for u > 1.
double kernel_profile(KernelFamily family, double u);

// Normalization constant for bandwidth 1 in the given dimension, computed
// exactly as (dyadic rational) / pi^k so that e.g. the 1-D Epanechnikov
// constant is exactly 0.75.
double normalization_constant(KernelFamily family, int dim);

// K(x, x0, sigma) = normalization / sigma^dim * profile(||x - x0|| / sigma).
double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> x0);

// Same, from a precomputed distance (dist >= 0).
double kernel_eval_at_distance(const KernelSpec& spec, double dist);

// Supremum of |K| over inputs: attained at distance 0 for every family here.
double kernel_sup_value(const KernelSpec& spec);

} // namespace llsvm

#endif
