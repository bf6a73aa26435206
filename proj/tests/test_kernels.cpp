#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "llsvm/dataset.hpp"
#include "llsvm/errors.hpp"
#include "llsvm/kernels.hpp"
#include "llsvm/rng.hpp"
#include "oracles.hpp"

using namespace llsvm;

namespace {
constexpr double kPi = 3.14159265358979323846;

const KernelFamily kPositive[] = {KernelFamily::Epanechnikov, KernelFamily::Triangle,
                                  KernelFamily::Biweight, KernelFamily::Rectangular};
}

TEST_CASE("normalization constants match closed forms") {
    // 1-D constants are exact dyadic rationals
    CHECK(normalization_constant(KernelFamily::Epanechnikov, 1) == 0.75);
    CHECK(normalization_constant(KernelFamily::Rectangular, 1) == 0.5);
    CHECK(normalization_constant(KernelFamily::Biweight, 1) == 0.9375);
    CHECK(normalization_constant(KernelFamily::Triangle, 1) == 1.0);
    CHECK(normalization_constant(KernelFamily::NegativeOrder2, 1) == 1.0);

    CHECK(normalization_constant(KernelFamily::Epanechnikov, 2) ==
          doctest::Approx(2.0 / kPi).epsilon(1e-15));
    CHECK(normalization_constant(KernelFamily::Epanechnikov, 3) ==
          doctest::Approx(15.0 / (8.0 * kPi)).epsilon(1e-15));
    CHECK(normalization_constant(KernelFamily::Rectangular, 2) ==
          doctest::Approx(1.0 / kPi).epsilon(1e-15));
    CHECK(normalization_constant(KernelFamily::Rectangular, 3) ==
          doctest::Approx(3.0 / (4.0 * kPi)).epsilon(1e-15));
    CHECK(normalization_constant(KernelFamily::Triangle, 2) ==
          doctest::Approx(3.0 / kPi).epsilon(1e-15));
    CHECK(normalization_constant(KernelFamily::Triangle, 3) ==
          doctest::Approx(3.0 / kPi).epsilon(1e-15));
    CHECK(normalization_constant(KernelFamily::Biweight, 2) ==
          doctest::Approx(3.0 / kPi).epsilon(1e-15));
    CHECK(normalization_constant(KernelFamily::Biweight, 3) ==
          doctest::Approx(105.0 / (32.0 * kPi)).epsilon(1e-15));
}

TEST_CASE("kernels integrate to one over their support") {
    for (KernelFamily fam : kPositive) {
        for (int d = 1; d <= 3; ++d) {
            double c = normalization_constant(fam, d);
            double mass = oracle::ball_integral(
                [&](double u) { return c * kernel_profile(fam, u); }, d);
            CAPTURE(family_name(fam));
            CAPTURE(d);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    // ablation kernel: signed mass still integrates to one (d = 1 only)
    double neg = oracle::ball_integral(
        [&](double u) { return kernel_profile(KernelFamily::NegativeOrder2, u); }, 1);
    CHECK(neg == doctest::Approx(1.0).epsilon(1e-9));

    // independent planar confirmation of the radial reduction
    double c2 = normalization_constant(KernelFamily::Epanechnikov, 2);
    double grid = oracle::disk_integral_grid(
        [&](double u) { return c2 * kernel_profile(KernelFamily::Epanechnikov, u); }, 1000);
    CHECK(grid == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("bandwidth scaling law") {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        KernelFamily fam = kPositive[static_cast<std::size_t>(rng.next_below(4))];
        int d = 1 + static_cast<int>(rng.next_below(3));
        double sigma = rng.next_uniform(0.05, 4.0);
        double r = rng.next_uniform(0.0, 1.2 * sigma);
        KernelSpec scaled = make_kernel_spec(fam, sigma, d);
        KernelSpec unit = make_kernel_spec(fam, 1.0, d);
        double lhs = kernel_eval_at_distance(scaled, r);
        double rhs = kernel_eval_at_distance(unit, r / sigma) / std::pow(sigma, d);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
}

TEST_CASE("compact support is the closed ball") {
    KernelSpec epan = make_kernel_spec(KernelFamily::Epanechnikov, 0.7, 1);
    KernelSpec rect = make_kernel_spec(KernelFamily::Rectangular, 0.7, 1);
    CHECK(kernel_eval_at_distance(epan, 0.7000001) == 0.0);
    CHECK(kernel_eval_at_distance(rect, 123.0) == 0.0);
    // the boundary itself is inside: vanishing profiles give 0, rect does not
    CHECK(kernel_eval_at_distance(epan, 0.7) == 0.0);
    CHECK(kernel_eval_at_distance(rect, 0.7) == doctest::Approx(0.5 / 0.7).epsilon(1e-15));
}

TEST_CASE("nonnegativity and sup dominance on random inputs") {
    SplitMix64 rng(42);
    for (int trial = 0; trial < 500; ++trial) {
        KernelFamily fam = kPositive[static_cast<std::size_t>(rng.next_below(4))];
        int d = 1 + static_cast<int>(rng.next_below(3));
        double sigma = rng.next_uniform(0.1, 3.0);
        KernelSpec spec = make_kernel_spec(fam, sigma, d);
        std::vector<double> x(static_cast<std::size_t>(d)), x0(static_cast<std::size_t>(d));
        for (auto& v : x) v = rng.next_uniform(-2.0, 2.0);
        for (auto& v : x0) v = rng.next_uniform(-2.0, 2.0);
        double k = kernel_eval(spec, x, x0);
        CHECK(k >= 0.0);
        CHECK(k <= kernel_sup_value(spec));
        CHECK(k == kernel_eval_at_distance(spec, euclidean_distance(x, x0)));
    }
    KernelSpec neg = make_kernel_spec(KernelFamily::NegativeOrder2, 1.0, 1, true);
    CHECK(kernel_eval_at_distance(neg, 0.9) < 0.0);
    CHECK(std::abs(kernel_eval_at_distance(neg, 0.9)) <= kernel_sup_value(neg));
}

TEST_CASE("sup values at known points") {
    CHECK(kernel_sup_value(make_kernel_spec(KernelFamily::Epanechnikov, 0.5, 1)) == 1.5);
    CHECK(kernel_sup_value(make_kernel_spec(KernelFamily::Rectangular, 0.25, 1)) == 2.0);
    CHECK(kernel_sup_value(make_kernel_spec(KernelFamily::Epanechnikov, 1.0, 3)) ==
          normalization_constant(KernelFamily::Epanechnikov, 3));
    CHECK(kernel_sup_value(make_kernel_spec(KernelFamily::NegativeOrder2, 1.0, 1, true)) ==
          doctest::Approx(1.125).epsilon(1e-15));

    // d = 3 sup equals the grid max of eval over the unit ball
    KernelSpec s3 = make_kernel_spec(KernelFamily::Epanechnikov, 1.0, 3);
    double grid_max = 0.0;
    for (double r = 0.0; r <= 1.0; r += 0.001)
        grid_max = std::max(grid_max, kernel_eval_at_distance(s3, r));
    CHECK(kernel_sup_value(s3) == doctest::Approx(grid_max).epsilon(1e-12));
}

TEST_CASE("smoothness budget of the 1-D Epanechnikov window") {
    // E[|x - x0| K] under the uniform density 1/2 on [-1,1] equals 3 sigma/16
    // for interior x0, which vanishes with the bandwidth.
    double sigma = 1e-2;
    KernelSpec spec = make_kernel_spec(KernelFamily::Epanechnikov, sigma, 1);
    for (double x0 : {-0.5, -0.25, 0.0, 0.25, 0.5}) {
        auto f = [&](double x) {
            return 0.5 * std::abs(x - x0) * kernel_eval_at_distance(spec, std::abs(x - x0));
        };
        double q = oracle::integrate(f, x0 - sigma, x0, 1e-13) +
                   oracle::integrate(f, x0, x0 + sigma, 1e-13);
        CHECK(q <= 3.0 * sigma / 16.0 + 1e-4);
        CHECK(q == doctest::Approx(3.0 * sigma / 16.0).epsilon(1e-8));
    }
}

TEST_CASE("worst half-window mass is one quarter") {
    // infimum over half-interval cuts of E[K 1_H] under the uniform density
    // 1/2 on [-1,1]: the cut through x0 keeps exactly half the kernel mass.
    double sigma = 1e-2;
    KernelSpec spec = make_kernel_spec(KernelFamily::Epanechnikov, sigma, 1);
    double x0 = 0.0;
    double worst = 1e300;
    for (int t = 0; t <= 20; ++t) {
        double theta = sigma * static_cast<double>(t) / 20.0;
        double mass = oracle::integrate(
            [&](double x) { return 0.5 * kernel_eval_at_distance(spec, std::abs(x - x0)); },
            x0 - sigma, x0 + theta, 1e-13);
        worst = std::min(worst, mass);
    }
    CHECK(std::abs(worst - 0.25) <= 0.02);
    CHECK(worst == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("kernel spec validation") {
    CHECK_THROWS_AS(make_kernel_spec(KernelFamily::Epanechnikov, 0.0, 1), InvalidSpecError);
    CHECK_THROWS_AS(make_kernel_spec(KernelFamily::Epanechnikov, -1.0, 2), InvalidSpecError);
    CHECK_THROWS_AS(make_kernel_spec(KernelFamily::Epanechnikov,
                                     std::numeric_limits<double>::quiet_NaN(), 1),
                    InvalidSpecError);
    CHECK_THROWS_AS(make_kernel_spec(KernelFamily::Epanechnikov, 1.0, 0), InvalidSpecError);
    // the ablation kernel is opt-in and 1-D only
    CHECK_THROWS_AS(make_kernel_spec(KernelFamily::NegativeOrder2, 1.0, 1), InvalidSpecError);
    CHECK_THROWS_AS(make_kernel_spec(KernelFamily::NegativeOrder2, 1.0, 2, true),
                    InvalidSpecError);
    CHECK_NOTHROW(make_kernel_spec(KernelFamily::NegativeOrder2, 1.0, 1, true));
}

TEST_CASE("family names round-trip") {
    const char* names[] = {"epanechnikov", "triangle", "biweight", "rectangular", "negative"};
    for (const char* name : names) {
        auto fam = family_from_name(name);
        REQUIRE(fam.has_value());
        CHECK(family_name(*fam) == std::string(name));
    }
    CHECK(!family_from_name("gaussian").has_value());
    CHECK(!family_from_name("").has_value());
    for (KernelFamily fam : kPositive) CHECK(kernel_is_positive(fam));
    CHECK(!kernel_is_positive(KernelFamily::NegativeOrder2));
}
