#include "llsvm/synthetic.hpp"

#include <cmath>
#include <string>

#include "llsvm/errors.hpp"
#include "llsvm/rng.hpp"

namespace llsvm {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// adaptive Simpson with absolute tolerance, bounded depth
double simpson_slice(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b,
                     double fa, double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = f(lm);
    double frm = f(rm);
    double left = simpson_slice(a, m, fa, flm, fm);
    double right = simpson_slice(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    return adaptive_step(f, a, b, fa, fm, fb, simpson_slice(a, b, fa, fm, fb), tol, 48);
}

} // namespace

const char* generator_name(Generator g) {
    switch (g) {
        case Generator::TwoSpirals: return "two_spirals";
        case Generator::Uniform1dSmooth: return "uniform_1d_smooth";
        case Generator::XorGaussians: return "xor_gaussians";
    }
    return "unknown";
}

std::optional<Generator> generator_from_name(std::string_view name) {
    if (name == "two_spirals") return Generator::TwoSpirals;
    if (name == "uniform_1d_smooth") return Generator::Uniform1dSmooth;
    if (name == "xor_gaussians") return Generator::XorGaussians;
    return std::nullopt;
}

LabeledDataset gen_two_spirals(std::size_t n, double noise_sd, double turns,
                               std::uint64_t seed) {
    if (n < 2 || n % 2 != 0)
        throw InvalidSpecError("two_spirals: n must be even and >= 2");
    if (!(turns > 0.0)) throw InvalidSpecError("two_spirals: turns must be > 0");
    if (noise_sd < 0.0) throw InvalidSpecError("two_spirals: noise_sd must be >= 0");
    SplitMix64 rng(seed);
    std::vector<double> pts;
    pts.reserve(2 * n);
    std::vector<int> labels;
    labels.reserve(n);
    double theta_hi = kTwoPi * turns;
    for (std::size_t i = 0; i < n; ++i) {
        int arm = i % 2 == 0 ? 1 : -1;
        double theta = rng.next_uniform(kTwoPi / 4.0, theta_hi);
        double r = theta / kTwoPi;
        double x = r * std::cos(theta);
        double y = r * std::sin(theta);
        if (arm < 0) {
            x = -x;
            y = -y;
        }
        x += rng.next_normal(0.0, noise_sd);
        y += rng.next_normal(0.0, noise_sd);
        pts.push_back(x);
        pts.push_back(y);
        labels.push_back(arm);
    }
    return make_dataset(2, std::move(pts), std::move(labels));
}

std::pair<LabeledDataset, GroundTruth> gen_uniform_1d_smooth(std::size_t n, double slope,
                                                             std::uint64_t seed) {
    if (n < 1) throw InvalidSpecError("uniform_1d_smooth: n must be >= 1");
    if (!(slope > 0.0) || !std::isfinite(slope))
        throw InvalidSpecError("uniform_1d_smooth: slope must be finite and > 0");
    SplitMix64 rng(seed);
    std::vector<double> pts;
    pts.reserve(n);
    std::vector<int> labels;
    labels.reserve(n);
    auto eta_of = [slope](double x) { return 0.5 + 0.5 * std::tanh(slope * x); };
    for (std::size_t i = 0; i < n; ++i) {
        double x = rng.next_uniform(-1.0, 1.0);
        double u = rng.next_uniform();
        pts.push_back(x);
        labels.push_back(u < eta_of(x) ? 1 : -1);
    }
    GroundTruth gt;
    gt.eta = [eta_of](std::span<const double> x) { return eta_of(x[0]); };
    // optimal risk = integral of min(eta, 1-eta) against the uniform density
    gt.bayes_risk = integrate(
        [eta_of](double x) {
            double e = eta_of(x);
            return 0.5 * std::min(e, 1.0 - e);
        },
        -1.0, 1.0, 1e-12);
    return {make_dataset(1, std::move(pts), std::move(labels)), std::move(gt)};
}

std::pair<LabeledDataset, GroundTruth> gen_xor_gaussians(std::size_t n, double separation,
                                                         double sd, std::uint64_t seed) {
    if (n < 1) throw InvalidSpecError("xor_gaussians: n must be >= 1");
    if (!(separation > 0.0) || !(sd > 0.0))
        throw InvalidSpecError("xor_gaussians: separation and sd must be > 0");
    SplitMix64 rng(seed);
    const double cx[4] = {separation, -separation, separation, -separation};
    const double cy[4] = {separation, -separation, -separation, separation};
    const int cl[4] = {1, 1, -1, -1};
    std::vector<double> pts;
    pts.reserve(2 * n);
    std::vector<int> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        int c = static_cast<int>(rng.next_below(4));
        pts.push_back(cx[c] + rng.next_normal(0.0, sd));
        pts.push_back(cy[c] + rng.next_normal(0.0, sd));
        labels.push_back(cl[c]);
    }
    GroundTruth gt;
    double s = separation, v = sd;
    gt.eta = [s, v](std::span<const double> x) {
        const double cx[4] = {s, -s, s, -s};
        const double cy[4] = {s, -s, -s, s};
        double expo[4];
        double emax = -1e300;
        for (int c = 0; c < 4; ++c) {
            double dx = x[0] - cx[c];
            double dy = x[1] - cy[c];
            expo[c] = -(dx * dx + dy * dy) / (2.0 * v * v);
            if (expo[c] > emax) emax = expo[c];
        }
        double pos = std::exp(expo[0] - emax) + std::exp(expo[1] - emax);
        double neg = std::exp(expo[2] - emax) + std::exp(expo[3] - emax);
        return pos / (pos + neg);
    };
    return {make_dataset(2, std::move(pts), std::move(labels)), std::move(gt)};
}

LabeledDataset generate(const SyntheticSpec& spec) {
    switch (spec.generator) {
        case Generator::TwoSpirals:
            return gen_two_spirals(spec.n, spec.noise_sd, spec.turns, spec.seed);
        case Generator::Uniform1dSmooth:
            return gen_uniform_1d_smooth(spec.n, spec.slope, spec.seed).first;
        case Generator::XorGaussians:
            return gen_xor_gaussians(spec.n, spec.separation, spec.sd, spec.seed).first;
    }
    throw InvalidSpecError("unknown generator");
}

std::optional<GroundTruth> ground_truth(const SyntheticSpec& spec) {
    switch (spec.generator) {
        case Generator::TwoSpirals:
            return std::nullopt;
        case Generator::Uniform1dSmooth:
            return gen_uniform_1d_smooth(1, spec.slope, 1).second;
        case Generator::XorGaussians:
            return gen_xor_gaussians(1, spec.separation, spec.sd, 1).second;
    }
    throw InvalidSpecError("unknown generator");
}

} // namespace llsvm
