#include "llsvm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "llsvm/errors.hpp"

namespace llsvm {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double resolved_tol(const LocalProblem& prob, const SolveOptions& opts) {
    if (opts.tol > 0.0) return opts.tol;
    double scale = prob.weight_sum() / static_cast<double>(prob.sample_size);
    return 1e-8 * std::max(1.0, scale);
}

} // namespace

double LocalProblem::weight_sum() const {
    double s = 0.0;
    for (double k : weights) s += k;
    return s;
}

void LocalProblem::validate(bool allow_negative_weights) const {
    if (dim < 1) throw InvalidInputError("LocalProblem: dim must be >= 1");
    std::size_t m = labels.size();
    if (m == 0) throw InvalidInputError("LocalProblem: no rows");
    if (weights.size() != m || points.size() != m * static_cast<std::size_t>(dim))
        throw InvalidInputError("LocalProblem: shape mismatch between points/labels/weights");
    if (sample_size < m)
        throw InvalidInputError("LocalProblem: sample_size must be >= number of rows");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw InvalidInputError("LocalProblem: lambda must be finite and > 0");
    bool any_nonzero = false;
    for (std::size_t i = 0; i < m; ++i) {
        if (labels[i] != 1 && labels[i] != -1)
            throw InvalidInputError("LocalProblem: label at row " + std::to_string(i) +
                                    " must be +1 or -1");
        double k = weights[i];
        if (!std::isfinite(k))
            throw InvalidInputError("LocalProblem: non-finite weight at row " + std::to_string(i));
        if (k < 0.0 && !allow_negative_weights)
            throw InvalidInputError("LocalProblem: negative weight at row " + std::to_string(i) +
                                    " (only the subgradient path accepts these)");
        if (k != 0.0) any_nonzero = true;
    }
    for (double v : points)
        if (!std::isfinite(v)) throw InvalidInputError("LocalProblem: non-finite coordinate");
    if (!any_nonzero)
        throw DegenerateProblemError("LocalProblem: all weights are zero");
}

double primal_value(std::span<const double> w, const LocalProblem& prob) {
    double loss = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        double margin = prob.labels[i] * dot(w, prob.row(i));
        loss += prob.weights[i] * std::max(0.0, 1.0 - margin);
    }
    return 0.5 * prob.lambda * dot(w, w) + loss / static_cast<double>(prob.sample_size);
}

std::vector<double> reconstruct_w(std::span<const double> beta, const LocalProblem& prob) {
    std::vector<double> w(static_cast<std::size_t>(prob.dim), 0.0);
    for (std::size_t i = 0; i < prob.size(); ++i) {
        double c = beta[i] * prob.labels[i] / prob.lambda;
        auto x = prob.row(i);
        for (int a = 0; a < prob.dim; ++a) w[static_cast<std::size_t>(a)] += c * x[a];
    }
    return w;
}

double dual_value(std::span<const double> beta, const LocalProblem& prob) {
    std::vector<double> w = reconstruct_w(beta, prob);
    double s = 0.0;
    for (double b : beta) s += b;
    return s - 0.5 * prob.lambda * dot(w, w);
}

SolverResult solve(const LocalProblem& prob, const SolveOptions& opts) {
    prob.validate(false);
    if (opts.max_epochs < 1) throw InvalidSpecError("solve: max_epochs must be >= 1");
    const std::size_t m = prob.size();
    const double n = static_cast<double>(prob.sample_size);
    const double tol = resolved_tol(prob, opts);

    std::vector<double> q(m);        // ||x_i||^2
    std::vector<double> ub(m);       // box upper bound K_i / n
    for (std::size_t i = 0; i < m; ++i) {
        q[i] = dot(prob.row(i), prob.row(i));
        ub[i] = prob.weights[i] / n;
    }

    std::vector<double> beta(m, 0.0);
    std::vector<double> w(static_cast<std::size_t>(prob.dim), 0.0);
    // Rows with x = 0 never move w; their dual coordinate is maximized at the
    // box top (coefficient of beta_i in the dual is +1). Set once, keep fixed.
    for (std::size_t i = 0; i < m; ++i) {
        if (q[i] == 0.0) beta[i] = ub[i];
    }

    SolverResult res;
    res.converged = false;
    int epoch = 0;
    while (epoch < opts.max_epochs) {
        for (std::size_t step = 0; step < m; ++step) {
            std::size_t i = opts.order == SweepOrder::Forward ? step : m - 1 - step;
            if (ub[i] <= 0.0 || q[i] == 0.0) continue;
            auto x = prob.row(i);
            double margin = prob.labels[i] * dot(w, x);
            double delta = prob.lambda * (1.0 - margin) / q[i];
            double nb = std::clamp(beta[i] + delta, 0.0, ub[i]);
            double change = nb - beta[i];
            if (change != 0.0) {
                beta[i] = nb;
                double c = change * prob.labels[i] / prob.lambda;
                for (int a = 0; a < prob.dim; ++a) w[static_cast<std::size_t>(a)] += c * x[a];
            }
        }
        ++epoch;
        double p = primal_value(w, prob);
        double bsum = 0.0;
        for (double b : beta) bsum += b;
        double d = bsum - 0.5 * prob.lambda * dot(w, w);
        if (p - d <= tol) {
            // Certify against the exactly reconstructed w: the incremental w
            // accumulates drift, the reported certificate must not.
            std::vector<double> wr = reconstruct_w(beta, prob);
            double pr = primal_value(wr, prob);
            double dr = bsum - 0.5 * prob.lambda * dot(std::span<const double>(wr), std::span<const double>(wr));
            if (pr - dr <= tol) {
                res.w = std::move(wr);
                res.primal_value = pr;
                res.dual_value = dr;
                res.duality_gap = pr - dr;
                res.converged = true;
                break;
            }
            w = std::move(wr);  // resync and keep iterating
        }
    }
    res.epochs = epoch;
    res.beta = std::move(beta);
    if (!res.converged) {
        res.w = reconstruct_w(res.beta, prob);
        res.primal_value = primal_value(res.w, prob);
        res.dual_value = dual_value(res.beta, prob);
        res.duality_gap = res.primal_value - res.dual_value;
    }

    // Norm certificate: lambda/2 ||w||^2 <= P(w) <= D(beta) + gap <= P(0) + gap.
    double wnorm2 = dot(res.w, res.w);
    double cap = prob.weight_sum() / n + std::max(res.duality_gap, tol) + 1e-12;
    if (0.5 * prob.lambda * wnorm2 > cap)
        throw std::logic_error("solve: norm certificate violated (internal error)");
    return res;
}

std::vector<double> solve_subgradient(const LocalProblem& prob, int iterations) {
    prob.validate(true);
    if (iterations < 1) throw InvalidSpecError("solve_subgradient: iterations must be >= 1");
    const std::size_t m = prob.size();
    const double n = static_cast<double>(prob.sample_size);
    std::vector<double> w(static_cast<std::size_t>(prob.dim), 0.0);
    std::vector<double> grad(static_cast<std::size_t>(prob.dim), 0.0);
    for (int t = 0; t < iterations; ++t) {
        for (int a = 0; a < prob.dim; ++a)
            grad[static_cast<std::size_t>(a)] = prob.lambda * w[static_cast<std::size_t>(a)];
        for (std::size_t i = 0; i < m; ++i) {
            auto x = prob.row(i);
            double margin = prob.labels[i] * dot(w, x);
            if (margin < 1.0) {
                double c = prob.weights[i] * prob.labels[i] / n;
                for (int a = 0; a < prob.dim; ++a) grad[static_cast<std::size_t>(a)] -= c * x[a];
            }
        }
        double step = 1.0 / (prob.lambda * static_cast<double>(t + 1));
        for (int a = 0; a < prob.dim; ++a)
            w[static_cast<std::size_t>(a)] -= step * grad[static_cast<std::size_t>(a)];
    }
    return w;
}

} // namespace llsvm
