#ifndef LLSVM_SOLVER_HPP
#define LLSVM_SOLVER_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace llsvm {

// Weighted local SVM instance. Rows are already feature-mapped and carry the
// appended bias coordinate (so dim here is the augmented dimension). weights
// holds the per-point smoothing weights K_i; sample_size is the size n of the
// full training sample the weights were computed from, which stays in the
// loss normalizer even when only the in-support rows are materialized.
//
// Objective:  P(w) = lambda/2 ||w||^2 + (1/n) sum_i K_i * max(0, 1 - y_i <w, x_i>).
struct LocalProblem {
    int dim = 0;
    std::vector<double> points;
    std::vector<int> labels;
    std::vector<double> weights;
    std::size_t sample_size = 0;
    double lambda = 0.0;

    std::size_t size() const { return labels.size(); }

    std::span<const double> row(std::size_t i) const {
        return {points.data() + i * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }

    double weight_sum() const;

    // Shape/finiteness/label checks; weights must be >= 0 unless
    // allow_negative_weights (the ablation path). Throws InvalidInputError,
    // or DegenerateProblemError when every weight is zero.
    void validate(bool allow_negative_weights = false) const;
};

enum class SweepOrder { Forward, Reverse };

struct SolveOptions {
    // Duality-gap target; 0 means auto: 1e-8 * max(1, weight_sum / sample_size).
    double tol = 0.0;
    int max_epochs = 10000;
    SweepOrder order = SweepOrder::Forward;
};

struct SolverResult {
    std::vector<double> w;
    std::vector<double> beta;      // scaled duals, beta_i in [0, K_i / n]
    double primal_value = 0.0;
    double dual_value = 0.0;
    double duality_gap = 0.0;
    int epochs = 0;
    bool converged = false;
};

// Exact primal/dual objective values for a given iterate.
double primal_value(std::span<const double> w, const LocalProblem& prob);
double dual_value(std::span<const double> beta, const LocalProblem& prob);

// w = (1/lambda) sum_i beta_i y_i x_i, summed in row order.
std::vector<double> reconstruct_w(std::span<const double> beta, const LocalProblem& prob);

// Dual coordinate descent. Requires nonnegative weights (certified path).
// Deterministic: fixed sweep order, no shuffling. On convergence the result
// satisfies duality_gap <= tol with w reconstructed exactly from beta.
SolverResult solve(const LocalProblem& prob, const SolveOptions& opts = {});

// Deterministic full-batch subgradient descent on the primal, usable when
// weights may be negative (the objective is then nonconvex, so there is no
// certificate; the iterate after `iterations` steps is returned as-is).
std::vector<double> solve_subgradient(const LocalProblem& prob, int iterations);

} // namespace llsvm

#endif
