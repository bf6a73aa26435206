#ifndef LLSVM_CLASSIFIER_HPP
#define LLSVM_CLASSIFIER_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "llsvm/dataset.hpp"
#include "llsvm/kernels.hpp"
#include "llsvm/solver.hpp"
#include "llsvm/spatial_index.hpp"

namespace llsvm {

// Monomial count for total degree 1..degree over dim variables:
// C(dim + degree, degree) - 1 (the constant is excluded; the bias coordinate
// is appended separately). Throws InvalidSpecError when the count would
// exceed 1e6 or inputs are < 1.
std::size_t poly_dim(int dim, int degree);

// All monomials of total degree 1..degree, ordered by degree then by
// lexicographically descending exponent vector, e.g. (a,b) at degree 2:
// a, b, a^2, ab, b^2. Degree 1 is the identity map.
std::vector<double> poly_map(std::span<const double> x, int degree);

enum class BandwidthKind { Fixed, Knn };

struct BandwidthMode {
    BandwidthKind kind = BandwidthKind::Fixed;
    KernelSpec fixed;                                      // Fixed
    int k = 0;                                             // Knn
    KernelFamily knn_family = KernelFamily::Rectangular;   // Knn
};

BandwidthMode fixed_bandwidth(KernelSpec spec);
BandwidthMode knn_bandwidth(int k, KernelFamily family = KernelFamily::Rectangular);

enum class EmptyBallPolicy { Abstain, Majority, Grow };

struct GrowPolicy {
    int max_doublings = 10;
    int min_points = 1;
};

struct LLSVMConfig {
    BandwidthMode bandwidth;
    double lambda = 1e-3;
    int feature_degree = 1;
    double solver_tol = 0.0;       // 0 = auto (see SolveOptions)
    int max_epochs = 10000;
    int subgradient_iters = 2000;  // budget for the negative-kernel path
    EmptyBallPolicy policy = EmptyBallPolicy::Grow;
    GrowPolicy grow;
    bool single_class_shortcut = true;
};

// Throws InvalidSpecError / InvalidInputError on unusable settings.
void validate_config(const LLSVMConfig& config, int dim);

enum PredictionFlag : unsigned {
    kEmptyBallFallback = 1u << 0,    // neighborhood was empty/unusable at the requested scale
    kNotConverged = 1u << 1,         // solver hit max_epochs without a certificate
    kSingleClassShortcut = 1u << 2,  // label decided without solving
    kBandwidthGrown = 1u << 3,       // knn bandwidth was zero and had to grow
    kTie = 1u << 4,                  // vote-based rule tied (resolved to +1)
};

// Flag names joined by '|', empty string for 0.
std::string flag_names(unsigned flags);

struct Prediction {
    int label = 1;
    double decision_value = 0.0;
    int local_count = 0;
    double effective_bandwidth = 0.0;
    unsigned flags = 0;
};

// Bandwidth and kernel actually used at x0 (after knn resolution), plus the
// retrieved neighborhood. usable == false means the empty-ball policy ran
// out of options (only possible under Majority, or Grow after exhausting
// its doublings); Abstain throws instead.
struct LocalContext {
    double sigma = 0.0;
    KernelSpec spec;
    std::vector<int> ball;        // dataset indices, ascending
    std::vector<double> weights;  // kernel values, aligned with ball
    unsigned flags = 0;
    bool usable = false;
};

LocalContext local_context(const LabeledDataset& data, const SpatialIndex& index,
                           const LLSVMConfig& config, std::span<const double> x0);

// Materializes the weighted local problem: rows are poly_map(x_i) with a
// trailing bias 1, sample_size is the full dataset size.
LocalProblem build_local_problem(const LabeledDataset& data, std::span<const int> ball,
                                 std::span<const double> weights, int degree, double lambda);

// Local model at x0: solves the weighted problem (certified dual CD for
// nonnegative kernels, fixed-budget subgradient descent for the negative
// ablation kernel). w is empty when the context is unusable (the zero model).
struct LocalFit {
    std::vector<double> w;
    int local_count = 0;
    double effective_bandwidth = 0.0;
    unsigned flags = 0;
    double weight_mean = 0.0;  // (1/n) sum of ball weights
};

LocalFit local_fit(const LabeledDataset& data, const SpatialIndex& index,
                   const LLSVMConfig& config, std::span<const double> x0);

// sign(<w, (poly_map(x0), 1)>) with sign(0) = +1.
Prediction predict(const LabeledDataset& data, const SpatialIndex& index,
                   const LLSVMConfig& config, std::span<const double> x0);

// queries is row-major (count x data.dim). Results are identical to calling
// predict per row regardless of workers.
std::vector<Prediction> predict_batch(const LabeledDataset& data, const SpatialIndex& index,
                                      const LLSVMConfig& config,
                                      std::span<const double> queries, int workers);

// sign of the kernel-weighted vote sum_i y_i K(x_i, x0); ties and empty
// neighborhoods resolve to +1 with a flag.
Prediction kbr_predict(const LabeledDataset& data, const SpatialIndex& index,
                       const KernelSpec& spec, std::span<const double> x0);

// majority label among the k nearest; ties resolve to +1 with a flag.
Prediction knn_predict(const LabeledDataset& data, const SpatialIndex& index, int k,
                       std::span<const double> x0);

// Unweighted linear SVM on the whole dataset (all weights 1, raw features +
// bias). Returns the augmented weight vector of size dim + 1.
std::vector<double> train_global_linear(const LabeledDataset& data, double lambda,
                                        double tol = 0.0, int max_epochs = 20000);

} // namespace llsvm

#endif
