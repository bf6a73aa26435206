#ifndef LLSVM_EVALUATION_HPP
#define LLSVM_EVALUATION_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "llsvm/classifier.hpp"
#include "llsvm/dataset.hpp"
#include "llsvm/spatial_index.hpp"
#include "llsvm/synthetic.hpp"

namespace llsvm {

// ---- leave-one-out stability ----

struct StabilityRecord {
    int index = 0;        // dataset row
    double weight = 0.0;  // smoothing weight of that row at x0
    double observed = 0.0;
    double bound = 0.0;
    bool pass = true;
};

struct StabilityReport {
    std::vector<StabilityRecord> records;
    double slack = 0.0;         // solver-inexactness allowance added to every bound
    double worst_margin = 0.0;  // max over records of observed - bound
    bool pass = false;
    bool inconclusive = false;  // slack is not small next to the bounds
    // context
    std::vector<double> x0;
    double sigma = 0.0;
    double lambda = 0.0;
    std::size_t sample_size = 0;
    int local_count = 0;
    double row_norm_bound = 0.0;  // max augmented-row norm over the neighborhood
    double kernel_sup = 0.0;      // K_m, the height of the smoothing kernel at x0
};

// Solves the local problem at x0, then re-solves with each contributing row
// removed and checks ||w - w_loo|| <= 2 * row_norm_bound * K_i / (n*lambda)
// up to a strong-convexity slack for the two solver tolerances. Also re-solves
// after removing up to three zero-weight rows (chosen by seed) as controls.
// Requires a fixed-bandwidth config with a nonnegative kernel family.
StabilityReport stability_check(const LabeledDataset& data, const SpatialIndex& index,
                                const LLSVMConfig& config, std::span<const double> x0,
                                std::uint64_t seed);

// ---- bandwidth/regularization schedule sweep ----

struct ConsistencyRow {
    std::size_t n = 0;
    double sigma = 0.0;
    double lambda = 0.0;
    double schedule_value = 0.0;  // n * lambda^2 * sigma^(4 dim)
    double agreement = 0.0;       // fraction of (replicate, probe) matching the optimal label
    double mean_pointwise_risk = 0.0;
};

struct ConsistencyCurve {
    double exp_sigma = 0.0;
    double exp_lambda = 0.0;
    int dim = 0;
    std::vector<ConsistencyRow> rows;
    double spearman = 0.0;  // rank correlation of agreement against n
};

struct ConsistencySettings {
    std::vector<std::size_t> n_list;
    double exp_sigma = 0.125;   // sigma_n = n^-exp_sigma
    double exp_lambda = 0.125;  // lambda_n = n^-exp_lambda
    int replicates = 20;
    double margin_floor = 0.3;  // drop probes with |2 eta - 1| below this
    KernelFamily family = KernelFamily::Epanechnikov;
    int feature_degree = 1;
    double solver_tol = 0.0;
    int max_epochs = 10000;
    std::uint64_t base_seed = 1;
    int workers = 1;
};

// Probes are row-major points of the generator's dimension. The generator
// must have a ground truth (eta); the schedule must shrink sigma and lambda
// while n * lambda^2 * sigma^(4 dim) grows, otherwise InvalidSpecError.
ConsistencyCurve consistency_sweep(const SyntheticSpec& data_spec,
                                   const std::vector<double>& probes,
                                   const ConsistencySettings& settings);

// ---- generalization-gap diagnostic ----

struct RiskReport {
    double empirical_risk = 0.0;  // mean train hinge of each point's own local model
    double heldout_risk = 0.0;    // mean test hinge of the local model at each test point
    double gap = 0.0;
    double stability_term = 0.0;
    double deviation_term = 0.0;
    double bound = 0.0;
    bool holds = false;
    double delta = 0.0;
    double radius_bound = 0.0;  // max augmented-row norm over the train rows
    double kernel_sup = 0.0;
    double kbar_max = 0.0;  // max over evaluated neighborhoods of (1/n) sum K_j
    std::size_t train_size = 0;
    std::size_t test_size = 0;
};

// Fixed-bandwidth, nonnegative kernel only. Train and test should be disjoint
// samples from the same distribution for the gap to mean anything.
RiskReport risk_report(const LabeledDataset& train, const LabeledDataset& test,
                       const LLSVMConfig& config, double delta, int workers);

// ---- cross-validated comparison ----

struct GlobalLinearConfig {
    double lambda = 1e-3;
    double tol = 0.0;
    int max_epochs = 20000;
};

struct KnnConfig {
    int k = 5;
};

struct KbrConfig {
    KernelSpec kernel;
};

using ClassifierVariant = std::variant<LLSVMConfig, GlobalLinearConfig, KnnConfig, KbrConfig>;

std::string variant_name(const ClassifierVariant& v);

struct CvResult {
    std::string name;
    std::vector<double> fold_accuracy;
    double mean_accuracy = 0.0;
    double sd_accuracy = 0.0;
    bool single_class_fold = false;  // some training fold had only one label
};

struct CvOptions {
    int folds = 5;
    std::uint64_t seed = 1;
    int workers = 1;
};

// Stratified k-fold: per-class shuffle, round-robin deal. All variants see
// identical folds. Throws InvalidSpecError unless 2 <= folds <= n.
std::vector<CvResult> cross_validate(const LabeledDataset& data,
                                     const std::vector<ClassifierVariant>& variants,
                                     const CvOptions& options);

} // namespace llsvm

#endif
