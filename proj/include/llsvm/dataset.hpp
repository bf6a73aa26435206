#ifndef LLSVM_DATASET_HPP
#define LLSVM_DATASET_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace llsvm {

// Dense labeled sample. points is row-major n x dim, labels are +1/-1,
// radius_bound caches max_i ||x_i||_2 (recomputed on construction).
struct LabeledDataset {
    int dim = 0;
    std::vector<double> points;
    std::vector<int> labels;
    double radius_bound = 0.0;

    std::size_t size() const { return labels.size(); }

    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }
};

// Validates shapes/labels/finiteness and fills radius_bound.
// Throws InvalidInputError on empty data, dim < 1, size mismatch,
// labels outside {-1,+1}, or non-finite coordinates.
LabeledDataset make_dataset(int dim, std::vector<double> points, std::vector<int> labels);

double euclidean_norm(std::span<const double> x);
double euclidean_distance(std::span<const double> a, std::span<const double> b);
double compute_radius_bound(const LabeledDataset& data);

// Copy of data without row i (order otherwise preserved).
LabeledDataset remove_point(const LabeledDataset& data, std::size_t i);

} // namespace llsvm

#endif
