#ifndef LLSVM_SPATIAL_INDEX_HPP
#define LLSVM_SPATIAL_INDEX_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "llsvm/dataset.hpp"

namespace llsvm {

// kd-tree over a snapshot of the dataset coordinates. Queries are exact:
// range uses the closed ball (distance <= radius), knn breaks distance ties
// by smaller point index. Small datasets degenerate to a single leaf
// (linear scan), which is faster below a few dozen points.
class SpatialIndex {
public:
    static constexpr int kDefaultLeafSize = 16;
    static constexpr std::size_t kLinearScanThreshold = 64;

    static SpatialIndex build(const LabeledDataset& data, int leaf_size = kDefaultLeafSize);

    // Indices i with ||x_i - x0|| <= radius, ascending. Throws QueryError on
    // radius <= 0 or non-finite, InvalidInputError on dim mismatch.
    std::vector<int> range_query(std::span<const double> x0, double radius) const;

    // k nearest neighbors: (indices, distances), distances nondecreasing,
    // ties broken by smaller index. Throws QueryError unless 1 <= k <= size.
    std::pair<std::vector<int>, std::vector<double>>
    knn_query(std::span<const double> x0, int k) const;

    std::size_t size() const { return count_; }
    int dim() const { return dim_; }

private:
    struct Node {
        int left = -1;   // child node ids, -1 for leaf
        int right = -1;
        int axis = 0;
        double split = 0.0;
        int begin = 0;   // leaf range into order_
        int end = 0;
    };

    int build_node(int begin, int end, int leaf_size);
    double dist_sq(int point, std::span<const double> x0) const;

    std::vector<double> points_;  // row-major copy, count_ x dim_
    std::vector<int> order_;      // permutation of 0..count_-1
    std::vector<Node> nodes_;
    std::size_t count_ = 0;
    int dim_ = 0;
    int root_ = -1;
};

} // namespace llsvm

#endif
