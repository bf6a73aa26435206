#include "llsvm/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "llsvm/errors.hpp"

namespace llsvm {

namespace {

// Bounded worst-first heap entry for knn: "worse" = farther, then larger index.
struct Candidate {
    double d2;
    int idx;
    bool operator<(const Candidate& o) const {
        if (d2 != o.d2) return d2 < o.d2;
        return idx < o.idx;
    }
};

} // namespace

double SpatialIndex::dist_sq(int point, std::span<const double> x0) const {
    const double* p = points_.data() + static_cast<std::size_t>(point) * dim_;
    double s = 0.0;
    for (int a = 0; a < dim_; ++a) {
        double d = p[a] - x0[a];
        s += d * d;
    }
    return s;
}

int SpatialIndex::build_node(int begin, int end, int leaf_size) {
    Node node;
    node.begin = begin;
    node.end = end;
    if (end - begin <= leaf_size) {
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }
    // Split along the axis with the widest extent of this node's points.
    int axis = 0;
    double best_extent = -1.0;
    for (int a = 0; a < dim_; ++a) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int i = begin; i < end; ++i) {
            double v = points_[static_cast<std::size_t>(order_[i]) * dim_ + a];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_extent) {
            best_extent = hi - lo;
            axis = a;
        }
    }
    if (best_extent <= 0.0) {
        // all points identical in every axis: keep as one leaf
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }
    int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int i, int j) {
                         return points_[static_cast<std::size_t>(i) * dim_ + axis] <
                                points_[static_cast<std::size_t>(j) * dim_ + axis];
                     });
    node.axis = axis;
    node.split = points_[static_cast<std::size_t>(order_[mid]) * dim_ + axis];
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    int left = build_node(begin, mid, leaf_size);
    int right = build_node(mid, end, leaf_size);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

SpatialIndex SpatialIndex::build(const LabeledDataset& data, int leaf_size) {
    if (data.size() == 0) throw InvalidInputError("SpatialIndex: dataset is empty");
    if (leaf_size < 1) throw InvalidSpecError("SpatialIndex: leaf_size must be >= 1");
    SpatialIndex idx;
    idx.count_ = data.size();
    idx.dim_ = data.dim;
    idx.points_ = data.points;
    idx.order_.resize(idx.count_);
    std::iota(idx.order_.begin(), idx.order_.end(), 0);
    int effective_leaf = idx.count_ < kLinearScanThreshold
                             ? static_cast<int>(idx.count_)
                             : leaf_size;
    idx.root_ = idx.build_node(0, static_cast<int>(idx.count_), effective_leaf);
    return idx;
}

std::vector<int> SpatialIndex::range_query(std::span<const double> x0, double radius) const {
    if (static_cast<int>(x0.size()) != dim_)
        throw InvalidInputError("range_query: point dim does not match index dim");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw QueryError("range_query: radius must be finite and > 0");
    double r2 = radius * radius;
    std::vector<int> out;
    std::vector<int> stack{root_};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (node.left < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                int p = order_[i];
                if (dist_sq(p, x0) <= r2) out.push_back(p);
            }
            continue;
        }
        double gap = x0[node.axis] - node.split;
        // left region has coords <= split, right >= split; prune with the
        // one-axis lower bound (conservative, never drops an in-ball point)
        if (gap <= 0.0 || gap * gap <= r2) stack.push_back(node.left);
        if (gap >= 0.0 || gap * gap <= r2) stack.push_back(node.right);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::pair<std::vector<int>, std::vector<double>>
SpatialIndex::knn_query(std::span<const double> x0, int k) const {
    if (static_cast<int>(x0.size()) != dim_)
        throw InvalidInputError("knn_query: point dim does not match index dim");
    if (k < 1 || static_cast<std::size_t>(k) > count_)
        throw QueryError("knn_query: k must be in [1, " + std::to_string(count_) +
                         "], got " + std::to_string(k));
    std::vector<Candidate> heap;  // max-heap on (d2, idx): top is the worst kept
    heap.reserve(static_cast<std::size_t>(k));
    auto worst_d2 = [&] {
        return heap.size() < static_cast<std::size_t>(k)
                   ? std::numeric_limits<double>::infinity()
                   : heap.front().d2;
    };
    auto offer = [&](int p, double d2) {
        Candidate c{d2, p};
        if (heap.size() < static_cast<std::size_t>(k)) {
            heap.push_back(c);
            std::push_heap(heap.begin(), heap.end());
        } else if (c < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = c;
            std::push_heap(heap.begin(), heap.end());
        }
    };
    // depth-first, near child first; visit the far side whenever the plane
    // distance ties the current worst so equal-distance/smaller-index
    // candidates are never missed
    std::vector<int> stack{root_};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        const Node& node = nodes_[id];
        if (node.left < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                int p = order_[i];
                offer(p, dist_sq(p, x0));
            }
            continue;
        }
        double gap = x0[node.axis] - node.split;
        int near = gap <= 0.0 ? node.left : node.right;
        int far = gap <= 0.0 ? node.right : node.left;
        if (gap * gap <= worst_d2()) stack.push_back(far);
        stack.push_back(near);
    }
    std::sort(heap.begin(), heap.end());
    std::vector<int> idx(heap.size());
    std::vector<double> dist(heap.size());
    for (std::size_t i = 0; i < heap.size(); ++i) {
        idx[i] = heap[i].idx;
        dist[i] = std::sqrt(heap[i].d2);
    }
    return {std::move(idx), std::move(dist)};
}

} // namespace llsvm
