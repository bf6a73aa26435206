#include "llsvm/dataset.hpp"

#include <cmath>
#include <string>

#include "llsvm/errors.hpp"

namespace llsvm {

double euclidean_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double compute_radius_bound(const LabeledDataset& data) {
    double m = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double r = euclidean_norm(data.point(i));
        if (r > m) m = r;
    }
    return m;
}

LabeledDataset make_dataset(int dim, std::vector<double> points, std::vector<int> labels) {
    if (dim < 1) throw InvalidInputError("dataset dim must be >= 1, got " + std::to_string(dim));
    if (labels.empty()) throw InvalidInputError("dataset must contain at least one point");
    if (points.size() != labels.size() * static_cast<std::size_t>(dim))
        throw InvalidInputError("points size " + std::to_string(points.size()) +
                                " does not match " + std::to_string(labels.size()) +
                                " labels of dim " + std::to_string(dim));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1 && labels[i] != -1)
            throw InvalidInputError("label at row " + std::to_string(i) + " must be +1 or -1");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i]))
            throw InvalidInputError("non-finite coordinate at flat index " + std::to_string(i));
    }
    LabeledDataset d;
    d.dim = dim;
    d.points = std::move(points);
    d.labels = std::move(labels);
    d.radius_bound = compute_radius_bound(d);
    return d;
}

LabeledDataset remove_point(const LabeledDataset& data, std::size_t i) {
    if (i >= data.size()) throw InvalidInputError("remove_point index out of range");
    if (data.size() == 1) throw InvalidInputError("cannot remove the only point");
    LabeledDataset out;
    out.dim = data.dim;
    out.points.reserve(data.points.size() - static_cast<std::size_t>(data.dim));
    out.labels.reserve(data.labels.size() - 1);
    for (std::size_t j = 0; j < data.size(); ++j) {
        if (j == i) continue;
        auto p = data.point(j);
        out.points.insert(out.points.end(), p.begin(), p.end());
        out.labels.push_back(data.labels[j]);
    }
    out.radius_bound = compute_radius_bound(out);
    return out;
}

} // namespace llsvm
