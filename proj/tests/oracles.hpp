#ifndef LLSVM_TEST_ORACLES_HPP
#define LLSVM_TEST_ORACLES_HPP

// Independent reference implementations used only by the tests. Everything
// here is deliberately naive (fixed-panel quadrature, linear scans, grid
// search) and shares no code with the library; the library has to agree with
// these, never the other way around.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "llsvm/solver.hpp"

namespace oracle {

// Composite Simpson, doubling the panel count until two refinements agree.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    auto simpson = [&](std::size_t panels) {
        double h = (b - a) / static_cast<double>(2 * panels);
        double s = f(a) + f(b);
        for (std::size_t i = 1; i < 2 * panels; ++i)
            s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
        return s * h / 3.0;
    };
    double prev = simpson(4);
    for (std::size_t panels = 8; panels <= (1u << 20); panels *= 2) {
        double cur = simpson(panels);
        if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

// Surface area of the radius-u sphere in R^d, d <= 3 (all the tests need).
inline double sphere_area(int d, double u) {
    if (d == 1) return 2.0;
    if (d == 2) return 2.0 * 3.14159265358979323846 * u;
    return 4.0 * 3.14159265358979323846 * u * u;
}

// Integral over R^d of a radial function supported on the unit ball.
inline double ball_integral(const std::function<double(double)>& radial, int d,
                            double tol = 1e-12) {
    if (d == 1) {
        // split at 0 so kinks of |x| profiles do not slow the quadrature
        return integrate(radial, 0.0, 1.0, tol) * 2.0;
    }
    return integrate([&](double u) { return radial(u) * sphere_area(d, u); }, 0.0, 1.0, tol);
}

// Tensor-product midpoint rule over [-1,1]^2 for a radial integrand; the
// circular support edge limits accuracy to about (1/cells)^1.5.
inline double disk_integral_grid(const std::function<double(double)>& radial,
                                 std::size_t cells) {
    double h = 2.0 / static_cast<double>(cells);
    double sum = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        double x = -1.0 + h * (static_cast<double>(i) + 0.5);
        for (std::size_t j = 0; j < cells; ++j) {
            double y = -1.0 + h * (static_cast<double>(j) + 0.5);
            double r = std::sqrt(x * x + y * y);
            if (r <= 1.0) sum += radial(r);
        }
    }
    return sum * h * h;
}

inline double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// All indices with ||x_i - x0|| <= r, ascending (closed ball).
inline std::vector<int> range_scan(const std::vector<double>& points, int dim,
                                   std::span<const double> x0, double r) {
    std::size_t d = static_cast<std::size_t>(dim);
    std::size_t n = points.size() / d;
    std::vector<int> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::span<const double> p(points.data() + i * d, d);
        if (std::sqrt(dist2(p, x0)) <= r) out.push_back(static_cast<int>(i));
    }
    return out;
}

// k nearest neighbors by (distance, index) order.
inline std::pair<std::vector<int>, std::vector<double>>
knn_scan(const std::vector<double>& points, int dim, std::span<const double> x0, int k) {
    std::size_t d = static_cast<std::size_t>(dim);
    std::size_t n = points.size() / d;
    std::vector<std::pair<double, int>> all(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::span<const double> p(points.data() + i * d, d);
        all[i] = {std::sqrt(dist2(p, x0)), static_cast<int>(i)};
    }
    std::sort(all.begin(), all.end());
    std::vector<int> idx;
    std::vector<double> dist;
    for (int i = 0; i < k; ++i) {
        dist.push_back(all[static_cast<std::size_t>(i)].first);
        idx.push_back(all[static_cast<std::size_t>(i)].second);
    }
    return {idx, dist};
}

// Naive re-evaluation of the weighted local objective.
inline double primal(std::span<const double> w, const llsvm::LocalProblem& prob) {
    double reg = 0.0;
    for (double v : w) reg += v * v;
    double loss = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        auto x = prob.row(i);
        double m = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) m += w[a] * x[a];
        m *= prob.labels[i];
        if (m < 1.0) loss += prob.weights[i] * (1.0 - m);
    }
    return 0.5 * prob.lambda * reg + loss / static_cast<double>(prob.sample_size);
}

// Coarse-to-fine grid search over a 2-D box centered at the origin.
inline std::pair<std::vector<double>, double>
grid_min_2d(const std::function<double(double, double)>& f, double half_width,
            int rounds = 24) {
    double cx = 0.0, cy = 0.0, hw = half_width;
    double best = f(cx, cy);
    for (int round = 0; round < rounds; ++round) {
        double bx = cx, by = cy;
        for (int i = -20; i <= 20; ++i) {
            for (int j = -20; j <= 20; ++j) {
                double x = cx + hw * static_cast<double>(i) / 20.0;
                double y = cy + hw * static_cast<double>(j) / 20.0;
                double v = f(x, y);
                if (v < best) {
                    best = v;
                    bx = x;
                    by = y;
                }
            }
        }
        cx = bx;
        cy = by;
        hw /= 8.0;
    }
    return {{cx, cy}, best};
}

// Monomials of total degree 1..degree via exponent-vector enumeration,
// ordered by degree then lexicographically descending exponents.
inline std::vector<double> poly_scan(std::span<const double> x, int degree) {
    int d = static_cast<int>(x.size());
    std::vector<std::vector<int>> expos;
    std::vector<int> cur(static_cast<std::size_t>(d), 0);
    while (true) {
        int total = 0;
        for (int e : cur) total += e;
        if (total >= 1 && total <= degree) expos.push_back(cur);
        int axis = d - 1;
        while (axis >= 0 && cur[static_cast<std::size_t>(axis)] == degree) {
            cur[static_cast<std::size_t>(axis)] = 0;
            --axis;
        }
        if (axis < 0) break;
        ++cur[static_cast<std::size_t>(axis)];
    }
    std::sort(expos.begin(), expos.end(), [](const auto& a, const auto& b) {
        int ta = 0, tb = 0;
        for (int e : a) ta += e;
        for (int e : b) tb += e;
        if (ta != tb) return ta < tb;
        return a > b;  // lexicographically descending within a degree
    });
    std::vector<double> out;
    for (const auto& e : expos) {
        double v = 1.0;
        for (int a = 0; a < d; ++a)
            for (int t = 0; t < e[static_cast<std::size_t>(a)]; ++t)
                v *= x[static_cast<std::size_t>(a)];
        out.push_back(v);
    }
    return out;
}

} // namespace oracle

#endif
