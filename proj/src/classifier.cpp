#include "llsvm/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "llsvm/errors.hpp"
#include "llsvm/parallel.hpp"

namespace llsvm {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

int sign_or_plus(double v) { return v >= 0.0 ? 1 : -1; }

void append_poly(std::span<const double> x, int degree, std::vector<double>& out) {
    int d = static_cast<int>(x.size());
    if (degree == 1) {
        out.insert(out.end(), x.begin(), x.end());
        return;
    }
    // exponent vectors of each total degree, lexicographically descending
    std::vector<int> expo(static_cast<std::size_t>(d), 0);
    auto rec = [&](auto&& self, int axis, int remaining, double partial) -> void {
        if (axis == d - 1) {
            double v = partial;
            for (int e = 0; e < remaining; ++e) v *= x[static_cast<std::size_t>(axis)];
            out.push_back(v);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            double v = partial;
            for (int t = 0; t < e; ++t) v *= x[static_cast<std::size_t>(axis)];
            self(self, axis + 1, remaining - e, v);
        }
    };
    for (int t = 1; t <= degree; ++t) rec(rec, 0, t, 1.0);
}

// augmented feature row (poly_map(x), 1)
std::vector<double> augmented_features(std::span<const double> x, int degree) {
    std::vector<double> row;
    row.reserve(poly_dim(static_cast<int>(x.size()), degree) + 1);
    append_poly(x, degree, row);
    row.push_back(1.0);
    return row;
}

Prediction majority_fallback(const LabeledDataset& data, const LocalContext& ctx) {
    double mean = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) mean += data.labels[i];
    mean /= static_cast<double>(data.size());
    Prediction p;
    p.label = sign_or_plus(mean);
    p.decision_value = mean;
    p.local_count = static_cast<int>(ctx.ball.size());
    p.effective_bandwidth = ctx.sigma;
    p.flags = ctx.flags | kEmptyBallFallback;
    return p;
}

} // namespace

std::size_t poly_dim(int dim, int degree) {
    if (dim < 1 || degree < 1)
        throw InvalidSpecError("poly_dim: dim and degree must be >= 1");
    // C(dim + degree, degree) - 1 with an early overflow guard
    double c = 1.0;
    for (int j = 1; j <= degree; ++j) {
        c *= static_cast<double>(dim + j) / static_cast<double>(j);
        if (c > 1e6 + 1.0)
            throw InvalidSpecError("poly_dim: expanded feature count exceeds 1e6");
    }
    return static_cast<std::size_t>(std::llround(c)) - 1;
}

std::vector<double> poly_map(std::span<const double> x, int degree) {
    if (x.empty()) throw InvalidInputError("poly_map: empty point");
    std::size_t want = poly_dim(static_cast<int>(x.size()), degree);
    std::vector<double> out;
    out.reserve(want);
    append_poly(x, degree, out);
    return out;
}

BandwidthMode fixed_bandwidth(KernelSpec spec) {
    BandwidthMode m;
    m.kind = BandwidthKind::Fixed;
    m.fixed = spec;
    return m;
}

BandwidthMode knn_bandwidth(int k, KernelFamily family) {
    BandwidthMode m;
    m.kind = BandwidthKind::Knn;
    m.k = k;
    m.knn_family = family;
    return m;
}

void validate_config(const LLSVMConfig& config, int dim) {
    if (!(config.lambda > 0.0) || !std::isfinite(config.lambda))
        throw InvalidSpecError("config: lambda must be finite and > 0");
    poly_dim(dim, config.feature_degree);  // validates degree + size guard
    if (config.max_epochs < 1) throw InvalidSpecError("config: max_epochs must be >= 1");
    if (config.subgradient_iters < 1)
        throw InvalidSpecError("config: subgradient_iters must be >= 1");
    if (config.grow.max_doublings < 0 || config.grow.min_points < 1)
        throw InvalidSpecError("config: grow policy out of range");
    if (config.bandwidth.kind == BandwidthKind::Fixed) {
        const KernelSpec& s = config.bandwidth.fixed;
        if (s.dim != dim)
            throw InvalidSpecError("config: kernel dim does not match dataset dim");
        make_kernel_spec(s.family, s.bandwidth, s.dim, true);  // revalidate numerics
    } else {
        if (config.bandwidth.k < 1)
            throw InvalidSpecError("config: knn bandwidth needs k >= 1");
        if (!kernel_is_positive(config.bandwidth.knn_family))
            throw InvalidSpecError("config: knn bandwidth requires a nonnegative family");
    }
}

std::string flag_names(unsigned flags) {
    static const std::pair<unsigned, const char*> table[] = {
        {kEmptyBallFallback, "empty_ball_fallback"},
        {kNotConverged, "not_converged"},
        {kSingleClassShortcut, "single_class_shortcut"},
        {kBandwidthGrown, "bandwidth_grown"},
        {kTie, "tie"},
    };
    std::string out;
    for (const auto& [bit, name] : table) {
        if (flags & bit) {
            if (!out.empty()) out += '|';
            out += name;
        }
    }
    return out;
}

LocalContext local_context(const LabeledDataset& data, const SpatialIndex& index,
                           const LLSVMConfig& config, std::span<const double> x0) {
    if (static_cast<int>(x0.size()) != data.dim)
        throw InvalidInputError("query point dim does not match dataset dim");
    LocalContext ctx;
    if (config.bandwidth.kind == BandwidthKind::Fixed) {
        ctx.spec = config.bandwidth.fixed;
        ctx.sigma = ctx.spec.bandwidth;
    } else {
        auto [idx, dist] = index.knn_query(x0, config.bandwidth.k);
        double sigma = dist.back();
        if (sigma <= 0.0) {
            // duplicates collapsed the k-th distance; grow to the nearest
            // positive distance (any bandwidth below that gives the same ball)
            auto [all_idx, all_dist] = index.knn_query(x0, static_cast<int>(index.size()));
            sigma = 1.0;
            for (double dv : all_dist) {
                if (dv > 0.0) {
                    sigma = dv;
                    break;
                }
            }
            ctx.flags |= kBandwidthGrown;
        }
        ctx.spec = make_kernel_spec(config.bandwidth.knn_family, sigma, data.dim);
        ctx.sigma = sigma;
    }

    auto load_ball = [&](double sigma) {
        ctx.ball = index.range_query(x0, sigma);
        ctx.weights.resize(ctx.ball.size());
        bool any = false;
        for (std::size_t i = 0; i < ctx.ball.size(); ++i) {
            double k = kernel_eval(ctx.spec, data.point(static_cast<std::size_t>(ctx.ball[i])), x0);
            ctx.weights[i] = k;
            if (k != 0.0) any = true;
        }
        return any;
    };

    ctx.spec.bandwidth = ctx.sigma;
    ctx.usable = load_ball(ctx.sigma) &&
                 static_cast<int>(ctx.ball.size()) >= (config.policy == EmptyBallPolicy::Grow
                                                           ? config.grow.min_points
                                                           : 1);
    if (!ctx.usable) {
        switch (config.policy) {
            case EmptyBallPolicy::Abstain:
                throw DegenerateProblemError(
                    "no usable neighborhood at the requested bandwidth (abstain policy)");
            case EmptyBallPolicy::Majority:
                ctx.flags |= kEmptyBallFallback;
                break;
            case EmptyBallPolicy::Grow: {
                double sigma = ctx.sigma;
                for (int g = 0; g < config.grow.max_doublings && !ctx.usable; ++g) {
                    sigma *= 2.0;
                    ctx.spec.bandwidth = sigma;
                    ctx.sigma = sigma;
                    ctx.usable = load_ball(sigma) &&
                                 static_cast<int>(ctx.ball.size()) >= config.grow.min_points;
                }
                ctx.flags |= kEmptyBallFallback;
                break;
            }
        }
    }
    return ctx;
}

LocalProblem build_local_problem(const LabeledDataset& data, std::span<const int> ball,
                                 std::span<const double> weights, int degree, double lambda) {
    LocalProblem prob;
    prob.dim = static_cast<int>(poly_dim(data.dim, degree)) + 1;
    prob.sample_size = data.size();
    prob.lambda = lambda;
    prob.points.reserve(ball.size() * static_cast<std::size_t>(prob.dim));
    prob.labels.reserve(ball.size());
    prob.weights.assign(weights.begin(), weights.end());
    for (int idx : ball) {
        auto x = data.point(static_cast<std::size_t>(idx));
        append_poly(x, degree, prob.points);
        prob.points.push_back(1.0);
        prob.labels.push_back(data.labels[static_cast<std::size_t>(idx)]);
    }
    return prob;
}

LocalFit local_fit(const LabeledDataset& data, const SpatialIndex& index,
                   const LLSVMConfig& config, std::span<const double> x0) {
    validate_config(config, data.dim);
    LocalContext ctx = local_context(data, index, config, x0);
    LocalFit fit;
    fit.local_count = static_cast<int>(ctx.ball.size());
    fit.effective_bandwidth = ctx.sigma;
    fit.flags = ctx.flags;
    if (!ctx.usable) {
        // the empty problem is minimized by w = 0
        fit.w.assign(poly_dim(data.dim, config.feature_degree) + 1, 0.0);
        fit.flags |= kEmptyBallFallback;
        return fit;
    }
    LocalProblem prob = build_local_problem(data, ctx.ball, ctx.weights,
                                            config.feature_degree, config.lambda);
    fit.weight_mean = prob.weight_sum() / static_cast<double>(prob.sample_size);
    if (kernel_is_positive(ctx.spec.family)) {
        SolveOptions opts;
        opts.tol = config.solver_tol;
        opts.max_epochs = config.max_epochs;
        SolverResult res = solve(prob, opts);
        if (!res.converged) fit.flags |= kNotConverged;
        fit.w = std::move(res.w);
    } else {
        // uncertified ablation path: the objective is nonconvex here
        fit.w = solve_subgradient(prob, config.subgradient_iters);
    }
    return fit;
}

Prediction predict(const LabeledDataset& data, const SpatialIndex& index,
                   const LLSVMConfig& config, std::span<const double> x0) {
    validate_config(config, data.dim);
    LocalContext ctx = local_context(data, index, config, x0);
    if (!ctx.usable) return majority_fallback(data, ctx);

    if (config.single_class_shortcut && kernel_is_positive(ctx.spec.family)) {
        // The dual solution is w = (1/lambda) sum beta_i y_i x_i with beta >= 0,
        // so when every contributing row has the same label y and
        // <x_i, x0-augmented> is positive, sign(<w, x0>) must equal y. Only
        // shortcut when that geometric condition certifies agreement with the
        // solver (>= 0 suffices for +1 since sign(0) = +1).
        int cls = 0;
        bool single = true;
        for (std::size_t i = 0; i < ctx.ball.size() && single; ++i) {
            if (ctx.weights[i] == 0.0) continue;
            int y = data.labels[static_cast<std::size_t>(ctx.ball[i])];
            if (cls == 0) cls = y;
            else if (y != cls) single = false;
        }
        if (single && cls != 0) {
            std::vector<double> q = augmented_features(x0, config.feature_degree);
            bool certified = true;
            for (std::size_t i = 0; i < ctx.ball.size() && certified; ++i) {
                if (ctx.weights[i] == 0.0) continue;
                std::vector<double> row = augmented_features(
                    data.point(static_cast<std::size_t>(ctx.ball[i])), config.feature_degree);
                double ip = dot(row, q);
                certified = cls == 1 ? ip >= 0.0 : ip > 0.0;
            }
            if (certified) {
                Prediction p;
                p.label = cls;
                p.decision_value = cls;
                p.local_count = static_cast<int>(ctx.ball.size());
                p.effective_bandwidth = ctx.sigma;
                p.flags = ctx.flags | kSingleClassShortcut;
                return p;
            }
        }
    }

    LocalProblem prob = build_local_problem(data, ctx.ball, ctx.weights,
                                            config.feature_degree, config.lambda);
    unsigned flags = ctx.flags;
    std::vector<double> w;
    if (kernel_is_positive(ctx.spec.family)) {
        SolveOptions opts;
        opts.tol = config.solver_tol;
        opts.max_epochs = config.max_epochs;
        SolverResult res = solve(prob, opts);
        if (!res.converged) flags |= kNotConverged;
        w = std::move(res.w);
    } else {
        w = solve_subgradient(prob, config.subgradient_iters);
    }
    std::vector<double> q = augmented_features(x0, config.feature_degree);
    double decision = dot(w, q);
    Prediction p;
    p.label = sign_or_plus(decision);
    p.decision_value = decision;
    p.local_count = static_cast<int>(ctx.ball.size());
    p.effective_bandwidth = ctx.sigma;
    p.flags = flags;
    return p;
}

std::vector<Prediction> predict_batch(const LabeledDataset& data, const SpatialIndex& index,
                                      const LLSVMConfig& config,
                                      std::span<const double> queries, int workers) {
    validate_config(config, data.dim);
    std::size_t d = static_cast<std::size_t>(data.dim);
    if (queries.size() % d != 0)
        throw InvalidInputError("predict_batch: query buffer is not a multiple of dim");
    std::size_t count = queries.size() / d;
    std::vector<Prediction> out(count);
    parallel_for(count, workers, [&](std::size_t i) {
        out[i] = predict(data, index, config, queries.subspan(i * d, d));
    });
    return out;
}

Prediction kbr_predict(const LabeledDataset& data, const SpatialIndex& index,
                       const KernelSpec& spec, std::span<const double> x0) {
    if (spec.dim != data.dim)
        throw InvalidSpecError("kbr_predict: kernel dim does not match dataset dim");
    std::vector<int> ball = index.range_query(x0, spec.bandwidth);
    Prediction p;
    p.effective_bandwidth = spec.bandwidth;
    p.local_count = static_cast<int>(ball.size());
    if (ball.empty()) {
        p.label = 1;
        p.decision_value = 0.0;
        p.flags = kEmptyBallFallback;
        return p;
    }
    double vote = 0.0;
    for (int idx : ball) {
        double k = kernel_eval(spec, data.point(static_cast<std::size_t>(idx)), x0);
        vote += data.labels[static_cast<std::size_t>(idx)] * k;
    }
    p.decision_value = vote;
    p.label = sign_or_plus(vote);
    if (vote == 0.0) p.flags = kTie;
    return p;
}

Prediction knn_predict(const LabeledDataset& data, const SpatialIndex& index, int k,
                       std::span<const double> x0) {
    auto [idx, dist] = index.knn_query(x0, k);
    int vote = 0;
    for (int i : idx) vote += data.labels[static_cast<std::size_t>(i)];
    Prediction p;
    p.label = vote >= 0 ? 1 : -1;
    p.decision_value = vote;
    p.local_count = k;
    p.effective_bandwidth = dist.back();
    if (vote == 0) p.flags = kTie;
    return p;
}

std::vector<double> train_global_linear(const LabeledDataset& data, double lambda,
                                        double tol, int max_epochs) {
    LocalProblem prob;
    prob.dim = data.dim + 1;
    prob.sample_size = data.size();
    prob.lambda = lambda;
    prob.labels = data.labels;
    prob.weights.assign(data.size(), 1.0);
    prob.points.reserve(data.size() * static_cast<std::size_t>(prob.dim));
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto x = data.point(i);
        prob.points.insert(prob.points.end(), x.begin(), x.end());
        prob.points.push_back(1.0);
    }
    SolveOptions opts;
    opts.tol = tol;
    opts.max_epochs = max_epochs;
    return solve(prob, opts).w;
}

} // namespace llsvm
