#include "llsvm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "llsvm/errors.hpp"
#include "llsvm/parallel.hpp"
#include "llsvm/rng.hpp"

namespace llsvm {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_diff(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

void require_fixed_positive(const LLSVMConfig& config, const char* who) {
    if (config.bandwidth.kind != BandwidthKind::Fixed)
        throw InvalidSpecError(std::string(who) + ": requires a fixed bandwidth");
    if (!kernel_is_positive(config.bandwidth.fixed.family))
        throw InvalidSpecError(std::string(who) + ": requires a nonnegative kernel family");
}

double resolved_solver_tol(const LocalProblem& prob, double requested) {
    if (requested > 0.0) return requested;
    double scale = prob.weight_sum() / static_cast<double>(prob.sample_size);
    return 1e-8 * std::max(1.0, scale);
}

LocalProblem drop_row(const LocalProblem& prob, std::size_t i) {
    LocalProblem out;
    out.dim = prob.dim;
    out.sample_size = prob.sample_size;  // the loss normalizer keeps the full n
    out.lambda = prob.lambda;
    std::size_t d = static_cast<std::size_t>(prob.dim);
    out.points.reserve(prob.points.size() - d);
    out.labels.reserve(prob.labels.size() - 1);
    out.weights.reserve(prob.weights.size() - 1);
    for (std::size_t j = 0; j < prob.size(); ++j) {
        if (j == i) continue;
        auto r = prob.row(j);
        out.points.insert(out.points.end(), r.begin(), r.end());
        out.labels.push_back(prob.labels[j]);
        out.weights.push_back(prob.weights[j]);
    }
    return out;
}

double hinge(double margin) { return std::max(0.0, 1.0 - margin); }

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ranks = [](const std::vector<double>& v) {
        std::size_t n = v.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
            i = j + 1;
        }
        return r;
    };
    std::vector<double> ra = ranks(a), rb = ranks(b);
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(ra.size());
    mb /= static_cast<double>(rb.size());
    double num = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return num / std::sqrt(va * vb);
}

} // namespace

StabilityReport stability_check(const LabeledDataset& data, const SpatialIndex& index,
                                const LLSVMConfig& config, std::span<const double> x0,
                                std::uint64_t seed) {
    require_fixed_positive(config, "stability_check");
    validate_config(config, data.dim);
    LocalContext ctx = local_context(data, index, config, x0);
    if (!ctx.usable)
        throw DegenerateProblemError("stability_check: no usable neighborhood at x0");

    LocalProblem prob = build_local_problem(data, ctx.ball, ctx.weights,
                                            config.feature_degree, config.lambda);
    double tol = resolved_solver_tol(prob, config.solver_tol);
    SolveOptions opts;
    opts.tol = tol;
    opts.max_epochs = config.max_epochs;
    SolverResult full = solve(prob, opts);

    StabilityReport rep;
    rep.x0.assign(x0.begin(), x0.end());
    rep.sigma = ctx.sigma;
    rep.lambda = config.lambda;
    rep.sample_size = data.size();
    rep.local_count = static_cast<int>(ctx.ball.size());
    rep.kernel_sup = kernel_sup_value(config.bandwidth.fixed);
    // both solves are tol-accurate; lambda-strong convexity turns each gap
    // into a distance of at most sqrt(2 tol / lambda)
    rep.slack = 2.0 * std::sqrt(2.0 * (tol + tol) / config.lambda);

    double mbar = 0.0;
    for (std::size_t j = 0; j < prob.size(); ++j)
        mbar = std::max(mbar, std::sqrt(dot(prob.row(j), prob.row(j))));
    rep.row_norm_bound = mbar;

    const double n = static_cast<double>(data.size());
    for (std::size_t i = 0; i < prob.size(); ++i) {
        LocalProblem loo = drop_row(prob, i);
        StabilityRecord rec;
        rec.index = ctx.ball[i];
        rec.weight = prob.weights[i];
        rec.bound = 2.0 * mbar * prob.weights[i] / (n * config.lambda);
        if (loo.size() == 0 || loo.weight_sum() == 0.0) {
            // removing the only informative row: the reduced optimum is w = 0
            std::vector<double> zero(static_cast<std::size_t>(prob.dim), 0.0);
            rec.observed = norm_diff(full.w, zero);
        } else {
            SolverResult part = solve(loo, opts);
            rec.observed = norm_diff(full.w, part.w);
        }
        rec.pass = rec.observed <= rec.bound + rep.slack;
        rep.records.push_back(rec);
    }

    // controls: rows with zero influence must leave the solution unchanged
    std::vector<int> zero_rows;
    std::vector<char> in_ball(data.size(), 0);
    for (std::size_t i = 0; i < ctx.ball.size(); ++i)
        if (ctx.weights[i] != 0.0) in_ball[static_cast<std::size_t>(ctx.ball[i])] = 1;
    for (std::size_t j = 0; j < data.size(); ++j)
        if (!in_ball[j]) zero_rows.push_back(static_cast<int>(j));
    SplitMix64 rng(mix_seed(seed, 0x5741b1u));
    for (int pick = 0; pick < 3 && !zero_rows.empty(); ++pick) {
        std::size_t at = static_cast<std::size_t>(rng.next_below(zero_rows.size()));
        int row = zero_rows[at];
        zero_rows.erase(zero_rows.begin() + static_cast<std::ptrdiff_t>(at));
        // the row is outside the neighborhood, so the reduced problem is the
        // same materialized problem; re-solve it honestly and compare
        SolverResult again = solve(prob, opts);
        StabilityRecord rec;
        rec.index = row;
        rec.weight = 0.0;
        rec.bound = 0.0;
        rec.observed = norm_diff(full.w, again.w);
        rec.pass = rec.observed <= rep.slack;
        rep.records.push_back(rec);
    }

    rep.worst_margin = -std::numeric_limits<double>::infinity();
    rep.pass = true;
    double min_positive_bound = std::numeric_limits<double>::infinity();
    for (const auto& rec : rep.records) {
        rep.worst_margin = std::max(rep.worst_margin, rec.observed - rec.bound);
        rep.pass = rep.pass && rec.pass;
        if (rec.bound > 0.0) min_positive_bound = std::min(min_positive_bound, rec.bound);
    }
    rep.inconclusive = std::isfinite(min_positive_bound) &&
                       rep.slack > 0.1 * min_positive_bound;
    return rep;
}

ConsistencyCurve consistency_sweep(const SyntheticSpec& data_spec,
                                   const std::vector<double>& probes,
                                   const ConsistencySettings& settings) {
    auto gt = ground_truth(data_spec);
    if (!gt)
        throw InvalidSpecError("consistency_sweep: generator has no ground truth");
    if (!(settings.exp_sigma > 0.0) || !(settings.exp_lambda > 0.0))
        throw InvalidSpecError("consistency_sweep: schedule exponents must be > 0");
    if (settings.n_list.size() < 2)
        throw InvalidSpecError("consistency_sweep: need at least two sample sizes");
    if (settings.replicates < 1)
        throw InvalidSpecError("consistency_sweep: replicates must be >= 1");
    int dim = data_spec.generator == Generator::Uniform1dSmooth ? 1 : 2;
    if (probes.empty() || probes.size() % static_cast<std::size_t>(dim) != 0)
        throw InvalidSpecError("consistency_sweep: probe buffer must be rows of dim " +
                               std::to_string(dim));

    ConsistencyCurve curve;
    curve.exp_sigma = settings.exp_sigma;
    curve.exp_lambda = settings.exp_lambda;
    curve.dim = dim;
    for (std::size_t r = 0; r < settings.n_list.size(); ++r) {
        std::size_t n = settings.n_list[r];
        if (r > 0 && n <= settings.n_list[r - 1])
            throw InvalidSpecError("consistency_sweep: n_list must be strictly increasing");
        ConsistencyRow row;
        row.n = n;
        row.sigma = std::pow(static_cast<double>(n), -settings.exp_sigma);
        row.lambda = std::pow(static_cast<double>(n), -settings.exp_lambda);
        row.schedule_value = static_cast<double>(n) * row.lambda * row.lambda *
                             std::pow(row.sigma, 4.0 * dim);
        curve.rows.push_back(row);
    }
    for (std::size_t r = 1; r < curve.rows.size(); ++r) {
        if (!(curve.rows[r].schedule_value > curve.rows[r - 1].schedule_value))
            throw InvalidSpecError(
                "consistency_sweep: n * lambda^2 * sigma^(4 dim) must increase along the "
                "schedule; lower the exponents");
    }

    // keep probes whose optimal label is decided by at least the margin floor
    std::vector<std::vector<double>> kept;
    std::size_t d = static_cast<std::size_t>(dim);
    for (std::size_t p = 0; p * d < probes.size(); ++p) {
        std::vector<double> pt(probes.begin() + static_cast<std::ptrdiff_t>(p * d),
                               probes.begin() + static_cast<std::ptrdiff_t>((p + 1) * d));
        double e = gt->eta(pt);
        if (std::abs(2.0 * e - 1.0) >= settings.margin_floor) kept.push_back(std::move(pt));
    }
    if (kept.empty())
        throw InvalidSpecError("consistency_sweep: no probe survives the margin floor");

    for (auto& row : curve.rows) {
        KernelSpec spec = make_kernel_spec(settings.family, row.sigma, dim);
        LLSVMConfig config;
        config.bandwidth = fixed_bandwidth(spec);
        config.lambda = row.lambda;
        config.feature_degree = settings.feature_degree;
        config.solver_tol = settings.solver_tol;
        config.max_epochs = settings.max_epochs;

        std::vector<double> hits(static_cast<std::size_t>(settings.replicates), 0.0);
        std::vector<double> risks(static_cast<std::size_t>(settings.replicates), 0.0);
        parallel_for(static_cast<std::size_t>(settings.replicates), settings.workers,
                     [&](std::size_t rep) {
                         SyntheticSpec ds = data_spec;
                         ds.n = row.n;
                         ds.seed = mix_seed(settings.base_seed,
                                            row.n * 1000003ULL + rep);
                         LabeledDataset train = generate(ds);
                         SpatialIndex index = SpatialIndex::build(train);
                         double h = 0.0, rk = 0.0;
                         for (const auto& pt : kept) {
                             Prediction pred = predict(train, index, config, pt);
                             double e = gt->eta(pt);
                             int optimal = e >= 0.5 ? 1 : -1;
                             if (pred.label == optimal) h += 1.0;
                             rk += pred.label == 1 ? 1.0 - e : e;
                         }
                         hits[rep] = h / static_cast<double>(kept.size());
                         risks[rep] = rk / static_cast<double>(kept.size());
                     });
        row.agreement = std::accumulate(hits.begin(), hits.end(), 0.0) /
                        static_cast<double>(settings.replicates);
        row.mean_pointwise_risk = std::accumulate(risks.begin(), risks.end(), 0.0) /
                                  static_cast<double>(settings.replicates);
    }

    std::vector<double> ns, ags;
    for (const auto& row : curve.rows) {
        ns.push_back(static_cast<double>(row.n));
        ags.push_back(row.agreement);
    }
    curve.spearman = spearman(ns, ags);
    return curve;
}

RiskReport risk_report(const LabeledDataset& train, const LabeledDataset& test,
                       const LLSVMConfig& config, double delta, int workers) {
    require_fixed_positive(config, "risk_report");
    validate_config(config, train.dim);
    if (test.dim != train.dim)
        throw InvalidInputError("risk_report: train/test dim mismatch");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw InvalidSpecError("risk_report: delta must be in (0, 1)");

    SpatialIndex index = SpatialIndex::build(train);
    RiskReport rep;
    rep.delta = delta;
    rep.train_size = train.size();
    rep.test_size = test.size();
    rep.kernel_sup = kernel_sup_value(config.bandwidth.fixed);

    const std::size_t nt = train.size(), nh = test.size();
    std::vector<double> train_hinge(nt), train_kbar(nt);
    std::vector<double> test_hinge(nh), test_kbar(nh);

    auto eval_at = [&](const LabeledDataset& where, std::size_t i, double& hinge_out,
                       double& kbar_out) {
        auto x = where.point(i);
        LocalFit fit = local_fit(train, index, config, x);
        std::vector<double> row = poly_map(x, config.feature_degree);
        row.push_back(1.0);
        double margin = where.labels[i] * dot(fit.w, row);
        hinge_out = hinge(margin);
        kbar_out = fit.weight_mean;
    };
    parallel_for(nt, workers, [&](std::size_t i) {
        eval_at(train, i, train_hinge[i], train_kbar[i]);
    });
    parallel_for(nh, workers, [&](std::size_t i) {
        eval_at(test, i, test_hinge[i], test_kbar[i]);
    });

    rep.empirical_risk = std::accumulate(train_hinge.begin(), train_hinge.end(), 0.0) /
                         static_cast<double>(nt);
    rep.heldout_risk = std::accumulate(test_hinge.begin(), test_hinge.end(), 0.0) /
                       static_cast<double>(nh);
    rep.gap = rep.heldout_risk - rep.empirical_risk;

    // the train sample estimates the support radius of the augmented features
    double m2 = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i) {
        std::vector<double> row = poly_map(train.point(i), config.feature_degree);
        row.push_back(1.0);
        m2 = std::max(m2, dot(row, row));
    }
    rep.radius_bound = std::sqrt(m2);

    rep.kbar_max = 0.0;
    for (double k : train_kbar) rep.kbar_max = std::max(rep.kbar_max, k);
    for (double k : test_kbar) rep.kbar_max = std::max(rep.kbar_max, k);

    const double n = static_cast<double>(nt);
    rep.stability_term = 4.0 * m2 * rep.kernel_sup / (n * config.lambda);
    rep.deviation_term = (1.0 + rep.radius_bound * std::sqrt(2.0 * rep.kbar_max / config.lambda)) *
                         std::sqrt(std::log(1.0 / delta) / (2.0 * n));
    rep.bound = rep.stability_term + rep.deviation_term;
    rep.holds = rep.gap <= rep.bound;
    return rep;
}

std::string variant_name(const ClassifierVariant& v) {
    if (std::holds_alternative<LLSVMConfig>(v)) return "llsvm";
    if (std::holds_alternative<GlobalLinearConfig>(v)) return "linear";
    if (std::holds_alternative<KnnConfig>(v)) return "knn";
    return "kbr";
}

std::vector<CvResult> cross_validate(const LabeledDataset& data,
                                     const std::vector<ClassifierVariant>& variants,
                                     const CvOptions& options) {
    if (options.folds < 2 || static_cast<std::size_t>(options.folds) > data.size())
        throw InvalidSpecError("cross_validate: folds must be in [2, n]");
    if (variants.empty()) throw InvalidSpecError("cross_validate: no variants given");

    // stratified round-robin deal after a per-class shuffle
    std::vector<int> fold_of(data.size(), 0);
    SplitMix64 rng(mix_seed(options.seed, 0xcf01d5ULL));
    for (int label : {1, -1}) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (data.labels[i] == label) rows.push_back(i);
        for (std::size_t i = rows.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(rng.next_below(i));
            std::swap(rows[i - 1], rows[j]);
        }
        for (std::size_t t = 0; t < rows.size(); ++t)
            fold_of[rows[t]] = static_cast<int>(t % static_cast<std::size_t>(options.folds));
    }

    std::vector<CvResult> results(variants.size());
    for (std::size_t v = 0; v < variants.size(); ++v) {
        results[v].name = variant_name(variants[v]);
        results[v].fold_accuracy.assign(static_cast<std::size_t>(options.folds), 0.0);
    }

    for (int fold = 0; fold < options.folds; ++fold) {
        std::vector<double> train_pts, test_pts;
        std::vector<int> train_labels, test_labels;
        for (std::size_t i = 0; i < data.size(); ++i) {
            auto p = data.point(i);
            if (fold_of[i] == fold) {
                test_pts.insert(test_pts.end(), p.begin(), p.end());
                test_labels.push_back(data.labels[i]);
            } else {
                train_pts.insert(train_pts.end(), p.begin(), p.end());
                train_labels.push_back(data.labels[i]);
            }
        }
        if (test_labels.empty() || train_labels.empty())
            throw InvalidSpecError("cross_validate: a fold came out empty; lower folds");
        LabeledDataset train = make_dataset(data.dim, std::move(train_pts),
                                            std::move(train_labels));
        SpatialIndex index = SpatialIndex::build(train);
        bool single_class = true;
        for (std::size_t i = 1; i < train.size(); ++i)
            if (train.labels[i] != train.labels[0]) {
                single_class = false;
                break;
            }

        std::size_t n_test = test_labels.size();
        for (std::size_t v = 0; v < variants.size(); ++v) {
            std::vector<int> predicted(n_test, 0);
            const ClassifierVariant& var = variants[v];
            if (const auto* cfg = std::get_if<LLSVMConfig>(&var)) {
                std::vector<Prediction> preds =
                    predict_batch(train, index, *cfg, test_pts, options.workers);
                for (std::size_t i = 0; i < n_test; ++i) predicted[i] = preds[i].label;
            } else if (const auto* lin = std::get_if<GlobalLinearConfig>(&var)) {
                std::vector<double> w =
                    train_global_linear(train, lin->lambda, lin->tol, lin->max_epochs);
                for (std::size_t i = 0; i < n_test; ++i) {
                    std::span<const double> x(test_pts.data() + i * data.dim,
                                              static_cast<std::size_t>(data.dim));
                    double dec = 0.0;
                    for (int a = 0; a < data.dim; ++a) dec += w[static_cast<std::size_t>(a)] * x[a];
                    dec += w.back();
                    predicted[i] = dec >= 0.0 ? 1 : -1;
                }
            } else if (const auto* kc = std::get_if<KnnConfig>(&var)) {
                parallel_for(n_test, options.workers, [&](std::size_t i) {
                    std::span<const double> x(test_pts.data() + i * data.dim,
                                              static_cast<std::size_t>(data.dim));
                    predicted[i] = knn_predict(train, index, kc->k, x).label;
                });
            } else {
                const auto& kb = std::get<KbrConfig>(var);
                parallel_for(n_test, options.workers, [&](std::size_t i) {
                    std::span<const double> x(test_pts.data() + i * data.dim,
                                              static_cast<std::size_t>(data.dim));
                    predicted[i] = kbr_predict(train, index, kb.kernel, x).label;
                });
            }
            double acc = 0.0;
            for (std::size_t i = 0; i < n_test; ++i)
                if (predicted[i] == test_labels[i]) acc += 1.0;
            results[v].fold_accuracy[static_cast<std::size_t>(fold)] =
                acc / static_cast<double>(n_test);
            if (single_class) results[v].single_class_fold = true;
        }
    }

    for (auto& res : results) {
        double mean = std::accumulate(res.fold_accuracy.begin(), res.fold_accuracy.end(), 0.0) /
                      static_cast<double>(res.fold_accuracy.size());
        double var = 0.0;
        for (double a : res.fold_accuracy) var += (a - mean) * (a - mean);
        var /= static_cast<double>(res.fold_accuracy.size() - 1);
        res.mean_accuracy = mean;
        res.sd_accuracy = std::sqrt(var);
    }
    return results;
}

} // namespace llsvm
