#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "llsvm/classifier.hpp"
#include "llsvm/errors.hpp"
#include "llsvm/evaluation.hpp"
#include "llsvm/io.hpp"
#include "llsvm/kernels.hpp"
#include "llsvm/synthetic.hpp"

namespace llsvm::cli {

namespace {

using nlohmann::json;

using KV = std::vector<std::pair<std::string, std::string>>;

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// flat "key = value" lines, '#' comments
std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open config file");
    std::map<std::string, std::string> out;
    std::string raw;
    std::size_t no = 0;
    while (std::getline(in, raw)) {
        ++no;
        std::string line = strip(raw);
        if (line.empty() || line[0] == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError(path + ":" + std::to_string(no) + ": expected key=value");
        std::string key = strip(line.substr(0, eq));
        std::string val = strip(line.substr(eq + 1));
        if (key.empty())
            throw DataError(path + ":" + std::to_string(no) + ": empty key");
        out[key] = val;
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = strip(tok);
        if (tok.empty()) continue;
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw CLI::ValidationError(what, "bad numeric entry '" + tok + "'");
        out.push_back(v);
    }
    if (out.empty()) throw CLI::ValidationError(what, "empty list");
    return out;
}

KernelFamily parse_family(const std::string& name) {
    auto f = family_from_name(name);
    if (!f)
        throw CLI::ValidationError("--kernel", "unknown kernel family '" + name +
                                                   "' (epanechnikov, triangle, biweight, "
                                                   "rectangular, negative)");
    return *f;
}

DataFormat parse_format(const std::string& name) {
    if (name == "dense") return DataFormat::DenseCsv;
    if (name == "sparse") return DataFormat::Sparse;
    throw CLI::ValidationError("--format", "unknown format '" + name + "' (dense, sparse)");
}

std::string json_path_for(const std::string& out) {
    if (out.size() > 4 && out.rfind(".csv") == out.size() - 4)
        return out.substr(0, out.size() - 4) + ".json";
    return out + ".json";
}

std::string config_comment(const std::string& cmd, const KV& kv) {
    std::string line = "config: cmd=" + cmd;
    for (const auto& [k, v] : kv) line += " " + k + "=" + v;
    return line;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << j.dump(2) << "\n";
    if (!out) throw DataError(path + ": write failed");
}

json kv_to_json(const std::string& cmd, const KV& kv) {
    json j;
    j["cmd"] = cmd;
    for (const auto& [k, v] : kv) j[k] = v;
    return j;
}

// Options shared by every command that trains local models.
struct ModelOptions {
    std::string kernel = "epanechnikov";
    double sigma = 0.0;
    int knn = 0;
    double lambda = 1e-3;
    int degree = 1;
    double tol = 0.0;
    int max_epochs = 10000;
    int subgrad_iters = 2000;
    std::string policy = "grow";
    int max_doublings = 10;
    int min_points = 1;
    bool allow_negative = false;
    bool no_shortcut = false;

    CLI::Option* sigma_opt = nullptr;
    CLI::Option* knn_opt = nullptr;
    CLI::Option* kernel_opt = nullptr;

    void attach(CLI::App* sub) {
        kernel_opt = sub->add_option("--kernel", kernel,
                                     "kernel family (fixed mode; also the knn-mode family "
                                     "when given explicitly)");
        sigma_opt = sub->add_option("--sigma", sigma, "fixed bandwidth (> 0)");
        knn_opt = sub->add_option("--knn", knn, "adaptive bandwidth: distance to the k-th "
                                                "nearest neighbor");
        sub->add_option("--lambda", lambda, "regularization strength (> 0)");
        sub->add_option("--degree", degree, "polynomial feature degree (>= 1)");
        sub->add_option("--tol", tol, "duality-gap tolerance (0 = auto)");
        sub->add_option("--max-epochs", max_epochs, "coordinate-descent epoch cap");
        sub->add_option("--subgrad-iters", subgrad_iters,
                        "iteration budget for the negative-kernel path");
        sub->add_option("--policy", policy, "empty neighborhood policy: abstain|majority|grow");
        sub->add_option("--max-doublings", max_doublings, "grow policy: bandwidth doublings");
        sub->add_option("--min-points", min_points, "grow policy: points required");
        sub->add_flag("--allow-negative", allow_negative,
                      "permit the negative ablation kernel");
        sub->add_flag("--no-shortcut", no_shortcut, "disable the single-class shortcut");
    }

    LLSVMConfig build(int dim) const {
        LLSVMConfig cfg;
        bool has_sigma = sigma_opt->count() > 0;
        bool has_knn = knn_opt->count() > 0;
        if (has_sigma == has_knn)
            throw CLI::ValidationError("--sigma/--knn",
                                       "exactly one of --sigma and --knn is required");
        if (has_sigma) {
            cfg.bandwidth =
                fixed_bandwidth(make_kernel_spec(parse_family(kernel), sigma, dim,
                                                 allow_negative));
        } else {
            KernelFamily fam = kernel_opt->count() > 0 ? parse_family(kernel)
                                                       : KernelFamily::Rectangular;
            cfg.bandwidth = knn_bandwidth(knn, fam);
        }
        cfg.lambda = lambda;
        cfg.feature_degree = degree;
        cfg.solver_tol = tol;
        cfg.max_epochs = max_epochs;
        cfg.subgradient_iters = subgrad_iters;
        if (policy == "abstain") cfg.policy = EmptyBallPolicy::Abstain;
        else if (policy == "majority") cfg.policy = EmptyBallPolicy::Majority;
        else if (policy == "grow") cfg.policy = EmptyBallPolicy::Grow;
        else throw CLI::ValidationError("--policy", "unknown policy '" + policy + "'");
        cfg.grow.max_doublings = max_doublings;
        cfg.grow.min_points = min_points;
        cfg.single_class_shortcut = !no_shortcut;
        return cfg;
    }

    KV describe() const {
        KV kv;
        bool has_knn = knn_opt->count() > 0;
        if (has_knn) {
            kv.emplace_back("knn", std::to_string(knn));
            kv.emplace_back("kernel", kernel_opt->count() > 0 ? kernel : "rectangular");
        } else {
            kv.emplace_back("kernel", kernel);
            kv.emplace_back("sigma", format_double(sigma));
        }
        kv.emplace_back("lambda", format_double(lambda));
        kv.emplace_back("degree", std::to_string(degree));
        kv.emplace_back("tol", format_double(tol));
        kv.emplace_back("max_epochs", std::to_string(max_epochs));
        kv.emplace_back("policy", policy);
        return kv;
    }
};

// ---- gen ----

struct GenCmd {
    std::string generator;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    double noise = 0.02;
    double turns = 2.0;
    double slope = 2.0;
    double separation = 1.0;
    double sd = 0.5;
    std::string out;

    CLI::App* attach(CLI::App& app) {
        CLI::App* sub = app.add_subcommand("gen", "generate a synthetic dataset");
        sub->add_option("--generator", generator,
                        "two_spirals | uniform_1d_smooth | xor_gaussians")
            ->required();
        sub->add_option("--n", n, "sample size");
        sub->add_option("--seed", seed, "rng seed");
        sub->add_option("--noise", noise, "two_spirals: coordinate noise sd");
        sub->add_option("--turns", turns, "two_spirals: spiral turns");
        sub->add_option("--slope", slope, "uniform_1d_smooth: tanh slope");
        sub->add_option("--separation", separation, "xor_gaussians: blob center offset");
        sub->add_option("--sd", sd, "xor_gaussians: blob sd");
        sub->add_option("--out", out, "output csv path (default gen_<seed>.csv)");
        return sub;
    }

    int run() {
        auto g = generator_from_name(generator);
        if (!g)
            throw CLI::ValidationError("--generator",
                                       "unknown generator '" + generator + "'");
        SyntheticSpec spec;
        spec.generator = *g;
        spec.n = n;
        spec.seed = seed;
        spec.noise_sd = noise;
        spec.turns = turns;
        spec.slope = slope;
        spec.separation = separation;
        spec.sd = sd;
        LabeledDataset data = generate(spec);
        auto gt = ground_truth(spec);

        std::string path = out.empty() ? "gen_" + std::to_string(seed) + ".csv" : out;
        KV kv;
        kv.emplace_back("generator", generator);
        kv.emplace_back("n", std::to_string(n));
        kv.emplace_back("seed", std::to_string(seed));
        switch (*g) {
            case Generator::TwoSpirals:
                kv.emplace_back("noise", format_double(noise));
                kv.emplace_back("turns", format_double(turns));
                break;
            case Generator::Uniform1dSmooth:
                kv.emplace_back("slope", format_double(slope));
                break;
            case Generator::XorGaussians:
                kv.emplace_back("separation", format_double(separation));
                kv.emplace_back("sd", format_double(sd));
                break;
        }
        write_dataset(path, data, config_comment("gen", kv));

        std::ofstream meta(path + ".meta");
        if (!meta) throw DataError(path + ".meta: cannot open for writing");
        for (const auto& [k, v] : kv) meta << k << "=" << v << "\n";
        meta << "dim=" << data.dim << "\n";
        meta << "radius_bound=" << format_double(data.radius_bound) << "\n";
        if (gt && gt->has_bayes_risk())
            meta << "bayes_risk=" << format_double(gt->bayes_risk) << "\n";
        if (!meta) throw DataError(path + ".meta: write failed");
        return 0;
    }
};

// ---- predict ----

struct PredictCmd {
    std::string train_path;
    std::string queries_path;
    std::string format = "dense";
    ModelOptions model;
    int workers = 1;
    std::string out;

    CLI::App* attach(CLI::App& app) {
        CLI::App* sub = app.add_subcommand("predict", "classify query points");
        sub->add_option("--train", train_path, "training data csv")->required();
        sub->add_option("--queries", queries_path, "query points csv")->required();
        sub->add_option("--format", format, "dense | sparse");
        model.attach(sub);
        sub->add_option("--workers", workers, "worker threads");
        sub->add_option("--out", out, "output csv path (default predict.csv)");
        return sub;
    }

    int run() {
        LabeledDataset train = parse_dataset(train_path, parse_format(format));
        SpatialIndex index = SpatialIndex::build(train);
        LLSVMConfig cfg = model.build(train.dim);
        QuerySet queries = read_query_points(queries_path, train.dim);
        std::vector<Prediction> preds =
            predict_batch(train, index, cfg, queries.points, workers);

        std::string path = out.empty() ? "predict.csv" : out;
        KV kv = model.describe();
        std::ofstream csv(path);
        if (!csv) throw DataError(path + ": cannot open for writing");
        csv << "# " << config_comment("predict", kv) << "\n";
        csv << "index,label,decision_value,local_count,effective_bandwidth,flags\n";
        for (std::size_t i = 0; i < preds.size(); ++i) {
            const Prediction& p = preds[i];
            csv << i << ',' << p.label << ',' << format_double(p.decision_value) << ','
                << p.local_count << ',' << format_double(p.effective_bandwidth) << ','
                << flag_names(p.flags) << "\n";
        }
        if (!csv) throw DataError(path + ": write failed");

        json j = kv_to_json("predict", kv);
        j["train"] = train_path;
        j["queries"] = queries_path;
        j["n_train"] = train.size();
        j["n_queries"] = preds.size();
        j["workers"] = workers;
        std::size_t pos = 0;
        for (const auto& p : preds) pos += p.label == 1;
        j["predicted_positive"] = pos;
        if (!queries.labels.empty()) {
            double acc = 0.0;
            for (std::size_t i = 0; i < preds.size(); ++i)
                if (preds[i].label == queries.labels[i]) acc += 1.0;
            j["accuracy"] = acc / static_cast<double>(preds.size());
        }
        write_json(json_path_for(path), j);
        return 0;
    }
};

// ---- cv ----

struct CvCmd {
    std::string data_path;
    std::string format = "dense";
    std::string methods = "llsvm,linear,knn,kbr";
    ModelOptions model;
    double linear_lambda = 1e-3;
    int knn_k = 5;
    std::string kbr_kernel = "epanechnikov";
    double kbr_sigma = 0.0;
    int folds = 5;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;
    CLI::Option* kbr_sigma_opt = nullptr;

    CLI::App* attach(CLI::App& app) {
        CLI::App* sub = app.add_subcommand("cv", "cross-validated method comparison");
        sub->add_option("--data", data_path, "dataset csv")->required();
        sub->add_option("--format", format, "dense | sparse");
        sub->add_option("--methods", methods, "comma list of llsvm,linear,knn,kbr");
        model.attach(sub);
        sub->add_option("--linear-lambda", linear_lambda, "global linear baseline lambda");
        sub->add_option("--knn-k", knn_k, "knn baseline neighbor count");
        sub->add_option("--kbr-kernel", kbr_kernel, "kbr baseline kernel family");
        kbr_sigma_opt = sub->add_option("--kbr-sigma", kbr_sigma,
                                        "kbr baseline bandwidth (defaults to --sigma)");
        sub->add_option("--folds", folds, "fold count");
        sub->add_option("--seed", seed, "fold-assignment seed");
        sub->add_option("--workers", workers, "worker threads");
        sub->add_option("--out", out, "output csv path (default cv_<seed>.csv)");
        return sub;
    }

    int run() {
        LabeledDataset data = parse_dataset(data_path, parse_format(format));
        std::vector<ClassifierVariant> variants;
        std::stringstream ss(methods);
        std::string tok;
        KV kv;
        while (std::getline(ss, tok, ',')) {
            tok = strip(tok);
            if (tok == "llsvm") {
                variants.emplace_back(model.build(data.dim));
                for (auto& [k, v] : model.describe()) kv.emplace_back("llsvm_" + k, v);
            } else if (tok == "linear") {
                GlobalLinearConfig lin;
                lin.lambda = linear_lambda;
                variants.emplace_back(lin);
                kv.emplace_back("linear_lambda", format_double(linear_lambda));
            } else if (tok == "knn") {
                KnnConfig kc;
                kc.k = knn_k;
                variants.emplace_back(kc);
                kv.emplace_back("knn_k", std::to_string(knn_k));
            } else if (tok == "kbr") {
                double s = kbr_sigma_opt->count() > 0 ? kbr_sigma : model.sigma;
                if (!(s > 0.0))
                    throw CLI::ValidationError("--kbr-sigma",
                                               "kbr needs --kbr-sigma or --sigma");
                KbrConfig kb;
                kb.kernel = make_kernel_spec(parse_family(kbr_kernel), s, data.dim);
                variants.emplace_back(kb);
                kv.emplace_back("kbr_kernel", kbr_kernel);
                kv.emplace_back("kbr_sigma", format_double(s));
            } else if (!tok.empty()) {
                throw CLI::ValidationError("--methods", "unknown method '" + tok + "'");
            }
        }
        kv.emplace_back("folds", std::to_string(folds));
        kv.emplace_back("seed", std::to_string(seed));

        CvOptions opts;
        opts.folds = folds;
        opts.seed = seed;
        opts.workers = workers;
        std::vector<CvResult> results = cross_validate(data, variants, opts);

        std::string path = out.empty() ? "cv_" + std::to_string(seed) + ".csv" : out;
        std::ofstream csv(path);
        if (!csv) throw DataError(path + ": cannot open for writing");
        csv << "# " << config_comment("cv", kv) << "\n";
        csv << "method,fold,accuracy\n";
        for (const auto& res : results)
            for (std::size_t f = 0; f < res.fold_accuracy.size(); ++f)
                csv << res.name << ',' << f << ',' << format_double(res.fold_accuracy[f])
                    << "\n";
        if (!csv) throw DataError(path + ": write failed");

        json j = kv_to_json("cv", kv);
        j["data"] = data_path;
        j["n"] = data.size();
        j["workers"] = workers;
        json jm = json::array();
        for (const auto& res : results) {
            json r;
            r["method"] = res.name;
            r["mean_accuracy"] = res.mean_accuracy;
            r["sd_accuracy"] = res.sd_accuracy;
            r["fold_accuracy"] = res.fold_accuracy;
            r["single_class_fold"] = res.single_class_fold;
            jm.push_back(r);
        }
        j["results"] = jm;
        write_json(json_path_for(path), j);
        return 0;
    }
};

// ---- stability ----

struct StabilityCmd {
    std::string data_path;
    std::string format = "dense";
    std::string x0_text;
    ModelOptions model;
    std::uint64_t seed = 1;
    std::string out;

    CLI::App* attach(CLI::App& app) {
        CLI::App* sub = app.add_subcommand(
            "stability", "leave-one-out stability audit of one local problem");
        sub->add_option("--data", data_path, "dataset csv")->required();
        sub->add_option("--format", format, "dense | sparse");
        sub->add_option("--x0", x0_text, "query point, comma-separated coordinates")
            ->required();
        model.attach(sub);
        sub->add_option("--seed", seed, "zero-weight control selection seed");
        sub->add_option("--out", out, "output csv path (default stability_<seed>.csv)");
        return sub;
    }

    int run() {
        LabeledDataset data = parse_dataset(data_path, parse_format(format));
        SpatialIndex index = SpatialIndex::build(data);
        LLSVMConfig cfg = model.build(data.dim);
        std::vector<double> x0 = parse_double_list(x0_text, "--x0");
        if (static_cast<int>(x0.size()) != data.dim)
            throw CLI::ValidationError("--x0", "expected " + std::to_string(data.dim) +
                                                   " coordinates");
        StabilityReport rep = stability_check(data, index, cfg, x0, seed);

        std::string path = out.empty() ? "stability_" + std::to_string(seed) + ".csv" : out;
        KV kv = model.describe();
        kv.emplace_back("seed", std::to_string(seed));
        std::ofstream csv(path);
        if (!csv) throw DataError(path + ": cannot open for writing");
        csv << "# " << config_comment("stability", kv) << "\n";
        csv << "index,weight,observed,bound,slack,pass\n";
        for (const auto& rec : rep.records)
            csv << rec.index << ',' << format_double(rec.weight) << ','
                << format_double(rec.observed) << ',' << format_double(rec.bound) << ','
                << format_double(rep.slack) << ',' << (rec.pass ? 1 : 0) << "\n";
        if (!csv) throw DataError(path + ": write failed");

        json j = kv_to_json("stability", kv);
        j["data"] = data_path;
        j["x0"] = rep.x0;
        j["sigma"] = rep.sigma;
        j["lambda"] = rep.lambda;
        j["n"] = rep.sample_size;
        j["local_count"] = rep.local_count;
        j["row_norm_bound"] = rep.row_norm_bound;
        j["kernel_sup"] = rep.kernel_sup;
        j["slack"] = rep.slack;
        j["worst_margin"] = rep.worst_margin;
        j["pass"] = rep.pass;
        j["inconclusive"] = rep.inconclusive;
        write_json(json_path_for(path), j);

        if (!rep.pass) {
            std::cerr << "stability check FAILED: worst margin " << rep.worst_margin
                      << " above slack " << rep.slack << "\n";
            return 3;
        }
        return 0;
    }
};

// ---- sweep ----

struct SweepCmd {
    std::string generator;
    double slope = 2.0;
    double separation = 1.0;
    double sd = 0.5;
    std::string probes_path;
    std::string n_list_text = "256,1024,4096";
    double exp_sigma = 0.125;
    double exp_lambda = 0.125;
    int replicates = 20;
    double margin_floor = 0.3;
    std::string kernel = "epanechnikov";
    int degree = 1;
    double tol = 0.0;
    int max_epochs = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;

    CLI::App* attach(CLI::App& app) {
        CLI::App* sub = app.add_subcommand(
            "sweep", "agreement with the optimal rule along a shrinking-bandwidth schedule");
        sub->add_option("--generator", generator, "uniform_1d_smooth | xor_gaussians")
            ->required();
        sub->add_option("--slope", slope, "uniform_1d_smooth: tanh slope");
        sub->add_option("--separation", separation, "xor_gaussians: blob center offset");
        sub->add_option("--sd", sd, "xor_gaussians: blob sd");
        sub->add_option("--probes", probes_path, "csv of probe points")->required();
        sub->add_option("--n-list", n_list_text, "comma list of sample sizes");
        sub->add_option("--exp-sigma", exp_sigma, "bandwidth exponent a in sigma = n^-a");
        sub->add_option("--exp-lambda", exp_lambda, "regularization exponent b in lambda = n^-b");
        sub->add_option("--replicates", replicates, "datasets per sample size");
        sub->add_option("--margin-floor", margin_floor, "drop probes with |2 eta - 1| below");
        sub->add_option("--kernel", kernel, "kernel family");
        sub->add_option("--degree", degree, "polynomial feature degree");
        sub->add_option("--tol", tol, "duality-gap tolerance (0 = auto)");
        sub->add_option("--max-epochs", max_epochs, "coordinate-descent epoch cap");
        sub->add_option("--seed", seed, "base seed");
        sub->add_option("--workers", workers, "worker threads");
        sub->add_option("--out", out, "output csv path (default sweep_<seed>.csv)");
        return sub;
    }

    int run() {
        auto g = generator_from_name(generator);
        if (!g || *g == Generator::TwoSpirals)
            throw CLI::ValidationError("--generator",
                                       "sweep needs a generator with ground truth");
        SyntheticSpec spec;
        spec.generator = *g;
        spec.slope = slope;
        spec.separation = separation;
        spec.sd = sd;

        int dim = *g == Generator::Uniform1dSmooth ? 1 : 2;
        QuerySet probes = read_query_points(probes_path, dim);

        ConsistencySettings settings;
        for (double v : parse_double_list(n_list_text, "--n-list")) {
            if (!(v >= 1.0) || v != std::floor(v))
                throw CLI::ValidationError("--n-list", "entries must be positive integers");
            settings.n_list.push_back(static_cast<std::size_t>(v));
        }
        settings.exp_sigma = exp_sigma;
        settings.exp_lambda = exp_lambda;
        settings.replicates = replicates;
        settings.margin_floor = margin_floor;
        settings.family = parse_family(kernel);
        settings.feature_degree = degree;
        settings.solver_tol = tol;
        settings.max_epochs = max_epochs;
        settings.base_seed = seed;
        settings.workers = workers;

        ConsistencyCurve curve = consistency_sweep(spec, probes.points, settings);

        KV kv;
        kv.emplace_back("generator", generator);
        if (*g == Generator::Uniform1dSmooth) kv.emplace_back("slope", format_double(slope));
        else {
            kv.emplace_back("separation", format_double(separation));
            kv.emplace_back("sd", format_double(sd));
        }
        kv.emplace_back("n_list", n_list_text);
        kv.emplace_back("exp_sigma", format_double(exp_sigma));
        kv.emplace_back("exp_lambda", format_double(exp_lambda));
        kv.emplace_back("replicates", std::to_string(replicates));
        kv.emplace_back("margin_floor", format_double(margin_floor));
        kv.emplace_back("kernel", kernel);
        kv.emplace_back("degree", std::to_string(degree));
        kv.emplace_back("seed", std::to_string(seed));

        std::string path = out.empty() ? "sweep_" + std::to_string(seed) + ".csv" : out;
        std::ofstream csv(path);
        if (!csv) throw DataError(path + ": cannot open for writing");
        csv << "# " << config_comment("sweep", kv) << "\n";
        csv << "n,sigma,lambda,schedule_value,agreement,mean_pointwise_risk\n";
        for (const auto& row : curve.rows)
            csv << row.n << ',' << format_double(row.sigma) << ','
                << format_double(row.lambda) << ',' << format_double(row.schedule_value)
                << ',' << format_double(row.agreement) << ','
                << format_double(row.mean_pointwise_risk) << "\n";
        if (!csv) throw DataError(path + ": write failed");

        json j = kv_to_json("sweep", kv);
        j["probes"] = probes_path;
        j["workers"] = workers;
        j["spearman"] = curve.spearman;
        json rows = json::array();
        for (const auto& row : curve.rows) {
            json r;
            r["n"] = row.n;
            r["sigma"] = row.sigma;
            r["lambda"] = row.lambda;
            r["schedule_value"] = row.schedule_value;
            r["agreement"] = row.agreement;
            r["mean_pointwise_risk"] = row.mean_pointwise_risk;
            rows.push_back(r);
        }
        j["rows"] = rows;
        write_json(json_path_for(path), j);
        return 0;
    }
};

// ---- risk ----

struct RiskCmd {
    std::string train_path;
    std::string test_path;
    std::string format = "dense";
    ModelOptions model;
    double delta = 0.05;
    int workers = 1;
    std::string out;

    CLI::App* attach(CLI::App& app) {
        CLI::App* sub = app.add_subcommand(
            "risk", "empirical vs held-out hinge risk with a generalization bound");
        sub->add_option("--train", train_path, "training data csv")->required();
        sub->add_option("--test", test_path, "held-out data csv")->required();
        sub->add_option("--format", format, "dense | sparse");
        model.attach(sub);
        sub->add_option("--delta", delta, "bound confidence parameter in (0,1)");
        sub->add_option("--workers", workers, "worker threads");
        sub->add_option("--out", out, "output csv path (default risk.csv)");
        return sub;
    }

    int run() {
        LabeledDataset train = parse_dataset(train_path, parse_format(format));
        LabeledDataset test = parse_dataset(test_path, parse_format(format));
        LLSVMConfig cfg = model.build(train.dim);
        RiskReport rep = risk_report(train, test, cfg, delta, workers);

        std::string path = out.empty() ? "risk.csv" : out;
        KV kv = model.describe();
        kv.emplace_back("delta", format_double(delta));
        std::ofstream csv(path);
        if (!csv) throw DataError(path + ": cannot open for writing");
        csv << "# " << config_comment("risk", kv) << "\n";
        csv << "empirical_risk,heldout_risk,gap,stability_term,deviation_term,bound,holds\n";
        csv << format_double(rep.empirical_risk) << ',' << format_double(rep.heldout_risk)
            << ',' << format_double(rep.gap) << ',' << format_double(rep.stability_term)
            << ',' << format_double(rep.deviation_term) << ',' << format_double(rep.bound)
            << ',' << (rep.holds ? 1 : 0) << "\n";
        if (!csv) throw DataError(path + ": write failed");

        json j = kv_to_json("risk", kv);
        j["train"] = train_path;
        j["test"] = test_path;
        j["n_train"] = rep.train_size;
        j["n_test"] = rep.test_size;
        j["workers"] = workers;
        j["empirical_risk"] = rep.empirical_risk;
        j["heldout_risk"] = rep.heldout_risk;
        j["gap"] = rep.gap;
        j["stability_term"] = rep.stability_term;
        j["deviation_term"] = rep.deviation_term;
        j["bound"] = rep.bound;
        j["holds"] = rep.holds;
        j["radius_bound"] = rep.radius_bound;
        j["kernel_sup"] = rep.kernel_sup;
        j["kbar_max"] = rep.kbar_max;
        write_json(json_path_for(path), j);
        return 0;
    }
};

// Pulls --config out of args, loads the file, and splices its entries (plus
// the LLSVM_WORKERS fallback) as long-option tokens right after the
// subcommand so explicit flags still win under TakeLast.
std::vector<std::string> apply_config_layer(CLI::App& app, std::vector<std::string> args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw CLI::ValidationError("--config", "missing file path");
            config_path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i + 2));
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }

    // the subcommand is the first non-flag token
    std::size_t sub_at = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            sub_at = i;
            break;
        }
    }
    if (sub_at == args.size()) return args;  // no subcommand; let CLI11 report it
    CLI::App* sub = app.get_subcommand_no_throw(args[sub_at]);
    if (sub == nullptr) return args;

    std::vector<std::string> inject;
    if (const char* env = std::getenv("LLSVM_WORKERS")) {
        if (sub->get_option_no_throw("--workers") != nullptr && *env != '\0')
            inject.push_back(std::string("--workers=") + env);
    }
    if (!config_path.empty()) {
        for (const auto& [key, value] : load_config_file(config_path)) {
            CLI::Option* opt = sub->get_option_no_throw("--" + key);
            if (opt == nullptr)
                throw CLI::ValidationError("--config", "unknown key '" + key +
                                                           "' for command '" +
                                                           args[sub_at] + "'");
            inject.push_back("--" + key + "=" + value);
        }
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_at + 1), inject.begin(),
                inject.end());
    return args;
}

} // namespace

int run(std::vector<std::string> args) {
    CLI::App app{"local linear SVM toolbox"};
    app.require_subcommand(0, 1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    GenCmd gen;
    PredictCmd predict;
    CvCmd cv;
    StabilityCmd stability;
    SweepCmd sweep;
    RiskCmd risk;
    CLI::App* sub_gen = gen.attach(app);
    CLI::App* sub_predict = predict.attach(app);
    CLI::App* sub_cv = cv.attach(app);
    CLI::App* sub_stability = stability.attach(app);
    CLI::App* sub_sweep = sweep.attach(app);
    CLI::App* sub_risk = risk.attach(app);

    try {
        args = apply_config_layer(app, std::move(args));
        std::reverse(args.begin(), args.end());  // CLI11 vector parse is back-to-front
        app.parse(args);
        if (sub_gen->parsed()) return gen.run();
        if (sub_predict->parsed()) return predict.run();
        if (sub_cv->parsed()) return cv.run();
        if (sub_stability->parsed()) return stability.run();
        if (sub_sweep->parsed()) return sweep.run();
        if (sub_risk->parsed()) return risk.run();
        std::cerr << app.help() << "\n";
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace llsvm::cli
