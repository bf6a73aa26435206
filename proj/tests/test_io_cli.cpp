#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "llsvm/errors.hpp"
#include "llsvm/io.hpp"
#include "llsvm/rng.hpp"

namespace fs = std::filesystem;
using namespace llsvm;
using nlohmann::json;

namespace {

fs::path scratch_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("llsvm_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    REQUIRE(out.good());
    return path.string();
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    return json::parse(in);
}

// runs fn, which must throw DataError, and returns the message
template <typename Fn>
std::string data_error(Fn&& fn) {
    try {
        fn();
    } catch (const DataError& e) {
        return e.what();
    }
    FAIL("expected a DataError");
    return "";
}

bool contains(const std::string& s, const std::string& sub) {
    return s.find(sub) != std::string::npos;
}

} // namespace

TEST_CASE("dense rows parse with label remapping and exact coordinates") {
    fs::path dir = scratch_dir("dense");
    std::string p = write_file(dir / "a.csv",
                               "label,x1,x2\n"
                               "# provenance note\n"
                               "\n"
                               "+1,0.5,-0.2\n"
                               "-1,1.0,0.0\n"
                               "0,0.25,0.75\n");
    LabeledDataset ds = parse_dataset(p, DataFormat::DenseCsv);
    CHECK(ds.size() == 3);
    CHECK(ds.dim == 2);
    CHECK(ds.labels == std::vector<int>{1, -1, -1});
    CHECK(ds.points[0] == 0.5);
    CHECK(ds.points[1] == -0.2);
    CHECK(ds.points[2] == 1.0);
    CHECK(ds.points[3] == 0.0);
    CHECK(ds.points[4] == 0.25);
    CHECK(ds.points[5] == 0.75);
    CHECK(ds.radius_bound == 1.0);
}

TEST_CASE("dense parse errors name the offending line") {
    fs::path dir = scratch_dir("dense_err");
    std::string bad_label = write_file(dir / "l.csv", "label,x\n# c\n1,0.5\n2,0.25\n");
    std::string msg = data_error([&] { parse_dataset(bad_label, DataFormat::DenseCsv); });
    CHECK(contains(msg, ":4:"));
    CHECK(contains(msg, "label"));

    std::string ragged = write_file(dir / "w.csv", "1,0.5\n1,0.5,0.7\n");
    msg = data_error([&] { parse_dataset(ragged, DataFormat::DenseCsv); });
    CHECK(contains(msg, ":2:"));
    CHECK(contains(msg, "expected 2 columns, got 3"));

    std::string bad_value = write_file(dir / "v.csv", "1,abc\n");
    msg = data_error([&] { parse_dataset(bad_value, DataFormat::DenseCsv); });
    CHECK(contains(msg, ":1:"));
    CHECK(contains(msg, "bad numeric field 'abc'"));

    std::string lone = write_file(dir / "s.csv", "1\n");
    msg = data_error([&] { parse_dataset(lone, DataFormat::DenseCsv); });
    CHECK(contains(msg, "label plus at least one feature"));

    std::string empty = write_file(dir / "e.csv", "# only a comment\n\n");
    msg = data_error([&] { parse_dataset(empty, DataFormat::DenseCsv); });
    CHECK(contains(msg, "no data rows"));

    msg = data_error([&] { parse_dataset((dir / "missing.csv").string(), DataFormat::DenseCsv); });
    CHECK(contains(msg, "cannot open"));
}

TEST_CASE("sparse rows scatter into zero-filled coordinates") {
    fs::path dir = scratch_dir("sparse");
    std::string p = write_file(dir / "a.txt", "+1 3:2.0\n-1 1:1.5 2:-0.5\n");
    LabeledDataset ds = parse_dataset(p, DataFormat::Sparse);
    CHECK(ds.size() == 2);
    CHECK(ds.dim == 3);
    CHECK(ds.labels == std::vector<int>{1, -1});
    CHECK(ds.points == std::vector<double>{0.0, 0.0, 2.0, 1.5, -0.5, 0.0});

    std::string bad_index = write_file(dir / "i.txt", "+1 1:1.0\n+1 0:1.0\n");
    std::string msg = data_error([&] { parse_dataset(bad_index, DataFormat::Sparse); });
    CHECK(contains(msg, ":2:"));
    CHECK(contains(msg, "positive integer"));

    std::string bad_value = write_file(dir / "v.txt", "+1 2:xyz\n");
    msg = data_error([&] { parse_dataset(bad_value, DataFormat::Sparse); });
    CHECK(contains(msg, "bad feature value"));

    std::string bad_pair = write_file(dir / "p.txt", "+1 junk\n");
    msg = data_error([&] { parse_dataset(bad_pair, DataFormat::Sparse); });
    CHECK(contains(msg, "expected idx:value"));

    std::string featureless = write_file(dir / "f.txt", "1\n-1\n");
    msg = data_error([&] { parse_dataset(featureless, DataFormat::Sparse); });
    CHECK(contains(msg, "no features"));
}

TEST_CASE("write and parse round-trip coordinates bitwise") {
    fs::path dir = scratch_dir("roundtrip");
    SplitMix64 rng(321);
    std::vector<double> pts = {1.0 / 3.0, -2.5e17, 1e-300, 0.1, 3.141592653589793, -0.0};
    std::vector<int> labels = {1, -1, 1};
    for (int i = 0; i < 60; ++i) {
        pts.push_back(rng.next_uniform(-1.0, 1.0) *
                      std::pow(10.0, rng.next_uniform() * 12.0 - 6.0));
        pts.push_back(rng.next_normal());
        labels.push_back(rng.next_uniform() < 0.5 ? 1 : -1);
    }
    LabeledDataset ds = make_dataset(2, pts, labels);

    std::string p = (dir / "rt.csv").string();
    write_dataset(p, ds, "round trip check");
    CHECK(read_file(p).rfind("# round trip check\n", 0) == 0);
    LabeledDataset back = parse_dataset(p, DataFormat::DenseCsv);
    REQUIRE(back.size() == ds.size());
    CHECK(back.dim == ds.dim);
    CHECK(back.labels == ds.labels);
    for (std::size_t i = 0; i < ds.points.size(); ++i) CHECK(back.points[i] == ds.points[i]);
    CHECK(back.radius_bound == ds.radius_bound);

    for (int i = 0; i < 200; ++i) {
        double v = rng.next_uniform(-1.0, 1.0) *
                   std::pow(10.0, std::floor(rng.next_uniform() * 40.0) - 20.0);
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-1.0) == "-1");
}

TEST_CASE("query files accept bare and labeled layouts") {
    fs::path dir = scratch_dir("queries");
    std::string bare = write_file(dir / "b.csv", "x1,x2\n0.5,1.5\n-0.25,0\n");
    QuerySet qs = read_query_points(bare, 2);
    CHECK(qs.count == 2);
    CHECK(qs.labels.empty());
    CHECK(qs.points == std::vector<double>{0.5, 1.5, -0.25, 0.0});

    std::string labeled = write_file(dir / "l.csv", "1,0.5,1.5\n0,2.5,3.5\n");
    qs = read_query_points(labeled, 2);
    CHECK(qs.count == 2);
    CHECK(qs.labels == std::vector<int>{1, -1});
    CHECK(qs.points == std::vector<double>{0.5, 1.5, 2.5, 3.5});

    std::string mixed = write_file(dir / "m.csv", "0.5,1.5\n1,2.5,3.5\n");
    std::string msg = data_error([&] { read_query_points(mixed, 2); });
    CHECK(contains(msg, ":2:"));

    std::string wide = write_file(dir / "w.csv", "1,2,3\n");
    msg = data_error([&] { read_query_points(wide, 1); });
    CHECK(contains(msg, "expected 1 or 2 columns, got 3"));
}

TEST_CASE("gen writes deterministic datasets with sidecar metadata") {
    fs::path dir = scratch_dir("gen");
    std::string a = (dir / "a.csv").string();
    std::string b = (dir / "b.csv").string();
    std::string c = (dir / "c.csv").string();
    CHECK(cli::run({"gen", "--generator", "uniform_1d_smooth", "--n", "60", "--seed", "9",
                    "--out", a}) == 0);
    CHECK(cli::run({"gen", "--generator", "uniform_1d_smooth", "--n", "60", "--seed", "9",
                    "--out", b}) == 0);
    CHECK(cli::run({"gen", "--generator", "uniform_1d_smooth", "--n", "60", "--seed", "10",
                    "--out", c}) == 0);
    CHECK(read_file(a) == read_file(b));
    CHECK(read_file(a) != read_file(c));

    std::string text = read_file(a);
    CHECK(text.substr(0, text.find('\n')) ==
          "# config: cmd=gen generator=uniform_1d_smooth n=60 seed=9 slope=2");
    LabeledDataset ds = parse_dataset(a, DataFormat::DenseCsv);
    CHECK(ds.size() == 60);
    CHECK(ds.dim == 1);

    std::string meta = read_file(a + ".meta");
    CHECK(contains(meta, "generator=uniform_1d_smooth\n"));
    CHECK(contains(meta, "dim=1\n"));
    CHECK(contains(meta, "radius_bound="));
    std::size_t at = meta.find("bayes_risk=");
    REQUIRE(at != std::string::npos);
    double risk = std::strtod(meta.c_str() + at + 11, nullptr);
    CHECK(risk == doctest::Approx(0.5 - std::log(std::cosh(2.0)) / 4.0).epsilon(1e-12));

    // domain rejections surface as data errors, not usage errors
    CHECK(cli::run({"gen", "--generator", "two_spirals", "--n", "7", "--out",
                    (dir / "odd.csv").string()}) == 2);
    CHECK(cli::run({"gen", "--generator", "nope", "--out", (dir / "x.csv").string()}) == 1);
}

TEST_CASE("predict outputs are identical across worker counts") {
    fs::path dir = scratch_dir("predict");
    std::string train = write_file(dir / "train.csv",
                                   "-1,-1.5\n-1,-1.4\n-1,-1.3\n-1,-1.2\n-1,-1.1\n"
                                   "1,1.1\n1,1.2\n1,1.3\n1,1.4\n1,1.5\n");
    std::string queries = write_file(dir / "q.csv", "1,1.3\n-1,-1.3\n1,1.2\n-1,-1.2\n");
    std::string p1 = (dir / "p1.csv").string();
    std::string p8 = (dir / "p8.csv").string();
    CHECK(cli::run({"predict", "--train", train, "--queries", queries, "--sigma", "1",
                    "--lambda", "0.5", "--out", p1}) == 0);
    CHECK(cli::run({"predict", "--train", train, "--queries", queries, "--sigma", "1",
                    "--lambda", "0.5", "--workers", "8", "--out", p8}) == 0);
    CHECK(read_file(p1) == read_file(p8));

    std::istringstream lines(read_file(p1));
    std::string line;
    std::getline(lines, line);
    CHECK(line == "# config: cmd=predict kernel=epanechnikov sigma=1 lambda=0.5 degree=1 "
                  "tol=0 max_epochs=10000 policy=grow");
    std::getline(lines, line);
    CHECK(line == "index,label,decision_value,local_count,effective_bandwidth,flags");
    std::getline(lines, line);
    CHECK(line.rfind("0,1,", 0) == 0);

    json j = load_json((dir / "p1.json").string());
    CHECK(j["cmd"] == "predict");
    CHECK(j["kernel"] == "epanechnikov");
    CHECK(j["sigma"] == "1");
    CHECK(j["policy"] == "grow");
    CHECK(j["n_train"] == 10);
    CHECK(j["n_queries"] == 4);
    CHECK(j["workers"] == 1);
    CHECK(j["predicted_positive"] == 2);
    CHECK(j["accuracy"] == 1.0);

    // unlabeled queries carry no accuracy entry
    std::string bare = write_file(dir / "qb.csv", "1.3\n-1.3\n");
    std::string pb = (dir / "pb.csv").string();
    CHECK(cli::run({"predict", "--train", train, "--queries", bare, "--knn", "3", "--out",
                    pb}) == 0);
    json jb = load_json((dir / "pb.json").string());
    CHECK(!jb.contains("accuracy"));
    CHECK(jb["knn"] == "3");
    CHECK(jb["kernel"] == "rectangular");
}

TEST_CASE("config files and the environment layer under explicit flags") {
    fs::path dir = scratch_dir("config");
    std::string train = write_file(dir / "train.csv", "-1,-1.5\n-1,-1.2\n1,1.2\n1,1.5\n");
    std::string queries = write_file(dir / "q.csv", "1.3\n-1.3\n");
    std::string cfg = write_file(dir / "run.cfg",
                                 "# defaults for this experiment\n"
                                 "lambda = 0.5\n"
                                 "workers = 3\n");
    std::string out = (dir / "o.csv").string();
    std::string sidecar = (dir / "o.json").string();

    auto predict_with = [&](std::vector<std::string> extra) {
        std::vector<std::string> args = {"predict", "--train", train, "--queries", queries,
                                         "--knn",   "2",       "--out",   out};
        args.insert(args.end(), extra.begin(), extra.end());
        return cli::run(std::move(args));
    };

    CHECK(predict_with({"--config", cfg}) == 0);
    json j = load_json(sidecar);
    CHECK(j["lambda"] == "0.5");
    CHECK(j["workers"] == 3);

    // an explicit flag beats the config file
    CHECK(predict_with({"--config", cfg, "--lambda", "0.25"}) == 0);
    j = load_json(sidecar);
    CHECK(j["lambda"] == "0.25");
    CHECK(j["workers"] == 3);

    // the config file beats the environment, the environment beats the default
    setenv("LLSVM_WORKERS", "7", 1);
    CHECK(predict_with({"--config", cfg}) == 0);
    CHECK(load_json(sidecar)["workers"] == 3);
    CHECK(predict_with({}) == 0);
    CHECK(load_json(sidecar)["workers"] == 7);
    unsetenv("LLSVM_WORKERS");
    CHECK(predict_with({}) == 0);
    CHECK(load_json(sidecar)["workers"] == 1);

    std::string bogus = write_file(dir / "bogus.cfg", "frobnicate = 1\n");
    CHECK(predict_with({"--config", bogus}) == 1);
    std::string malformed = write_file(dir / "mal.cfg", "just words\n");
    CHECK(predict_with({"--config", malformed}) == 2);
    CHECK(predict_with({"--config", (dir / "missing.cfg").string()}) == 2);
    CHECK(predict_with({"--config"}) == 1);
}

TEST_CASE("usage errors exit 1 and data errors exit 2") {
    fs::path dir = scratch_dir("exit_codes");
    std::string train = write_file(dir / "train.csv", "-1,-1.5\n-1,-1.2\n1,1.2\n1,1.5\n");
    std::string queries = write_file(dir / "q.csv", "0.5\n");
    std::string out = (dir / "o.csv").string();

    CHECK(cli::run({}) == 1);
    CHECK(cli::run({"--bogus"}) == 1);
    CHECK(cli::run({"predict", "--train", train, "--queries", queries, "--out", out}) == 1);
    CHECK(cli::run({"predict", "--train", train, "--queries", queries, "--sigma", "1",
                    "--knn", "3", "--out", out}) == 1);
    CHECK(cli::run({"predict", "--train", train, "--queries", queries, "--sigma", "1",
                    "--kernel", "gauss", "--out", out}) == 1);
    CHECK(cli::run({"predict", "--train", train, "--queries", queries, "--sigma", "1",
                    "--policy", "bail", "--out", out}) == 1);
    CHECK(cli::run({"predict", "--train", (dir / "nope.csv").string(), "--queries", queries,
                    "--sigma", "1", "--out", out}) == 2);
    // the negative kernel stays behind its opt-in flag end to end
    CHECK(cli::run({"predict", "--train", train, "--queries", queries, "--sigma", "1",
                    "--kernel", "negative", "--out", out}) == 2);
    CHECK(cli::run({"predict", "--train", train, "--queries", queries, "--sigma", "1",
                    "--kernel", "negative", "--allow-negative", "--out", out}) == 0);
}

TEST_CASE("stability subcommand writes a certified report") {
    fs::path dir = scratch_dir("stability_cmd");
    std::string data = (dir / "d.csv").string();
    REQUIRE(cli::run({"gen", "--generator", "uniform_1d_smooth", "--n", "120", "--seed", "5",
                      "--out", data}) == 0);
    std::string out = (dir / "st.csv").string();
    CHECK(cli::run({"stability", "--data", data, "--x0", "0", "--kernel", "rectangular",
                    "--sigma", "0.4", "--lambda", "0.5", "--tol", "1e-10", "--seed", "2",
                    "--out", out}) == 0);

    json j = load_json((dir / "st.json").string());
    CHECK(j["cmd"] == "stability");
    CHECK(j["pass"] == true);
    CHECK(j["inconclusive"] == false);
    CHECK(j["n"] == 120);
    CHECK(j["local_count"] > 0);
    CHECK(j["kernel_sup"] == 1.25);

    std::istringstream lines(read_file(out));
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    CHECK(line == "index,weight,observed,bound,slack,pass");
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        CHECK(line.substr(line.size() - 2) == ",1");
        ++rows;
    }
    CHECK(rows == static_cast<std::size_t>(j["local_count"]) + 3);
}

TEST_CASE("cv, sweep, and risk subcommands emit full sidecars") {
    fs::path dir = scratch_dir("eval_cmds");
    std::ostringstream bands;
    for (int i = 0; i < 20; ++i)
        bands << "-1," << format_double(-1.1 - 0.02 * i) << "\n"
              << "1," << format_double(1.1 + 0.02 * i) << "\n";
    std::string train = write_file(dir / "train.csv", bands.str());
    std::ostringstream held;
    for (int i = 0; i < 10; ++i)
        held << "-1," << format_double(-1.11 - 0.03 * i) << "\n"
             << "1," << format_double(1.11 + 0.03 * i) << "\n";
    std::string test = write_file(dir / "test.csv", held.str());

    std::string cv_out = (dir / "cv.csv").string();
    CHECK(cli::run({"cv", "--data", train, "--methods", "llsvm,linear", "--sigma", "8",
                    "--lambda", "0.01", "--folds", "4", "--seed", "2", "--out", cv_out}) == 0);
    json jcv = load_json((dir / "cv.json").string());
    CHECK(jcv["cmd"] == "cv");
    CHECK(jcv["n"] == 40);
    REQUIRE(jcv["results"].size() == 2);
    CHECK(jcv["results"][0]["method"] == "llsvm");
    CHECK(jcv["results"][1]["method"] == "linear");
    CHECK(jcv["results"][0]["mean_accuracy"] == 1.0);
    CHECK(jcv["results"][1]["mean_accuracy"] == 1.0);
    CHECK(jcv["results"][0]["fold_accuracy"].size() == 4);

    std::string probes = write_file(dir / "probes.csv", "0.5\n-0.5\n");
    std::string sweep_out = (dir / "sweep.csv").string();
    CHECK(cli::run({"sweep", "--generator", "uniform_1d_smooth", "--probes", probes,
                    "--n-list", "32,64", "--replicates", "2", "--seed", "4", "--workers", "2",
                    "--out", sweep_out}) == 0);
    json jsw = load_json((dir / "sweep.json").string());
    CHECK(jsw["cmd"] == "sweep");
    REQUIRE(jsw["rows"].size() == 2);
    CHECK(jsw["rows"][0]["n"] == 32);
    CHECK(jsw["rows"][0]["sigma"] ==
          doctest::Approx(std::pow(32.0, -0.125)).epsilon(1e-15));
    CHECK(jsw["rows"][1]["schedule_value"] > jsw["rows"][0]["schedule_value"]);
    CHECK(jsw["spearman"] >= -1.0);
    CHECK(jsw["spearman"] <= 1.0);

    std::string risk_out = (dir / "risk.csv").string();
    CHECK(cli::run({"risk", "--train", train, "--test", test, "--kernel", "rectangular",
                    "--sigma", "8", "--lambda", "0.0001", "--delta", "0.1", "--out",
                    risk_out}) == 0);
    json jr = load_json((dir / "risk.json").string());
    CHECK(jr["cmd"] == "risk");
    CHECK(jr["n_train"] == 40);
    CHECK(jr["n_test"] == 20);
    CHECK(jr["holds"] == true);
    CHECK(jr["empirical_risk"] >= 0.0);
    CHECK(double(jr["bound"]) >= double(jr["deviation_term"]));
    CHECK(double(jr["kernel_sup"]) == 0.5 / 8.0);
}
