#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "forceknn/cli.hpp"
#include "forceknn/dataset_io.hpp"
#include "forceknn/online.hpp"
#include "oracles.hpp"

using namespace forceknn;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("forceknn-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

const std::vector<std::string> kSmall{"--n-samples", "200", "--sample-rate", "100"};

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST_CASE("cli gen: zero trials writes a header-only file") {
    TempDir dir;
    const auto path = (dir / "empty.csv").string();
    const auto r = run_cli({"gen", "0", "0", "--out", path});
    REQUIRE(r.code == cli::kSuccess);
    const auto ds = read_dataset_file(path);
    CHECK(ds.trials.empty());
    CHECK(ds.n_samples == 1000);
}

TEST_CASE("cli gen: same seed gives byte-identical files; overwrite needs --force") {
    TempDir dir;
    const auto a = (dir / "a.csv").string();
    const auto b = (dir / "b.csv").string();
    REQUIRE(run_cli(concat({"gen", "12", "15", "--rng-seed", "3", "--out", a}, kSmall)).code == 0);
    REQUIRE(run_cli(concat({"gen", "12", "15", "--rng-seed", "3", "--out", b}, kSmall)).code == 0);
    const auto bytes = slurp(a);
    CHECK(bytes == slurp(b));
    CHECK(bytes.starts_with("# forceknn gen "));

    const auto again = run_cli(concat({"gen", "1", "1", "--out", a}, kSmall));
    CHECK(again.code == cli::kBadArguments);
    CHECK(slurp(a) == bytes);
    CHECK(run_cli(concat({"gen", "1", "1", "--out", a, "--force"}, kSmall)).code == 0);
    CHECK(read_dataset_file(a).trials.size() == 2);
}

TEST_CASE("cli online: outputs are deterministic and l = 50 verifies only the seed") {
    TempDir dir;
    const auto data = (dir / "d.csv").string();
    REQUIRE(run_cli(concat({"gen", "40", "50", "--rng-seed", "1", "--out", data}, kSmall)).code ==
            0);
    const std::vector<std::string> common{"online", data, "--runs", "3", "--seed-size", "22",
                                          "--l-value", "100", "--l-value", "50"};
    const auto o1 = (dir / "o1").string();
    const auto o2 = (dir / "o2").string();
    REQUIRE(run_cli(concat(common, {"--out", o1, "--threads", "1"})).code == 0);
    REQUIRE(run_cli(concat(common, {"--out", o2, "--threads", "3"})).code == 0);
    for (const auto* name : {"records.jsonl", "summary.csv", "window.csv"}) {
        CAPTURE(name);
        CHECK(slurp(fs::path(o1) / name) == slurp(fs::path(o2) / name));
    }

    std::istringstream recs(slurp(fs::path(o1) / "records.jsonl"));
    std::string line;
    std::size_t n_lines = 0, post_seed_verified_l50 = 0;
    while (std::getline(recs, line)) {
        ++n_lines;
        const auto j = nlohmann::json::parse(line);
        if (j["l_value"] == 50.0 && j["phase"] != "seed" && j["verified"] == true) {
            ++post_seed_verified_l50;
        }
    }
    CHECK(n_lines == 2 * 3 * 90);
    CHECK(post_seed_verified_l50 == 0);
}

TEST_CASE("cli online: records follow the reference interpreter") {
    TempDir dir;
    const auto data = (dir / "d.csv").string();
    REQUIRE(run_cli(concat({"gen", "18", "22", "--rng-seed", "4", "--out", data}, kSmall)).code ==
            0);
    const auto out_dir = dir / "o";
    REQUIRE(run_cli({"online", data, "--out", out_dir.string(), "--runs", "2", "--k", "5",
                     "--seed-size", "10", "--retrain-interval", "4", "--rng-seed", "7",
                     "--l-value", "80"})
                .code == 0);
    const auto ds = read_dataset_file(data);
    std::vector<std::vector<nlohmann::json>> by_run(2);
    std::istringstream recs(slurp(out_dir / "records.jsonl"));
    std::string line;
    while (std::getline(recs, line)) {
        const auto j = nlohmann::json::parse(line);
        by_run.at(j["run"].get<std::size_t>()).push_back(j);
    }
    for (std::size_t run = 0; run < 2; ++run) {
        const auto order = run_permutation(ds.trials.size(), 7, run);
        const auto ref = oracle::online(ds.trials, order, 5, Metric::cosine(), 80, 4, 10, 0.5,
                                        PreprocessConfig{});
        REQUIRE(by_run[run].size() == ref.steps.size());
        for (std::size_t i = 0; i < ref.steps.size(); ++i) {
            const auto& j = by_run[run][i];
            CHECK(j["seq"] == i);
            CHECK(j["trial_id"] == ref.steps[i].id);
            CHECK(j["phase"] == to_string(ref.steps[i].phase));
            CHECK(j["decision"] == to_string(ref.steps[i].decision));
            CHECK(j["verified"] == ref.steps[i].verified);
            CHECK(j["predicted"] == to_string(ref.steps[i].predicted));
        }
    }
}

TEST_CASE("cli: exit codes") {
    TempDir dir;
    const auto data = (dir / "d.csv").string();
    REQUIRE(run_cli(concat({"gen", "10", "10", "--out", data}, kSmall)).code == 0);

    CHECK(run_cli({}).code == cli::kBadArguments);
    CHECK(run_cli({"bogus"}).code == cli::kBadArguments);
    CHECK(run_cli({"gen", "--out"}).code == cli::kBadArguments);
    CHECK(run_cli({"online", data}).code == cli::kBadArguments);
    CHECK(run_cli({"gen", "x", "1", "--out", (dir / "x.csv").string()}).code ==
          cli::kBadArguments);
    CHECK(run_cli({"--help"}).code == cli::kSuccess);

    CHECK(run_cli({"online", (dir / "missing.csv").string(), "--out", (dir / "o").string()})
              .code == cli::kDataError);

    // 20 trials cannot feed a seed of 22.
    CHECK(run_cli({"online", data, "--out", (dir / "o").string()}).code ==
          cli::kInfeasibleConfig);
    CHECK(run_cli({"online", data, "--out", (dir / "o").string(), "--seed-size", "8",
                   "--l-value", "20"})
              .code == cli::kInfeasibleConfig);
    CHECK(run_cli({"online", data, "--out", (dir / "o").string(), "--seed-size", "8",
                   "--metric", "chebyshev"})
              .code == cli::kBadArguments);
    CHECK(run_cli(concat({"gen", "1", "1", "--out", (dir / "y.csv").string(),
                          "--outlier-probability", "1.5"},
                         kSmall))
              .code == cli::kInfeasibleConfig);
}

TEST_CASE("cli: malformed dataset reports the offending line") {
    TempDir dir;
    const auto data = dir / "bad.csv";
    spit(data, "id,label,n_samples,sample_rate\nmeta,-,3,500\na,pos,1,2,3\nb,neg,1,2\n");
    const auto r = run_cli({"grid", data.string()});
    CHECK(r.code == cli::kDataError);
    CHECK(r.err.find("line 4") != std::string::npos);
}

TEST_CASE("cli: config file supplies option values") {
    TempDir dir;
    const auto data = (dir / "d.csv").string();
    REQUIRE(run_cli(concat({"gen", "20", "25", "--out", data}, kSmall)).code == 0);
    const auto cfg = dir / "run.ini";
    spit(cfg, "[online]\nk = 3\nseed-size = 8\nruns = 2\nl-value = 90\nrng-seed = 4\n");
    const auto out_dir = dir / "o";
    const auto r = run_cli({"online", data, "--out", out_dir.string(), "--config", cfg.string()});
    REQUIRE(r.code == 0);
    const auto summary = slurp(out_dir / "summary.csv");
    CHECK(summary.find(" k=3 ") != std::string::npos);
    CHECK(summary.find("seed_size=8") != std::string::npos);
    CHECK(summary.find("\n90,2,") != std::string::npos);

    // Command-line flags take precedence over the file.
    const auto out2 = dir / "o2";
    REQUIRE(run_cli({"online", data, "--out", out2.string(), "--config", cfg.string(), "--k",
                     "5"})
                .code == 0);
    const auto summary2 = slurp(out2 / "summary.csv");
    CHECK(summary2.find(" k=5 ") != std::string::npos);
    CHECK(summary2.find("rng_seed=4") != std::string::npos);
}

TEST_CASE("cli grid: writes one row per cell") {
    TempDir dir;
    const auto data = (dir / "d.csv").string();
    REQUIRE(run_cli(concat({"gen", "30", "30", "--out", data}, kSmall)).code == 0);
    const auto r = run_cli({"grid", data, "--k", "3", "--k", "5", "--metric", "cosine",
                            "--l-value", "100", "--train-fraction", "1", "--seeds", "2"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (!line.starts_with("#") && !line.starts_with("split,")) ++rows;
    }
    CHECK(rows == 2 * 2);
}
