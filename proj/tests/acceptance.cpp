// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "forceknn/classifier.hpp"
#include "forceknn/cli.hpp"
#include "forceknn/datagen.hpp"
#include "forceknn/metrics.hpp"
#include "forceknn/online.hpp"
#include "forceknn/signal.hpp"
#include "oracles.hpp"

using namespace forceknn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t dim) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> v(dim);
    for (auto& x : v) x = nd(gen);
    return v;
}

Metric random_metric(std::mt19937_64& gen) {
    switch (gen() % 4) {
        case 0: return Metric::cosine();
        case 1: return Metric::euclidean();
        case 2: return Metric::manhattan();
        default: return Metric::minkowski(std::uniform_real_distribution<double>(1.0, 4.0)(gen));
    }
}

// 1. Savitzky-Golay exactness.
Outcome filter_exactness() {
    Outcome o;
    std::mt19937_64 gen(101);
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    double worst_poly = 0.0, worst_oracle = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 15 + gen() % 400;
        const double c0 = coef(gen), c1 = coef(gen) / 10, c2 = coef(gen) / 1000;
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = static_cast<double>(i);
            y[i] = c0 + c1 * x + c2 * x * x;
        }
        const auto s = savgol_smooth(y, 15, 2);
        for (std::size_t i = 0; i < n; ++i) worst_poly = std::max(worst_poly, std::abs(s[i] - y[i]));
    }
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 15 + gen() % 200;
        const auto y = random_vector(gen, n);
        const auto s = savgol_smooth(y, 15, 2);
        for (std::size_t i = 0; i < n; ++i) {
            worst_oracle = std::max(worst_oracle, std::abs(s[i] - oracle::savgol_point(y, i, 15, 2)));
        }
    }
    if (worst_poly > 1e-9) o.fail("polynomial error " + std::to_string(worst_poly));
    if (worst_oracle > 1e-9) o.fail("oracle error " + std::to_string(worst_oracle));
    std::ostringstream d;
    d << "max poly err " << worst_poly << ", max oracle err " << worst_oracle;
    if (o.pass) o.detail = d.str();
    return o;
}

// 2. k-NN against a full-sort pipeline, including duplicated points.
Outcome knn_oracle() {
    Outcome o;
    std::mt19937_64 gen(202);
    std::size_t ties = 0;
    for (int rep = 0; rep < 500 && o.pass; ++rep) {
        const std::size_t dim = 1 + gen() % 20;
        const std::size_t n = 1 + gen() % 200;
        std::vector<LabeledSample> data;
        for (std::size_t i = 0; i < n; ++i) {
            const Label label = gen() % 2 ? Label::Positive : Label::Negative;
            if (i > 0 && gen() % 3 == 0) {
                // Exact duplicate of an earlier point, label drawn afresh.
                data.push_back({data[gen() % i].features, label});
                ++ties;
            } else {
                data.push_back({FeatureVector{random_vector(gen, dim)}, label});
            }
        }
        const std::size_t k = 1 + gen() % std::min<std::size_t>(25, n);
        const Metric metric = random_metric(gen);
        const int l = 50 + static_cast<int>(gen() % 51);
        const KnnModel model(data, KnnParams{k, metric, static_cast<double>(l)});
        for (int q = 0; q < 5; ++q) {
            const FeatureVector query =
                gen() % 2 ? data[gen() % n].features : FeatureVector{random_vector(gen, dim)};
            const auto got_labels = model.nearest_labels(query);
            const auto want_labels = oracle::nearest_labels(data, query.values, k, metric);
            const auto got = model.classify(query);
            const auto want = oracle::vote(want_labels, l);
            if (got_labels != want_labels || got != want) {
                o.fail("mismatch at instance " + std::to_string(rep) + " (" +
                       to_string(metric) + ", k=" + std::to_string(k) + ")");
                break;
            }
        }
    }
    if (o.pass) o.detail = "500 instances, " + std::to_string(ties) + " duplicated points";
    return o;
}

// 3. l-Value boundary.
Outcome lvalue_boundary() {
    Outcome o;
    std::size_t checked = 0;
    for (std::size_t k = 1; k <= 25; ++k) {
        for (std::size_t pos = 0; pos <= k; ++pos) {
            std::vector<Label> labels(pos, Label::Positive);
            labels.resize(k, Label::Negative);
            const std::size_t neg = k - pos;
            const std::size_t majority = std::max(pos, neg);
            for (int l = 50; l <= 100; ++l) {
                const bool definite = majority * 100 >= static_cast<std::size_t>(l) * k;
                const Decision want = !definite       ? Decision::Uncertain
                                      : pos > neg     ? Decision::Positive
                                                      : Decision::Negative;
                if (decide(labels, l) != want) {
                    o.fail("decide k=" + std::to_string(k) + " pos=" + std::to_string(pos) +
                           " l=" + std::to_string(l));
                }
                if (meets_agreement(pos, k, l) != (pos * 100 >= static_cast<std::size_t>(l) * k)) {
                    o.fail("meets_agreement k=" + std::to_string(k) + " n=" + std::to_string(pos) +
                           " l=" + std::to_string(l));
                }
                ++checked;
            }
        }
    }
    std::vector<Label> ten(10, Label::Positive);
    ten.push_back(Label::Negative);
    std::vector<Label> nine(9, Label::Positive);
    nine.insert(nine.end(), 2, Label::Negative);
    if (decide(ten, 90) != Decision::Positive) o.fail("k=11 l=90 should accept 10 agreeing");
    if (decide(nine, 90) != Decision::Uncertain) o.fail("k=11 l=90 should reject 9 agreeing");
    if (o.pass) o.detail = std::to_string(checked) + " (k, count, l) cases";
    return o;
}

// 4. Abstention monotonicity in l.
Outcome monotonicity() {
    Outcome o;
    std::mt19937_64 gen(404);
    for (int rep = 0; rep < 1000 && o.pass; ++rep) {
        const std::size_t k = 1 + gen() % 25;
        std::vector<Label> labels(k);
        for (auto& l : labels) l = gen() % 2 ? Label::Positive : Label::Negative;
        std::vector<Decision> by_l;
        for (int l = 50; l <= 100; ++l) by_l.push_back(decide(labels, l));
        for (std::size_t hi = 0; hi < by_l.size(); ++hi) {
            if (by_l[hi] == Decision::Uncertain) continue;
            for (std::size_t lo = 0; lo < hi; ++lo) {
                if (by_l[lo] != by_l[hi]) {
                    o.fail("multiset " + std::to_string(rep) + " changes label below l=" +
                           std::to_string(50 + hi));
                }
            }
        }
    }
    if (o.pass) o.detail = "1000 multisets, l = 50..100";
    return o;
}

// 5. Online-loop accounting.
Outcome online_accounting() {
    Outcome o;
    GenParams p;
    p.n_samples = 200;
    p.sample_rate = 100.0;
    std::mt19937_64 gen(505);
    std::size_t total_records = 0;
    for (int stream = 0; stream < 50 && o.pass; ++stream) {
        const auto trials = gen_dataset(30 + gen() % 40, 30 + gen() % 40, p, 5000 + stream);
        LoopConfig cfg;
        cfg.k = 1 + 2 * (gen() % 6);
        cfg.seed_size = std::max<std::size_t>(2 * cfg.k, 10);
        cfg.retrain_interval = 1 + gen() % 25;
        cfg.l_value = 50 + static_cast<double>(gen() % 51);
        for (const double l : {cfg.l_value, 50.0}) {
            cfg.l_value = l;
            const auto rep = run_online(trials, cfg);
            total_records += rep.records.size();
            if (rep.final_dataset_size != rep.seed_count + rep.fallback_count()) {
                o.fail("dataset size mismatch on stream " + std::to_string(stream));
            }
            if (rep.oracle_calls != rep.verified_count()) {
                o.fail("oracle calls mismatch on stream " + std::to_string(stream));
            }
            if (l == 50.0 && rep.fallback_count() != 0) {
                o.fail("l=50 verified after seeding on stream " + std::to_string(stream));
            }
        }
    }
    if (o.pass) o.detail = "50 streams, " + std::to_string(total_records) + " records";
    return o;
}

// 6. Cycle-time arithmetic.
Outcome cycle_time_arithmetic() {
    Outcome o;
    const TimeModel tm{45.0, 5.0};
    std::mt19937_64 gen(606);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t v = gen() % 705;
        std::vector<TrialRecord> records(704);
        for (std::size_t i = 0; i < v; ++i) records[i].verified = true;
        std::shuffle(records.begin(), records.end(), gen);
        const double want = 704 * 45.0 - static_cast<double>(704 - v) * 5.0;
        if (std::abs(cycle_time(records, tm).total_seconds - want) > 1e-9) {
            o.fail("total mismatch at v=" + std::to_string(v));
        }
    }
    const double savings = cycle_time_savings(704, 401.7, tm);
    if (std::abs(savings - 1511.0) > 1.0) o.fail("savings " + std::to_string(savings));
    if (o.pass) o.detail = "savings at v=401.7: " + std::to_string(savings) + " s";
    return o;
}

// 7. Qualitative trends on the default synthetic dataset.
Outcome trends() {
    Outcome o;
    const auto trials = gen_dataset(297, 407, GenParams{}, 0);
    LoopConfig cfg;
    cfg.n_runs = 30;
    cfg.l_value = 100;
    const auto hi = run_replicated(trials, cfg);
    cfg.l_value = 50;
    const auto lo = run_replicated(trials, cfg);
    const auto row_hi = summarize_runs(hi);
    const auto row_lo = summarize_runs(lo);
    const auto series = mean_window_series(hi, 100);
    if (!row_hi.mean_precision || !row_lo.mean_precision) {
        o.fail("undefined precision");
        return o;
    }
    if (!(*row_hi.mean_precision > *row_lo.mean_precision)) o.fail("(a) precision not higher");
    if (!(series.back().uncertain_fraction < series.front().uncertain_fraction)) {
        o.fail("(b) uncertain fraction did not fall");
    }
    if (!(series.back().cycle_time < series.front().cycle_time)) {
        o.fail("(c) cycle time did not fall");
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "precision l=100 %.4f vs l=50 %.4f; uncertain %.3f -> %.3f; cycle %.2f -> %.2f s",
                  *row_hi.mean_precision, *row_lo.mean_precision,
                  series.front().uncertain_fraction, series.back().uncertain_fraction,
                  series.front().cycle_time, series.back().cycle_time);
    if (o.pass) {
        o.detail = buf;
    } else {
        o.detail += "; " + std::string(buf);
    }
    return o;
}

// 8. Metric identities and cosine scale invariance.
Outcome metric_identities() {
    Outcome o;
    std::mt19937_64 gen(808);
    const auto rel = [](double a, double b) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
    };
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t dim = 1 + gen() % 64;
        const auto a = random_vector(gen, dim);
        const auto b = random_vector(gen, dim);
        worst = std::max(worst, rel(distance(a, b, Metric::minkowski(2.0)),
                                    distance(a, b, Metric::euclidean())));
        worst = std::max(worst, rel(distance(a, b, Metric::minkowski(1.0)),
                                    distance(a, b, Metric::manhattan())));
    }
    if (worst > 1e-12) o.fail("relative difference " + std::to_string(worst));

    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int rep = 0; rep < 200 && o.pass; ++rep) {
        const std::size_t dim = 2 + gen() % 20;
        const std::size_t n = 11 + gen() % 100;
        std::vector<LabeledSample> data;
        for (std::size_t i = 0; i < n; ++i) {
            data.push_back({FeatureVector{random_vector(gen, dim)},
                            gen() % 2 ? Label::Positive : Label::Negative});
        }
        const KnnModel model(data, KnnParams{11, Metric::cosine(),
                                             50 + static_cast<double>(gen() % 51)});
        const FeatureVector q{random_vector(gen, dim)};
        FeatureVector scaled = q;
        const double s = scale(gen);
        for (auto& x : scaled.values) x *= s;
        if (model.classify(q) != model.classify(scaled)) {
            o.fail("cosine decision changed under scaling, instance " + std::to_string(rep));
        }
    }
    if (o.pass) {
        std::ostringstream d;
        d << "max relative difference " << worst << "; 200 scaled queries";
        o.detail = d.str();
    }
    return o;
}

// 9. Byte-identical CLI outputs.
Outcome determinism() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() /
                         ("forceknn-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto data = (dir / "data.csv").string();
    std::ostringstream sink, errs;
    if (cli::run({"gen", "--out", data, "--rng-seed", "9"}, sink, errs) != 0) {
        o.fail("gen failed: " + errs.str());
    }
    const auto run_once = [&](const std::string& out) {
        return cli::run({"online", data, "--out", (dir / out).string(), "--rng-seed", "3",
                         "--runs", "10", "--l-value", "100", "--l-value", "50"},
                        sink, errs);
    };
    if (o.pass && (run_once("a") != 0 || run_once("b") != 0)) o.fail("online failed: " + errs.str());
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    std::size_t bytes = 0;
    for (const auto* name : {"records.jsonl", "summary.csv", "window.csv"}) {
        if (!o.pass) break;
        const auto a = slurp(dir / "a" / name);
        const auto b = slurp(dir / "b" / name);
        bytes += a.size();
        if (a.empty() || a != b) o.fail(std::string(name) + " differs or is empty");
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    if (o.pass) o.detail = std::to_string(bytes) + " bytes identical across two executions";
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;
    std::function<Outcome()> check;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "filter exactness", 5.0, filter_exactness},
        {2, "k-NN oracle equivalence", 30.0, knn_oracle},
        {3, "l-Value rule boundary", 1.0, lvalue_boundary},
        {4, "abstention monotonicity", 0.0, monotonicity},
        {5, "online-loop accounting", 0.0, online_accounting},
        {6, "cycle-time arithmetic", 0.0, cycle_time_arithmetic},
        {7, "qualitative trends", 120.0, trends},
        {8, "metric identities", 0.0, metric_identities},
        {9, "determinism", 0.0, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0 && secs > c.time_limit_s) {
            o.fail("took " + std::to_string(secs) + " s, limit " +
                   std::to_string(c.time_limit_s) + " s");
        }
        failures += o.pass ? 0 : 1;
        std::printf("[%s] %d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    o.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
