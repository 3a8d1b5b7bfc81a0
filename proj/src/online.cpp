#include "forceknn/online.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>

#include "forceknn/random.hpp"

namespace forceknn {

std::string_view to_string(Phase phase) noexcept {
    switch (phase) {
        case Phase::Seed: return "seed";
        case Phase::Classified: return "classified";
        case Phase::Fallback: break;
    }
    return "fallback";
}

void LoopConfig::validate() const {
    knn().validate();
    preprocess.validate();
    if (retrain_interval == 0) throw std::invalid_argument("retrain_interval must be positive");
    if (seed_size < k) throw std::invalid_argument("seed_size must be at least k");
    if (!(seed_min_positive_fraction > 0.0 && seed_min_positive_fraction <= 1.0)) {
        throw std::invalid_argument("seed_min_positive_fraction must lie in (0, 1]");
    }
    if (n_runs == 0) throw std::invalid_argument("n_runs must be positive");
}

std::size_t RunReport::verified_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(
        records.begin(), records.end(), [](const TrialRecord& r) { return r.verified; }));
}

std::size_t RunReport::fallback_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(),
                                                  [](const TrialRecord& r) {
                                                      return r.phase == Phase::Fallback;
                                                  }));
}

namespace {

std::vector<FeatureVector> compute_features(std::span<const LabeledTrial> trials,
                                            const PreprocessConfig& cfg) {
    std::vector<FeatureVector> out;
    out.reserve(trials.size());
    for (const auto& t : trials) out.push_back(preprocess(t.trace, cfg));
    return out;
}

// Stream positions refer to `order`; trials/features are indexed by the
// original position.
RunReport run_on_order(std::span<const LabeledTrial> trials,
                       std::span<const FeatureVector> features,
                       std::span<const std::size_t> order, const LoopConfig& cfg,
                       std::size_t run_index) {
    const std::size_t n = order.size();
    if (n <= cfg.seed_size) {
        throw std::invalid_argument("stream of " + std::to_string(n) +
                                    " trials is not longer than seed_size");
    }

    LabelOracle oracle(trials);
    RunReport report;
    report.config = cfg;
    report.rng_seed = cfg.rng_seed;
    report.run_index = run_index;
    report.records.reserve(n);

    std::vector<LabeledSample> growing;
    growing.reserve(n);

    const auto quota = static_cast<std::size_t>(
        std::ceil(static_cast<double>(cfg.seed_size) * cfg.seed_min_positive_fraction));
    std::size_t positives = 0;
    std::size_t pos = 0;
    while (growing.size() < cfg.seed_size || positives < quota) {
        if (pos == n) throw std::invalid_argument("stream exhausted before seeding completed");
        const std::size_t idx = order[pos++];
        const Label label = oracle.verify(idx);
        if (label == Label::Positive) ++positives;
        growing.push_back({features[idx], label});
        TrialRecord rec;
        rec.trial_id = trials[idx].id;
        rec.decision = Decision::Uncertain;
        rec.verified = true;
        rec.predicted = label;
        rec.phase = Phase::Seed;
        report.records.push_back(std::move(rec));
    }
    report.seed_count = growing.size();

    std::optional<KnnModel> snapshot;
    std::size_t snapshot_size = 0;
    const auto rebuild = [&] {
        snapshot.emplace(growing, cfg.knn());
        snapshot_size = growing.size();
        ++report.snapshot_rebuilds;
    };
    rebuild();

    std::size_t processed = 0;
    for (; pos < n; ++pos) {
        const std::size_t idx = order[pos];
        TrialRecord rec;
        rec.trial_id = trials[idx].id;
        const Decision decision = snapshot_size >= cfg.k ? snapshot->classify(features[idx])
                                                         : Decision::Uncertain;
        rec.decision = decision;
        if (const auto label = to_label(decision)) {
            rec.phase = Phase::Classified;
            rec.predicted = *label;
            rec.verified = false;
        } else {
            const Label truth = oracle.verify(idx);
            rec.phase = Phase::Fallback;
            rec.predicted = truth;
            rec.verified = true;
            growing.push_back({features[idx], truth});
        }
        report.records.push_back(std::move(rec));

        ++processed;
        if (processed % cfg.retrain_interval == 0 && growing.size() != snapshot_size) rebuild();
    }

    report.final_dataset_size = growing.size();
    report.oracle_calls = oracle.calls();

    // Evaluation only: ground truth is attached after the loop has finished.
    for (std::size_t p = 0; p < n; ++p) report.records[p].truth = trials[order[p]].truth;
    return report;
}

void require_both_classes(std::span<const LabeledTrial> trials) {
    bool pos = false, neg = false;
    for (const auto& t : trials) (t.truth == Label::Positive ? pos : neg) = true;
    if (!pos || !neg) throw std::invalid_argument("trial set must contain both classes");
}

}  // namespace

RunReport run_online(std::span<const LabeledTrial> trials, const LoopConfig& cfg) {
    cfg.validate();
    require_both_classes(trials);
    const auto features = compute_features(trials, cfg.preprocess);
    std::vector<std::size_t> order(trials.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    return run_on_order(trials, features, order, cfg, 0);
}

std::vector<std::size_t> run_permutation(std::size_t n, std::uint64_t base_seed,
                                         std::size_t run) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(base_seed, run));
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

std::vector<RunReport> run_replicated(std::span<const LabeledTrial> trials,
                                      const LoopConfig& cfg, unsigned threads) {
    cfg.validate();
    require_both_classes(trials);
    const auto features = compute_features(trials, cfg.preprocess);

    std::vector<RunReport> reports(cfg.n_runs);
    const auto run_one = [&](std::size_t run) {
        std::vector<std::size_t> order;
        if (cfg.shuffle) {
            order = run_permutation(trials.size(), cfg.rng_seed, run);
        } else {
            order.resize(trials.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
        }
        reports[run] = run_on_order(trials, features, order, cfg, run);
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.n_runs));
    if (threads <= 1) {
        for (std::size_t run = 0; run < cfg.n_runs; ++run) run_one(run);
        return reports;
    }

    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < threads; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (std::size_t run = w; run < cfg.n_runs; run += threads) run_one(run);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return reports;
}

}  // namespace forceknn
