#pragma once

// Simulation of the online self-supervised loop: oracle-labelled seeding,
// classification with abstention, oracle fallback on Uncertain, a growing
// dataset and periodic refresh of the classifier snapshot.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "forceknn/classifier.hpp"
#include "forceknn/signal.hpp"

namespace forceknn {

/// One insertion trial. `truth` is only read by the oracle and, after a run
/// completes, by the evaluator.
struct LabeledTrial {
    std::string id;
    ForceTrace trace;
    Label truth = Label::Negative;
};

struct LoopConfig {
    std::size_t k = 11;
    Metric metric = Metric::cosine();
    double l_value = 100.0;
    std::size_t retrain_interval = 20;
    std::size_t seed_size = 22;
    double seed_min_positive_fraction = 0.5;
    PreprocessConfig preprocess;
    std::uint64_t rng_seed = 0;
    std::size_t n_runs = 30;
    /// When false, run_replicated replays the stream in its given order.
    bool shuffle = true;

    void validate() const;
    KnnParams knn() const { return {k, metric, l_value}; }
};

enum class Phase { Seed, Classified, Fallback };

std::string_view to_string(Phase phase) noexcept;

struct TrialRecord {
    std::string trial_id;
    /// Seed records carry Uncertain: no classification was attempted.
    Decision decision = Decision::Uncertain;
    bool verified = false;
    Label predicted = Label::Negative;
    Label truth = Label::Negative;
    Phase phase = Phase::Seed;

    bool operator==(const TrialRecord&) const = default;
};

struct RunReport {
    std::vector<TrialRecord> records;
    std::size_t final_dataset_size = 0;
    std::size_t seed_count = 0;
    std::size_t oracle_calls = 0;
    std::size_t snapshot_rebuilds = 0;
    std::size_t run_index = 0;
    std::uint64_t rng_seed = 0;
    LoopConfig config;

    std::size_t verified_count() const noexcept;
    std::size_t fallback_count() const noexcept;
};

/// Ground-truth oracle with a call counter. Only the oracle and post-run
/// evaluation see labels; the classification path receives traces only.
class LabelOracle {
public:
    explicit LabelOracle(std::span<const LabeledTrial> trials) : trials_(trials) {}

    Label verify(std::size_t position) {
        ++calls_;
        return trials_[position].truth;
    }
    std::size_t calls() const noexcept { return calls_; }

private:
    std::span<const LabeledTrial> trials_;
    std::size_t calls_ = 0;
};

/// Runs the loop once over `trials` in the given order. Throws
/// std::invalid_argument for an invalid config, a stream no longer than the
/// seed size, or a stream exhausted before the seed quota is met.
RunReport run_online(std::span<const LabeledTrial> trials, const LoopConfig& cfg);

/// Deterministic permutation of [0, n) derived from (base_seed, run).
std::vector<std::size_t> run_permutation(std::size_t n, std::uint64_t base_seed,
                                         std::size_t run);

/// cfg.n_runs runs, run i over the shuffle derived from (cfg.rng_seed, i).
/// Runs execute on up to `threads` worker threads (0 = hardware concurrency);
/// the result does not depend on the thread count.
std::vector<RunReport> run_replicated(std::span<const LabeledTrial> trials,
                                      const LoopConfig& cfg, unsigned threads = 0);

}  // namespace forceknn
