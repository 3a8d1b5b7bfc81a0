#pragma once

// Confusion-matrix accounting, precision/recall, sliding-window series, the
// cycle-time model and run-averaged summaries.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "forceknn/online.hpp"

namespace forceknn {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    /// Records not scored as classifier predictions (seed and fallback) in
    /// ClassifierOnly mode; always 0 in EndToEnd mode.
    std::size_t uncertain = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn + uncertain; }
    bool operator==(const ConfusionCounts&) const = default;
};

enum class ConfusionMode {
    ClassifierOnly,  ///< only phase == Classified records are scored
    EndToEnd,        ///< final predicted label of every record is scored
};

/// Throws std::invalid_argument on an empty record list.
ConfusionCounts confusion(std::span<const TrialRecord> records,
                          ConfusionMode mode = ConfusionMode::ClassifierOnly);

/// Tally of a single (predicted, truth) pair into the matching cell.
void tally(ConfusionCounts& counts, Label predicted, Label truth) noexcept;

/// nullopt when tp + fp == 0.
std::optional<double> precision(const ConfusionCounts& c) noexcept;
/// nullopt when tp + fn == 0.
std::optional<double> recall(const ConfusionCounts& c) noexcept;

struct WindowPoint {
    std::size_t index = 0;  ///< index of the last record in the window
    std::optional<double> precision;
    double uncertain_fraction = 0.0;
};

/// One point per index i >= window - 1 computed over records[i-window+1, i].
/// Empty when there are fewer records than `window`.
std::vector<WindowPoint> sliding_window_series(std::span<const TrialRecord> records,
                                               std::size_t window = 100);

struct TimeModel {
    double iteration_cost = 45.0;     // seconds
    double verification_cost = 5.0;   // seconds, included in iteration_cost

    void validate() const;
};

struct CycleTime {
    double total_seconds = 0.0;
    /// Sliding-window mean per-iteration cost, one entry per full window.
    std::vector<double> window_mean;
};

/// Every record costs iteration_cost; skipping verification saves
/// verification_cost.
CycleTime cycle_time(std::span<const TrialRecord> records, const TimeModel& tm = {},
                     std::size_t window = 100);

/// Total for `n` iterations of which `verified` (possibly a run mean) ran
/// the verification step.
double cycle_time_total(double n, double verified, const TimeModel& tm = {}) noexcept;
double cycle_time_savings(double n, double verified, const TimeModel& tm = {}) noexcept;

/// Sliding-window statistics averaged over runs of equal length.
struct MeanWindowPoint {
    std::size_t index = 0;
    std::optional<double> precision;  ///< mean over runs where defined
    std::size_t precision_runs = 0;
    double uncertain_fraction = 0.0;
    double cycle_time = 0.0;          ///< mean per-iteration seconds
};

std::vector<MeanWindowPoint> mean_window_series(std::span<const RunReport> reports,
                                                std::size_t window = 100,
                                                const TimeModel& tm = {});

struct SummaryRow {
    double l_value = 0.0;
    std::size_t runs = 0;
    double mean_dataset_size = 0.0;
    double mean_verifications = 0.0;

    std::optional<double> mean_precision;
    std::size_t precision_undefined_runs = 0;
    std::optional<double> mean_recall;
    std::size_t recall_undefined_runs = 0;

    /// Ratios of the summed counts, reported alongside the per-run means.
    std::optional<double> pooled_precision;
    std::optional<double> pooled_recall;

    double mean_tp = 0.0;
    double mean_fp = 0.0;
    double mean_tn = 0.0;
    double mean_fn = 0.0;
};

/// Means over runs; precision and recall are averaged over the runs where
/// they are defined. Throws std::invalid_argument on an empty list.
SummaryRow summarize_runs(std::span<const RunReport> reports);

}  // namespace forceknn
