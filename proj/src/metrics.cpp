#include "forceknn/metrics.hpp"

#include <stdexcept>

namespace forceknn {

void tally(ConfusionCounts& counts, Label predicted, Label truth) noexcept {
    if (predicted == Label::Positive) {
        ++(truth == Label::Positive ? counts.tp : counts.fp);
    } else {
        ++(truth == Label::Negative ? counts.tn : counts.fn);
    }
}

ConfusionCounts confusion(std::span<const TrialRecord> records, ConfusionMode mode) {
    if (records.empty()) throw std::invalid_argument("confusion: no records");
    ConfusionCounts c;
    for (const auto& r : records) {
        if (mode == ConfusionMode::ClassifierOnly && r.phase != Phase::Classified) {
            ++c.uncertain;
            continue;
        }
        tally(c, r.predicted, r.truth);
    }
    return c;
}

std::optional<double> precision(const ConfusionCounts& c) noexcept {
    const std::size_t denom = c.tp + c.fp;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(c.tp) / static_cast<double>(denom);
}

std::optional<double> recall(const ConfusionCounts& c) noexcept {
    const std::size_t denom = c.tp + c.fn;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(c.tp) / static_cast<double>(denom);
}

std::vector<WindowPoint> sliding_window_series(std::span<const TrialRecord> records,
                                               std::size_t window) {
    if (window == 0) throw std::invalid_argument("sliding window must be positive");
    std::vector<WindowPoint> series;
    if (records.size() < window) return series;
    series.reserve(records.size() - window + 1);

    // Running counts: add the entering record, drop the leaving one.
    std::ptrdiff_t tp = 0, fp = 0, verified = 0;
    const auto update = [&](const TrialRecord& r, std::ptrdiff_t sign) {
        if (r.verified) verified += sign;
        if (r.phase == Phase::Classified && r.predicted == Label::Positive) {
            (r.truth == Label::Positive ? tp : fp) += sign;
        }
    };
    for (std::size_t i = 0; i < records.size(); ++i) {
        update(records[i], 1);
        if (i >= window) update(records[i - window], -1);
        if (i + 1 < window) continue;
        WindowPoint pt;
        pt.index = i;
        if (tp + fp > 0) pt.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        pt.uncertain_fraction = static_cast<double>(verified) / static_cast<double>(window);
        series.push_back(pt);
    }
    return series;
}

void TimeModel::validate() const {
    if (!(iteration_cost > 0.0) || !(verification_cost > 0.0)) {
        throw std::invalid_argument("time model costs must be positive");
    }
    if (verification_cost > iteration_cost) {
        throw std::invalid_argument("verification cost exceeds iteration cost");
    }
}

CycleTime cycle_time(std::span<const TrialRecord> records, const TimeModel& tm,
                     std::size_t window) {
    tm.validate();
    if (window == 0) throw std::invalid_argument("sliding window must be positive");
    const auto cost = [&](const TrialRecord& r) {
        return r.verified ? tm.iteration_cost : tm.iteration_cost - tm.verification_cost;
    };
    CycleTime out;
    std::size_t skipped_in_window = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        out.total_seconds += cost(records[i]);
        if (!records[i].verified) ++skipped_in_window;
        if (i >= window && !records[i - window].verified) --skipped_in_window;
        if (i + 1 >= window) {
            // Integer counts keep the window mean free of accumulated drift.
            const double saved = static_cast<double>(skipped_in_window) * tm.verification_cost;
            out.window_mean.push_back(tm.iteration_cost - saved / static_cast<double>(window));
        }
    }
    return out;
}

double cycle_time_total(double n, double verified, const TimeModel& tm) noexcept {
    return n * tm.iteration_cost - (n - verified) * tm.verification_cost;
}

double cycle_time_savings(double n, double verified, const TimeModel& tm) noexcept {
    return (n - verified) * tm.verification_cost;
}

std::vector<MeanWindowPoint> mean_window_series(std::span<const RunReport> reports,
                                                std::size_t window, const TimeModel& tm) {
    if (reports.empty()) throw std::invalid_argument("mean_window_series: no reports");
    const std::size_t n = reports.front().records.size();
    for (const auto& rep : reports) {
        if (rep.records.size() != n) {
            throw std::invalid_argument("mean_window_series: runs differ in length");
        }
    }
    std::vector<MeanWindowPoint> out;
    std::vector<double> prec_sum;
    for (const auto& rep : reports) {
        const auto series = sliding_window_series(rep.records, window);
        const auto cost = cycle_time(rep.records, tm, window);
        if (out.empty()) {
            out.resize(series.size());
            prec_sum.assign(series.size(), 0.0);
            for (std::size_t j = 0; j < series.size(); ++j) out[j].index = series[j].index;
        }
        for (std::size_t j = 0; j < series.size(); ++j) {
            if (series[j].precision) {
                prec_sum[j] += *series[j].precision;
                ++out[j].precision_runs;
            }
            out[j].uncertain_fraction += series[j].uncertain_fraction;
            out[j].cycle_time += cost.window_mean[j];
        }
    }
    const auto runs = static_cast<double>(reports.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        if (out[j].precision_runs > 0) {
            out[j].precision = prec_sum[j] / static_cast<double>(out[j].precision_runs);
        }
        out[j].uncertain_fraction /= runs;
        out[j].cycle_time /= runs;
    }
    return out;
}

SummaryRow summarize_runs(std::span<const RunReport> reports) {
    if (reports.empty()) throw std::invalid_argument("summarize_runs: no reports");
    SummaryRow row;
    row.l_value = reports.front().config.l_value;
    row.runs = reports.size();

    double prec_sum = 0.0, rec_sum = 0.0;
    std::size_t prec_n = 0, rec_n = 0;
    ConfusionCounts pooled;
    for (const auto& rep : reports) {
        row.mean_dataset_size += static_cast<double>(rep.final_dataset_size);
        row.mean_verifications += static_cast<double>(rep.verified_count());
        const auto c = confusion(rep.records, ConfusionMode::ClassifierOnly);
        pooled.tp += c.tp;
        pooled.fp += c.fp;
        pooled.tn += c.tn;
        pooled.fn += c.fn;
        if (const auto p = precision(c)) {
            prec_sum += *p;
            ++prec_n;
        } else {
            ++row.precision_undefined_runs;
        }
        if (const auto r = recall(c)) {
            rec_sum += *r;
            ++rec_n;
        } else {
            ++row.recall_undefined_runs;
        }
    }
    const auto runs = static_cast<double>(reports.size());
    row.mean_dataset_size /= runs;
    row.mean_verifications /= runs;
    if (prec_n > 0) row.mean_precision = prec_sum / static_cast<double>(prec_n);
    if (rec_n > 0) row.mean_recall = rec_sum / static_cast<double>(rec_n);
    row.pooled_precision = precision(pooled);
    row.pooled_recall = recall(pooled);
    row.mean_tp = static_cast<double>(pooled.tp) / runs;
    row.mean_fp = static_cast<double>(pooled.fp) / runs;
    row.mean_tn = static_cast<double>(pooled.tn) / runs;
    row.mean_fn = static_cast<double>(pooled.fn) / runs;
    return row;
}

}  // namespace forceknn
