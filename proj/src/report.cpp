#include "forceknn/report.hpp"

#include <ostream>

#include <json.hpp>

#include "forceknn/dataset_io.hpp"

namespace forceknn {

namespace {

std::string opt(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("undefined");
}

void echo_lines(std::ostream& out, std::span<const std::string> echo) {
    for (const auto& line : echo) out << "# " << line << '\n';
}

}  // namespace

void write_records_jsonl(std::ostream& out, std::span<const RunReport> reports) {
    for (const auto& rep : reports) {
        for (std::size_t seq = 0; seq < rep.records.size(); ++seq) {
            const auto& r = rep.records[seq];
            nlohmann::ordered_json j;
            j["l_value"] = rep.config.l_value;
            j["run"] = rep.run_index;
            j["seq"] = seq;
            j["trial_id"] = r.trial_id;
            j["phase"] = to_string(r.phase);
            j["decision"] = to_string(r.decision);
            j["verified"] = r.verified;
            j["predicted"] = to_string(r.predicted);
            j["truth"] = to_string(r.truth);
            out << j.dump() << '\n';
        }
    }
}

void write_summary_header(std::ostream& out, std::span<const std::string> echo) {
    echo_lines(out, echo);
    out << "l_value,runs,mean_dataset_size,mean_verifications,mean_precision,"
           "precision_undefined_runs,pooled_precision,mean_recall,recall_undefined_runs,"
           "pooled_recall,mean_tp,mean_fp,mean_tn,mean_fn,mean_total_seconds,"
           "mean_saved_seconds\n";
}

void write_summary_row(std::ostream& out, const SummaryRow& row, const TimeModel& tm,
                       std::size_t n_trials) {
    const auto n = static_cast<double>(n_trials);
    out << format_double(row.l_value) << ',' << row.runs << ','
        << format_double(row.mean_dataset_size) << ',' << format_double(row.mean_verifications)
        << ',' << opt(row.mean_precision) << ',' << row.precision_undefined_runs << ','
        << opt(row.pooled_precision) << ',' << opt(row.mean_recall) << ','
        << row.recall_undefined_runs << ',' << opt(row.pooled_recall) << ','
        << format_double(row.mean_tp) << ',' << format_double(row.mean_fp) << ','
        << format_double(row.mean_tn) << ',' << format_double(row.mean_fn) << ','
        << format_double(cycle_time_total(n, row.mean_verifications, tm)) << ','
        << format_double(cycle_time_savings(n, row.mean_verifications, tm)) << '\n';
}

void write_window_header(std::ostream& out, std::span<const std::string> echo) {
    echo_lines(out, echo);
    out << "l_value,index,mean_precision,precision_runs,mean_uncertain_fraction,"
           "mean_cycle_seconds\n";
}

void write_window_rows(std::ostream& out, double l_value,
                       std::span<const MeanWindowPoint> series) {
    for (const auto& p : series) {
        out << format_double(l_value) << ',' << p.index << ',' << opt(p.precision) << ','
            << p.precision_runs << ',' << format_double(p.uncertain_fraction) << ','
            << format_double(p.cycle_time) << '\n';
    }
}

}  // namespace forceknn
