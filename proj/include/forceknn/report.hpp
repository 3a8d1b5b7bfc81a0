#pragma once

// Serialisation of online-loop results.
//
// records.jsonl  one JSON object per trial and run:
//   {"l_value":100,"run":0,"seq":0,"trial_id":"trial-0001","phase":"seed",
//    "decision":"uncertain","verified":true,"predicted":"pos","truth":"pos"}
// summary.csv    one SummaryRow per l_value
// window.csv     run-averaged sliding-window precision, uncertain fraction
//                and cycle time per l_value
//
// Every CSV starts with '#'-prefixed config echo lines.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "forceknn/metrics.hpp"
#include "forceknn/online.hpp"

namespace forceknn {

void write_records_jsonl(std::ostream& out, std::span<const RunReport> reports);

void write_summary_header(std::ostream& out, std::span<const std::string> echo);
void write_summary_row(std::ostream& out, const SummaryRow& row, const TimeModel& tm,
                       std::size_t n_trials);

void write_window_header(std::ostream& out, std::span<const std::string> echo);
void write_window_rows(std::ostream& out, double l_value,
                       std::span<const MeanWindowPoint> series);

}  // namespace forceknn
