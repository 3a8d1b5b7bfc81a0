#pragma once

// Text dataset format:
//
//   # optional comment lines
//   id,label,n_samples,sample_rate
//   meta,-,<n_samples>,<sample_rate>
//   <id>,<pos|neg>,<f_1>,...,<f_n_samples>
//   ...
//
// UTF-8, LF line endings, '.' decimal separator. Values are written in the
// shortest form that parses back to the identical double.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "forceknn/online.hpp"

namespace forceknn {

/// Malformed or unreadable input. `line` is 1-based, 0 when not tied to a line.
class DataError : public std::runtime_error {
public:
    DataError(const std::string& what, std::size_t line = 0);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct Dataset {
    std::size_t n_samples = 0;
    double sample_rate = 0.0;
    std::vector<LabeledTrial> trials;
};

inline constexpr std::string_view kDatasetHeader = "id,label,n_samples,sample_rate";

/// Shortest round-trip decimal text for a double.
std::string format_double(double value);

void write_dataset(std::ostream& out, std::span<const LabeledTrial> trials,
                   std::size_t n_samples, double sample_rate,
                   std::span<const std::string> comments = {});

/// Throws DataError (with the offending line number) on the first malformed row.
Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::string& path);

}  // namespace forceknn
