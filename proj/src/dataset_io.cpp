#include "forceknn/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

namespace forceknn {

DataError::DataError(const std::string& what, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_dataset(std::ostream& out, std::span<const LabeledTrial> trials,
                   std::size_t n_samples, double sample_rate,
                   std::span<const std::string> comments) {
    for (const auto& c : comments) out << "# " << c << '\n';
    out << kDatasetHeader << '\n';
    out << "meta,-," << n_samples << ',' << format_double(sample_rate) << '\n';
    for (const auto& t : trials) {
        if (t.trace.samples.size() != n_samples) {
            throw std::invalid_argument("trial " + t.id + " has " +
                                        std::to_string(t.trace.samples.size()) +
                                        " samples, expected " + std::to_string(n_samples));
        }
        out << t.id << ',' << to_string(t.truth);
        for (const double v : t.trace.samples) out << ',' << format_double(v);
        out << '\n';
    }
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double(std::string_view text, std::size_t line, const char* what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw DataError(std::string("invalid ") + what + " '" + std::string(text) + "'", line);
    }
    return v;
}

std::size_t parse_size(std::string_view text, std::size_t line, const char* what) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw DataError(std::string("invalid ") + what + " '" + std::string(text) + "'", line);
    }
    return v;
}

}  // namespace

Dataset read_dataset(std::istream& in) {
    Dataset ds;
    std::string raw;
    std::size_t line_no = 0;
    enum class Stage { Header, Meta, Rows } stage = Stage::Header;
    std::unordered_set<std::string> ids;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r') {
            throw DataError("CR line endings are not accepted", line_no);
        }
        if (line.empty() || line.front() == '#') continue;

        switch (stage) {
            case Stage::Header:
                if (line != kDatasetHeader) {
                    throw DataError("expected header '" + std::string(kDatasetHeader) + "'",
                                    line_no);
                }
                stage = Stage::Meta;
                break;
            case Stage::Meta: {
                const auto f = split_fields(line);
                if (f.size() != 4 || f[0] != "meta") {
                    throw DataError("expected metadata row 'meta,-,<n_samples>,<sample_rate>'",
                                    line_no);
                }
                ds.n_samples = parse_size(f[2], line_no, "n_samples");
                ds.sample_rate = parse_double(f[3], line_no, "sample_rate");
                if (ds.n_samples == 0 || !(ds.sample_rate > 0.0)) {
                    throw DataError("n_samples and sample_rate must be positive", line_no);
                }
                stage = Stage::Rows;
                break;
            }
            case Stage::Rows: {
                const auto f = split_fields(line);
                if (f.size() != 2 + ds.n_samples) {
                    throw DataError("expected " + std::to_string(2 + ds.n_samples) +
                                        " fields, found " + std::to_string(f.size()),
                                    line_no);
                }
                LabeledTrial t;
                t.id = std::string(f[0]);
                if (t.id.empty()) throw DataError("empty trial id", line_no);
                if (!ids.insert(t.id).second) {
                    throw DataError("duplicate trial id '" + t.id + "'", line_no);
                }
                const auto label = parse_label(f[1]);
                if (!label) {
                    throw DataError("label must be 'pos' or 'neg', got '" + std::string(f[1]) + "'",
                                    line_no);
                }
                t.truth = *label;
                t.trace.sample_rate = ds.sample_rate;
                t.trace.samples.reserve(ds.n_samples);
                for (std::size_t i = 2; i < f.size(); ++i) {
                    t.trace.samples.push_back(parse_double(f[i], line_no, "force value"));
                }
                ds.trials.push_back(std::move(t));
                break;
            }
        }
    }
    if (in.bad()) throw DataError("read error");
    if (stage == Stage::Header) throw DataError("missing dataset header");
    if (stage == Stage::Meta) throw DataError("missing metadata row");
    return ds;
}

Dataset read_dataset_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset '" + path + "'");
    return read_dataset(in);
}

}  // namespace forceknn
