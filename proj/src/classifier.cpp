#include "forceknn/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace forceknn {

Decision to_decision(Label label) noexcept {
    return label == Label::Positive ? Decision::Positive : Decision::Negative;
}

std::optional<Label> to_label(Decision decision) noexcept {
    switch (decision) {
        case Decision::Positive: return Label::Positive;
        case Decision::Negative: return Label::Negative;
        case Decision::Uncertain: break;
    }
    return std::nullopt;
}

std::string_view to_string(Label label) noexcept {
    return label == Label::Positive ? "pos" : "neg";
}

std::string_view to_string(Decision decision) noexcept {
    switch (decision) {
        case Decision::Positive: return "pos";
        case Decision::Negative: return "neg";
        case Decision::Uncertain: break;
    }
    return "uncertain";
}

std::optional<Label> parse_label(std::string_view text) noexcept {
    if (text == "pos") return Label::Positive;
    if (text == "neg") return Label::Negative;
    return std::nullopt;
}

Metric Metric::minkowski(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw std::invalid_argument("minkowski p must be a positive finite number");
    }
    return {Kind::Minkowski, p};
}

Metric parse_metric(std::string_view text) {
    if (text == "cosine") return Metric::cosine();
    if (text == "euclidean") return Metric::euclidean();
    if (text == "manhattan") return Metric::manhattan();
    if (text == "minkowski") return Metric::minkowski(3.0);
    constexpr std::string_view prefix = "minkowski:";
    if (text.starts_with(prefix)) {
        const auto rest = text.substr(prefix.size());
        double p = 0.0;
        const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), p);
        if (ec == std::errc() && ptr == rest.data() + rest.size()) return Metric::minkowski(p);
    }
    throw std::invalid_argument("unknown metric '" + std::string(text) + "'");
}

std::string to_string(const Metric& metric) {
    switch (metric.kind) {
        case Metric::Kind::Cosine: return "cosine";
        case Metric::Kind::Euclidean: return "euclidean";
        case Metric::Kind::Manhattan: return "manhattan";
        case Metric::Kind::Minkowski: break;
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), metric.p);
    return "minkowski:" + std::string(buf, res.ptr);
}

double distance(std::span<const double> a, std::span<const double> b, const Metric& metric) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("feature dimension mismatch: " + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()));
    }
    const std::size_t n = a.size();
    switch (metric.kind) {
        case Metric::Kind::Cosine: {
            double dot = 0.0, na = 0.0, nb = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dot += a[i] * b[i];
                na += a[i] * a[i];
                nb += b[i] * b[i];
            }
            if (na == 0.0 || nb == 0.0) {
                throw std::domain_error("cosine distance undefined for a zero-norm vector");
            }
            const double cos = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
            return std::max(0.0, 1.0 - cos);
        }
        case Metric::Kind::Euclidean: {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = a[i] - b[i];
                acc += d * d;
            }
            return std::sqrt(acc);
        }
        case Metric::Kind::Manhattan: {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += std::abs(a[i] - b[i]);
            return acc;
        }
        case Metric::Kind::Minkowski: {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += std::pow(std::abs(a[i] - b[i]), metric.p);
            return std::pow(acc, 1.0 / metric.p);
        }
    }
    return 0.0;
}

bool meets_agreement(std::size_t majority_count, std::size_t k, double l_value) noexcept {
    // fma rounds once, so the sign of l*k - 100*N is exact.
    const double slack = std::fma(l_value, static_cast<double>(k),
                                  -100.0 * static_cast<double>(majority_count));
    return slack <= 0.0;
}

Decision decide(std::span<const Label> neighbor_labels, double l_value) {
    if (neighbor_labels.empty()) throw std::invalid_argument("decide: empty neighbour list");
    if (!(l_value >= 50.0 && l_value <= 100.0)) {
        throw std::invalid_argument("l_value must lie in [50, 100]");
    }
    const auto positives = static_cast<std::size_t>(
        std::count(neighbor_labels.begin(), neighbor_labels.end(), Label::Positive));
    const std::size_t k = neighbor_labels.size();
    const std::size_t negatives = k - positives;
    const Label majority = positives > negatives ? Label::Positive : Label::Negative;
    const std::size_t majority_count = std::max(positives, negatives);
    return meets_agreement(majority_count, k, l_value) ? to_decision(majority)
                                                       : Decision::Uncertain;
}

void KnnParams::validate() const {
    if (k == 0) throw std::invalid_argument("k must be positive");
    if (!(l_value >= 50.0 && l_value <= 100.0)) {
        throw std::invalid_argument("l_value must lie in [50, 100]");
    }
    if (metric.kind == Metric::Kind::Minkowski && !(metric.p > 0.0)) {
        throw std::invalid_argument("minkowski p must be positive");
    }
}

KnnModel::KnnModel(std::vector<LabeledSample> dataset, KnnParams params)
    : params_(params) {
    params_.validate();
    if (!dataset.empty()) {
        dimension_ = dataset.front().features.size();
        for (const auto& s : dataset) {
            if (s.features.size() != dimension_) {
                throw std::invalid_argument("dataset feature vectors differ in dimension");
            }
        }
    }
    data_ = std::make_shared<const std::vector<LabeledSample>>(std::move(dataset));
}

std::vector<std::size_t> KnnModel::nearest_indices(const FeatureVector& query) const {
    const auto& data = *data_;
    const std::size_t k = params_.k;
    if (data.size() < k) {
        throw std::invalid_argument("dataset has " + std::to_string(data.size()) +
                                    " samples, fewer than k = " + std::to_string(k));
    }
    if (query.size() != dimension_) {
        throw std::invalid_argument("query dimension " + std::to_string(query.size()) +
                                    " does not match dataset dimension " +
                                    std::to_string(dimension_));
    }

    struct Candidate {
        double dist;
        std::size_t index;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        candidates.push_back({distance(query.values, data[i].features.values, params_.metric), i});
    }
    const auto closer = [](const Candidate& x, const Candidate& y) {
        return x.dist < y.dist || (x.dist == y.dist && x.index < y.index);
    };
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                      candidates.end(), closer);

    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = candidates[i].index;
    return out;
}

std::vector<Label> KnnModel::nearest_labels(const FeatureVector& query) const {
    const auto indices = nearest_indices(query);
    std::vector<Label> labels;
    labels.reserve(indices.size());
    for (const auto i : indices) labels.push_back((*data_)[i].label);
    return labels;
}

Decision KnnModel::classify(const FeatureVector& query) const {
    return decide(nearest_labels(query), params_.l_value);
}

}  // namespace forceknn
