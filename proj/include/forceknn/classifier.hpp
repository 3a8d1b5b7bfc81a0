#pragma once

// Brute-force k-nearest-neighbour classification with a minimum-agreement
// ("l-Value") abstention rule.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forceknn/signal.hpp"

namespace forceknn {

/// Positive: lateral hole on top after insertion (successful insertion).
enum class Label { Positive, Negative };

enum class Decision { Positive, Negative, Uncertain };

Decision to_decision(Label label) noexcept;
std::optional<Label> to_label(Decision decision) noexcept;

std::string_view to_string(Label label) noexcept;     // "pos" / "neg"
std::string_view to_string(Decision decision) noexcept;  // "pos" / "neg" / "uncertain"
std::optional<Label> parse_label(std::string_view text) noexcept;

struct Metric {
    enum class Kind { Cosine, Euclidean, Manhattan, Minkowski };

    Kind kind = Kind::Cosine;
    double p = 3.0;  // only meaningful for Minkowski

    static Metric cosine() { return {Kind::Cosine, 0.0}; }
    static Metric euclidean() { return {Kind::Euclidean, 2.0}; }
    static Metric manhattan() { return {Kind::Manhattan, 1.0}; }
    static Metric minkowski(double p);

    bool operator==(const Metric&) const = default;
};

/// "cosine", "euclidean", "manhattan", "minkowski" (p = 3) or "minkowski:<p>".
Metric parse_metric(std::string_view text);
std::string to_string(const Metric& metric);

/// Throws std::invalid_argument on dimension mismatch and std::domain_error
/// for a zero-norm vector under the cosine metric.
double distance(std::span<const double> a, std::span<const double> b, const Metric& metric);

struct LabeledSample {
    FeatureVector features;
    Label label;
};

/// Applies the abstention rule to the k neighbour labels: the majority label
/// is returned when majority_count * 100 >= l_value * k, otherwise Uncertain.
/// An exact split (even k) resolves to Negative when the threshold admits it.
Decision decide(std::span<const Label> neighbor_labels, double l_value);

/// Exact test of majority_count / k * 100 >= l_value.
bool meets_agreement(std::size_t majority_count, std::size_t k, double l_value) noexcept;

struct KnnParams {
    std::size_t k = 11;
    Metric metric = Metric::cosine();
    double l_value = 100.0;

    void validate() const;
};

/// Immutable snapshot of a labelled dataset plus classification parameters.
/// Copies share the underlying sample storage.
class KnnModel {
public:
    KnnModel(std::vector<LabeledSample> dataset, KnnParams params);

    const KnnParams& params() const noexcept { return params_; }
    std::size_t size() const noexcept { return data_->size(); }
    std::size_t dimension() const noexcept { return dimension_; }
    const std::vector<LabeledSample>& dataset() const noexcept { return *data_; }

    /// Labels of the k closest samples ordered by (distance, insertion index).
    std::vector<Label> nearest_labels(const FeatureVector& query) const;

    /// Indices of the k closest samples in the same order.
    std::vector<std::size_t> nearest_indices(const FeatureVector& query) const;

    Decision classify(const FeatureVector& query) const;

private:
    std::shared_ptr<const std::vector<LabeledSample>> data_;
    KnnParams params_;
    std::size_t dimension_ = 0;
};

}  // namespace forceknn
