#pragma once

// Force-trace preprocessing: Savitzky-Golay smoothing followed by
// sliding-window mean down-sampling.

#include <cstddef>
#include <span>
#include <vector>

namespace forceknn {

/// Raw fixed-rate z-axis force recording for one insertion (newtons).
struct ForceTrace {
    std::vector<double> samples;
    double sample_rate = 500.0;  // Hz
};

/// Smoothed and down-sampled representation fed to the classifier.
struct FeatureVector {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    bool operator==(const FeatureVector&) const = default;
};

struct PreprocessConfig {
    std::size_t sg_window = 15;
    std::size_t sg_order = 2;
    std::size_t ds_window = 10;
    std::size_t ds_stride = 10;

    /// Throws std::invalid_argument if the filter or down-sampling
    /// parameters are inconsistent.
    void validate() const;
};

/// Least-squares polynomial smoothing. Interior samples use the fit centred
/// on the sample; the first and last half-window are evaluated on the fit of
/// the first/last full window, so polynomials of degree <= order are
/// reproduced exactly everywhere.
std::vector<double> savgol_smooth(std::span<const double> samples, std::size_t window,
                                  std::size_t order);

/// values[j] = mean(samples[j*stride, j*stride + window)); trailing samples
/// not covered by a full window are dropped.
FeatureVector downsample_mean(std::span<const double> samples, std::size_t window,
                              std::size_t stride);

/// Number of outputs produced by downsample_mean for a trace of length n.
constexpr std::size_t downsampled_length(std::size_t n, std::size_t window,
                                         std::size_t stride) noexcept {
    return n < window ? 0 : (n - window) / stride + 1;
}

FeatureVector preprocess(const ForceTrace& trace, const PreprocessConfig& cfg);

namespace detail {

/// Smoothing weights for each position inside a full window: row r holds the
/// weights that evaluate the window's least-squares fit at sample r.
std::vector<std::vector<double>> savgol_weights(std::size_t window, std::size_t order);

}  // namespace detail

}  // namespace forceknn
