#include "forceknn/signal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace forceknn {

namespace {

void require_finite(std::span<const double> samples) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i])) {
            throw std::invalid_argument("non-finite sample at index " + std::to_string(i));
        }
    }
}

}  // namespace

void PreprocessConfig::validate() const {
    if (sg_window == 0 || sg_window % 2 == 0) {
        throw std::invalid_argument("sg_window must be odd and positive");
    }
    if (sg_order >= sg_window) {
        throw std::invalid_argument("sg_order must be smaller than sg_window");
    }
    if (ds_window == 0 || ds_stride == 0) {
        throw std::invalid_argument("ds_window and ds_stride must be positive");
    }
}

namespace detail {

// The hat matrix Q Q^T of the window's Vandermonde matrix, where Q comes from
// modified Gram-Schmidt on columns 1, x, x^2, ... with x centred and scaled
// to [-1, 1] for conditioning.
std::vector<std::vector<double>> savgol_weights(std::size_t window, std::size_t order) {
    const std::size_t cols = order + 1;
    const double half = static_cast<double>(window - 1) / 2.0;
    const double scale = half > 0.0 ? half : 1.0;

    std::vector<std::vector<double>> q(cols, std::vector<double>(window));
    for (std::size_t r = 0; r < window; ++r) {
        const double x = (static_cast<double>(r) - half) / scale;
        double power = 1.0;
        for (std::size_t c = 0; c < cols; ++c) {
            q[c][r] = power;
            power *= x;
        }
    }
    for (std::size_t c = 0; c < cols; ++c) {
        // Two passes keep the basis orthogonal to working precision.
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t prev = 0; prev < c; ++prev) {
                double dot = 0.0;
                for (std::size_t r = 0; r < window; ++r) dot += q[prev][r] * q[c][r];
                for (std::size_t r = 0; r < window; ++r) q[c][r] -= dot * q[prev][r];
            }
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < window; ++r) norm += q[c][r] * q[c][r];
        norm = std::sqrt(norm);
        for (std::size_t r = 0; r < window; ++r) q[c][r] /= norm;
    }

    std::vector<std::vector<double>> weights(window, std::vector<double>(window, 0.0));
    for (std::size_t r = 0; r < window; ++r) {
        for (std::size_t j = 0; j < window; ++j) {
            double w = 0.0;
            for (std::size_t c = 0; c < cols; ++c) w += q[c][r] * q[c][j];
            weights[r][j] = w;
        }
    }
    return weights;
}

}  // namespace detail

std::vector<double> savgol_smooth(std::span<const double> samples, std::size_t window,
                                  std::size_t order) {
    if (window == 0 || window % 2 == 0) {
        throw std::invalid_argument("savgol window must be odd and positive");
    }
    if (order >= window) {
        throw std::invalid_argument("savgol order must be smaller than the window");
    }
    if (samples.size() < window) {
        throw std::invalid_argument("trace shorter than savgol window");
    }
    require_finite(samples);

    const auto weights = detail::savgol_weights(window, order);
    const std::size_t n = samples.size();
    const std::size_t half = window / 2;
    const std::size_t last_start = n - window;

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t start = i < half ? 0 : i - half;
        if (start > last_start) start = last_start;
        const auto& row = weights[i - start];
        double acc = 0.0;
        for (std::size_t j = 0; j < window; ++j) acc += row[j] * samples[start + j];
        out[i] = acc;
    }
    return out;
}

FeatureVector downsample_mean(std::span<const double> samples, std::size_t window,
                              std::size_t stride) {
    if (window == 0 || stride == 0) {
        throw std::invalid_argument("down-sampling window and stride must be positive");
    }
    if (samples.size() < window) {
        throw std::invalid_argument("trace shorter than down-sampling window");
    }
    const std::size_t count = downsampled_length(samples.size(), window, stride);
    FeatureVector fv;
    fv.values.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        double acc = 0.0;
        const std::size_t begin = j * stride;
        for (std::size_t i = begin; i < begin + window; ++i) acc += samples[i];
        fv.values.push_back(acc / static_cast<double>(window));
    }
    return fv;
}

FeatureVector preprocess(const ForceTrace& trace, const PreprocessConfig& cfg) {
    cfg.validate();
    const auto smoothed = savgol_smooth(trace.samples, cfg.sg_window, cfg.sg_order);
    return downsample_mean(smoothed, cfg.ds_window, cfg.ds_stride);
}

}  // namespace forceknn
