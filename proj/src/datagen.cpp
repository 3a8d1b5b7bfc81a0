#include "forceknn/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace forceknn {

ClassProfile GenParams::default_positive() {
    return ClassProfile{0.85, 0.04, 14.0, 3.0, 8.0, 1.5};
}

ClassProfile GenParams::default_negative() {
    return ClassProfile{0.69, 0.04, 20.0, 3.0, 11.0, 1.5};
}

void GenParams::validate() const {
    if (n_samples == 0) throw std::invalid_argument("n_samples must be positive");
    if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate must be positive");
    if (!(ramp_duration > 0.0) || !(relax_tau > 0.0)) {
        throw std::invalid_argument("ramp_duration and relax_tau must be positive");
    }
    if (!(noise_std >= 0.0)) throw std::invalid_argument("noise_std must be non-negative");
    if (!(outlier_probability >= 0.0 && outlier_probability < 1.0)) {
        throw std::invalid_argument("outlier_probability must lie in [0, 1)");
    }
    if (!(outlier_scale >= 1.0)) throw std::invalid_argument("outlier_scale must be >= 1");
    for (const auto* p : {&positive, &negative}) {
        if (!(p->contact_time_jitter >= 0.0) || !(p->peak_force_std >= 0.0) ||
            !(p->plateau_force_std >= 0.0)) {
            throw std::invalid_argument("class profile spreads must be non-negative");
        }
        if (!std::isfinite(p->contact_time_mean) || !std::isfinite(p->peak_force_mean) ||
            !std::isfinite(p->plateau_force_mean)) {
            throw std::invalid_argument("class profile means must be finite");
        }
    }
}

double class_separation(const GenParams& params) {
    const auto gap = [](double mp, double sp, double mn, double sn) {
        const double combined = std::hypot(sp, sn);
        const double diff = std::abs(mp - mn);
        if (combined == 0.0) return diff == 0.0 ? 0.0 : INFINITY;
        return diff / combined;
    };
    const auto& p = params.positive;
    const auto& n = params.negative;
    return std::min(gap(p.peak_force_mean, p.peak_force_std, n.peak_force_mean, n.peak_force_std),
                    gap(p.plateau_force_mean, p.plateau_force_std, n.plateau_force_mean,
                        n.plateau_force_std));
}

ProfileShape draw_shape(Label label, const GenParams& params, Rng& rng) {
    const auto& cls = params.profile(label);
    const double duration = static_cast<double>(params.n_samples) / params.sample_rate;
    ProfileShape s;
    s.contact_time = std::clamp(rng.normal(cls.contact_time_mean, cls.contact_time_jitter), 0.0,
                                0.9 * duration);
    s.peak_force = rng.normal(cls.peak_force_mean, cls.peak_force_std);
    s.plateau_force = rng.normal(cls.plateau_force_mean, cls.plateau_force_std);
    s.outlier = rng.bernoulli(params.outlier_probability);
    if (s.outlier) s.peak_force *= params.outlier_scale;
    return s;
}

std::vector<double> render_template(const ProfileShape& shape, const GenParams& params) {
    std::vector<double> out(params.n_samples, 0.0);
    for (std::size_t i = 0; i < params.n_samples; ++i) {
        const double s = static_cast<double>(i) / params.sample_rate - shape.contact_time;
        if (s < 0.0) continue;
        if (s < params.ramp_duration) {
            out[i] = shape.peak_force * 0.5 *
                     (1.0 - std::cos(std::numbers::pi * s / params.ramp_duration));
        } else {
            out[i] = shape.plateau_force + (shape.peak_force - shape.plateau_force) *
                                               std::exp(-(s - params.ramp_duration) /
                                                        params.relax_tau);
        }
    }
    return out;
}

LabeledTrial gen_trial(Label label, const GenParams& params, Rng& rng, std::string id) {
    params.validate();
    const auto shape = draw_shape(label, params, rng);
    LabeledTrial trial;
    trial.id = std::move(id);
    trial.truth = label;
    trial.trace.sample_rate = params.sample_rate;
    trial.trace.samples = render_template(shape, params);
    if (params.noise_std > 0.0) {
        for (auto& v : trial.trace.samples) v += params.noise_std * rng.normal();
    }
    return trial;
}

std::vector<LabeledTrial> gen_dataset(std::size_t n_pos, std::size_t n_neg,
                                      const GenParams& params, std::uint64_t seed) {
    params.validate();
    std::vector<Label> labels(n_pos, Label::Positive);
    labels.insert(labels.end(), n_neg, Label::Negative);
    Rng order_rng(derive_seed(seed, 0));
    for (std::size_t i = labels.size(); i > 1; --i) {
        std::swap(labels[i - 1], labels[static_cast<std::size_t>(order_rng.below(i))]);
    }

    std::vector<LabeledTrial> out;
    out.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        Rng rng(derive_seed(seed, i + 1));
        char id[32];
        std::snprintf(id, sizeof(id), "trial-%04zu", i);
        out.push_back(gen_trial(labels[i], params, rng, id));
    }
    return out;
}

}  // namespace forceknn
