#pragma once

// Synthetic insertion force profiles. The real insertion recordings are not
// available, so trials are drawn from a parametric two-class template:
//
//   approach   f = 0                                      t <  contact
//   ramp       f = peak * (1 - cos(pi * s / ramp)) / 2      s = t - contact < ramp
//   relax      f = plateau + (peak - plateau) * exp(-(s - ramp) / tau)
//
// plus i.i.d. Gaussian noise. Negative insertions leave the part higher, so
// by default they make contact earlier and press harder. With probability
// outlier_probability the peak is scaled by outlier_scale.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "forceknn/classifier.hpp"
#include "forceknn/online.hpp"
#include "forceknn/random.hpp"

namespace forceknn {

struct ClassProfile {
    double contact_time_mean = 0.8;    // s
    double contact_time_jitter = 0.05; // s (std)
    double peak_force_mean = 14.0;     // N
    double peak_force_std = 3.0;
    double plateau_force_mean = 8.0;
    double plateau_force_std = 1.5;
};

struct GenParams {
    std::size_t n_samples = 1000;
    double sample_rate = 500.0;
    double ramp_duration = 0.08;   // s
    double relax_tau = 0.15;       // s
    double noise_std = 0.6;        // N
    double outlier_probability = 0.03;
    double outlier_scale = 1.8;
    ClassProfile positive = default_positive();
    ClassProfile negative = default_negative();

    static ClassProfile default_positive();
    static ClassProfile default_negative();

    const ClassProfile& profile(Label label) const {
        return label == Label::Positive ? positive : negative;
    }
    void validate() const;
};

/// Smallest class gap among the peak and plateau distributions, in units of
/// the combined standard deviation sqrt(s_pos^2 + s_neg^2).
double class_separation(const GenParams& params);

/// Per-trial random draws that fix the noiseless template.
struct ProfileShape {
    double contact_time = 0.0;
    double peak_force = 0.0;  ///< already multiplied by outlier_scale for outliers
    double plateau_force = 0.0;
    bool outlier = false;
};

ProfileShape draw_shape(Label label, const GenParams& params, Rng& rng);
std::vector<double> render_template(const ProfileShape& shape, const GenParams& params);

/// draw_shape + render_template + noise, consuming rng in that order.
LabeledTrial gen_trial(Label label, const GenParams& params, Rng& rng, std::string id = {});

/// Deterministic shuffled stream of n_pos positive and n_neg negative trials.
/// Trial i is generated from its own sub-seed, so any subset can be
/// regenerated independently.
std::vector<LabeledTrial> gen_dataset(std::size_t n_pos, std::size_t n_neg,
                                      const GenParams& params, std::uint64_t seed);

}  // namespace forceknn
