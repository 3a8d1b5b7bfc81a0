#pragma once

// Hyper-parameter sweeps over (k, metric, l_value, training fraction).
//
// Static mode: each seed shuffles the trials and holds out a test split and a
// validation split, each test_fraction of the data; a train_fraction of the
// remaining pool is the k-NN dataset. Validation and test statistics are
// averaged over seeds.
//
// Online mode: every (k, metric, l_value) cell runs the replicated online loop
// on the whole trial set and reports run means.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forceknn/classifier.hpp"
#include "forceknn/online.hpp"

namespace forceknn {

enum class GridMode { Static, Online };

struct GridSpec {
    std::vector<std::size_t> k_values{5, 11, 15, 21, 25};
    std::vector<Metric> metrics{Metric::cosine(), Metric::euclidean(), Metric::manhattan(),
                                Metric::minkowski(3.0)};
    std::vector<double> l_values{50, 60, 70, 80, 90, 100};
    std::vector<double> train_fractions{0.15, 0.3, 0.45, 0.6, 0.75, 0.9, 1.0};

    GridMode mode = GridMode::Static;
    std::size_t seeds = 5;                    ///< static mode repetitions
    double test_fraction = 100.0 / 704.0;     ///< size of each held-out split
    /// Online mode: loop settings other than k, metric and l_value. The seed
    /// size used per cell is max(seed_size, 2k).
    LoopConfig loop;

    void validate() const;
};

struct GridCell {
    std::string split;  ///< "validation", "test" or "online"
    std::size_t k = 0;
    Metric metric;
    double l_value = 0.0;
    double train_fraction = 1.0;
    std::size_t train_size = 0;
    bool feasible = true;

    std::optional<double> precision;  ///< mean over repetitions where defined
    std::optional<double> recall;
    double uncertain_pct = 0.0;
    double tp = 0.0, fp = 0.0, tn = 0.0, fn = 0.0;
};

/// Cells ordered by (k, metric, l_value, train_fraction, split), each axis in
/// the order given by the GridSpec.
std::vector<GridCell> run_grid(std::span<const LabeledTrial> trials, const GridSpec& grid,
                               std::uint64_t base_seed);

struct SplitSizes {
    std::size_t test = 0;
    std::size_t validation = 0;
    std::size_t pool = 0;
};

SplitSizes split_sizes(std::size_t n, double test_fraction);
std::size_t train_size_for(std::size_t pool, double fraction);

void write_grid_csv(std::ostream& out, std::span<const GridCell> cells,
                    std::span<const std::string> echo);

}  // namespace forceknn
