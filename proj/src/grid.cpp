#include "forceknn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "forceknn/dataset_io.hpp"
#include "forceknn/metrics.hpp"

namespace forceknn {

void GridSpec::validate() const {
    if (k_values.empty() || metrics.empty() || l_values.empty() || train_fractions.empty()) {
        throw std::invalid_argument("grid axes must be non-empty");
    }
    for (const auto k : k_values) {
        if (k == 0) throw std::invalid_argument("grid k values must be positive");
    }
    for (const auto l : l_values) {
        if (!(l >= 50.0 && l <= 100.0)) throw std::invalid_argument("grid l values must lie in [50, 100]");
    }
    for (const auto f : train_fractions) {
        if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("train fractions must lie in (0, 1]");
    }
    if (mode == GridMode::Static) {
        if (seeds == 0) throw std::invalid_argument("grid seeds must be positive");
        if (!(test_fraction > 0.0 && test_fraction < 0.5)) {
            throw std::invalid_argument("test_fraction must lie in (0, 0.5)");
        }
    }
}

SplitSizes split_sizes(std::size_t n, double test_fraction) {
    SplitSizes s;
    s.test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    s.validation = s.test;
    s.pool = n - std::min(n, s.test + s.validation);
    return s;
}

std::size_t train_size_for(std::size_t pool, double fraction) {
    return std::min(pool, static_cast<std::size_t>(std::llround(static_cast<double>(pool) * fraction)));
}

namespace {

struct Accumulator {
    std::size_t reps = 0;
    double prec_sum = 0.0, rec_sum = 0.0;
    std::size_t prec_n = 0, rec_n = 0;
    double unc_pct_sum = 0.0;
    double tp = 0, fp = 0, tn = 0, fn = 0;

    void add(const ConfusionCounts& c, std::size_t evaluated) {
        ++reps;
        if (const auto p = precision(c)) {
            prec_sum += *p;
            ++prec_n;
        }
        if (const auto r = recall(c)) {
            rec_sum += *r;
            ++rec_n;
        }
        unc_pct_sum += 100.0 * static_cast<double>(c.uncertain) / static_cast<double>(evaluated);
        tp += static_cast<double>(c.tp);
        fp += static_cast<double>(c.fp);
        tn += static_cast<double>(c.tn);
        fn += static_cast<double>(c.fn);
    }

    void finish(GridCell& cell) const {
        if (reps == 0) return;
        const auto r = static_cast<double>(reps);
        if (prec_n > 0) cell.precision = prec_sum / static_cast<double>(prec_n);
        if (rec_n > 0) cell.recall = rec_sum / static_cast<double>(rec_n);
        cell.uncertain_pct = unc_pct_sum / r;
        cell.tp = tp / r;
        cell.fp = fp / r;
        cell.tn = tn / r;
        cell.fn = fn / r;
    }
};

std::vector<GridCell> run_static(std::span<const LabeledTrial> trials, const GridSpec& grid,
                                 std::uint64_t base_seed) {
    const std::size_t n = trials.size();
    const auto sizes = split_sizes(n, grid.test_fraction);
    if (sizes.test == 0 || sizes.pool == 0) {
        throw std::invalid_argument("dataset too small for a train/validation/test split");
    }
    std::vector<FeatureVector> features;
    features.reserve(n);
    for (const auto& t : trials) features.push_back(preprocess(t.trace, grid.loop.preprocess));

    const std::size_t max_k = *std::max_element(grid.k_values.begin(), grid.k_values.end());
    const std::size_t n_k = grid.k_values.size(), n_m = grid.metrics.size(),
                      n_l = grid.l_values.size(), n_f = grid.train_fractions.size();
    // Index: ((((k * M) + m) * L + l) * F + f) * 2 + split.
    std::vector<Accumulator> acc(n_k * n_m * n_l * n_f * 2);
    const auto slot = [&](std::size_t ki, std::size_t mi, std::size_t li, std::size_t fi,
                          std::size_t split) {
        return (((ki * n_m + mi) * n_l + li) * n_f + fi) * 2 + split;
    };

    for (std::size_t seed = 0; seed < grid.seeds; ++seed) {
        const auto order = run_permutation(n, base_seed, seed);
        const std::span<const std::size_t> test_idx(order.data(), sizes.test);
        const std::span<const std::size_t> val_idx(order.data() + sizes.test, sizes.validation);
        const std::span<const std::size_t> pool_idx(order.data() + sizes.test + sizes.validation,
                                                    sizes.pool);

        for (std::size_t fi = 0; fi < n_f; ++fi) {
            const std::size_t m = train_size_for(sizes.pool, grid.train_fractions[fi]);
            const std::size_t k_eff = std::min(max_k, m);
            if (k_eff == 0) continue;
            std::vector<LabeledSample> train;
            train.reserve(m);
            for (std::size_t i = 0; i < m; ++i) {
                train.push_back({features[pool_idx[i]], trials[pool_idx[i]].truth});
            }

            for (std::size_t mi = 0; mi < n_m; ++mi) {
                // The (distance, index) order is total, so the k nearest are a
                // prefix of the k_eff nearest for every k <= k_eff.
                const KnnModel model(train, KnnParams{k_eff, grid.metrics[mi], 50.0});
                for (std::size_t split = 0; split < 2; ++split) {
                    const auto eval = split == 0 ? val_idx : test_idx;
                    std::vector<std::vector<Label>> neighbours;
                    neighbours.reserve(eval.size());
                    for (const auto idx : eval) neighbours.push_back(model.nearest_labels(features[idx]));

                    for (std::size_t ki = 0; ki < n_k; ++ki) {
                        const std::size_t k = grid.k_values[ki];
                        if (k > m) continue;
                        for (std::size_t li = 0; li < n_l; ++li) {
                            ConfusionCounts c;
                            for (std::size_t e = 0; e < eval.size(); ++e) {
                                const auto d = decide(std::span(neighbours[e]).first(k),
                                                      grid.l_values[li]);
                                if (const auto label = to_label(d)) {
                                    tally(c, *label, trials[eval[e]].truth);
                                } else {
                                    ++c.uncertain;
                                }
                            }
                            acc[slot(ki, mi, li, fi, split)].add(c, eval.size());
                        }
                    }
                }
            }
        }
    }

    std::vector<GridCell> cells;
    for (std::size_t ki = 0; ki < n_k; ++ki) {
        for (std::size_t mi = 0; mi < n_m; ++mi) {
            for (std::size_t li = 0; li < n_l; ++li) {
                for (std::size_t fi = 0; fi < n_f; ++fi) {
                    for (std::size_t split = 0; split < 2; ++split) {
                        GridCell cell;
                        cell.split = split == 0 ? "validation" : "test";
                        cell.k = grid.k_values[ki];
                        cell.metric = grid.metrics[mi];
                        cell.l_value = grid.l_values[li];
                        cell.train_fraction = grid.train_fractions[fi];
                        cell.train_size = train_size_for(sizes.pool, cell.train_fraction);
                        cell.feasible = cell.train_size >= cell.k;
                        acc[slot(ki, mi, li, fi, split)].finish(cell);
                        cells.push_back(std::move(cell));
                    }
                }
            }
        }
    }
    return cells;
}

std::vector<GridCell> run_online_grid(std::span<const LabeledTrial> trials, const GridSpec& grid,
                                      std::uint64_t base_seed) {
    std::vector<GridCell> cells;
    for (const auto k : grid.k_values) {
        for (const auto& metric : grid.metrics) {
            for (const auto l : grid.l_values) {
                LoopConfig cfg = grid.loop;
                cfg.k = k;
                cfg.metric = metric;
                cfg.l_value = l;
                cfg.seed_size = std::max(cfg.seed_size, 2 * k);
                cfg.rng_seed = base_seed;

                GridCell cell;
                cell.split = "online";
                cell.k = k;
                cell.metric = metric;
                cell.l_value = l;
                cell.train_fraction = 1.0;
                cell.train_size = trials.size();
                cell.feasible = trials.size() > cfg.seed_size;
                if (cell.feasible) {
                    const auto reports = run_replicated(trials, cfg);
                    const auto row = summarize_runs(reports);
                    cell.precision = row.mean_precision;
                    cell.recall = row.mean_recall;
                    cell.uncertain_pct =
                        100.0 * row.mean_verifications / static_cast<double>(trials.size());
                    cell.tp = row.mean_tp;
                    cell.fp = row.mean_fp;
                    cell.tn = row.mean_tn;
                    cell.fn = row.mean_fn;
                }
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

}  // namespace

std::vector<GridCell> run_grid(std::span<const LabeledTrial> trials, const GridSpec& grid,
                               std::uint64_t base_seed) {
    grid.validate();
    grid.loop.preprocess.validate();
    return grid.mode == GridMode::Static ? run_static(trials, grid, base_seed)
                                         : run_online_grid(trials, grid, base_seed);
}

void write_grid_csv(std::ostream& out, std::span<const GridCell> cells,
                    std::span<const std::string> echo) {
    for (const auto& line : echo) out << "# " << line << '\n';
    out << "split,k,metric,l_value,train_fraction,train_size,status,precision,recall,"
           "uncertain_pct,tp,fp,tn,fn\n";
    const auto opt = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string("undefined");
    };
    for (const auto& c : cells) {
        out << c.split << ',' << c.k << ',' << to_string(c.metric) << ','
            << format_double(c.l_value) << ',' << format_double(c.train_fraction) << ','
            << c.train_size << ',';
        if (!c.feasible) {
            out << "infeasible,,,,,,,\n";
            continue;
        }
        out << "ok," << opt(c.precision) << ',' << opt(c.recall) << ','
            << format_double(c.uncertain_pct) << ',' << format_double(c.tp) << ','
            << format_double(c.fp) << ',' << format_double(c.tn) << ',' << format_double(c.fn)
            << '\n';
    }
}

}  // namespace forceknn
