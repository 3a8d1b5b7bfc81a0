#include "forceknn/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "forceknn/dataset_io.hpp"
#include "forceknn/datagen.hpp"
#include "forceknn/grid.hpp"
#include "forceknn/metrics.hpp"
#include "forceknn/online.hpp"
#include "forceknn/report.hpp"

namespace forceknn::cli {

namespace fs = std::filesystem;

namespace {

const CLI::Validator kMetricCheck(
    [](std::string& text) -> std::string {
        try {
            parse_metric(text);
        } catch (const std::exception& e) {
            return e.what();
        }
        return {};
    },
    "METRIC", "metric");

struct LoopFlags {
    std::size_t retrain_interval = 20;
    std::size_t seed_size = 22;
    double seed_min_positive_fraction = 0.5;
    std::size_t runs = 30;
    std::uint64_t rng_seed = 0;
    PreprocessConfig preprocess;
    unsigned threads = 0;
};

void add_loop_flags(CLI::App* app, LoopFlags& f) {
    app->add_option("--retrain-interval", f.retrain_interval, "Trials between snapshot refreshes")
        ->capture_default_str();
    app->add_option("--seed-size", f.seed_size, "Oracle-labelled bootstrap size")
        ->capture_default_str();
    app->add_option("--seed-min-positive", f.seed_min_positive_fraction,
                    "Minimum positive fraction of the bootstrap")
        ->capture_default_str();
    app->add_option("--runs", f.runs, "Replicated shuffled runs")->capture_default_str();
    app->add_option("--rng-seed", f.rng_seed, "Base seed for run shuffles")->capture_default_str();
    app->add_option("--sg-window", f.preprocess.sg_window, "Savitzky-Golay window (odd)")
        ->capture_default_str();
    app->add_option("--sg-order", f.preprocess.sg_order, "Savitzky-Golay polynomial order")
        ->capture_default_str();
    app->add_option("--ds-window", f.preprocess.ds_window, "Down-sampling window")
        ->capture_default_str();
    app->add_option("--ds-stride", f.preprocess.ds_stride, "Down-sampling stride")
        ->capture_default_str();
    app->add_option("--threads", f.threads, "Worker threads for replicated runs (0 = all)")
        ->capture_default_str();
}

LoopConfig loop_config(const LoopFlags& f) {
    LoopConfig cfg;
    cfg.retrain_interval = f.retrain_interval;
    cfg.seed_size = f.seed_size;
    cfg.seed_min_positive_fraction = f.seed_min_positive_fraction;
    cfg.n_runs = f.runs;
    cfg.rng_seed = f.rng_seed;
    cfg.preprocess = f.preprocess;
    return cfg;
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ';';
        if constexpr (std::is_floating_point_v<T>) {
            out += format_double(values[i]);
        } else if constexpr (std::is_same_v<T, std::string>) {
            out += values[i];
        } else {
            out += std::to_string(values[i]);
        }
    }
    return out;
}

std::string loop_echo(const LoopFlags& f) {
    std::ostringstream s;
    s << "retrain_interval=" << f.retrain_interval << " seed_size=" << f.seed_size
      << " seed_min_positive=" << format_double(f.seed_min_positive_fraction)
      << " runs=" << f.runs << " rng_seed=" << f.rng_seed
      << " sg_window=" << f.preprocess.sg_window << " sg_order=" << f.preprocess.sg_order
      << " ds_window=" << f.preprocess.ds_window << " ds_stride=" << f.preprocess.ds_stride;
    return s.str();
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

// --- gen -------------------------------------------------------------------

struct GenFlags {
    std::size_t n_pos = 297;
    std::size_t n_neg = 407;
    std::string out;
    std::uint64_t rng_seed = 0;
    bool force = false;
    GenParams params;
};

int cmd_gen(const GenFlags& f, std::ostream& out, std::ostream& err) {
    if (fs::exists(f.out) && !f.force) {
        err << "error: '" << f.out << "' exists; pass --force to overwrite\n";
        return kBadArguments;
    }
    const auto& p = f.params;
    p.validate();
    const auto trials = gen_dataset(f.n_pos, f.n_neg, p, f.rng_seed);

    std::ostringstream echo;
    echo << "forceknn gen n_pos=" << f.n_pos << " n_neg=" << f.n_neg
         << " rng_seed=" << f.rng_seed << " n_samples=" << p.n_samples
         << " sample_rate=" << format_double(p.sample_rate)
         << " noise_std=" << format_double(p.noise_std)
         << " outlier_probability=" << format_double(p.outlier_probability)
         << " outlier_scale=" << format_double(p.outlier_scale);
    const std::vector<std::string> comments{echo.str()};

    auto file = open_output(f.out);
    write_dataset(file, trials, p.n_samples, p.sample_rate, comments);
    file.flush();
    if (!file) throw DataError("failed writing '" + f.out + "'");
    out << "wrote " << trials.size() << " trials to " << f.out << '\n';
    return kSuccess;
}

// --- online ----------------------------------------------------------------

struct OnlineFlags {
    std::string dataset;
    std::string out_dir;
    std::size_t k = 11;
    std::string metric = "cosine";
    std::vector<double> l_values{100.0, 50.0};
    std::size_t window = 100;
    TimeModel time;
    LoopFlags loop;
};

int cmd_online(const OnlineFlags& f, std::ostream& out) {
    const auto ds = read_dataset_file(f.dataset);
    LoopConfig cfg = loop_config(f.loop);
    cfg.k = f.k;
    cfg.metric = parse_metric(f.metric);
    f.time.validate();
    for (const double l : f.l_values) {
        cfg.l_value = l;
        cfg.validate();
    }
    if (ds.trials.size() <= cfg.seed_size) {
        throw std::invalid_argument("dataset has " + std::to_string(ds.trials.size()) +
                                    " trials; the loop needs more than seed_size = " +
                                    std::to_string(cfg.seed_size));
    }

    std::ostringstream echo;
    echo << "forceknn online dataset=" << f.dataset << " k=" << f.k
         << " metric=" << to_string(cfg.metric) << " l_values=" << join(f.l_values) << ' '
         << loop_echo(f.loop) << " window=" << f.window
         << " iteration_cost=" << format_double(f.time.iteration_cost)
         << " verification_cost=" << format_double(f.time.verification_cost);
    const std::vector<std::string> echo_lines{echo.str()};

    fs::create_directories(f.out_dir);
    const fs::path dir(f.out_dir);
    auto records = open_output(dir / "records.jsonl");
    auto summary = open_output(dir / "summary.csv");
    auto window = open_output(dir / "window.csv");
    write_summary_header(summary, echo_lines);
    write_window_header(window, echo_lines);

    for (const double l : f.l_values) {
        cfg.l_value = l;
        const auto reports = run_replicated(ds.trials, cfg, f.loop.threads);
        write_records_jsonl(records, reports);
        const auto row = summarize_runs(reports);
        write_summary_row(summary, row, f.time, ds.trials.size());
        write_window_rows(window, l, mean_window_series(reports, f.window, f.time));
        out << "l_value=" << format_double(l) << " mean_verifications="
            << format_double(row.mean_verifications) << " mean_precision="
            << (row.mean_precision ? format_double(*row.mean_precision) : "undefined") << '\n';
    }
    for (auto* s : {&records, &summary, &window}) {
        s->flush();
        if (!*s) throw DataError("failed writing outputs to '" + f.out_dir + "'");
    }
    return kSuccess;
}

// --- grid ------------------------------------------------------------------

struct GridFlags {
    std::string dataset;
    std::string out;
    std::string mode = "static";
    std::vector<std::size_t> k_values{5, 11, 15, 21, 25};
    std::vector<std::string> metrics{"cosine", "euclidean", "manhattan", "minkowski"};
    std::vector<double> l_values{50, 60, 70, 80, 90, 100};
    std::vector<double> train_fractions{0.15, 0.3, 0.45, 0.6, 0.75, 0.9, 1.0};
    std::size_t seeds = 5;
    LoopFlags loop;
};

int cmd_grid(const GridFlags& f, std::ostream& out) {
    const auto ds = read_dataset_file(f.dataset);
    GridSpec grid;
    grid.mode = f.mode == "online" ? GridMode::Online : GridMode::Static;
    grid.k_values = f.k_values;
    grid.metrics.clear();
    for (const auto& m : f.metrics) grid.metrics.push_back(parse_metric(m));
    grid.l_values = f.l_values;
    grid.train_fractions = f.train_fractions;
    grid.seeds = f.seeds;
    grid.loop = loop_config(f.loop);

    std::vector<std::string> metric_names;
    for (const auto& m : grid.metrics) metric_names.push_back(to_string(m));
    std::ostringstream echo;
    echo << "forceknn grid dataset=" << f.dataset << " mode=" << f.mode
         << " k=" << join(f.k_values) << " metrics=" << join(metric_names)
         << " l_values=" << join(f.l_values) << " train_fractions=" << join(f.train_fractions)
         << " seeds=" << f.seeds << ' ' << loop_echo(f.loop);
    const std::vector<std::string> echo_lines{echo.str()};

    const auto cells = run_grid(ds.trials, grid, f.loop.rng_seed);
    if (!f.out.empty() && f.out != "-") {
        const fs::path path(f.out);
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        auto file = open_output(path);
        write_grid_csv(file, cells, echo_lines);
        file.flush();
        if (!file) throw DataError("failed writing '" + f.out + "'");
        out << "wrote " << cells.size() << " grid cells to " << f.out << '\n';
    } else {
        write_grid_csv(out, cells, echo_lines);
    }
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Force-profile insertion classification with abstaining k-NN", "forceknn"};
    app.require_subcommand(1);
    // Keys for a subcommand go under its section, e.g. [online] or online.k.
    app.set_config("--config", "", "TOML/INI configuration file");
    app.fallthrough();

    GenFlags gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic insertion dataset");
    gen_cmd->add_option("n_pos", gen.n_pos, "Positive trials")->capture_default_str();
    gen_cmd->add_option("n_neg", gen.n_neg, "Negative trials")->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "Dataset file to write")->required();
    gen_cmd->add_option("--rng-seed", gen.rng_seed, "Generator seed")->capture_default_str();
    gen_cmd->add_flag("--force", gen.force, "Overwrite an existing file");
    gen_cmd->add_option("--n-samples", gen.params.n_samples, "Samples per trace")
        ->capture_default_str();
    gen_cmd->add_option("--sample-rate", gen.params.sample_rate, "Sample rate (Hz)")
        ->capture_default_str();
    gen_cmd->add_option("--noise-std", gen.params.noise_std, "Sensor noise std (N)")
        ->capture_default_str();
    gen_cmd->add_option("--outlier-probability", gen.params.outlier_probability,
                        "Probability of a scaled-peak outlier")
        ->capture_default_str();
    gen_cmd->add_option("--outlier-scale", gen.params.outlier_scale, "Outlier peak multiplier")
        ->capture_default_str();

    OnlineFlags online;
    auto* online_cmd = app.add_subcommand("online", "Replay the online self-supervised loop");
    online_cmd->add_option("dataset", online.dataset, "Dataset file")->required();
    online_cmd->add_option("--out", online.out_dir, "Output directory")->required();
    online_cmd->add_option("--k", online.k, "Neighbours")->capture_default_str();
    online_cmd->add_option("--metric", online.metric, "cosine|euclidean|manhattan|minkowski[:p]")
        ->check(kMetricCheck)
        ->capture_default_str();
    online_cmd->add_option("--l-value", online.l_values, "Agreement threshold(s) in percent")
        ->capture_default_str();
    online_cmd->add_option("--window", online.window, "Sliding window length")
        ->capture_default_str();
    online_cmd->add_option("--iteration-cost", online.time.iteration_cost, "Seconds per iteration")
        ->capture_default_str();
    online_cmd->add_option("--verification-cost", online.time.verification_cost,
                           "Seconds per verification")
        ->capture_default_str();
    add_loop_flags(online_cmd, online.loop);

    GridFlags grid;
    auto* grid_cmd = app.add_subcommand("grid", "Grid search over k, metric, l-Value and training size");
    grid_cmd->add_option("dataset", grid.dataset, "Dataset file")->required();
    grid_cmd->add_option("--out", grid.out, "CSV output (default stdout)");
    grid_cmd->add_option("--mode", grid.mode, "static (held-out splits) or online")
        ->check(CLI::IsMember({"static", "online"}))
        ->capture_default_str();
    grid_cmd->add_option("--k", grid.k_values, "Neighbour counts")->capture_default_str();
    grid_cmd->add_option("--metric", grid.metrics, "Metrics")
        ->check(kMetricCheck)
        ->capture_default_str();
    grid_cmd->add_option("--l-value", grid.l_values, "Agreement thresholds")->capture_default_str();
    grid_cmd->add_option("--train-fraction", grid.train_fractions, "Training-pool fractions")
        ->capture_default_str();
    grid_cmd->add_option("--seeds", grid.seeds, "Static-mode repetitions")->capture_default_str();
    add_loop_flags(grid_cmd, grid.loop);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kBadArguments;
    }

    try {
        if (*gen_cmd) return cmd_gen(gen, out, err);
        if (*online_cmd) return cmd_online(online, out);
        if (*grid_cmd) return cmd_grid(grid, out);
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::invalid_argument& e) {
        err << "infeasible configuration: " << e.what() << '\n';
        return kInfeasibleConfig;
    } catch (const fs::filesystem_error& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    }
    return kBadArguments;
}

}  // namespace forceknn::cli
