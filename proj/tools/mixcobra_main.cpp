// Benchmark CLI: `bench` runs the repeated-split protocol, `sweep` the
// dimension-inflation study, `gen` exports a simulated dataset, and `tune`
// reports the cross-validation surfaces for one training split.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mixcobra/bench.hpp"
#include "mixcobra/io.hpp"

namespace {

using namespace mixcobra;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<bool> parallel;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file")->required();
    cmd->add_option("--seed", args.seed, "master seed (overrides the config)");
    cmd->add_option("--out", args.out_dir, "output directory (overrides the config)");
    cmd->add_option("--parallel", args.parallel, "run repetitions in parallel (true/false)");
}

ExperimentConfig load_config(const CommonArgs& args) {
    ExperimentConfig config = parse_config_file(args.config_path);
    if (args.seed) config.seed = *args.seed;
    if (!args.out_dir.empty()) config.out_dir = args.out_dir;
    if (args.parallel) config.parallel = *args.parallel;
    if (config.out_dir.empty()) config.out_dir = ".";
    return config;
}

std::string format_param(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

void write_wins_csv(const ErrorTable& table, const std::filesystem::path& path) {
    std::string text = "machine,wins\n";
    char buffer[64];
    for (std::size_t row = 0; row < table.row_count(); ++row) {
        if (row < table.is_aggregator.size() && table.is_aggregator[row]) continue;
        std::snprintf(buffer, sizeof(buffer), "%.6f", table.wins[row]);
        text += table.names[row] + "," + buffer + "\n";
    }
    write_text(path, text);
}

// Captures repetition-0 tuning surfaces for cv_surface.csv.
struct SurfaceCapture {
    std::map<std::string, std::string> rows;  // aggregator -> csv rows

    RepetitionObserver observer() {
        RepetitionObserver obs;
        obs.on_mixcobra_tuning = [this](std::size_t rep, const MixCobraTuningResult& result) {
            if (rep != 0) return;
            std::string text;
            char buffer[64];
            for (std::size_t a = 0; a < result.alpha_values.size(); ++a)
                for (std::size_t b = 0; b < result.beta_values.size(); ++b) {
                    std::snprintf(buffer, sizeof(buffer), "%.6f", result.cv_error_surface(a, b));
                    text += "mixcobra," + format_param(result.alpha_values[a]) + "," +
                            format_param(result.beta_values[b]) + "," + buffer + "\n";
                }
            rows["mixcobra"] = text;
        };
        obs.on_cobra_tuning = [this](std::size_t rep, const std::string& name,
                                     const CobraTuningResult& result) {
            if (rep != 0) return;
            std::string text;
            char buffer[64];
            for (std::size_t d = 0; d < result.delta_values.size(); ++d)
                for (std::size_t g = 0; g < result.gamma_values.size(); ++g) {
                    std::snprintf(buffer, sizeof(buffer), "%.6f", result.cv_error_surface(d, g));
                    text += name + "," + format_param(result.delta_values[d]) + "," +
                            format_param(result.gamma_values[g]) + "," + buffer + "\n";
                }
            rows[name] = text;
        };
        return obs;
    }

    std::string csv() const {
        std::string text = "aggregator,param1,param2,cv_error\n";
        for (const auto& [name, body] : rows) text += body;
        return text;
    }
};

void write_experiment_outputs(const ExperimentConfig& config, const ErrorTable& table,
                              const SurfaceCapture& surfaces, const std::string& suffix) {
    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    save_error_table(table, (dir / ("errors" + suffix + ".csv")).string());
    write_wins_csv(table, dir / ("wins" + suffix + ".csv"));
    if (!surfaces.rows.empty())
        write_text(dir / ("cv_surface" + suffix + ".csv"), surfaces.csv());
    write_text(dir / ("summary" + suffix + ".txt"), summary_text(table));
}

int run_bench(const CommonArgs& args) {
    const ExperimentConfig config = load_config(args);
    SurfaceCapture surfaces;
    const RepetitionObserver obs = surfaces.observer();
    const ErrorTable table = run_experiment(config, &obs);
    write_experiment_outputs(config, table, surfaces, "");
    std::cout << summary_text(table);
    return 0;
}

int run_sweep(const CommonArgs& args) {
    const ExperimentConfig config = load_config(args);
    if (config.extra_dims.empty())
        throw std::runtime_error("sweep requires 'extra_dims' in the config");
    const auto tables = run_dimension_sweep(config, config.extra_dims, nullptr);
    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    for (const auto& table : tables) {
        std::string suffix = "_" + table.label;  // "d=6" -> "_d6"
        suffix.erase(std::remove(suffix.begin(), suffix.end(), '='), suffix.end());
        save_error_table(table, (dir / ("errors" + suffix + ".csv")).string());
        write_wins_csv(table, dir / ("wins" + suffix + ".csv"));
        write_text(dir / ("summary" + suffix + ".txt"), summary_text(table));
        std::cout << summary_text(table) << "\n";
    }
    return 0;
}

int run_gen(const CommonArgs& args) {
    const ExperimentConfig config = load_config(args);
    if (!config.generator) throw std::runtime_error("gen requires a generator in the config");
    GeneratorSpec spec = *config.generator;
    spec.seed = config.seed;
    const Dataset data = generate(spec);
    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    const auto path = dir / (to_string(spec.name) + ".csv");
    save_dataset(data, path.string());
    std::cout << "wrote " << data.n() << " rows (d=" << data.dim() << ") to " << path.string()
              << "\n";
    return 0;
}

int run_tune(const CommonArgs& args) {
    ExperimentConfig config = load_config(args);
    config.repetitions = 1;  // tuning report for the first split
    config.parallel = false;
    SurfaceCapture surfaces;
    std::string report;
    RepetitionObserver obs = surfaces.observer();
    auto base_mix = obs.on_mixcobra_tuning;
    obs.on_mixcobra_tuning = [&](std::size_t rep, const MixCobraTuningResult& result) {
        base_mix(rep, result);
        char buffer[160];
        std::snprintf(buffer, sizeof(buffer), "mixcobra: alpha=%s beta=%s cv_error=%.6f\n",
                      format_param(result.best.alpha).c_str(),
                      format_param(result.best.beta).c_str(), result.best_error);
        report += buffer;
    };
    auto base_cobra = obs.on_cobra_tuning;
    obs.on_cobra_tuning = [&](std::size_t rep, const std::string& name,
                              const CobraTuningResult& result) {
        base_cobra(rep, name, result);
        char buffer[160];
        std::snprintf(buffer, sizeof(buffer), "%s: delta=%s gamma=%s cv_error=%.6f\n",
                      name.c_str(), format_param(result.best.delta).c_str(),
                      format_param(result.best.gamma).c_str(), result.best_error);
        report += buffer;
    };
    (void)run_experiment(config, &obs);

    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    write_text(dir / "cv_surface.csv", surfaces.csv());
    write_text(dir / "tune_report.txt", report);
    std::cout << report;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MixCobra benchmark harness"};
    app.require_subcommand(1);

    CommonArgs bench_args, sweep_args, gen_args, tune_args;
    add_common(app.add_subcommand("bench", "run the repeated-split benchmark"), bench_args);
    add_common(app.add_subcommand("sweep", "run the dimension-inflation sweep"), sweep_args);
    add_common(app.add_subcommand("gen", "export a simulated dataset as CSV"), gen_args);
    add_common(app.add_subcommand("tune", "report cross-validation surfaces"), tune_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("bench")) return run_bench(bench_args);
        if (app.got_subcommand("sweep")) return run_sweep(sweep_args);
        if (app.got_subcommand("gen")) return run_gen(gen_args);
        if (app.got_subcommand("tune")) return run_tune(tune_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
