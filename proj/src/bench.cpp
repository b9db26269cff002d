#include "mixcobra/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mixcobra/combine.hpp"
#include "mixcobra/io.hpp"
#include "mixcobra/rng.hpp"

namespace mixcobra {

namespace {

// Substream tags for per-repetition seed derivation. Every random decision
// inside a repetition draws from its own stream, so parallel and sequential
// schedules produce identical results.
enum SeedStream : std::uint64_t {
    stream_generate = 1,
    stream_split = 2,
    stream_fit = 3,
    stream_cv_mixcobra = 4,
    stream_cv_cobra_fixed = 5,
    stream_cv_cobra_adaptive = 6,
    stream_inflate = 7,
};

double column_test_error(const MachinePredictions& preds, std::size_t column,
                         const Dataset& test) {
    double total = 0.0;
    for (std::size_t i = 0; i < test.n(); ++i) {
        const double pred = preds.values(i, column);
        if (test.task == Task::classification) {
            total += pred != test.targets[i] ? 1.0 : 0.0;
        } else {
            const double err = pred - test.targets[i];
            total += err * err;
        }
    }
    return total / static_cast<double>(test.n());
}

struct RepetitionResult {
    std::vector<double> errors;  // aligned with the table rows
};

// Immutable inputs shared by all repetitions.
struct ExperimentPlan {
    explicit ExperimentPlan(const ExperimentConfig& c) : config(c) {}

    const ExperimentConfig& config;
    std::optional<Dataset> file_data;
    std::optional<MachinePredictions> file_preds;
    std::size_t extra_dims = 0;

    std::vector<std::string> row_names;
    std::vector<char> row_is_aggregator;
    std::size_t base_machine_count = 0;
};

ExperimentPlan build_plan(const ExperimentConfig& config, std::size_t extra_dims) {
    config.validate();
    ExperimentPlan plan(config);
    plan.extra_dims = extra_dims;

    if (!config.dataset_path.empty()) {
        plan.file_data = load_dataset(config.dataset_path, config.task);
        if (!config.predictions_path.empty()) {
            plan.file_preds = load_predictions(config.predictions_path, plan.file_data->n());
            plan.file_preds->validate(config.task);
        }
    }

    for (const auto& spec : config.machines) plan.row_names.push_back(spec.default_name());
    if (plan.file_preds)
        for (const auto& name : plan.file_preds->machine_names) plan.row_names.push_back(name);
    plan.base_machine_count = plan.row_names.size();
    plan.row_is_aggregator.assign(plan.row_names.size(), 0);

    if (config.use_cobra_fixed) {
        plan.row_names.push_back("cobra_fixed");
        plan.row_is_aggregator.push_back(1);
    }
    if (config.use_cobra_adaptive) {
        plan.row_names.push_back("cobra_adaptive");
        plan.row_is_aggregator.push_back(1);
    }
    if (config.use_mixcobra) {
        plan.row_names.push_back("mixcobra");
        plan.row_is_aggregator.push_back(1);
    }
    return plan;
}

// Builds the repetition's data: generated or loaded, inflated, split,
// optionally standardized, with machine predictions over both parts.
struct RepetitionData {
    Dataset train;
    Dataset test;
    MachinePredictions train_preds;
    MachinePredictions test_preds;
};

RepetitionData prepare_repetition(const ExperimentPlan& plan, std::uint64_t rep_seed) {
    const ExperimentConfig& config = plan.config;

    Dataset full;
    if (config.generator) {
        GeneratorSpec spec = *config.generator;
        spec.seed = derive_seed(rep_seed, stream_generate);
        spec.noise_dims = 0;
        full = generate(spec);
    } else {
        full = *plan.file_data;
    }
    if (plan.extra_dims > 0)
        full = inflate_dims(full, plan.extra_dims,
                            derive_seed(rep_seed, stream_inflate + plan.extra_dims));

    const auto [train_idx, test_idx] =
        split_indices(full.n(), config.effective_train_fraction(),
                      derive_seed(rep_seed, stream_split));

    RepetitionData rep;
    rep.train = full.subset(train_idx);
    rep.test = full.subset(test_idx);

    if (config.effective_standardize()) {
        auto [train_std, transform] = standardize(rep.train);
        rep.train = std::move(train_std);
        rep.test = transform.apply(rep.test);
    }

    // built-in machines, fitted on the training part only
    std::vector<std::unique_ptr<FittedMachine>> machines;
    const std::uint64_t fit_base = derive_seed(rep_seed, stream_fit);
    for (std::size_t m = 0; m < config.machines.size(); ++m)
        machines.push_back(fit(config.machines[m], rep.train, derive_seed(fit_base, m)));

    if (!machines.empty()) {
        rep.train_preds = predict_matrix(machines, rep.train);
        rep.test_preds = predict_matrix(machines, rep.test);
    } else {
        rep.train_preds.values = Matrix(rep.train.n(), 0);
        rep.test_preds.values = Matrix(rep.test.n(), 0);
    }

    if (plan.file_preds) {
        const MachinePredictions train_ext = plan.file_preds->subset(train_idx);
        const MachinePredictions test_ext = plan.file_preds->subset(test_idx);
        auto append = [](MachinePredictions& dst, const MachinePredictions& src) {
            Matrix merged(dst.values.rows(), dst.values.cols() + src.values.cols());
            for (std::size_t i = 0; i < merged.rows(); ++i) {
                for (std::size_t c = 0; c < dst.values.cols(); ++c) merged(i, c) = dst.values(i, c);
                for (std::size_t c = 0; c < src.values.cols(); ++c)
                    merged(i, dst.values.cols() + c) = src.values(i, c);
            }
            dst.values = std::move(merged);
            dst.machine_names.insert(dst.machine_names.end(), src.machine_names.begin(),
                                     src.machine_names.end());
        };
        append(rep.train_preds, train_ext);
        append(rep.test_preds, test_ext);
    }
    return rep;
}

RepetitionResult run_repetition(const ExperimentPlan& plan, std::size_t rep_index,
                                const RepetitionObserver* observer, std::mutex* observer_mutex) {
    const ExperimentConfig& config = plan.config;
    const std::uint64_t rep_seed = derive_seed(config.seed, rep_index);
    const RepetitionData rep = prepare_repetition(plan, rep_seed);
    const bool classify = config.task == Task::classification;

    if (observer && observer->on_split) {
        std::lock_guard lock(*observer_mutex);
        observer->on_split(rep_index, rep.train, rep.test);
    }

    RepetitionResult result;
    for (std::size_t m = 0; m < plan.base_machine_count; ++m)
        result.errors.push_back(column_test_error(rep.test_preds, m, rep.test));

    auto cobra_error = [&](const CobraParams& params) {
        double total = 0.0;
        for (std::size_t i = 0; i < rep.test.n(); ++i) {
            const auto qp = rep.test_preds.row(i);
            if (classify) {
                const int label = cobra_predict_class(qp, rep.train, rep.train_preds, params);
                total += label != rep.test.targets[i] ? 1.0 : 0.0;
            } else {
                const double pred = cobra_predict_regression(qp, rep.train, rep.train_preds, params);
                const double err = pred - rep.test.targets[i];
                total += err * err;
            }
        }
        return total / static_cast<double>(rep.test.n());
    };

    auto run_cobra = [&](bool adaptive) {
        CobraGrid grid = default_cobra_grid(rep.train_preds);
        if (!config.delta_grid.empty()) grid.delta_values = config.delta_grid;
        if (adaptive) {
            if (!config.gamma_grid.empty()) grid.gamma_values = config.gamma_grid;
        } else {
            grid.gamma_values = {1.0};  // Cobra with all machines
        }
        grid.folds = config.folds;
        const auto tuned = cross_validate_cobra(
            rep.train, rep.train_preds, grid,
            derive_seed(rep_seed, adaptive ? stream_cv_cobra_adaptive : stream_cv_cobra_fixed));
        if (observer && observer->on_cobra_tuning) {
            std::lock_guard lock(*observer_mutex);
            observer->on_cobra_tuning(rep_index, adaptive ? "cobra_adaptive" : "cobra_fixed", tuned);
        }
        result.errors.push_back(cobra_error(tuned.best));
    };

    if (config.use_cobra_fixed) run_cobra(false);
    if (config.use_cobra_adaptive) run_cobra(true);

    if (config.use_mixcobra) {
        MixCobraGrid grid = default_mixcobra_grid(rep.train, rep.train_preds);
        if (!config.alpha_grid.empty()) grid.alpha_values = config.alpha_grid;
        if (!config.beta_grid.empty()) grid.beta_values = config.beta_grid;
        grid.folds = config.folds;
        const auto tuned = cross_validate_mixcobra(rep.train, rep.train_preds, grid, config.kernel,
                                                   derive_seed(rep_seed, stream_cv_mixcobra));
        if (observer && observer->on_mixcobra_tuning) {
            std::lock_guard lock(*observer_mutex);
            observer->on_mixcobra_tuning(rep_index, tuned);
        }
        double total = 0.0;
        for (std::size_t i = 0; i < rep.test.n(); ++i) {
            const auto x = rep.test.point(i);
            const auto qp = rep.test_preds.row(i);
            if (classify) {
                const int label = mixcobra_predict_class(x, qp, rep.train, rep.train_preds,
                                                         tuned.best, config.kernel);
                total += label != rep.test.targets[i] ? 1.0 : 0.0;
            } else {
                const double pred = mixcobra_predict_regression(x, qp, rep.train, rep.train_preds,
                                                                tuned.best, config.kernel);
                const double err = pred - rep.test.targets[i];
                total += err * err;
            }
        }
        result.errors.push_back(total / static_cast<double>(rep.test.n()));
    }
    return result;
}

// Fractional win counts over base machines: ties for the repetition minimum
// split the win so totals sum to exactly K.
std::vector<double> count_wins(const ErrorTable& table, std::size_t base_machine_count) {
    std::vector<double> wins(table.row_count(), 0.0);
    if (base_machine_count == 0) return wins;
    for (std::size_t r = 0; r < table.repetitions(); ++r) {
        double best = table.errors(0, r);
        for (std::size_t m = 1; m < base_machine_count; ++m)
            best = std::min(best, table.errors(m, r));
        std::vector<std::size_t> tied;
        for (std::size_t m = 0; m < base_machine_count; ++m)
            if (table.errors(m, r) == best) tied.push_back(m);
        for (auto m : tied) wins[m] += 1.0 / static_cast<double>(tied.size());
    }
    return wins;
}

ErrorTable run_levels(const ExperimentConfig& config, std::size_t extra_dims,
                      const RepetitionObserver* observer) {
    const ExperimentPlan plan = build_plan(config, extra_dims);
    const std::size_t reps = config.repetitions;

    std::vector<RepetitionResult> results(reps);
    std::mutex observer_mutex;

    auto worker_body = [&](std::size_t rep) {
        results[rep] = run_repetition(plan, rep, observer, &observer_mutex);
    };

    if (config.parallel && reps > 1) {
        const unsigned workers =
            std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                               static_cast<unsigned>(reps));
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t rep = next.fetch_add(1);
                    if (rep >= reps) return;
                    try {
                        worker_body(rep);
                    } catch (const std::exception& e) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::make_exception_ptr(std::runtime_error(
                                "repetition " + std::to_string(rep) + " failed: " + e.what()));
                        return;
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    } else {
        for (std::size_t rep = 0; rep < reps; ++rep) {
            try {
                worker_body(rep);
            } catch (const std::exception& e) {
                throw std::runtime_error("repetition " + std::to_string(rep) + " failed: " +
                                         e.what());
            }
        }
    }

    ErrorTable table;
    table.names = plan.row_names;
    table.is_aggregator = plan.row_is_aggregator;
    table.errors = Matrix(plan.row_names.size(), reps);
    for (std::size_t rep = 0; rep < reps; ++rep)
        for (std::size_t row = 0; row < plan.row_names.size(); ++row)
            table.errors(row, rep) = results[rep].errors[row];
    table.wins = count_wins(table, plan.base_machine_count);
    return table;
}

}  // namespace

double ExperimentConfig::effective_train_fraction() const {
    if (train_fraction) return *train_fraction;
    return task == Task::classification ? 0.75 : 2.0 / 3.0;
}

bool ExperimentConfig::effective_standardize() const {
    if (standardize_features) return *standardize_features;
    return task == Task::regression;
}

void ExperimentConfig::validate() const {
    if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
    const double f = effective_train_fraction();
    if (!(f > 0.0) || !(f < 1.0)) throw std::invalid_argument("train fraction must lie in (0, 1)");
    if (folds < 2) throw std::invalid_argument("folds must be at least 2");
    const bool has_generator = generator.has_value();
    const bool has_file = !dataset_path.empty();
    if (has_generator == has_file)
        throw std::invalid_argument("configure exactly one data source (generator or dataset)");
    if (has_generator && !predictions_path.empty())
        throw std::invalid_argument("external predictions require a dataset file");
    if (machines.empty() && predictions_path.empty())
        throw std::invalid_argument("at least one machine is required");
    if (generator) {
        const bool classification_gen = generator->name != GeneratorName::synth_regression;
        if (classification_gen != (task == Task::classification))
            throw std::invalid_argument("generator task does not match configured task");
    }
}

ErrorTable run_experiment(const ExperimentConfig& config, const RepetitionObserver* observer) {
    std::size_t extra = config.generator ? config.generator->noise_dims : 0;
    return run_levels(config, extra, observer);
}

std::vector<ErrorTable> run_dimension_sweep(const ExperimentConfig& config,
                                            const std::vector<std::size_t>& extra_dims,
                                            const RepetitionObserver* observer) {
    if (config.task != Task::regression)
        throw std::invalid_argument("dimension sweeps are defined for regression tasks");
    if (extra_dims.empty()) throw std::invalid_argument("no inflation levels given");
    if (config.generator && config.generator->noise_dims != 0)
        throw std::invalid_argument("sweep levels replace generator noise_dims; set it to 0");

    std::size_t base_dim = 6;  // synth_regression
    if (!config.dataset_path.empty())
        base_dim = load_dataset(config.dataset_path, config.task).dim();

    std::vector<ErrorTable> tables;
    tables.reserve(extra_dims.size());
    for (std::size_t extra : extra_dims) {
        ErrorTable table = run_levels(config, extra, observer);
        table.label = "d=" + std::to_string(base_dim + extra);
        tables.push_back(std::move(table));
    }
    return tables;
}

namespace {

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t");
    return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config key '" + key + "' expects true/false, got '" + value + "'");
}

std::vector<double> parse_double_list(const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(std::stod(item));
    return out;
}

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");

    ExperimentConfig config;
    config.use_mixcobra = false;  // aggregators come solely from the config
    bool aggregators_given = false;
    std::optional<GeneratorSpec> generator;
    std::string line;
    std::size_t line_number = 0;

    while (std::getline(in, line)) {
        ++line_number;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_number) +
                                     " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "task") {
            config.task = task_from_string(value);
        } else if (key == "generator") {
            if (!generator) generator.emplace();
            generator->name = generator_from_string(value);
        } else if (key == "n") {
            if (!generator) generator.emplace();
            generator->n = std::stoull(value);
        } else if (key == "noise_dims") {
            if (!generator) generator.emplace();
            generator->noise_dims = std::stoull(value);
        } else if (key == "noise_sigma") {
            if (!generator) generator.emplace();
            generator->noise_sigma = std::stod(value);
        } else if (key == "dataset") {
            config.dataset_path = value;
        } else if (key == "predictions") {
            config.predictions_path = value;
        } else if (key == "machines") {
            for (const auto& token : split_list(value))
                config.machines.push_back(MachineSpec::from_token(token));
        } else if (key == "aggregators") {
            aggregators_given = true;
            if (value == "none") continue;
            for (const auto& token : split_list(value)) {
                if (token == "mixcobra") config.use_mixcobra = true;
                else if (token == "cobra_fixed") config.use_cobra_fixed = true;
                else if (token == "cobra_adaptive") config.use_cobra_adaptive = true;
                else throw std::runtime_error("unknown aggregator '" + token + "'");
            }
        } else if (key == "repetitions") {
            config.repetitions = std::stoull(value);
        } else if (key == "train_fraction") {
            config.train_fraction = std::stod(value);
        } else if (key == "kernel") {
            config.kernel = Kernel::from_name(value);
        } else if (key == "folds") {
            config.folds = std::stoi(value);
        } else if (key == "seed") {
            config.seed = std::stoull(value);
        } else if (key == "standardize") {
            config.standardize_features = parse_bool(value, key);
        } else if (key == "parallel") {
            config.parallel = parse_bool(value, key);
        } else if (key == "out") {
            config.out_dir = value;
        } else if (key == "extra_dims") {
            for (const auto& item : split_list(value))
                config.extra_dims.push_back(std::stoull(item));
        } else if (key == "alpha_grid") {
            config.alpha_grid = parse_double_list(value);
        } else if (key == "beta_grid") {
            config.beta_grid = parse_double_list(value);
        } else if (key == "delta_grid") {
            config.delta_grid = parse_double_list(value);
        } else if (key == "gamma_grid") {
            config.gamma_grid = parse_double_list(value);
        } else {
            throw std::runtime_error("unknown config key '" + key + "'");
        }
    }

    if (!aggregators_given) config.use_mixcobra = true;
    config.generator = generator;
    if (config.generator) {
        const bool classification_gen =
            config.generator->name != GeneratorName::synth_regression;
        config.task = classification_gen ? Task::classification : Task::regression;
    }
    return config;
}

std::string summary_text(const ErrorTable& table) {
    std::string out;
    char buffer[128];
    if (!table.label.empty()) out += table.label + "\n";
    std::snprintf(buffer, sizeof(buffer), "%-16s %10s %10s %8s\n", "machine", "mean", "std", "wins");
    out += buffer;
    bool separator_done = false;
    for (std::size_t row = 0; row < table.row_count(); ++row) {
        if (!separator_done && row < table.is_aggregator.size() && table.is_aggregator[row]) {
            out += std::string(46, '-') + "\n";
            separator_done = true;
        }
        std::snprintf(buffer, sizeof(buffer), "%-16s %10.4f %10.4f %8.2f\n",
                      table.names[row].c_str(), table.mean_error(row), table.std_error(row),
                      row < table.wins.size() ? table.wins[row] : 0.0);
        out += buffer;
    }
    return out;
}

}  // namespace mixcobra
