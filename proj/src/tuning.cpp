#include "mixcobra/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mixcobra/rng.hpp"
#include "mixcobra/sorted_sum.hpp"

namespace mixcobra {

namespace {

void check_grid_common(std::size_t n, int folds) {
    if (folds < 2) throw std::invalid_argument("cross-validation requires folds >= 2");
    if (static_cast<std::size_t>(folds) > n)
        throw std::invalid_argument("folds " + std::to_string(folds) + " exceed training rows " +
                                    std::to_string(n));
}

// fold id per row: shuffled positions taken round-robin.
std::vector<int> assign_folds(std::size_t n, int folds, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<int> fold_of(n);
    for (std::size_t pos = 0; pos < n; ++pos) fold_of[order[pos]] = static_cast<int>(pos % folds);
    return fold_of;
}

double mean_or_half(const std::vector<double>& values) {
    if (values.empty()) return 0.5;
    double total = 0.0;
    for (double v : values) total += v;
    return total / static_cast<double>(values.size());
}

struct FoldLayout {
    std::vector<std::vector<std::size_t>> train_rows;  // per fold
    std::vector<std::vector<std::size_t>> val_rows;
    std::vector<double> fallback_mean;  // in-fold target mean, regression fallback
};

FoldLayout build_folds(const Dataset& train, int folds, std::uint64_t seed) {
    const auto fold_of = assign_folds(train.n(), folds, seed);
    FoldLayout layout;
    layout.train_rows.resize(folds);
    layout.val_rows.resize(folds);
    for (std::size_t i = 0; i < train.n(); ++i)
        for (int f = 0; f < folds; ++f)
            (fold_of[i] == f ? layout.val_rows[f] : layout.train_rows[f]).push_back(i);
    layout.fallback_mean.resize(folds);
    for (int f = 0; f < folds; ++f) {
        std::vector<double> targets;
        targets.reserve(layout.train_rows[f].size());
        for (auto i : layout.train_rows[f]) targets.push_back(train.targets[i]);
        layout.fallback_mean[f] = mean_or_half(targets);
    }
    return layout;
}

// Squared pairwise distances over all rows. Radial profiles satisfy
// H(||a/alpha||^2 + ||b/beta||^2) = H(||a||^2/alpha^2 + ||b||^2/beta^2),
// so the per-cell work reduces to two divisions per pair.
Matrix squared_distances(const Matrix& rows) {
    const std::size_t n = rows.rows();
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = rows.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto b = rows.row(j);
            double d2 = 0.0;
            for (std::size_t c = 0; c < a.size(); ++c) {
                const double t = a[c] - b[c];
                d2 += t * t;
            }
            out(i, j) = d2;
            out(j, i) = d2;
        }
    }
    return out;
}

}  // namespace

MixCobraTuningResult cross_validate_mixcobra(const Dataset& train,
                                             const MachinePredictions& train_preds,
                                             const MixCobraGrid& grid, const Kernel& kernel,
                                             std::uint64_t seed) {
    train.validate();
    if (train_preds.n() != train.n())
        throw std::invalid_argument("prediction rows do not match training rows");
    if (grid.alpha_values.empty() || grid.beta_values.empty())
        throw std::invalid_argument("empty parameter grid");
    for (double v : grid.alpha_values)
        if (!(v > 0.0)) throw std::invalid_argument("alpha grid values must be positive");
    for (double v : grid.beta_values)
        if (!(v > 0.0)) throw std::invalid_argument("beta grid values must be positive");
    check_grid_common(train.n(), grid.folds);

    const bool classify = train.task == Task::classification;
    const FoldLayout folds = build_folds(train, grid.folds, seed);
    const Matrix input_sq = squared_distances(train.features);
    const Matrix pred_sq =
        train_preds.machine_count() > 0 ? squared_distances(train_preds.values) : Matrix(train.n(), train.n());

    MixCobraTuningResult result;
    result.alpha_values = grid.alpha_values;
    result.beta_values = grid.beta_values;
    result.cv_error_surface = Matrix(grid.alpha_values.size(), grid.beta_values.size());
    bool have_best = false;

    for (std::size_t ai = 0; ai < grid.alpha_values.size(); ++ai) {
        const double alpha = grid.alpha_values[ai];
        const double inv_a2 = 1.0 / (alpha * alpha);
        for (std::size_t bi = 0; bi < grid.beta_values.size(); ++bi) {
            const double beta = grid.beta_values[bi];
            const double inv_b2 = 1.0 / (beta * beta);

            double fold_losses = 0.0;
            for (int f = 0; f < grid.folds; ++f) {
                const auto& in_rows = folds.train_rows[f];
                const auto& val_rows = folds.val_rows[f];
                double loss = 0.0;
                for (auto v : val_rows) {
                    double num = 0.0, den = 0.0, mass_one = 0.0, mass_zero = 0.0;
                    for (auto i : in_rows) {
                        const double w =
                            kernel.profile(input_sq(v, i) * inv_a2 + pred_sq(v, i) * inv_b2);
                        if (classify) {
                            (train.targets[i] == 1.0 ? mass_one : mass_zero) += w;
                        } else {
                            num += w * train.targets[i];
                            den += w;
                        }
                    }
                    if (classify) {
                        const double label = mass_one > mass_zero ? 1.0 : 0.0;
                        loss += label != train.targets[v] ? 1.0 : 0.0;
                    } else {
                        const double pred = den > 0.0 ? num / den : folds.fallback_mean[f];
                        const double err = pred - train.targets[v];
                        loss += err * err;
                    }
                }
                fold_losses += loss / static_cast<double>(val_rows.size());
            }
            const double cell = fold_losses / static_cast<double>(grid.folds);
            result.cv_error_surface(ai, bi) = cell;

            const bool better =
                !have_best || cell < result.best_error ||
                (cell == result.best_error &&
                 (alpha < result.best.alpha ||
                  (alpha == result.best.alpha && beta < result.best.beta)));
            if (better) {
                have_best = true;
                result.best = {alpha, beta};
                result.best_error = cell;
            }
        }
    }
    return result;
}

CobraTuningResult cross_validate_cobra(const Dataset& train, const MachinePredictions& train_preds,
                                       const CobraGrid& grid, std::uint64_t seed) {
    train.validate();
    if (train_preds.n() != train.n())
        throw std::invalid_argument("prediction rows do not match training rows");
    if (train_preds.machine_count() == 0)
        throw std::invalid_argument("cobra tuning requires at least one machine");
    if (grid.delta_values.empty() || grid.gamma_values.empty())
        throw std::invalid_argument("empty parameter grid");
    for (double v : grid.delta_values)
        if (v < 0.0) throw std::invalid_argument("delta grid values must be nonnegative");
    for (double v : grid.gamma_values)
        if (!(v > 0.0) || v > 1.0) throw std::invalid_argument("gamma grid values must lie in (0, 1]");
    check_grid_common(train.n(), grid.folds);

    const bool classify = train.task == Task::classification;
    const std::size_t p = train_preds.machine_count();
    const FoldLayout folds = build_folds(train, grid.folds, seed);

    CobraTuningResult result;
    result.delta_values = grid.delta_values;
    result.gamma_values = grid.gamma_values;
    result.cv_error_surface = Matrix(grid.delta_values.size(), grid.gamma_values.size());
    bool have_best = false;

    for (std::size_t di = 0; di < grid.delta_values.size(); ++di) {
        const double delta = grid.delta_values[di];
        for (std::size_t gi = 0; gi < grid.gamma_values.size(); ++gi) {
            const double gamma = grid.gamma_values[gi];
            const auto required = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::ceil(static_cast<double>(p) * gamma - 1e-9)));

            double fold_losses = 0.0;
            for (int f = 0; f < grid.folds; ++f) {
                const auto& in_rows = folds.train_rows[f];
                const auto& val_rows = folds.val_rows[f];
                double loss = 0.0;
                for (auto v : val_rows) {
                    const auto qp = train_preds.row(v);
                    double num = 0.0, count_one = 0.0, count_zero = 0.0;
                    std::size_t selected = 0;
                    for (auto i : in_rows) {
                        const auto fi = train_preds.row(i);
                        std::size_t agreeing = 0;
                        for (std::size_t m = 0; m < p; ++m)
                            if (std::abs(fi[m] - qp[m]) <= delta) ++agreeing;
                        if (agreeing < required) continue;
                        ++selected;
                        if (classify)
                            (train.targets[i] == 1.0 ? count_one : count_zero) += 1.0;
                        else
                            num += train.targets[i];
                    }
                    if (classify) {
                        const double label = count_one > count_zero ? 1.0 : 0.0;
                        loss += label != train.targets[v] ? 1.0 : 0.0;
                    } else {
                        const double pred = selected > 0
                                                ? num / static_cast<double>(selected)
                                                : folds.fallback_mean[f];
                        const double err = pred - train.targets[v];
                        loss += err * err;
                    }
                }
                fold_losses += loss / static_cast<double>(val_rows.size());
            }
            const double cell = fold_losses / static_cast<double>(grid.folds);
            result.cv_error_surface(di, gi) = cell;

            const bool better =
                !have_best || cell < result.best_error ||
                (cell == result.best_error &&
                 (delta > result.best.delta ||
                  (delta == result.best.delta && gamma > result.best.gamma)));
            if (better) {
                have_best = true;
                result.best = {delta, gamma};
                result.best_error = cell;
            }
        }
    }
    return result;
}

namespace {

// Lower median of all pairwise Euclidean distances; 1.0 when there are no
// informative pairs (n < 2, zero columns, or all rows identical).
double median_pairwise_distance(const Matrix& rows) {
    const std::size_t n = rows.rows();
    if (n < 2 || rows.cols() == 0) return 1.0;
    std::vector<double> dists;
    dists.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < rows.cols(); ++c) {
                const double t = rows(i, c) - rows(j, c);
                d2 += t * t;
            }
            dists.push_back(std::sqrt(d2));
        }
    const std::size_t mid = (dists.size() - 1) / 2;
    std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
    const double median = dists[mid];
    return median > 0.0 ? median : 1.0;
}

std::vector<double> log_spaced(double scale) {
    std::vector<double> values(10);
    for (int k = 0; k < 10; ++k)
        values[k] = scale * std::pow(10.0, -2.0 + 3.0 * static_cast<double>(k) / 9.0);
    return values;
}

}  // namespace

MixCobraGrid default_mixcobra_grid(const Dataset& train, const MachinePredictions& train_preds) {
    MixCobraGrid grid;
    grid.alpha_values = log_spaced(median_pairwise_distance(train.features));
    grid.beta_values = log_spaced(median_pairwise_distance(train_preds.values));
    return grid;
}

CobraGrid default_cobra_grid(const MachinePredictions& train_preds) {
    const std::size_t p = train_preds.machine_count();
    if (p == 0) throw std::invalid_argument("cobra grid requires at least one machine");

    double range = 0.0;
    for (std::size_t m = 0; m < p; ++m) {
        double lo = train_preds.values(0, m);
        double hi = lo;
        for (std::size_t i = 1; i < train_preds.n(); ++i) {
            lo = std::min(lo, train_preds.values(i, m));
            hi = std::max(hi, train_preds.values(i, m));
        }
        range = std::max(range, hi - lo);
    }
    if (range <= 0.0) range = 1.0;

    CobraGrid grid;
    grid.delta_values.resize(10);
    for (int k = 1; k <= 10; ++k)
        grid.delta_values[k - 1] = range * static_cast<double>(k) / 10.0;
    grid.gamma_values.resize(p);
    for (std::size_t k = 1; k <= p; ++k)
        grid.gamma_values[k - 1] = static_cast<double>(k) / static_cast<double>(p);
    return grid;
}

}  // namespace mixcobra
