#include "mixcobra/combine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mixcobra/rng.hpp"
#include "mixcobra/sorted_sum.hpp"

namespace mixcobra {

namespace {

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string("non-finite ") + what);
}

void check_mixcobra_inputs(std::span<const double> query_x, std::span<const double> query_preds,
                           const Dataset& train, const MachinePredictions& train_preds,
                           const MixCobraParams& params) {
    if (train.n() == 0) throw std::invalid_argument("empty training set");
    if (query_x.size() != train.dim())
        throw std::invalid_argument("query dimension " + std::to_string(query_x.size()) +
                                    " does not match training dimension " +
                                    std::to_string(train.dim()));
    if (train_preds.n() != train.n())
        throw std::invalid_argument("prediction rows " + std::to_string(train_preds.n()) +
                                    " do not match training rows " + std::to_string(train.n()));
    if (query_preds.size() != train_preds.machine_count())
        throw std::invalid_argument("query prediction length " + std::to_string(query_preds.size()) +
                                    " does not match machine count " +
                                    std::to_string(train_preds.machine_count()));
    if (!(params.alpha > 0.0) || !(params.beta > 0.0))
        throw std::invalid_argument("bandwidths must be positive");
    require_finite(query_x, "query point");
    require_finite(query_preds, "query predictions");
}

// Raw kernel values per training point.
std::vector<double> mixcobra_raw(std::span<const double> query_x,
                                 std::span<const double> query_preds, const Dataset& train,
                                 const MachinePredictions& train_preds,
                                 const MixCobraParams& params, const Kernel& kernel) {
    const std::size_t n = train.n();
    const std::size_t d = train.dim();
    const std::size_t p = train_preds.machine_count();
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = train.point(i);
        double u = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double t = (xi[k] - query_x[k]) / params.alpha;
            u += t * t;
        }
        if (p > 0) {
            const auto fi = train_preds.row(i);
            for (std::size_t m = 0; m < p; ++m) {
                const double t = (fi[m] - query_preds[m]) / params.beta;
                u += t * t;
            }
        }
        raw[i] = kernel.profile(u);
    }
    return raw;
}

// Normalizes raw weights in place. The normalizer is computed over a sorted
// copy, so it depends only on the multiset of raw values and permuting
// training rows permutes the weights without changing any of them.
WeightVector normalize(std::vector<double> raw) {
    WeightVector out;
    const double total = sorted_sum(std::span<const double>(raw));
    if (total <= 0.0) {
        out.weights.assign(raw.size(), 0.0);
        out.degenerate = true;
        return out;
    }
    for (double& w : raw) w /= total;
    out.weights = std::move(raw);
    return out;
}

// Class masses from raw kernel values, each summed order-invariantly.
std::pair<double, double> class_masses(const std::vector<double>& raw,
                                       const std::vector<double>& targets) {
    std::vector<double> mass_one;
    std::vector<double> mass_zero;
    mass_one.reserve(raw.size());
    mass_zero.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        (targets[i] == 1.0 ? mass_one : mass_zero).push_back(raw[i]);
    return {sorted_sum(std::move(mass_zero)), sorted_sum(std::move(mass_one))};
}

double weighted_target_sum(const WeightVector& w, const std::vector<double>& targets) {
    std::vector<double> terms(w.weights.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = w.weights[i] * targets[i];
    return sorted_sum(std::move(terms));
}

std::vector<double> cobra_raw(std::span<const double> query_preds,
                              const MachinePredictions& train_preds, const CobraParams& params) {
    if (train_preds.n() == 0) throw std::invalid_argument("empty training predictions");
    const std::size_t p = train_preds.machine_count();
    if (query_preds.size() != p)
        throw std::invalid_argument("query prediction length " + std::to_string(query_preds.size()) +
                                    " does not match machine count " + std::to_string(p));
    if (params.delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
    if (!(params.gamma > 0.0) || params.gamma > 1.0)
        throw std::invalid_argument("gamma must lie in (0, 1]");
    require_finite(query_preds, "query predictions");

    // ceil(p * gamma) agreeing machines required; the 1e-9 slack absorbs
    // rounding when p * gamma is an exact integer (e.g. gamma = 1/p * k).
    const auto required = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(static_cast<double>(p) * params.gamma - 1e-9)));

    std::vector<double> raw(train_preds.n(), 0.0);
    for (std::size_t i = 0; i < train_preds.n(); ++i) {
        const auto fi = train_preds.row(i);
        std::size_t agreeing = 0;
        for (std::size_t m = 0; m < p; ++m)
            if (std::abs(fi[m] - query_preds[m]) <= params.delta) ++agreeing;
        raw[i] = agreeing >= required ? 1.0 : 0.0;
    }
    return raw;
}

}  // namespace

WeightVector mixcobra_weights(std::span<const double> query_x, std::span<const double> query_preds,
                              const Dataset& train, const MachinePredictions& train_preds,
                              const MixCobraParams& params, const Kernel& kernel) {
    check_mixcobra_inputs(query_x, query_preds, train, train_preds, params);
    return normalize(mixcobra_raw(query_x, query_preds, train, train_preds, params, kernel));
}

double mixcobra_predict_regression(std::span<const double> query_x,
                                   std::span<const double> query_preds, const Dataset& train,
                                   const MachinePredictions& train_preds,
                                   const MixCobraParams& params, const Kernel& kernel) {
    const WeightVector w = mixcobra_weights(query_x, query_preds, train, train_preds, params, kernel);
    if (w.degenerate) return target_mean(train);
    return weighted_target_sum(w, train.targets);
}

int mixcobra_predict_class(std::span<const double> query_x, std::span<const double> query_preds,
                           const Dataset& train, const MachinePredictions& train_preds,
                           const MixCobraParams& params, const Kernel& kernel) {
    check_mixcobra_inputs(query_x, query_preds, train, train_preds, params);
    const auto raw = mixcobra_raw(query_x, query_preds, train, train_preds, params, kernel);
    const auto [mass_zero, mass_one] = class_masses(raw, train.targets);
    return mass_one > mass_zero ? 1 : 0;
}

WeightVector cobra_weights(std::span<const double> query_preds,
                           const MachinePredictions& train_preds, const CobraParams& params) {
    return normalize(cobra_raw(query_preds, train_preds, params));
}

double cobra_predict_regression(std::span<const double> query_preds, const Dataset& train,
                                const MachinePredictions& train_preds, const CobraParams& params) {
    if (train.n() != train_preds.n())
        throw std::invalid_argument("prediction rows do not match training rows");
    const WeightVector w = cobra_weights(query_preds, train_preds, params);
    if (w.degenerate) return target_mean(train);
    return weighted_target_sum(w, train.targets);
}

int cobra_predict_class(std::span<const double> query_preds, const Dataset& train,
                        const MachinePredictions& train_preds, const CobraParams& params) {
    if (train.n() != train_preds.n())
        throw std::invalid_argument("prediction rows do not match training rows");
    const auto raw = cobra_raw(query_preds, train_preds, params);
    const auto [mass_zero, mass_one] = class_masses(raw, train.targets);
    return mass_one > mass_zero ? 1 : 0;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                            double fraction,
                                                                            std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("need at least 2 rows to split");
    if (!(fraction > 0.0) || !(fraction < 1.0))
        throw std::invalid_argument("fraction must lie in (0, 1)");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);

    const auto first = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))), 1, n - 1);
    return {std::vector<std::size_t>(order.begin(), order.begin() + first),
            std::vector<std::size_t>(order.begin() + first, order.end())};
}

std::pair<Dataset, Dataset> split_sample(const Dataset& data, double fraction, std::uint64_t seed) {
    const auto [first, second] = split_indices(data.n(), fraction, seed);
    return {data.subset(first), data.subset(second)};
}

}  // namespace mixcobra
