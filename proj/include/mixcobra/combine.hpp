#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mixcobra/dataset.hpp"
#include "mixcobra/kernel.hpp"

namespace mixcobra {

// MixCobra bandwidths: alpha scales input displacements, beta scales
// prediction displacements.
struct MixCobraParams {
    double alpha = 1.0;
    double beta = 1.0;
};

// Cobra consensus parameters: delta is the per-machine agreement threshold,
// gamma the proportion of machines that must agree for a training point to
// be selected.
struct CobraParams {
    double delta = 0.0;
    double gamma = 1.0;
};

// Per-training-point weights. When every raw weight vanishes the estimator
// is 0/0; the degenerate flag is set and all weights are zero so callers can
// apply the documented fallback.
struct WeightVector {
    std::vector<double> weights;
    bool degenerate = false;
};

// MixCobra weights: weight_i proportional to
//   H(||(X_i - x)/alpha||^2 + ||(f(X_i) - f(x))/beta||^2),
// normalized to sum 1. The prediction part may be empty (p = 0), in which
// case the rule reduces to plain kernel regression over the inputs.
WeightVector mixcobra_weights(std::span<const double> query_x, std::span<const double> query_preds,
                              const Dataset& train, const MachinePredictions& train_preds,
                              const MixCobraParams& params, const Kernel& kernel);

// Weighted average of training targets; degenerate weights fall back to the
// global training-target mean.
double mixcobra_predict_regression(std::span<const double> query_x,
                                   std::span<const double> query_preds, const Dataset& train,
                                   const MachinePredictions& train_preds,
                                   const MixCobraParams& params, const Kernel& kernel);

// 1 iff the kernel mass of class-1 training points strictly exceeds the
// class-0 mass; ties and degenerate weights resolve to 0.
int mixcobra_predict_class(std::span<const double> query_x, std::span<const double> query_preds,
                           const Dataset& train, const MachinePredictions& train_preds,
                           const MixCobraParams& params, const Kernel& kernel);

// Cobra consensus weights: point i is selected iff at least ceil(p * gamma)
// machines m satisfy |r_m(x) - r_m(X_i)| <= delta; selected points share the
// mass uniformly.
WeightVector cobra_weights(std::span<const double> query_preds,
                           const MachinePredictions& train_preds, const CobraParams& params);

double cobra_predict_regression(std::span<const double> query_preds, const Dataset& train,
                                const MachinePredictions& train_preds, const CobraParams& params);

// Weighted majority vote over the selected points; ties and an empty
// selection resolve to 0.
int cobra_predict_class(std::span<const double> query_preds, const Dataset& train,
                        const MachinePredictions& train_preds, const CobraParams& params);

// Disjoint shuffled partition; the first part gets round(fraction * n) rows,
// clamped to [1, n-1]. Deterministic given the seed.
std::pair<Dataset, Dataset> split_sample(const Dataset& data, double fraction, std::uint64_t seed);

// Index-level split used by split_sample; exposed so callers can subset
// parallel structures (e.g. externally supplied prediction rows).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                            double fraction,
                                                                            std::uint64_t seed);

}  // namespace mixcobra
