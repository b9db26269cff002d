#pragma once

#include <cstdint>
#include <vector>

#include "mixcobra/combine.hpp"
#include "mixcobra/dataset.hpp"
#include "mixcobra/kernel.hpp"
#include "mixcobra/matrix.hpp"

namespace mixcobra {

struct MixCobraGrid {
    std::vector<double> alpha_values;
    std::vector<double> beta_values;
    int folds = 5;
};

struct CobraGrid {
    std::vector<double> delta_values;
    std::vector<double> gamma_values;
    int folds = 5;
};

struct MixCobraTuningResult {
    MixCobraParams best;
    double best_error = 0.0;
    Matrix cv_error_surface;  // alpha_values.size() x beta_values.size()
    std::vector<double> alpha_values;
    std::vector<double> beta_values;
};

struct CobraTuningResult {
    CobraParams best;
    double best_error = 0.0;
    Matrix cv_error_surface;  // delta_values.size() x gamma_values.size()
    std::vector<double> delta_values;
    std::vector<double> gamma_values;
};

// K-fold grid search for the MixCobra bandwidths. Each cell holds the mean
// over folds of the fold-mean validation loss (squared error for regression,
// 0/1 loss for classification). Ties break toward smaller alpha, then
// smaller beta. Fold assignment is deterministic given the seed.
MixCobraTuningResult cross_validate_mixcobra(const Dataset& train,
                                             const MachinePredictions& train_preds,
                                             const MixCobraGrid& grid, const Kernel& kernel,
                                             std::uint64_t seed);

// Same over (delta, gamma); ties break toward larger delta, then larger
// gamma (denser consensus sets).
CobraTuningResult cross_validate_cobra(const Dataset& train, const MachinePredictions& train_preds,
                                       const CobraGrid& grid, std::uint64_t seed);

// Data-scaled default grids: alpha and beta log-spaced over
// [0.01 s, 10 s] with s the median pairwise distance of the relevant
// coordinates; delta linear over (0, max prediction range]; gamma multiples
// of 1/p.
MixCobraGrid default_mixcobra_grid(const Dataset& train, const MachinePredictions& train_preds);
CobraGrid default_cobra_grid(const MachinePredictions& train_preds);

}  // namespace mixcobra
