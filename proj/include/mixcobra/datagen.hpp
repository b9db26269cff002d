#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixcobra/dataset.hpp"

namespace mixcobra {

enum class GeneratorName {
    gauss,
    comete,
    nuclear,
    spot,
    circles,
    spirals,
    synth_regression,
};

GeneratorName generator_from_string(const std::string& name);
std::string to_string(GeneratorName name);

// Recipe for a simulated dataset. The six classification examples are
// two-dimensional and emit exactly n/2 points per class; synth_regression
// draws d = 6 uniform features with a bounded nonlinear response.
struct GeneratorSpec {
    GeneratorName name = GeneratorName::gauss;
    std::size_t n = 200;
    std::uint64_t seed = 0;
    std::size_t noise_dims = 0;   // appended by inflate_dims after generation
    double noise_sigma = 0.1;     // synth_regression response noise, in [0, 0.1]
};

Dataset generate(const GeneratorSpec& spec);

// Noiseless regression surface of synth_regression on [0,1]^6 (extra noise
// coordinates are ignored); used to build exact reference machines.
double synth_regression_truth(std::span<const double> x);

// Appends `extra` columns of i.i.d. Uniform[0,1] draws; original columns and
// targets are untouched.
Dataset inflate_dims(const Dataset& data, std::size_t extra, std::uint64_t seed);

// Recorded per-column affine map, reusable on held-out data.
struct StandardizeTransform {
    std::vector<double> mean;
    std::vector<double> std_dev;

    Dataset apply(const Dataset& data) const;
};

// Centers and scales every feature column to zero mean and unit variance
// (population convention). Zero-variance columns are left unchanged.
std::pair<Dataset, StandardizeTransform> standardize(const Dataset& data);

}  // namespace mixcobra
