#include "mixcobra/datagen.hpp"

#include <cmath>
#include <stdexcept>

#include "mixcobra/rng.hpp"

namespace mixcobra {

namespace {

constexpr double kPi = 3.14159265358979323846;

// synth_regression response: sine + product + linear term, analytic range
// [0, 3.5]; targets are squashed to [0,1] including the +-0.3 noise band.
constexpr double kSynthLow = -0.3;
constexpr double kSynthHigh = 3.8;
constexpr double kSynthMaxSigma = 0.1;

double truncated_normal(Rng& rng, double sigma) {
    double z;
    do {
        z = rng.normal();
    } while (std::abs(z) > 3.0);
    return sigma * z;
}

// Correlated 2-D Gaussian via the Cholesky factor of [[a, b], [b, c]].
struct Gaussian2 {
    double mx, my;
    double l00, l10, l11;

    Gaussian2(double mean_x, double mean_y, double a, double b, double c)
        : mx(mean_x), my(mean_y), l00(std::sqrt(a)), l10(b / l00),
          l11(std::sqrt(c - l10 * l10)) {}

    void sample(Rng& rng, double& x, double& y) const {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        x = mx + l00 * z1;
        y = my + l10 * z1 + l11 * z2;
    }
};

void emit(Dataset& data, std::size_t row, double x, double y, double label) {
    data.features(row, 0) = x;
    data.features(row, 1) = y;
    data.targets[row] = label;
}

Dataset make_classification_frame(std::size_t n) {
    Dataset data;
    data.task = Task::classification;
    data.features = Matrix(n, 2);
    data.targets.assign(n, 0.0);
    return data;
}

Dataset generate_two_gaussians(const GeneratorSpec& spec, const Gaussian2& class0,
                               const Gaussian2& class1) {
    Dataset data = make_classification_frame(spec.n);
    Rng rng(spec.seed);
    const std::size_t half = spec.n / 2;
    for (std::size_t i = 0; i < spec.n; ++i) {
        double x, y;
        if (i < half) {
            class0.sample(rng, x, y);
            emit(data, i, x, y, 0.0);
        } else {
            class1.sample(rng, x, y);
            emit(data, i, x, y, 1.0);
        }
    }
    return data;
}

Dataset generate_nuclear(const GeneratorSpec& spec) {
    Dataset data = make_classification_frame(spec.n);
    Rng rng(spec.seed);
    const std::size_t half = spec.n / 2;
    const double sigma = std::sqrt(0.1);
    for (std::size_t i = 0; i < spec.n; ++i) {
        if (i < half) {
            // uniform on the unit disk: sqrt-radius times a uniform angle
            const double r = std::sqrt(rng.uniform01());
            const double theta = 2.0 * kPi * rng.uniform01();
            emit(data, i, r * std::cos(theta), r * std::sin(theta), 0.0);
        } else {
            emit(data, i, 0.5 + sigma * rng.normal(), 0.5 + sigma * rng.normal(), 1.0);
        }
    }
    return data;
}

Dataset generate_spot(const GeneratorSpec& spec) {
    static constexpr double centers[5][2] = {
        {0.2, 0.2}, {0.8, 0.3}, {0.5, 0.5}, {0.3, 0.8}, {0.7, 0.7}};
    constexpr double sigma = 0.05;

    Dataset data = make_classification_frame(spec.n);
    Rng rng(spec.seed);
    const std::size_t half = spec.n / 2;
    for (std::size_t i = 0; i < spec.n; ++i) {
        if (i < half) {
            emit(data, i, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0);
        } else {
            const auto& c = centers[rng.below(5)];
            emit(data, i, c[0] + sigma * rng.normal(), c[1] + sigma * rng.normal(), 1.0);
        }
    }
    return data;
}

// Concentric circles at radii 1 and 2 with radial jitter. The jitter is
// truncated at 3 sigma, which keeps the radial bands disjoint.
Dataset generate_circles(const GeneratorSpec& spec) {
    constexpr double sigma = 0.1;
    Dataset data = make_classification_frame(spec.n);
    Rng rng(spec.seed);
    const std::size_t half = spec.n / 2;
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double base = i < half ? 1.0 : 2.0;
        const double theta = 2.0 * kPi * rng.uniform01();
        const double r = base + truncated_normal(rng, sigma);
        emit(data, i, r * std::cos(theta), r * std::sin(theta), i < half ? 0.0 : 1.0);
    }
    return data;
}

// Two interlocked Archimedean spirals r = theta / (2 pi), theta in
// [pi/2, 3 pi], the second rotated by pi. Adjacent arms of opposite classes
// are 1/2 apart radially; truncated jitter keeps them disjoint.
Dataset generate_spirals(const GeneratorSpec& spec) {
    constexpr double sigma = 0.05;
    Dataset data = make_classification_frame(spec.n);
    Rng rng(spec.seed);
    const std::size_t half = spec.n / 2;
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double theta = rng.uniform(kPi / 2.0, 3.0 * kPi);
        const double r = theta / (2.0 * kPi) + truncated_normal(rng, sigma);
        const double rot = i < half ? 0.0 : kPi;
        emit(data, i, r * std::cos(theta + rot), r * std::sin(theta + rot),
             i < half ? 0.0 : 1.0);
    }
    return data;
}

double synth_surface(std::span<const double> x) {
    return std::sin(kPi * x[0]) + x[1] * x[2] + 0.5 * (x[3] + x[4] + x[5]);
}

double squash(double value) { return (value - kSynthLow) / (kSynthHigh - kSynthLow); }

Dataset generate_synth_regression(const GeneratorSpec& spec) {
    if (spec.noise_sigma < 0.0 || spec.noise_sigma > kSynthMaxSigma)
        throw std::invalid_argument("synth_regression noise_sigma must lie in [0, 0.1]");
    Dataset data;
    data.task = Task::regression;
    data.features = Matrix(spec.n, 6);
    data.targets.assign(spec.n, 0.0);
    Rng rng(spec.seed);
    for (std::size_t i = 0; i < spec.n; ++i) {
        for (std::size_t c = 0; c < 6; ++c) data.features(i, c) = rng.uniform01();
        const double noise =
            spec.noise_sigma > 0.0 ? truncated_normal(rng, spec.noise_sigma) : 0.0;
        data.targets[i] = squash(synth_surface(data.features.row(i)) + noise);
    }
    return data;
}

}  // namespace

GeneratorName generator_from_string(const std::string& name) {
    if (name == "gauss") return GeneratorName::gauss;
    if (name == "comete") return GeneratorName::comete;
    if (name == "nuclear") return GeneratorName::nuclear;
    if (name == "spot") return GeneratorName::spot;
    if (name == "circles") return GeneratorName::circles;
    if (name == "spirals") return GeneratorName::spirals;
    if (name == "synth_regression") return GeneratorName::synth_regression;
    throw std::invalid_argument("unknown generator '" + name + "'");
}

std::string to_string(GeneratorName name) {
    switch (name) {
    case GeneratorName::gauss: return "gauss";
    case GeneratorName::comete: return "comete";
    case GeneratorName::nuclear: return "nuclear";
    case GeneratorName::spot: return "spot";
    case GeneratorName::circles: return "circles";
    case GeneratorName::spirals: return "spirals";
    case GeneratorName::synth_regression: return "synth_regression";
    }
    return "unknown";
}

double synth_regression_truth(std::span<const double> x) {
    if (x.size() < 6) throw std::invalid_argument("synth_regression point needs 6 coordinates");
    return squash(synth_surface(x));
}

Dataset generate(const GeneratorSpec& spec) {
    if (spec.n < 2) throw std::invalid_argument("generator needs n >= 2");

    Dataset base;
    if (spec.name == GeneratorName::synth_regression) {
        base = generate_synth_regression(spec);
    } else {
        if (spec.n % 2 != 0)
            throw std::invalid_argument("classification generators need an even n");
        switch (spec.name) {
        case GeneratorName::gauss:
            base = generate_two_gaussians(spec, Gaussian2(0.0, 2.0, 1.0, -0.5, 1.0),
                                          Gaussian2(-1.0, 2.0, 1.0, 0.5, 1.0));
            break;
        case GeneratorName::comete:
            base = generate_two_gaussians(spec, Gaussian2(0.0, 2.0, 3.0, 2.25, 15.0),
                                          Gaussian2(0.0, 2.0, 1.0, 0.0, 1.0));
            break;
        case GeneratorName::nuclear: base = generate_nuclear(spec); break;
        case GeneratorName::spot: base = generate_spot(spec); break;
        case GeneratorName::circles: base = generate_circles(spec); break;
        case GeneratorName::spirals: base = generate_spirals(spec); break;
        default: throw std::invalid_argument("unknown generator");
        }
    }

    if (spec.noise_dims > 0)
        base = inflate_dims(base, spec.noise_dims, derive_seed(spec.seed, 0x696e666cULL));
    return base;
}

Dataset inflate_dims(const Dataset& data, std::size_t extra, std::uint64_t seed) {
    if (extra == 0) return data;
    Dataset out;
    out.task = data.task;
    out.targets = data.targets;
    out.features = Matrix(data.n(), data.dim() + extra);
    Rng rng(seed);
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t c = 0; c < data.dim(); ++c) out.features(i, c) = data.features(i, c);
        for (std::size_t c = 0; c < extra; ++c)
            out.features(i, data.dim() + c) = rng.uniform01();
    }
    return out;
}

Dataset StandardizeTransform::apply(const Dataset& data) const {
    if (data.dim() != mean.size())
        throw std::invalid_argument("transform dimension does not match dataset");
    Dataset out = data;
    for (std::size_t i = 0; i < out.n(); ++i)
        for (std::size_t c = 0; c < out.dim(); ++c)
            out.features(i, c) = (out.features(i, c) - mean[c]) / std_dev[c];
    return out;
}

std::pair<Dataset, StandardizeTransform> standardize(const Dataset& data) {
    if (data.n() == 0) throw std::invalid_argument("dataset is empty");
    const auto n = static_cast<double>(data.n());
    StandardizeTransform transform;
    transform.mean.assign(data.dim(), 0.0);
    transform.std_dev.assign(data.dim(), 1.0);

    for (std::size_t c = 0; c < data.dim(); ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < data.n(); ++i) total += data.features(i, c);
        const double mean = total / n;
        double var = 0.0;
        for (std::size_t i = 0; i < data.n(); ++i) {
            const double d = data.features(i, c) - mean;
            var += d * d;
        }
        const double std_dev = std::sqrt(var / n);
        if (std_dev > 1e-12) {  // constant columns stay as they are
            transform.mean[c] = mean;
            transform.std_dev[c] = std_dev;
        }
    }
    return {transform.apply(data), transform};
}

}  // namespace mixcobra
