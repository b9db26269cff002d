#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <doctest.h>

#include "mixcobra/datagen.hpp"
#include "mixcobra/learners.hpp"

using namespace mixcobra;

namespace {

double class_mean(const Dataset& data, double label, std::size_t column) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < data.n(); ++i)
        if (data.targets[i] == label) {
            total += data.features(i, column);
            ++count;
        }
    return total / static_cast<double>(count);
}

double min_interclass_distance(const Dataset& data) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < data.n(); ++i)
        for (std::size_t j = i + 1; j < data.n(); ++j) {
            if (data.targets[i] == data.targets[j]) continue;
            double d2 = 0.0;
            for (std::size_t c = 0; c < data.dim(); ++c) {
                const double t = data.features(i, c) - data.features(j, c);
                d2 += t * t;
            }
            best = std::min(best, d2);
        }
    return std::sqrt(best);
}

}  // namespace

TEST_CASE("every classification generator is balanced and 2-d") {
    for (auto name : {GeneratorName::gauss, GeneratorName::comete, GeneratorName::nuclear,
                      GeneratorName::spot, GeneratorName::circles, GeneratorName::spirals}) {
        const Dataset data = generate({name, 400, 3, 0});
        data.validate();
        CHECK(data.dim() == 2);
        std::size_t ones = 0;
        for (double y : data.targets) ones += y == 1.0;
        CHECK(ones == 200);
    }
}

TEST_CASE("gauss class means match the printed mixture") {
    const Dataset data = generate({GeneratorName::gauss, 1000, 42, 0});
    CHECK(std::abs(class_mean(data, 0.0, 0) - 0.0) < 0.15);
    CHECK(std::abs(class_mean(data, 0.0, 1) - 2.0) < 0.15);
    CHECK(std::abs(class_mean(data, 1.0, 0) - (-1.0)) < 0.15);
    CHECK(std::abs(class_mean(data, 1.0, 1) - 2.0) < 0.15);
}

TEST_CASE("circles bands are disjoint and knn separates them") {
    const Dataset data = generate({GeneratorName::circles, 200, 7, 0});
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double r = std::hypot(data.features(i, 0), data.features(i, 1));
        if (data.targets[i] == 0.0)
            CHECK((r >= 0.7 && r <= 1.3));
        else
            CHECK((r >= 1.7 && r <= 2.3));
    }
    CHECK(min_interclass_distance(data) > 0.0);

    // knn(5) on a held-out sample of the same law: error <= 2%
    const Dataset test = generate({GeneratorName::circles, 200, 8, 0});
    const auto machine = fit(MachineSpec::knn(5), data, 0);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.n(); ++i)
        wrong += machine->predict(test.point(i)) != test.targets[i];
    CHECK(static_cast<double>(wrong) / static_cast<double>(test.n()) <= 0.02);
}

TEST_CASE("spirals are geometrically separated") {
    const Dataset data = generate({GeneratorName::spirals, 2000, 9, 0});
    CHECK(min_interclass_distance(data) > 0.0);
}

TEST_CASE("generation is deterministic given the seed") {
    for (auto name : {GeneratorName::gauss, GeneratorName::spirals, GeneratorName::synth_regression}) {
        const Dataset a = generate({name, 100, 1234, 0});
        const Dataset b = generate({name, 100, 1234, 0});
        CHECK(a.features == b.features);
        CHECK(a.targets == b.targets);
        const Dataset c = generate({name, 100, 1235, 0});
        CHECK(a.features != c.features);
    }
}

TEST_CASE("unknown generator name is rejected") {
    CHECK_THROWS_AS(generator_from_string("moons"), std::invalid_argument);
}

TEST_CASE("synth_regression targets and truth stay in range") {
    GeneratorSpec spec{GeneratorName::synth_regression, 500, 11, 0};
    const Dataset data = generate(spec);
    CHECK(data.dim() == 6);
    for (double y : data.targets) {
        CHECK(y >= 0.0);
        CHECK(y <= 1.0);
    }

    // noiseless targets equal the published truth surface
    spec.noise_sigma = 0.0;
    const Dataset clean = generate(spec);
    for (std::size_t i = 0; i < clean.n(); ++i)
        CHECK(clean.targets[i] ==
              doctest::Approx(synth_regression_truth(clean.point(i))).epsilon(1e-12));

    CHECK_THROWS_AS(generate({GeneratorName::synth_regression, 100, 1, 0, 0.5}),
                    std::invalid_argument);
}

TEST_CASE("inflate_dims appends uniform columns and keeps the original data") {
    const Dataset base = generate({GeneratorName::synth_regression, 400, 13, 0});
    CHECK(inflate_dims(base, 0, 5).features == base.features);

    const Dataset inflated = inflate_dims(base, 5, 5);
    CHECK(inflated.dim() == 11);
    CHECK(inflated.targets == base.targets);
    for (std::size_t i = 0; i < base.n(); ++i)
        for (std::size_t c = 0; c < base.dim(); ++c)
            CHECK(inflated.features(i, c) == base.features(i, c));

    for (std::size_t c = base.dim(); c < inflated.dim(); ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < inflated.n(); ++i) {
            const double v = inflated.features(i, c);
            CHECK(v >= 0.0);
            CHECK(v < 1.0);
            total += v;
        }
        const double mean = total / static_cast<double>(inflated.n());
        CHECK(mean > 0.4);
        CHECK(mean < 0.6);
    }
}

TEST_CASE("standardize centers and scales with the population convention") {
    Dataset data;
    data.task = Task::regression;
    data.features = Matrix(2, 2);
    data.targets = {0.1, 0.9};
    data.features(0, 0) = 0.0;
    data.features(1, 0) = 2.0;
    data.features(0, 1) = 3.0;  // constant column
    data.features(1, 1) = 3.0;

    const auto [standardized, transform] = standardize(data);
    CHECK(standardized.features(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(standardized.features(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    // the zero-variance guard leaves the constant column untouched
    CHECK(standardized.features(0, 1) == 3.0);
    CHECK(standardized.features(1, 1) == 3.0);

    const Dataset again = transform.apply(data);
    CHECK(again.features == standardized.features);
}

TEST_CASE("standardized columns have zero mean and unit variance") {
    const Dataset data = generate({GeneratorName::gauss, 300, 17, 0});
    const auto [standardized, transform] = standardize(data);
    for (std::size_t c = 0; c < standardized.dim(); ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < standardized.n(); ++i) total += standardized.features(i, c);
        const double mean = total / static_cast<double>(standardized.n());
        CHECK(std::abs(mean) < 1e-9);
        double var = 0.0;
        for (std::size_t i = 0; i < standardized.n(); ++i) {
            const double d = standardized.features(i, c) - mean;
            var += d * d;
        }
        CHECK(std::sqrt(var / static_cast<double>(standardized.n())) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}
