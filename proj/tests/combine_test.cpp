#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "mixcobra/combine.hpp"
#include "mixcobra/rng.hpp"
#include "oracles.hpp"

using namespace mixcobra;

namespace {

Dataset tiny_dataset(std::vector<std::vector<double>> rows, std::vector<double> targets,
                     Task task = Task::regression) {
    Dataset data;
    data.task = task;
    data.features = Matrix(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < rows[i].size(); ++c) data.features(i, c) = rows[i][c];
    data.targets = std::move(targets);
    return data;
}

MachinePredictions tiny_predictions(std::vector<std::vector<double>> rows) {
    MachinePredictions preds;
    preds.values = Matrix(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < rows[i].size(); ++c) preds.values(i, c) = rows[i][c];
    for (std::size_t m = 0; m < rows[0].size(); ++m)
        preds.machine_names.push_back("m" + std::to_string(m));
    return preds;
}

}  // namespace

TEST_CASE("single training point takes all the weight") {
    const auto train = tiny_dataset({{0.4}}, {0.7});
    const auto preds = tiny_predictions({{0.3}});
    const auto w = mixcobra_weights(std::vector<double>{2.0}, std::vector<double>{0.9}, train,
                                    preds, {0.5, 2.0}, Kernel::gaussian());
    REQUIRE(w.weights.size() == 1);
    CHECK_FALSE(w.degenerate);
    CHECK(w.weights[0] == 1.0);
}

TEST_CASE("two-point weights match the scalar oracle") {
    const auto train = tiny_dataset({{0.0}, {1.0}}, {0.0, 1.0});
    const auto preds = tiny_predictions({{0.0}, {1.0}});
    const std::vector<double> qx{0.0}, qp{0.0};

    const auto w = mixcobra_weights(qx, qp, train, preds, {1.0, 1.0}, Kernel::gaussian());
    const auto expected = oracles::mixcobra_gaussian_weights({{0.0}, {1.0}}, {{0.0}, {1.0}}, qx,
                                                             qp, 1.0, 1.0);
    REQUIRE(w.weights.size() == 2);
    CHECK(w.weights[0] == doctest::Approx(expected[0]).epsilon(1e-14));
    CHECK(w.weights[1] == doctest::Approx(expected[1]).epsilon(1e-14));
    CHECK(w.weights[0] == doctest::Approx(0.880797).epsilon(1e-5));
    CHECK(w.weights[1] == doctest::Approx(0.119203).epsilon(1e-5));

    const double pred =
        mixcobra_predict_regression(qx, qp, train, preds, {1.0, 1.0}, Kernel::gaussian());
    CHECK(pred == doctest::Approx(0.119203).epsilon(1e-5));

    // the class-1 mass (0.119) is below the class-0 mass (0.881)
    const auto ctrain = tiny_dataset({{0.0}, {1.0}}, {0.0, 1.0}, Task::classification);
    CHECK(mixcobra_predict_class(qx, qp, ctrain, preds, {1.0, 1.0}, Kernel::gaussian()) == 0);
}

TEST_CASE("uniform-ball kernel far from every point degenerates") {
    const auto train = tiny_dataset({{5.0}, {6.0}, {7.0}}, {0.2, 0.4, 0.6});
    const auto preds = tiny_predictions({{5.0}, {6.0}, {7.0}});
    const std::vector<double> qx{0.0}, qp{0.0};

    const auto w = mixcobra_weights(qx, qp, train, preds, {1.0, 1.0}, Kernel::uniform_ball());
    CHECK(w.degenerate);
    CHECK(w.weights == std::vector<double>{0.0, 0.0, 0.0});

    // fallback: the global training-target mean
    CHECK(mixcobra_predict_regression(qx, qp, train, preds, {1.0, 1.0}, Kernel::uniform_ball()) ==
          doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("constant targets yield their value under any weights") {
    const auto train = tiny_dataset({{0.0}, {1.0}, {2.0}}, {0.7, 0.7, 0.7});
    const auto preds = tiny_predictions({{0.1}, {0.2}, {0.3}});
    const double pred = mixcobra_predict_regression(std::vector<double>{0.5},
                                                    std::vector<double>{0.15}, train, preds,
                                                    {1.0, 1.0}, Kernel::gaussian());
    CHECK(pred == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("classification edge cases") {
    const Kernel kernel = Kernel::gaussian();
    SUBCASE("all targets one") {
        const auto train = tiny_dataset({{0.0}, {1.0}}, {1.0, 1.0}, Task::classification);
        const auto preds = tiny_predictions({{1.0}, {1.0}});
        CHECK(mixcobra_predict_class(std::vector<double>{0.5}, std::vector<double>{1.0}, train,
                                     preds, {1.0, 1.0}, kernel) == 1);
    }
    SUBCASE("equal masses resolve to zero") {
        // symmetric points, one per class: identical kernel mass
        const auto train = tiny_dataset({{-1.0}, {1.0}}, {1.0, 0.0}, Task::classification);
        const auto preds = tiny_predictions({{0.5}, {0.5}});
        CHECK(mixcobra_predict_class(std::vector<double>{0.0}, std::vector<double>{0.5}, train,
                                     preds, {1.0, 1.0}, kernel) == 0);
    }
}

TEST_CASE("mixcobra input validation") {
    const auto train = tiny_dataset({{0.0, 1.0}}, {0.5});
    const auto preds = tiny_predictions({{0.0}});
    const Kernel kernel = Kernel::gaussian();
    CHECK_THROWS_AS(mixcobra_weights(std::vector<double>{0.0}, std::vector<double>{0.0}, train,
                                     preds, {1.0, 1.0}, kernel),
                    std::invalid_argument);
    CHECK_THROWS_AS(mixcobra_weights(std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 0.0},
                                     train, preds, {1.0, 1.0}, kernel),
                    std::invalid_argument);
    const double nan = std::nan("");
    CHECK_THROWS_AS(mixcobra_weights(std::vector<double>{nan, 0.0}, std::vector<double>{0.0},
                                     train, preds, {1.0, 1.0}, kernel),
                    std::invalid_argument);
}

TEST_CASE("cobra weights on the worked two-machine example") {
    const auto preds = tiny_predictions({{0.1, 0.2}, {0.6, 0.1}});
    const std::vector<double> qp{0.0, 0.0};

    SUBCASE("gamma = 1 requires both machines") {
        const auto w = cobra_weights(qp, preds, {0.5, 1.0});
        CHECK(w.weights == std::vector<double>{1.0, 0.0});  // row 2 fails machine 1
    }
    SUBCASE("gamma = 0.5 admits both rows") {
        const auto w = cobra_weights(qp, preds, {0.5, 0.5});
        CHECK(w.weights == std::vector<double>{0.5, 0.5});
    }
    SUBCASE("huge delta selects everything") {
        const auto w = cobra_weights(qp, preds, {1e12, 1.0});
        CHECK(w.weights == std::vector<double>{0.5, 0.5});
    }
}

TEST_CASE("cobra regression predictions and fallback") {
    const auto train = tiny_dataset({{0.0}, {1.0}}, {0.3, 0.9});
    SUBCASE("point mass") {
        const auto preds = tiny_predictions({{0.0}, {5.0}});
        CHECK(cobra_predict_regression(std::vector<double>{0.0}, train, preds, {0.5, 1.0}) ==
              doctest::Approx(0.3).epsilon(1e-12));
    }
    SUBCASE("even split averages") {
        const auto preds = tiny_predictions({{0.0}, {0.1}});
        CHECK(cobra_predict_regression(std::vector<double>{0.0}, train, preds, {0.5, 1.0}) ==
              doctest::Approx(0.6).epsilon(1e-12));
    }
    SUBCASE("degenerate falls back to the mean") {
        const auto preds = tiny_predictions({{5.0}, {9.0}});
        CHECK(cobra_predict_regression(std::vector<double>{0.0}, train, preds, {0.5, 1.0}) ==
              doctest::Approx(0.6).epsilon(1e-12));
    }
}

TEST_CASE("cobra classification vote") {
    const auto preds = tiny_predictions({{0.0}, {0.0}, {0.0}});
    SUBCASE("majority wins") {
        const auto train = tiny_dataset({{0.0}, {1.0}, {2.0}}, {1.0, 1.0, 0.0}, Task::classification);
        CHECK(cobra_predict_class(std::vector<double>{0.0}, train, preds, {0.5, 1.0}) == 1);
    }
    SUBCASE("tie resolves to zero") {
        const auto preds2 = tiny_predictions({{0.0}, {0.0}});
        const auto train = tiny_dataset({{0.0}, {1.0}}, {1.0, 0.0}, Task::classification);
        CHECK(cobra_predict_class(std::vector<double>{0.0}, train, preds2, {0.5, 1.0}) == 0);
    }
    SUBCASE("no selected points resolves to zero") {
        const auto train = tiny_dataset({{0.0}, {1.0}, {2.0}}, {1.0, 1.0, 1.0}, Task::classification);
        CHECK(cobra_predict_class(std::vector<double>{9.0}, train, preds, {0.5, 1.0}) == 0);
    }
}

TEST_CASE("cobra matches brute force on exhaustive small grids") {
    // all seeded datasets with n <= 6, p <= 3 over the delta/gamma grid
    const std::vector<double> gammas{1.0 / 3.0, 2.0 / 3.0, 1.0};
    for (std::size_t n = 1; n <= 6; ++n)
        for (std::size_t p = 1; p <= 3; ++p)
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                const auto preds = oracles::random_predictions(seed * 91 + n * 7 + p, n, p);
                Rng rng(seed + 1000);
                std::vector<double> qp(p);
                for (auto& v : qp) v = rng.uniform01();
                std::vector<std::vector<double>> rows(n, std::vector<double>(p));
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t m = 0; m < p; ++m) rows[i][m] = preds.values(i, m);

                for (int dstep = 0; dstep <= 10; ++dstep)
                    for (double gamma : gammas) {
                        const double delta = 0.1 * dstep;
                        const auto w = cobra_weights(qp, preds, {delta, gamma});
                        const auto expected = oracles::cobra_weights_bruteforce(rows, qp, delta, gamma);
                        CHECK(w.weights == expected);
                        CHECK(w.degenerate ==
                              (std::accumulate(expected.begin(), expected.end(), 0.0) == 0.0));
                    }
            }
}

TEST_CASE("enlarging delta never shrinks the selected set") {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(8);
        const std::size_t p = 1 + rng.below(4);
        const auto preds = oracles::random_predictions(rng.next_u64(), n, p);
        std::vector<double> qp(p);
        for (auto& v : qp) v = rng.uniform01();
        const double gamma = (1.0 + static_cast<double>(rng.below(p))) / static_cast<double>(p);

        std::size_t previous = 0;
        for (double delta = 0.0; delta <= 1.05; delta += 0.1) {
            const auto w = cobra_weights(qp, preds, {delta, gamma});
            std::size_t selected = 0;
            for (double v : w.weights) selected += v > 0.0;
            CHECK(selected >= previous);
            previous = selected;
        }
    }
}

TEST_CASE("nadaraya-watson reduction with no prediction columns") {
    Rng rng(202);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 20;
        Dataset train = oracles::random_dataset(rng.next_u64(), n, 1);
        MachinePredictions empty;
        empty.values = Matrix(n, 0);

        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = train.features(i, 0);
            ys[i] = train.targets[i];
        }
        const double alpha = rng.uniform(0.3, 2.0);
        for (int q = 0; q < 10; ++q) {
            const std::vector<double> query{rng.uniform(-2.0, 2.0)};
            const double got = mixcobra_predict_regression(query, {}, train, empty,
                                                           {alpha, 1.0}, Kernel::gaussian());
            const double expected = oracles::nadaraya_watson(query[0], xs, ys, alpha);
            CHECK(got == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("weight laws over random cases") {
    Rng rng(303);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.below(20);
        const std::size_t d = 1 + rng.below(4);
        const std::size_t p = 1 + rng.below(4);
        const Dataset train = oracles::random_dataset(rng.next_u64(), n, d);
        const MachinePredictions preds = oracles::random_predictions(rng.next_u64(), n, p);
        std::vector<double> qx(d), qp(p);
        for (auto& v : qx) v = rng.uniform(-2.0, 2.0);
        for (auto& v : qp) v = rng.uniform01();
        const MixCobraParams params{rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0)};

        const auto w = mixcobra_weights(qx, qp, train, preds, params, Kernel::gaussian());
        REQUIRE_FALSE(w.degenerate);
        double total = 0.0;
        for (double v : w.weights) {
            CHECK(v >= 0.0);
            total += v;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("permuting training rows permutes weights exactly and fixes predictions") {
    Rng rng(404);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(15);
        const Dataset train = oracles::random_dataset(rng.next_u64(), n, 2);
        const MachinePredictions preds = oracles::random_predictions(rng.next_u64(), n, 2);
        const std::vector<double> qx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const std::vector<double> qp{rng.uniform01(), rng.uniform01()};
        const MixCobraParams params{0.8, 1.1};

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        rng.shuffle(perm);
        const Dataset train_perm = train.subset(perm);
        const MachinePredictions preds_perm = preds.subset(perm);

        const auto w = mixcobra_weights(qx, qp, train, preds, params, Kernel::gaussian());
        const auto w_perm = mixcobra_weights(qx, qp, train_perm, preds_perm, params, Kernel::gaussian());
        for (std::size_t i = 0; i < n; ++i) CHECK(w_perm.weights[i] == w.weights[perm[i]]);

        const double pred =
            mixcobra_predict_regression(qx, qp, train, preds, params, Kernel::gaussian());
        const double pred_perm =
            mixcobra_predict_regression(qx, qp, train_perm, preds_perm, params, Kernel::gaussian());
        CHECK(pred == pred_perm);
    }
}

TEST_CASE("positive kernel scaling changes no weight") {
    Rng rng(505);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(10);
        const Dataset train = oracles::random_dataset(rng.next_u64(), n, 2);
        const MachinePredictions preds = oracles::random_predictions(rng.next_u64(), n, 2);
        const std::vector<double> qx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const std::vector<double> qp{rng.uniform01(), rng.uniform01()};
        const MixCobraParams params{1.0, 1.0};

        const auto base = mixcobra_weights(qx, qp, train, preds, params, Kernel::gaussian());

        // power-of-two scales: multiplication is exact, so equality is bitwise
        const double pow2 = std::ldexp(1.0, static_cast<int>(rng.below(16)) - 8);
        const Kernel scaled2 =
            Kernel::custom([pow2](double u) { return pow2 * std::exp(-u); }, pow2 * std::exp(-1.0), 1.0);
        const auto w2 = mixcobra_weights(qx, qp, train, preds, params, scaled2);
        CHECK(w2.weights == base.weights);

        // arbitrary positive scales agree to rounding
        const double s = rng.uniform(0.1, 7.0);
        const Kernel scaled =
            Kernel::custom([s](double u) { return s * std::exp(-u); }, s * std::exp(-1.0), 1.0);
        const auto ws = mixcobra_weights(qx, qp, train, preds, params, scaled);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(ws.weights[i] == doctest::Approx(base.weights[i]).epsilon(1e-14));
    }
}

TEST_CASE("classification agrees with thresholded regression on 0/1 targets") {
    Rng rng(606);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(15);
        const Dataset train = oracles::random_dataset(rng.next_u64(), n, 2, Task::classification);
        const MachinePredictions preds = oracles::random_predictions(rng.next_u64(), n, 2);
        const std::vector<double> qx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const std::vector<double> qp{rng.uniform01(), rng.uniform01()};
        const MixCobraParams params{rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0)};

        const double value =
            mixcobra_predict_regression(qx, qp, train, preds, params, Kernel::gaussian());
        if (std::abs(value - 0.5) < 1e-9) continue;  // knife-edge, both conventions tie to 0
        const int label = mixcobra_predict_class(qx, qp, train, preds, params, Kernel::gaussian());
        CHECK(label == (value > 0.5 ? 1 : 0));
    }
}

TEST_CASE("split_sample sizes, clamping, and determinism") {
    const Dataset data = oracles::random_dataset(99, 10, 2);
    const auto [a, b] = split_sample(data, 0.5, 7);
    CHECK(a.n() == 5);
    CHECK(b.n() == 5);

    const Dataset tiny = oracles::random_dataset(98, 3, 2);
    const auto [ta, tb] = split_sample(tiny, 0.9, 7);
    CHECK(ta.n() == 2);  // round(2.7) = 3 clamped to n - 1
    CHECK(tb.n() == 1);

    const auto [a2, b2] = split_sample(data, 0.5, 7);
    CHECK(a2.features == a.features);
    CHECK(b2.features == b.features);
    CHECK(a2.targets == a.targets);

    // disjoint cover: every original row appears exactly once
    const auto [ia, ib] = split_indices(10, 0.5, 7);
    std::vector<std::size_t> all(ia);
    all.insert(all.end(), ib.begin(), ib.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
}
