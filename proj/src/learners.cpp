#include "mixcobra/learners.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mixcobra/rng.hpp"
#include "mixcobra/sorted_sum.hpp"

namespace mixcobra {

namespace {

// ---------------------------------------------------------------------------
// small dense linear algebra (normal equations scale: d <= a few dozen)
// ---------------------------------------------------------------------------

// Gaussian elimination with partial pivoting; returns false on a (near-)
// singular pivot so callers can retry with a ridge term.
bool solve_inplace(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    const double tiny = std::max(scale, 1.0) * 1e-12;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        if (std::abs(a[pivot * n + col]) <= tiny) return false;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t row = n; row-- > 0;) {
        double acc = b[row];
        for (std::size_t c = row + 1; c < n; ++c) acc -= a[row * n + c] * b[c];
        b[row] = acc / a[row * n + row];
    }
    return true;
}

// Solves A x = b; on a singular pivot restarts with 1e-8 added to the
// diagonal, which keeps collinear synthetic designs from hard-failing.
std::vector<double> solve_or_ridge(std::vector<double> a, std::vector<double> b, std::size_t n) {
    std::vector<double> a_copy = a;
    std::vector<double> b_copy = b;
    if (solve_inplace(a_copy, b_copy, n)) return b_copy;
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] += 1e-8;
    if (!solve_inplace(a, b, n)) throw std::runtime_error("singular system despite ridge term");
    return b;
}

// ---------------------------------------------------------------------------
// k-nearest neighbors
// ---------------------------------------------------------------------------

class KnnMachine final : public FittedMachine {
public:
    KnnMachine(const Dataset& train, int k)
        : FittedMachine(train.task, train.dim(), "knn" + std::to_string(k)),
          features_(train.features),
          targets_(train.targets),
          k_(std::min<std::size_t>(static_cast<std::size_t>(k), train.n())) {
        if (k < 1) throw std::invalid_argument("knn requires k >= 1");
    }

    double predict(std::span<const double> x) const override {
        check_query(x);
        const std::size_t n = features_.rows();
        std::vector<std::pair<double, std::size_t>> dist(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto xi = features_.row(i);
            double d2 = 0.0;
            for (std::size_t c = 0; c < xi.size(); ++c) {
                const double t = xi[c] - x[c];
                d2 += t * t;
            }
            dist[i] = {d2, i};  // index breaks distance ties
        }
        std::partial_sort(dist.begin(), dist.begin() + k_, dist.end());
        if (task() == Task::regression) {
            double total = 0.0;
            for (std::size_t j = 0; j < k_; ++j) total += targets_[dist[j].second];
            return total / static_cast<double>(k_);
        }
        std::size_t ones = 0;
        for (std::size_t j = 0; j < k_; ++j) ones += targets_[dist[j].second] == 1.0;
        return ones * 2 > k_ ? 1.0 : 0.0;
    }

private:
    Matrix features_;
    std::vector<double> targets_;
    std::size_t k_;
};

// ---------------------------------------------------------------------------
// least-squares linear model
// ---------------------------------------------------------------------------

class LinearMachine final : public FittedMachine {
public:
    explicit LinearMachine(const Dataset& train)
        : FittedMachine(train.task, train.dim(), "lm") {
        const std::size_t d = train.dim();
        const std::size_t m = d + 1;  // intercept first
        std::vector<double> gram(m * m, 0.0);
        std::vector<double> rhs(m, 0.0);
        for (std::size_t i = 0; i < train.n(); ++i) {
            const auto xi = train.point(i);
            const double y = train.targets[i];
            for (std::size_t r = 0; r < m; ++r) {
                const double xr = r == 0 ? 1.0 : xi[r - 1];
                rhs[r] += xr * y;
                for (std::size_t c = 0; c < m; ++c) {
                    const double xc = c == 0 ? 1.0 : xi[c - 1];
                    gram[r * m + c] += xr * xc;
                }
            }
        }
        coef_ = solve_or_ridge(std::move(gram), std::move(rhs), m);
    }

    double predict(std::span<const double> x) const override {
        check_query(x);
        double value = coef_[0];
        for (std::size_t c = 0; c < x.size(); ++c) value += coef_[c + 1] * x[c];
        if (task() == Task::classification) return value > 0.5 ? 1.0 : 0.0;
        return value;
    }

private:
    std::vector<double> coef_;
};

// ---------------------------------------------------------------------------
// logistic regression (IRLS)
// ---------------------------------------------------------------------------

class LogisticMachine final : public FittedMachine {
public:
    explicit LogisticMachine(const Dataset& train)
        : FittedMachine(Task::classification, train.dim(), "logit") {
        const std::size_t n = train.n();
        const std::size_t d = train.dim();
        const std::size_t m = d + 1;

        std::size_t ones = 0;
        for (double y : train.targets) ones += y == 1.0;
        if (ones == 0 || ones == n) {  // single-class sample: constant predictor
            constant_ = true;
            constant_label_ = ones == n ? 1.0 : 0.0;
            return;
        }

        coef_.assign(m, 0.0);
        std::vector<double> hess(m * m);
        std::vector<double> grad(m);
        for (int iter = 0; iter < 50; ++iter) {
            std::fill(hess.begin(), hess.end(), 0.0);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto xi = train.point(i);
                double z = coef_[0];
                for (std::size_t c = 0; c < d; ++c) z += coef_[c + 1] * xi[c];
                const double prob = 1.0 / (1.0 + std::exp(-z));
                const double w = std::max(prob * (1.0 - prob), 1e-12);
                const double resid = train.targets[i] - prob;
                for (std::size_t r = 0; r < m; ++r) {
                    const double xr = r == 0 ? 1.0 : xi[r - 1];
                    grad[r] += xr * resid;
                    for (std::size_t c = 0; c < m; ++c) {
                        const double xc = c == 0 ? 1.0 : xi[c - 1];
                        hess[r * m + c] += w * xr * xc;
                    }
                }
            }
            for (std::size_t i = 0; i < m; ++i) hess[i * m + i] += 1e-8;
            const auto step = solve_or_ridge(hess, grad, m);
            double largest = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                coef_[i] += step[i];
                largest = std::max(largest, std::abs(step[i]));
            }
            if (largest < 1e-10) break;
        }
    }

    double predict(std::span<const double> x) const override {
        check_query(x);
        if (constant_) return constant_label_;
        double z = coef_[0];
        for (std::size_t c = 0; c < x.size(); ++c) z += coef_[c + 1] * x[c];
        return z > 0.0 ? 1.0 : 0.0;
    }

private:
    std::vector<double> coef_;
    bool constant_ = false;
    double constant_label_ = 0.0;
};

// ---------------------------------------------------------------------------
// linear discriminant analysis
// ---------------------------------------------------------------------------

class LdaMachine final : public FittedMachine {
public:
    explicit LdaMachine(const Dataset& train)
        : FittedMachine(Task::classification, train.dim(), "lda") {
        const std::size_t n = train.n();
        const std::size_t d = train.dim();

        std::vector<std::size_t> idx0, idx1;
        for (std::size_t i = 0; i < n; ++i)
            (train.targets[i] == 1.0 ? idx1 : idx0).push_back(i);
        if (idx0.empty() || idx1.empty()) {
            constant_ = true;
            constant_label_ = idx0.empty() ? 1.0 : 0.0;
            return;
        }

        std::vector<double> mean0(d, 0.0), mean1(d, 0.0);
        for (auto i : idx0)
            for (std::size_t c = 0; c < d; ++c) mean0[c] += train.features(i, c);
        for (auto i : idx1)
            for (std::size_t c = 0; c < d; ++c) mean1[c] += train.features(i, c);
        for (std::size_t c = 0; c < d; ++c) {
            mean0[c] /= static_cast<double>(idx0.size());
            mean1[c] /= static_cast<double>(idx1.size());
        }

        // pooled within-class covariance, (n - 2) denominator
        std::vector<double> cov(d * d, 0.0);
        auto accumulate = [&](const std::vector<std::size_t>& idx, const std::vector<double>& mean) {
            for (auto i : idx)
                for (std::size_t r = 0; r < d; ++r) {
                    const double dr = train.features(i, r) - mean[r];
                    for (std::size_t c = 0; c < d; ++c)
                        cov[r * d + c] += dr * (train.features(i, c) - mean[c]);
                }
        };
        accumulate(idx0, mean0);
        accumulate(idx1, mean1);
        const double denom = n > 2 ? static_cast<double>(n - 2) : 1.0;
        for (auto& v : cov) v /= denom;

        std::vector<double> diff(d);
        for (std::size_t c = 0; c < d; ++c) diff[c] = mean1[c] - mean0[c];
        direction_ = solve_or_ridge(std::move(cov), std::move(diff), d);

        double mid = 0.0;
        for (std::size_t c = 0; c < d; ++c) mid += direction_[c] * 0.5 * (mean0[c] + mean1[c]);
        threshold_ = mid - std::log(static_cast<double>(idx1.size()) / static_cast<double>(idx0.size()));
    }

    double predict(std::span<const double> x) const override {
        check_query(x);
        if (constant_) return constant_label_;
        double score = 0.0;
        for (std::size_t c = 0; c < x.size(); ++c) score += direction_[c] * x[c];
        return score > threshold_ ? 1.0 : 0.0;
    }

private:
    std::vector<double> direction_;
    double threshold_ = 0.0;
    bool constant_ = false;
    double constant_label_ = 0.0;
};

// ---------------------------------------------------------------------------
// CART tree
// ---------------------------------------------------------------------------

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    double value = 0.0;
    int left = -1;
    int right = -1;
};

// Leaf value: mean for regression, majority label (ties to 0) for
// classification.
double leaf_value(const Dataset& train, const std::vector<std::size_t>& idx, Task task) {
    if (task == Task::regression) {
        std::vector<double> vals;
        vals.reserve(idx.size());
        for (auto i : idx) vals.push_back(train.targets[i]);
        return sorted_sum(std::move(vals)) / static_cast<double>(idx.size());
    }
    std::size_t ones = 0;
    for (auto i : idx) ones += train.targets[i] == 1.0;
    return ones * 2 > idx.size() ? 1.0 : 0.0;
}

bool node_is_pure(const Dataset& train, const std::vector<std::size_t>& idx) {
    for (std::size_t j = 1; j < idx.size(); ++j)
        if (train.targets[idx[j]] != train.targets[idx[0]]) return false;
    return true;
}

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();  // lower is better
};

// Best split by SSE (regression) or weighted Gini (classification), scanning
// midpoints of sorted distinct values. Features and thresholds are scanned in
// ascending order and only strict improvements are kept, so ties resolve to
// the lowest feature index and then the lowest threshold.
SplitChoice best_split(const Dataset& train, const std::vector<std::size_t>& idx, int min_leaf) {
    SplitChoice best;
    const std::size_t d = train.dim();
    const bool regression = train.task == Task::regression;

    std::vector<std::size_t> order(idx);
    for (std::size_t f = 0; f < d; ++f) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return train.features(a, f) < train.features(b, f);
        });

        // suffix statistics
        double right_sum = 0.0, right_sq = 0.0, right_ones = 0.0;
        for (auto i : order) {
            right_sum += train.targets[i];
            right_sq += train.targets[i] * train.targets[i];
            right_ones += train.targets[i] == 1.0;
        }
        double left_sum = 0.0, left_sq = 0.0, left_ones = 0.0;

        for (std::size_t j = 0; j + 1 < order.size(); ++j) {
            const double y = train.targets[order[j]];
            left_sum += y;
            left_sq += y * y;
            left_ones += y == 1.0;
            right_sum -= y;
            right_sq -= y * y;
            right_ones -= y == 1.0;

            const double lo = train.features(order[j], f);
            const double hi = train.features(order[j + 1], f);
            if (!(lo < hi)) continue;  // no distinct boundary here

            const auto nl = static_cast<double>(j + 1);
            const auto nr = static_cast<double>(order.size() - j - 1);
            if (nl < min_leaf || nr < min_leaf) continue;

            double score;
            if (regression) {
                score = (right_sq - right_sum * right_sum / nr) +
                        (left_sq - left_sum * left_sum / nl);
            } else {
                const double gl = 2.0 * (left_ones / nl) * (1.0 - left_ones / nl);
                const double gr = 2.0 * (right_ones / nr) * (1.0 - right_ones / nr);
                score = nl * gl + nr * gr;
            }
            if (score < best.score) {
                double threshold = lo + 0.5 * (hi - lo);
                if (!(threshold < hi)) threshold = lo;  // adjacent floats: keep both sides nonempty
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = threshold;
                best.score = score;
            }
        }
    }
    return best;
}

class CartTree {
public:
    CartTree() = default;

    void fit(const Dataset& train, std::vector<std::size_t> idx, int max_depth, int min_leaf) {
        nodes_.clear();
        build(train, std::move(idx), max_depth < 0 ? std::numeric_limits<int>::max() : max_depth,
              std::max(min_leaf, 1));
    }

    double predict(std::span<const double> x) const {
        int node = 0;
        while (nodes_[node].feature >= 0)
            node = x[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left
                                                                     : nodes_[node].right;
        return nodes_[node].value;
    }

private:
    int build(const Dataset& train, std::vector<std::size_t> idx, int depth_left, int min_leaf) {
        const int self = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        nodes_[self].value = leaf_value(train, idx, train.task);

        if (depth_left == 0 || idx.size() < 2 || node_is_pure(train, idx)) return self;

        const SplitChoice split = best_split(train, idx, min_leaf);
        if (!split.found) return self;

        std::vector<std::size_t> left_idx, right_idx;
        for (auto i : idx)
            (train.features(i, split.feature) <= split.threshold ? left_idx : right_idx).push_back(i);

        nodes_[self].feature = split.feature;
        nodes_[self].threshold = split.threshold;
        const int left = build(train, std::move(left_idx), depth_left - 1, min_leaf);
        nodes_[self].left = left;
        const int right = build(train, std::move(right_idx), depth_left - 1, min_leaf);
        nodes_[self].right = right;
        return self;
    }

    std::vector<TreeNode> nodes_;
};

class TreeMachine final : public FittedMachine {
public:
    TreeMachine(const Dataset& train, int max_depth, int min_leaf)
        : FittedMachine(train.task, train.dim(), "cart") {
        std::vector<std::size_t> idx(train.n());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        tree_.fit(train, std::move(idx), max_depth, min_leaf);
    }

    double predict(std::span<const double> x) const override {
        check_query(x);
        return tree_.predict(x);
    }

private:
    CartTree tree_;
};

class BaggedTreesMachine final : public FittedMachine {
public:
    BaggedTreesMachine(const Dataset& train, int n_trees, int max_depth, bool bootstrap,
                       std::uint64_t seed)
        : FittedMachine(train.task, train.dim(), "bag") {
        if (n_trees < 1) throw std::invalid_argument("bagging requires n_trees >= 1");
        trees_.resize(n_trees);
        const std::size_t n = train.n();
        for (int t = 0; t < n_trees; ++t) {
            std::vector<std::size_t> idx(n);
            if (bootstrap) {
                Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
                for (auto& i : idx) i = rng.below(n);
            } else {
                std::iota(idx.begin(), idx.end(), std::size_t{0});
            }
            trees_[t].fit(train, std::move(idx), max_depth, 1);
        }
    }

    double predict(std::span<const double> x) const override {
        check_query(x);
        if (task() == Task::regression) {
            std::vector<double> votes(trees_.size());
            for (std::size_t t = 0; t < trees_.size(); ++t) votes[t] = trees_[t].predict(x);
            return sorted_sum(std::move(votes)) / static_cast<double>(trees_.size());
        }
        std::size_t ones = 0;
        for (const auto& tree : trees_) ones += tree.predict(x) == 1.0;
        return ones * 2 > trees_.size() ? 1.0 : 0.0;
    }

private:
    std::vector<CartTree> trees_;
};

// ---------------------------------------------------------------------------
// pure-noise machine (stress-testing aggregators against a bad estimator)
// ---------------------------------------------------------------------------

class NoiseMachine final : public FittedMachine {
public:
    NoiseMachine(const Dataset& train, std::uint64_t seed)
        : FittedMachine(train.task, train.dim(), "noise"), seed_(seed) {}

    // Uniform draw in [0, 1) keyed by (seed, x): deterministic per fitted
    // state yet carries no information about the target.
    double predict(std::span<const double> x) const override {
        check_query(x);
        std::uint64_t h = seed_ ^ 0x9e3779b97f4a7c15ULL;
        for (double v : x) {
            h ^= std::bit_cast<std::uint64_t>(v);
            (void)splitmix64(h);
        }
        const double u = static_cast<double>(splitmix64(h) >> 11) * 0x1.0p-53;
        if (task() == Task::classification) return u < 0.5 ? 0.0 : 1.0;
        return u;
    }

private:
    std::uint64_t seed_;
};

}  // namespace

void FittedMachine::check_query(std::span<const double> x) const {
    if (x.size() != input_dim_)
        throw std::invalid_argument("query dimension " + std::to_string(x.size()) +
                                    " does not match fitted dimension " +
                                    std::to_string(input_dim_));
}

MachineSpec MachineSpec::knn(int k) {
    MachineSpec s;
    s.kind = Kind::knn;
    s.k = k;
    return s;
}

MachineSpec MachineSpec::linear() {
    MachineSpec s;
    s.kind = Kind::linear;
    return s;
}

MachineSpec MachineSpec::logistic() {
    MachineSpec s;
    s.kind = Kind::logistic;
    return s;
}

MachineSpec MachineSpec::lda() {
    MachineSpec s;
    s.kind = Kind::lda;
    return s;
}

MachineSpec MachineSpec::tree(int max_depth, int min_leaf) {
    MachineSpec s;
    s.kind = Kind::tree;
    s.max_depth = max_depth;
    s.min_leaf = min_leaf;
    return s;
}

MachineSpec MachineSpec::bagged_trees(int n_trees, int max_depth, bool bootstrap) {
    MachineSpec s;
    s.kind = Kind::bagged_trees;
    s.n_trees = n_trees;
    s.max_depth = max_depth;
    s.bootstrap = bootstrap;
    return s;
}

MachineSpec MachineSpec::noise() {
    MachineSpec s;
    s.kind = Kind::noise;
    return s;
}

MachineSpec MachineSpec::from_token(const std::string& token) {
    if (token.rfind("knn", 0) == 0 && token.size() > 3) {
        const int k = std::stoi(token.substr(3));
        if (k < 1) throw std::invalid_argument("invalid machine token '" + token + "'");
        return knn(k);
    }
    if (token == "lm") return linear();
    if (token == "logit") return logistic();
    if (token == "lda") return lda();
    if (token == "cart") return tree();
    if (token == "bag") return bagged_trees();
    if (token == "noise") return noise();
    throw std::invalid_argument("unknown machine token '" + token + "'");
}

std::string MachineSpec::default_name() const {
    switch (kind) {
    case Kind::knn: return "knn" + std::to_string(k);
    case Kind::linear: return "lm";
    case Kind::logistic: return "logit";
    case Kind::lda: return "lda";
    case Kind::tree: return "cart";
    case Kind::bagged_trees: return "bag";
    case Kind::noise: return "noise";
    }
    return "machine";
}

std::unique_ptr<FittedMachine> fit(const MachineSpec& spec, const Dataset& train,
                                   std::uint64_t seed) {
    train.validate();
    switch (spec.kind) {
    case MachineSpec::Kind::knn: return std::make_unique<KnnMachine>(train, spec.k);
    case MachineSpec::Kind::linear: return std::make_unique<LinearMachine>(train);
    case MachineSpec::Kind::logistic:
        if (train.task != Task::classification)
            throw std::invalid_argument("logistic regression requires a classification task");
        return std::make_unique<LogisticMachine>(train);
    case MachineSpec::Kind::lda:
        if (train.task != Task::classification)
            throw std::invalid_argument("lda requires a classification task");
        return std::make_unique<LdaMachine>(train);
    case MachineSpec::Kind::tree:
        return std::make_unique<TreeMachine>(train, spec.max_depth, spec.min_leaf);
    case MachineSpec::Kind::bagged_trees:
        return std::make_unique<BaggedTreesMachine>(train, spec.n_trees, spec.max_depth,
                                                    spec.bootstrap, seed);
    case MachineSpec::Kind::noise: return std::make_unique<NoiseMachine>(train, seed);
    }
    throw std::invalid_argument("unknown machine kind");
}

MachinePredictions predict_matrix(const std::vector<std::unique_ptr<FittedMachine>>& machines,
                                  const Dataset& data) {
    if (machines.empty()) throw std::invalid_argument("no machines given");
    MachinePredictions out;
    out.values = Matrix(data.n(), machines.size());
    out.machine_names.reserve(machines.size());
    for (const auto& machine : machines) out.machine_names.push_back(machine->name());
    for (std::size_t i = 0; i < data.n(); ++i)
        for (std::size_t m = 0; m < machines.size(); ++m)
            out.values(i, m) = machines[m]->predict(data.point(i));
    return out;
}

}  // namespace mixcobra
