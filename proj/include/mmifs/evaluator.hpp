#ifndef MMIFS_EVALUATOR_HPP
#define MMIFS_EVALUATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mmifs/dataset.hpp"
#include "mmifs/error.hpp"
#include "mmifs/objectives.hpp"
#include "mmifs/rng.hpp"
#include "mmifs/subset.hpp"

namespace mmifs {

namespace detail {

// Majority vote over the k nearest train rows under Euclidean distance on
// the selected columns. Vote ties break by smallest summed distance among
// the tied classes, then by lowest class id.
inline int knn_classify_row(std::span<const double> query, const Dataset& train,
                            const std::vector<int>& cols, int k, const std::vector<int>& pool) {
    std::vector<std::pair<double, int>> dist;
    dist.reserve(pool.size());
    for (int t : pool) {
        const auto row = train.row(t);
        double d2 = 0.0;
        for (int c : cols) {
            const double diff = query[static_cast<std::size_t>(c)] -
                                row[static_cast<std::size_t>(c)];
            d2 += diff * diff;
        }
        dist.emplace_back(d2, t);
    }
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    std::sort(dist.begin(), dist.begin() + k);

    std::vector<int> votes(static_cast<std::size_t>(train.n_classes), 0);
    std::vector<double> summed(static_cast<std::size_t>(train.n_classes), 0.0);
    for (int i = 0; i < k; ++i) {
        const int label = train.labels[static_cast<std::size_t>(dist[static_cast<std::size_t>(i)].second)];
        ++votes[static_cast<std::size_t>(label)];
        summed[static_cast<std::size_t>(label)] += std::sqrt(dist[static_cast<std::size_t>(i)].first);
    }
    int best = -1;
    for (int c = 0; c < train.n_classes; ++c) {
        if (votes[static_cast<std::size_t>(c)] == 0) { continue; }
        if (best < 0 || votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)] ||
            (votes[static_cast<std::size_t>(c)] == votes[static_cast<std::size_t>(best)] &&
             summed[static_cast<std::size_t>(c)] < summed[static_cast<std::size_t>(best)])) {
            best = c;
        }
    }
    return best;
}

inline std::vector<int> all_rows(const Dataset& d) {
    std::vector<int> rows(static_cast<std::size_t>(d.n_rows()));
    for (int r = 0; r < d.n_rows(); ++r) { rows[static_cast<std::size_t>(r)] = r; }
    return rows;
}

}  // namespace detail

// Held-out error of a KNN wrapper on the selected features, in percent.
inline double knn_error(const FeatureSubset& subset, const SplitPair& split, int k) {
    if (subset.size() != split.train.n_features) {
        throw error("knn_error: subset length does not match feature count");
    }
    if (!subset.any()) { throw error("knn_error: empty subset"); }
    if (k < 1) { throw error("knn_error: k must be >= 1"); }
    if (k > split.train.n_rows()) { throw error("knn_error: k exceeds train size"); }

    const std::vector<int> cols = subset.selected();
    const std::vector<int> pool = detail::all_rows(split.train);
    int wrong = 0;
    for (int r = 0; r < split.test.n_rows(); ++r) {
        const int predicted = detail::knn_classify_row(split.test.row(r), split.train, cols, k, pool);
        if (predicted != split.test.labels[static_cast<std::size_t>(r)]) { ++wrong; }
    }
    return 100.0 * static_cast<double>(wrong) / static_cast<double>(split.test.n_rows());
}

// Pooled stratified k-fold cross-validation error on the train split only.
// Fold assignment is deterministic in the given seed.
inline double knn_cv_error(const FeatureSubset& subset, const Dataset& train, int k, int folds,
                           std::uint64_t seed) {
    if (folds < 2) { throw error("knn_cv_error: need at least 2 folds"); }
    if (!subset.any()) { throw error("knn_cv_error: empty subset"); }
    if (folds > train.n_rows()) { throw error("knn_cv_error: more folds than rows"); }

    std::vector<int> fold_of(static_cast<std::size_t>(train.n_rows()), 0);
    {
        Rng rng(seed);
        std::vector<std::vector<int>> by_class(static_cast<std::size_t>(train.n_classes));
        for (int r = 0; r < train.n_rows(); ++r) {
            by_class[static_cast<std::size_t>(train.labels[static_cast<std::size_t>(r)])].push_back(r);
        }
        int next = 0;
        for (auto& rows : by_class) {
            rng.shuffle(rows);
            for (int r : rows) {
                fold_of[static_cast<std::size_t>(r)] = next;
                next = (next + 1) % folds;
            }
        }
    }

    const std::vector<int> cols = subset.selected();
    int wrong = 0;
    for (int f = 0; f < folds; ++f) {
        std::vector<int> pool;
        std::vector<int> held;
        for (int r = 0; r < train.n_rows(); ++r) {
            (fold_of[static_cast<std::size_t>(r)] == f ? held : pool).push_back(r);
        }
        if (held.empty()) { continue; }
        if (k > static_cast<int>(pool.size())) {
            throw error("knn_cv_error: k exceeds fold train size");
        }
        for (int r : held) {
            const int predicted = detail::knn_classify_row(train.row(r), train, cols, k, pool);
            if (predicted != train.labels[static_cast<std::size_t>(r)]) { ++wrong; }
        }
    }
    return 100.0 * static_cast<double>(wrong) / static_cast<double>(train.n_rows());
}

struct EvalConfig {
    int k = 5;
    int cv_folds = 0;  // 0: error on the held-out test split
};

struct EvalResult {
    Objectives obj;
    bool cache_miss = false;
};

// Computes Objectives for a subset and memoizes by mask, so re-evaluating a
// subset costs one lookup. Insert-or-get is mutex guarded; a duplicate
// concurrent computation of the same key is idempotent.
class Evaluator {
  public:
    Evaluator(const SplitPair& split, EvalConfig cfg) :
        split_(&split), cfg_(cfg) {}

    EvalResult evaluate(const FeatureSubset& subset) {
        {
            std::lock_guard<std::mutex> lock(mu_);
            ++calls_;
            const auto it = cache_.find(subset);
            if (it != cache_.end()) { return {it->second, false}; }
        }
        const double err = (cfg_.cv_folds > 0)
                               ? knn_cv_error(subset, split_->train, cfg_.k, cfg_.cv_folds,
                                              split_->seed)
                               : knn_error(subset, *split_, cfg_.k);
        const Objectives obj{err, subset.count()};
        std::lock_guard<std::mutex> lock(mu_);
        const auto [it, inserted] = cache_.try_emplace(subset, obj);
        if (inserted) { ++misses_; }
        return {it->second, inserted};
    }

    long misses() const {
        std::lock_guard<std::mutex> lock(mu_);
        return misses_;
    }

    long calls() const {
        std::lock_guard<std::mutex> lock(mu_);
        return calls_;
    }

  private:
    const SplitPair* split_;
    EvalConfig cfg_;
    mutable std::mutex mu_;
    std::unordered_map<FeatureSubset, Objectives, SubsetHash> cache_;
    long misses_ = 0;
    long calls_ = 0;
};

}  // namespace mmifs

#endif
