#ifndef MMIFS_SYNTH_HPP
#define MMIFS_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mmifs/dataset.hpp"
#include "mmifs/rng.hpp"

namespace mmifs::synth {

namespace detail {

struct Builder {
    Dataset d;
    Rng rng;

    Builder(std::string name, int n_rows, const std::vector<int>& class_counts, int n_features,
            std::uint64_t seed) :
        rng(seed) {
        d.name = std::move(name);
        d.n_features = n_features;
        d.n_classes = static_cast<int>(class_counts.size());
        d.values.assign(static_cast<std::size_t>(n_rows) * n_features, 0.0);
        for (int c = 0; c < d.n_classes; ++c) {
            d.class_names.push_back("c" + std::to_string(c));
            for (int i = 0; i < class_counts[static_cast<std::size_t>(c)]; ++i) {
                d.labels.push_back(c);
            }
        }
        for (int f = 0; f < n_features; ++f) { d.feature_names.push_back("f" + std::to_string(f)); }
    }

    double& cell(int row, int col) {
        return d.values[static_cast<std::size_t>(row) * d.n_features + col];
    }

    // class-conditional gaussian column
    void gaussian(int col, const std::vector<double>& class_means, double sigma) {
        for (int r = 0; r < d.n_rows(); ++r) {
            const int label = d.labels[static_cast<std::size_t>(r)];
            cell(r, col) = class_means[static_cast<std::size_t>(label)] + sigma * rng.normal();
        }
    }

    // two columns that are individually uninformative but jointly separate
    // classes by parity: the sign product of the pair encodes label % 2
    void xor_pair(int col_a, int col_b, double magnitude_sigma) {
        for (int r = 0; r < d.n_rows(); ++r) {
            const int parity = d.labels[static_cast<std::size_t>(r)] % 2;
            const double sign_a = rng.uniform() < 0.5 ? -1.0 : 1.0;
            const double sign_b = (parity == 0) ? sign_a : -sign_a;
            cell(r, col_a) = sign_a * std::abs(1.0 + magnitude_sigma * rng.normal());
            cell(r, col_b) = sign_b * std::abs(1.0 + magnitude_sigma * rng.normal());
        }
    }

    void redundant_copy(int col, int source_col, double noise_sigma) {
        for (int r = 0; r < d.n_rows(); ++r) {
            cell(r, col) = cell(r, source_col) + noise_sigma * rng.normal();
        }
    }

    void noise(int col, double sigma) {
        for (int r = 0; r < d.n_rows(); ++r) { cell(r, col) = sigma * rng.normal(); }
    }
};

}  // namespace detail

// 178 rows, 13 features, 3 classes. Two partially separating columns, a
// parity pair that only pays off jointly (single-bit search has to cross a
// valley to reach it), one redundant copy, the rest noise. Classes overlap
// enough that every extra noise column costs accuracy.
inline Dataset wine_like(std::uint64_t seed = 9001) {
    detail::Builder b("wine_like", 178, {59, 71, 48}, 13, seed);
    b.gaussian(0, {0.0, 1.5, 3.0}, 1.0);
    b.gaussian(1, {1.4, 0.0, 2.7}, 1.0);
    b.xor_pair(2, 3, 0.45);
    b.gaussian(4, {0.0, 0.7, 1.4}, 1.0);
    b.redundant_copy(5, 0, 0.6);
    for (int f = 6; f < 13; ++f) { b.noise(f, 1.0); }
    return b.d;
}

// 699 rows, 9 features, 2 classes. A nested chain of progressively weaker
// single features; no interactions, so greedy growth matches the front.
inline Dataset breast_like(std::uint64_t seed = 9002) {
    detail::Builder b("breast_like", 699, {458, 241}, 9, seed);
    b.gaussian(0, {0.0, 3.0}, 1.0);
    b.gaussian(1, {0.0, 1.4}, 1.0);
    b.gaussian(2, {0.0, 1.0}, 1.0);
    b.gaussian(3, {0.0, 0.85}, 1.0);
    b.gaussian(4, {0.0, 0.7}, 1.0);
    b.gaussian(5, {0.0, 0.6}, 1.0);
    b.gaussian(6, {0.0, 0.5}, 1.0);
    for (int f = 7; f < 9; ++f) { b.noise(f, 1.0); }
    return b.d;
}

}  // namespace mmifs::synth

#endif
