#ifndef MMIFS_PROBABILITY_MODEL_HPP
#define MMIFS_PROBABILITY_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "json.hpp"
#include "mmifs/error.hpp"
#include "mmifs/rng.hpp"
#include "mmifs/subset.hpp"

namespace mmifs {

namespace detail {

// softmax restricted to features outside the selected set
inline std::vector<double> probabilities_from_logw(const std::vector<double>& logw,
                                                   const std::vector<char>& in_set) {
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < logw.size(); ++j) {
        if (!in_set[j]) { max_log = std::max(max_log, logw[j]); }
    }
    std::vector<double> p(logw.size(), 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < logw.size(); ++j) {
        if (!in_set[j]) {
            p[j] = std::exp(logw[j] - max_log);
            total += p[j];
        }
    }
    for (double& v : p) { v /= total; }
    return p;
}

}  // namespace detail

struct ModelParams {
    double alpha = 0.1;
    double beta = 0.3;
    double sv_min = 0.2;
    double sv_max = 5.0;
    double im_min = 0.2;
    double im_max = 5.0;
};

// Learned sampling model: a per-feature significance score and a symmetric
// pairwise interaction score, both kept strictly positive by clamping.
class ProbabilityModel {
  public:
    // All-ones scores; initial sampling is uniform.
    static ProbabilityModel uniform(int n_features) {
        if (n_features < 1) { throw error("ProbabilityModel: need at least one feature"); }
        ProbabilityModel m;
        m.n_ = n_features;
        m.sv_.assign(static_cast<std::size_t>(n_features), 1.0);
        m.im_.assign(static_cast<std::size_t>(n_features) * n_features, 1.0);
        return m;
    }

    int n_features() const { return n_; }

    double sv(int i) const { return sv_[static_cast<std::size_t>(i)]; }
    double im(int i, int j) const { return im_[static_cast<std::size_t>(i) * n_ + j]; }

    void set_sv(int i, double v) {
        if (v <= 0.0) { throw error("ProbabilityModel: significance must be positive"); }
        sv_[static_cast<std::size_t>(i)] = v;
    }

    void set_im(int i, int j, double v) {
        if (v <= 0.0) { throw error("ProbabilityModel: interaction must be positive"); }
        if (i == j) { throw error("ProbabilityModel: diagonal is unused"); }
        im_[static_cast<std::size_t>(i) * n_ + j] = v;
        im_[static_cast<std::size_t>(j) * n_ + i] = v;
    }

    // p[j] = sv[j] / sum_k sv[k]
    std::vector<double> first_feature_probabilities() const {
        double total = 0.0;
        for (double v : sv_) { total += v; }
        std::vector<double> p(sv_.size());
        for (std::size_t j = 0; j < sv_.size(); ++j) { p[j] = sv_[j] / total; }
        return p;
    }

    // For each candidate j outside the selected set A:
    //   weight(j) = sv[j] * prod_{l in A} im[j][l]
    // normalized over the unselected features; selected features get 0.
    // Accumulated in the log domain; the product underflows for large A.
    std::vector<double> conditional_probabilities(std::span<const int> selected) const {
        if (selected.empty()) {
            throw error("conditional_probabilities: selected set is empty");
        }
        if (static_cast<int>(selected.size()) >= n_) {
            throw error("conditional_probabilities: no unselected features remain");
        }
        std::vector<double> logw(static_cast<std::size_t>(n_));
        for (int j = 0; j < n_; ++j) { logw[static_cast<std::size_t>(j)] = std::log(sv(j)); }
        std::vector<char> in_set(static_cast<std::size_t>(n_), 0);
        for (int l : selected) {
            if (l < 0 || l >= n_) { throw error("conditional_probabilities: index out of range"); }
            in_set[static_cast<std::size_t>(l)] = 1;
            for (int j = 0; j < n_; ++j) { logw[static_cast<std::size_t>(j)] += std::log(im(j, l)); }
        }
        return detail::probabilities_from_logw(logw, in_set);
    }

    // One update per designated (winner, loser) pair. Significance moves per
    // feature: +alpha where only the winner selected it, -alpha where only
    // the loser did. Interaction moves per unordered pair:
    //   winner has both, loser neither      -> +alpha
    //   winner has both, loser exactly one  -> +beta
    //   winner neither, loser both          -> -alpha
    //   winner exactly one, loser both      -> -beta
    // Everything clamps into the configured bounds; symmetry is preserved.
    void update(const FeatureSubset& winner, const FeatureSubset& loser,
                const ModelParams& params) {
        if (winner.size() != loser.size() || winner.size() != n_) {
            throw error("ProbabilityModel::update: mask length mismatch");
        }
        std::vector<int> changed;  // features where winner and loser differ
        for (int i = 0; i < n_; ++i) {
            if (winner.test(i) != loser.test(i)) { changed.push_back(i); }
        }
        std::vector<char> is_changed(static_cast<std::size_t>(n_), 0);
        for (int i : changed) { is_changed[static_cast<std::size_t>(i)] = 1; }

        for (int i : changed) {
            double& v = sv_[static_cast<std::size_t>(i)];
            v = std::clamp(v + (winner.test(i) ? params.alpha : -params.alpha), params.sv_min,
                           params.sv_max);
        }
        // pairs with both features unchanged sit on the identity diagonal
        for (int i : changed) {
            for (int j = 0; j < n_; ++j) {
                if (j == i) { continue; }
                if (is_changed[static_cast<std::size_t>(j)] && j < i) { continue; }
                const double delta = pair_delta(winner.test(i), winner.test(j), loser.test(i),
                                                loser.test(j), params);
                if (delta != 0.0) {
                    const double v = std::clamp(im(i, j) + delta, params.im_min, params.im_max);
                    im_[static_cast<std::size_t>(i) * n_ + j] = v;
                    im_[static_cast<std::size_t>(j) * n_ + i] = v;
                }
            }
        }
    }

    friend void to_json(nlohmann::json& j, const ProbabilityModel& m) {
        nlohmann::json im_rows = nlohmann::json::array();
        for (int i = 0; i < m.n_; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k < m.n_; ++k) { row.push_back(m.im(i, k)); }
            im_rows.push_back(std::move(row));
        }
        j = nlohmann::json{{"n_features", m.n_}, {"sv", m.sv_}, {"im", std::move(im_rows)}};
    }

    friend void from_json(const nlohmann::json& j, ProbabilityModel& m) {
        const int n = j.at("n_features").get<int>();
        m = ProbabilityModel::uniform(n);
        m.sv_ = j.at("sv").get<std::vector<double>>();
        if (static_cast<int>(m.sv_.size()) != n) {
            throw error("ProbabilityModel: sv length mismatch in JSON");
        }
        const auto& rows = j.at("im");
        if (static_cast<int>(rows.size()) != n) {
            throw error("ProbabilityModel: im shape mismatch in JSON");
        }
        for (int i = 0; i < n; ++i) {
            const auto row = rows[static_cast<std::size_t>(i)].get<std::vector<double>>();
            if (static_cast<int>(row.size()) != n) {
                throw error("ProbabilityModel: im shape mismatch in JSON");
            }
            for (int k = 0; k < n; ++k) {
                m.im_[static_cast<std::size_t>(i) * n + k] = row[static_cast<std::size_t>(k)];
            }
        }
    }

  private:
    static double pair_delta(bool wi, bool wj, bool li, bool lj, const ModelParams& p) {
        if (wi && wj) {
            if (!li && !lj) { return p.alpha; }
            if (li != lj) { return p.beta; }
            return 0.0;
        }
        if (!wi && !wj) {
            return (li && lj) ? -p.alpha : 0.0;
        }
        // winner selected exactly one of the pair
        return (li && lj) ? -p.beta : 0.0;
    }

    int n_ = 0;
    std::vector<double> sv_;
    std::vector<double> im_;  // n x n, symmetric, diagonal unused
};

// Fitness-proportionate pick from an explicit distribution. The distribution
// must sum to 1 within 1e-9 and contain at least one positive entry.
inline int roulette_select(std::span<const double> p, Rng& rng) {
    double total = 0.0;
    int last_positive = -1;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] < 0.0) { throw error("roulette_select: negative probability"); }
        total += p[j];
        if (p[j] > 0.0) { last_positive = static_cast<int>(j); }
    }
    if (last_positive < 0) { throw error("roulette_select: all-zero distribution"); }
    if (std::abs(total - 1.0) > 1e-9) {
        throw error("roulette_select: probabilities do not sum to 1");
    }
    const double u = rng.uniform() * total;
    double cum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        cum += p[j];
        if (u < cum) { return static_cast<int>(j); }
    }
    return last_positive;
}

// Round-to-nearest then clamp into [1, n].
inline int subset_size_from_draw(double x, int n_features) {
    const long long rounded = std::llround(x);
    return static_cast<int>(std::clamp<long long>(rounded, 1, n_features));
}

// Subset size guided by a chi-squared draw with r degrees of freedom, where
// r tracks the current winner's feature count.
inline int sample_subset_size(int r, int n_features, Rng& rng) {
    if (r < 1) { throw error("sample_subset_size: r must be >= 1"); }
    if (n_features < 1) { throw error("sample_subset_size: n_features must be >= 1"); }
    return subset_size_from_draw(rng.chi_squared(r), n_features);
}

// Draw an offspring of exactly m distinct features: the first by roulette
// over the significance distribution, the rest sequentially without
// replacement by roulette over the conditional distribution given everything
// selected so far. The running log-weights make each step O(n).
inline FeatureSubset generate_offspring_of_size(const ProbabilityModel& model, int m, Rng& rng,
                                                std::vector<int>* order = nullptr) {
    const int n = model.n_features();
    if (m < 1 || m > n) { throw error("generate_offspring_of_size: m out of range"); }

    FeatureSubset subset(n);
    std::vector<char> in_set(static_cast<std::size_t>(n), 0);
    std::vector<double> logw(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) { logw[static_cast<std::size_t>(j)] = std::log(model.sv(j)); }

    const std::vector<double> first = model.first_feature_probabilities();
    int picked = roulette_select(first, rng);
    subset.set(picked, true);
    in_set[static_cast<std::size_t>(picked)] = 1;
    if (order) { order->push_back(picked); }

    for (int d = 2; d <= m; ++d) {
        for (int j = 0; j < n; ++j) {
            logw[static_cast<std::size_t>(j)] += std::log(model.im(j, picked));
        }
        const std::vector<double> p = detail::probabilities_from_logw(logw, in_set);
        picked = roulette_select(p, rng);
        subset.set(picked, true);
        in_set[static_cast<std::size_t>(picked)] = 1;
        if (order) { order->push_back(picked); }
    }
    return subset;
}

inline FeatureSubset generate_offspring(const ProbabilityModel& model, int r, Rng& rng,
                                        std::vector<int>* order = nullptr) {
    const int m = sample_subset_size(r, model.n_features(), rng);
    return generate_offspring_of_size(model, m, rng, order);
}

}  // namespace mmifs

#endif
