#ifndef MMIFS_METRICS_HPP
#define MMIFS_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "mmifs/error.hpp"
#include "mmifs/objectives.hpp"

namespace mmifs {

// A non-dominated objective set plus the feature count of its dataset,
// which anchors the hypervolume reference point.
struct Front {
    std::vector<Objectives> points;
    int n_features = 0;
};

inline void validate_front(const Front& f) {
    if (f.points.empty()) { throw error("front is empty"); }
    if (f.n_features < 1) { throw error("front needs a positive feature count"); }
    for (std::size_t i = 0; i < f.points.size(); ++i) {
        for (std::size_t j = 0; j < f.points.size(); ++j) {
            if (i != j && dominates(f.points[i], f.points[j])) {
                throw error("front contains dominated points");
            }
        }
    }
}

// Coverage of p2 by p1: the fraction of p2 weakly dominated by some point
// of p1. Equality on both axes counts as covering, so c_metric(P, P) = 1.
inline double c_metric(const Front& p1, const Front& p2) {
    if (p1.points.empty() || p2.points.empty()) { throw error("c_metric: empty front"); }
    int covered = 0;
    for (const Objectives& b : p2.points) {
        for (const Objectives& a : p1.points) {
            if (weakly_dominates(a, b)) {
                ++covered;
                break;
            }
        }
    }
    return static_cast<double>(covered) / static_cast<double>(p2.points.size());
}

// Normalized 2-D hypervolume. Points map into the unit box as
// (error_pct/100, n_selected/n); the reference point is (1, 1). The value is
// the area of the union of rectangles [e_i, 1] x [f_i, 1], by a staircase
// sweep over the minimal points sorted ascending in e.
inline double hypervolume(const Front& front) {
    if (front.points.empty()) { throw error("hypervolume: empty front"); }
    if (front.n_features < 1) { throw error("hypervolume: invalid feature count"); }

    std::vector<std::pair<double, double>> pts;  // (e, f) normalized
    for (const Objectives& o : front.points) {
        if (o.error_pct < 0.0 || o.error_pct > 100.0 || o.n_selected < 0 ||
            o.n_selected > front.n_features) {
            throw error("hypervolume: point outside the reference box");
        }
        pts.emplace_back(o.error_pct / 100.0,
                         static_cast<double>(o.n_selected) / front.n_features);
    }
    std::sort(pts.begin(), pts.end());
    // keep the staircase minima: after sorting by e (then f), a point counts
    // only if its f is strictly below everything kept so far
    std::vector<std::pair<double, double>> stairs;
    for (const auto& p : pts) {
        if (stairs.empty() || p.second < stairs.back().second) { stairs.push_back(p); }
    }
    double area = 0.0;
    for (std::size_t i = 0; i < stairs.size(); ++i) {
        const double next_e = (i + 1 < stairs.size()) ? stairs[i + 1].first : 1.0;
        area += (std::min(next_e, 1.0) - stairs[i].first) * (1.0 - stairs[i].second);
    }
    return area;
}

// Exact two-sided Wilcoxon signed-rank p-value over the full 2^m sign
// distribution: zero differences dropped, midranks for tied magnitudes,
// p = P(min(S+, S-) <= observed). Ranks are doubled so all sums are integer
// and the rank-sum distribution comes out of an exact counting convolution.
inline double wilcoxon_exact(const std::vector<double>& diffs) {
    std::vector<double> mags;
    std::vector<bool> positive;
    for (double d : diffs) {
        if (d != 0.0) {
            mags.push_back(std::abs(d));
            positive.push_back(d > 0.0);
        }
    }
    const int m = static_cast<int>(mags.size());
    if (m == 0) { throw error("wilcoxon_exact: no nonzero differences"); }
    if (m > 20) { throw error("wilcoxon_exact: more than 20 nonzero differences"); }

    // midranks, scaled by 2 to stay integral
    std::vector<int> idx(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) { idx[static_cast<std::size_t>(i)] = i; }
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return mags[static_cast<std::size_t>(a)] < mags[static_cast<std::size_t>(b)]; });
    std::vector<long> rank2(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m;) {
        int j = i;
        while (j < m && mags[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])] ==
                            mags[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])]) {
            ++j;
        }
        const long doubled = (i + 1) + j;  // 2 * average of ranks i+1 .. j
        for (int t = i; t < j; ++t) { rank2[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])] = doubled; }
        i = j;
    }

    long s_plus = 0, total = 0;
    for (int i = 0; i < m; ++i) {
        total += rank2[static_cast<std::size_t>(i)];
        if (positive[static_cast<std::size_t>(i)]) { s_plus += rank2[static_cast<std::size_t>(i)]; }
    }
    const long w_observed = std::min(s_plus, total - s_plus);

    // ways[s] = number of sign assignments with positive-rank sum s
    std::vector<std::uint64_t> ways(static_cast<std::size_t>(total) + 1, 0);
    ways[0] = 1;
    for (int i = 0; i < m; ++i) {
        const long r = rank2[static_cast<std::size_t>(i)];
        for (long s = total; s >= r; --s) {
            ways[static_cast<std::size_t>(s)] += ways[static_cast<std::size_t>(s - r)];
        }
    }
    std::uint64_t count = 0;
    for (long s = 0; s <= total; ++s) {
        if (std::min(s, total - s) <= w_observed) { count += ways[static_cast<std::size_t>(s)]; }
    }
    return static_cast<double>(count) / std::ldexp(1.0, m);
}

inline double chi_squared_upper_tail(double statistic, int dof) {
    const boost::math::chi_squared_distribution<double> dist(static_cast<double>(dof));
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

struct FriedmanResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Classic rank test over k methods x N datasets, higher score ranks better,
// midranks on ties:
//   chi2_F = 12N / (k(k+1)) * sum_j (Rbar_j - (k+1)/2)^2
// with an upper-tail chi-squared p at k-1 degrees of freedom.
inline FriedmanResult friedman(const std::vector<std::vector<double>>& scores) {
    const int k = static_cast<int>(scores.size());
    if (k < 3) { throw error("friedman: need at least 3 methods"); }
    const int n = static_cast<int>(scores.front().size());
    if (n < 2) { throw error("friedman: need at least 2 datasets"); }
    for (const auto& row : scores) {
        if (static_cast<int>(row.size()) != n) { throw error("friedman: ragged score matrix"); }
    }

    std::vector<double> rank_sum(static_cast<std::size_t>(k), 0.0);
    for (int d = 0; d < n; ++d) {
        std::vector<int> order(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) { order[static_cast<std::size_t>(j)] = j; }
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return scores[static_cast<std::size_t>(a)][static_cast<std::size_t>(d)] >
                   scores[static_cast<std::size_t>(b)][static_cast<std::size_t>(d)];
        });
        for (int i = 0; i < k;) {
            int j = i;
            while (j < k &&
                   scores[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])][static_cast<std::size_t>(d)] ==
                       scores[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])][static_cast<std::size_t>(d)]) {
                ++j;
            }
            const double midrank = 0.5 * ((i + 1) + j);
            for (int t = i; t < j; ++t) {
                rank_sum[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] += midrank;
            }
            i = j;
        }
    }

    const double center = (k + 1) / 2.0;
    double sum_sq = 0.0;
    for (int j = 0; j < k; ++j) {
        const double mean_rank = rank_sum[static_cast<std::size_t>(j)] / n;
        sum_sq += (mean_rank - center) * (mean_rank - center);
    }
    FriedmanResult res;
    res.statistic = 12.0 * n / (k * (k + 1.0)) * sum_sq;
    res.p_value = chi_squared_upper_tail(res.statistic, k - 1);
    return res;
}

}  // namespace mmifs

#endif
