#ifndef MMIFS_DATASET_HPP
#define MMIFS_DATASET_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mmifs/error.hpp"
#include "mmifs/rng.hpp"
#include "mmifs/subset.hpp"

namespace mmifs {

// Immutable once built; safe to share read-only across workers.
struct Dataset {
    std::string name;
    int n_features = 0;
    int n_classes = 0;
    std::vector<double> values;  // row-major, n_rows x n_features
    std::vector<int> labels;     // 0..n_classes-1
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;  // first-appearance order

    int n_rows() const { return static_cast<int>(labels.size()); }

    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * n_features + col];
    }

    std::span<const double> row(int r) const {
        return {values.data() + static_cast<std::size_t>(r) * n_features,
                static_cast<std::size_t>(n_features)};
    }

    bool operator==(const Dataset&) const = default;
};

struct SplitPair {
    Dataset train;
    Dataset test;
    std::uint64_t seed = 0;
    double train_fraction = 0.0;
    std::vector<int> train_indices;  // row ids in the source dataset
    std::vector<int> test_indices;
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) { ++b; }
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) { --e; }
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        fields.push_back(trim(std::string_view(line).substr(start, pos - start)));
        start = pos + 1;
    }
    return fields;
}

inline bool parse_double(std::string_view s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) { return false; }
    out = v;
    return true;
}

// shortest round-trip decimal form, locale independent
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    if (!path.parent_path().empty()) {
        std::filesystem::create_directories(path.parent_path());
    }
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) { throw error("cannot open file for writing: " + tmp.string()); }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) { throw error("write failed: " + tmp.string()); }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace detail

// CSV with a header row, comma delimited, all non-label columns numeric.
// The label column may be any categorical token; labels are remapped to
// 0..n_classes-1 in first-appearance order. label_column is matched against
// header names first, then interpreted as a zero-based column index.
inline Dataset load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) { throw error("cannot open file: " + path); }

    std::string header_line;
    if (!std::getline(in, header_line)) { throw error(path + ": empty file"); }
    // UTF-8 BOM
    if (header_line.size() >= 3 && header_line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        header_line.erase(0, 3);
    }
    const std::vector<std::string> header = detail::split_csv_line(header_line);
    const int n_cols = static_cast<int>(header.size());

    int label_idx = -1;
    for (int c = 0; c < n_cols; ++c) {
        if (header[static_cast<std::size_t>(c)] == label_column) {
            label_idx = c;
            break;
        }
    }
    if (label_idx < 0) {
        int idx = -1;
        const char* b = label_column.data();
        const auto [ptr, ec] = std::from_chars(b, b + label_column.size(), idx);
        if (ec == std::errc{} && ptr == b + label_column.size() && idx >= 0 && idx < n_cols) {
            label_idx = idx;
        }
    }
    if (label_idx < 0) {
        throw error(path + ": label column '" + label_column + "' not found");
    }

    Dataset d;
    d.name = std::filesystem::path(path).stem().string();
    d.n_features = n_cols - 1;
    if (d.n_features < 1) { throw error(path + ": no feature columns"); }
    for (int c = 0; c < n_cols; ++c) {
        if (c != label_idx) { d.feature_names.push_back(header[static_cast<std::size_t>(c)]); }
    }

    std::map<std::string, int> label_ids;
    std::string line;
    int file_line = 1;
    while (std::getline(in, line)) {
        ++file_line;
        if (detail::trim(line).empty()) { continue; }
        const std::vector<std::string> fields = detail::split_csv_line(line);
        if (static_cast<int>(fields.size()) != n_cols) {
            throw error(path + ": line " + std::to_string(file_line) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(n_cols));
        }
        for (int c = 0; c < n_cols; ++c) {
            const std::string& tok = fields[static_cast<std::size_t>(c)];
            if (c == label_idx) {
                const auto [it, inserted] =
                    label_ids.try_emplace(tok, static_cast<int>(d.class_names.size()));
                if (inserted) { d.class_names.push_back(tok); }
                d.labels.push_back(it->second);
            } else {
                double v = 0.0;
                if (!detail::parse_double(tok, v)) {
                    throw error(path + ": line " + std::to_string(file_line) + ", column '" +
                                header[static_cast<std::size_t>(c)] + "': cannot parse '" + tok +
                                "' as a number");
                }
                d.values.push_back(v);
            }
        }
    }

    if (d.labels.empty()) { throw error(path + ": no data rows"); }
    if (d.labels.size() < 2) { throw error(path + ": fewer than 2 data rows"); }
    d.n_classes = static_cast<int>(d.class_names.size());
    if (d.n_classes < 2) {
        throw error(path + ": single distinct label '" + d.class_names.front() + "'");
    }
    return d;
}

inline void write_csv(const Dataset& d, const std::string& path) {
    std::string out;
    for (int c = 0; c < d.n_features; ++c) {
        out += (c < static_cast<int>(d.feature_names.size())) ? d.feature_names[c]
                                                              : "f" + std::to_string(c);
        out += ',';
    }
    out += "label\n";
    for (int r = 0; r < d.n_rows(); ++r) {
        for (int c = 0; c < d.n_features; ++c) {
            out += detail::format_double(d.at(r, c));
            out += ',';
        }
        const int lab = d.labels[static_cast<std::size_t>(r)];
        out += (lab < static_cast<int>(d.class_names.size())) ? d.class_names[lab]
                                                              : "c" + std::to_string(lab);
        out += '\n';
    }
    detail::write_file_atomic(path, out);
}

// Each column mapped to [0,1] by (x - min) / (max - min). Constant columns
// map to all-zero so real files with degenerate features stay loadable.
inline Dataset min_max_normalize(const Dataset& d) {
    Dataset out = d;
    for (int c = 0; c < d.n_features; ++c) {
        double lo = d.at(0, c), hi = d.at(0, c);
        for (int r = 1; r < d.n_rows(); ++r) {
            lo = std::min(lo, d.at(r, c));
            hi = std::max(hi, d.at(r, c));
        }
        const double range = hi - lo;
        for (int r = 0; r < d.n_rows(); ++r) {
            double& v = out.values[static_cast<std::size_t>(r) * d.n_features + c];
            v = (range > 0.0) ? (v - lo) / range : 0.0;
        }
    }
    return out;
}

namespace detail {

inline Dataset take_rows(const Dataset& d, const std::vector<int>& rows) {
    Dataset out;
    out.name = d.name;
    out.n_features = d.n_features;
    out.n_classes = d.n_classes;
    out.feature_names = d.feature_names;
    out.class_names = d.class_names;
    out.values.reserve(rows.size() * static_cast<std::size_t>(d.n_features));
    out.labels.reserve(rows.size());
    for (int r : rows) {
        const auto row = d.row(r);
        out.values.insert(out.values.end(), row.begin(), row.end());
        out.labels.push_back(d.labels[static_cast<std::size_t>(r)]);
    }
    return out;
}

// Largest-remainder apportionment of the train quota across classes, each
// class clamped to keep at least one row on both sides of the split.
inline std::vector<int> train_quota_per_class(const std::vector<int>& class_sizes,
                                              double train_fraction, int target_total) {
    const int k = static_cast<int>(class_sizes.size());
    std::vector<int> quota(static_cast<std::size_t>(k), 0);
    std::vector<std::pair<double, int>> remainders;  // (-remainder, class) for stable sort
    int assigned = 0;
    for (int c = 0; c < k; ++c) {
        const double exact = train_fraction * class_sizes[static_cast<std::size_t>(c)];
        quota[static_cast<std::size_t>(c)] = static_cast<int>(std::floor(exact));
        assigned += quota[static_cast<std::size_t>(c)];
        remainders.emplace_back(-(exact - std::floor(exact)), c);
    }
    std::sort(remainders.begin(), remainders.end());
    for (int i = 0; assigned < target_total && i < k; ++i) {
        ++quota[static_cast<std::size_t>(remainders[static_cast<std::size_t>(i)].second)];
        ++assigned;
    }
    for (int c = 0; c < k; ++c) {
        quota[static_cast<std::size_t>(c)] = std::clamp(
            quota[static_cast<std::size_t>(c)], 1, class_sizes[static_cast<std::size_t>(c)] - 1);
    }
    // clamping may have shifted the total; rebalance within per-class bounds
    auto total = [&] {
        int t = 0;
        for (int q : quota) { t += q; }
        return t;
    };
    bool progress = true;
    while (total() < target_total && progress) {
        progress = false;
        int best = -1, best_slack = 0;
        for (int c = 0; c < k; ++c) {
            const int slack = class_sizes[static_cast<std::size_t>(c)] - 1 -
                              quota[static_cast<std::size_t>(c)];
            if (slack > best_slack) {
                best_slack = slack;
                best = c;
            }
        }
        if (best >= 0) {
            ++quota[static_cast<std::size_t>(best)];
            progress = true;
        }
    }
    progress = true;
    while (total() > target_total && progress) {
        progress = false;
        int best = -1, best_excess = 1;
        for (int c = 0; c < k; ++c) {
            if (quota[static_cast<std::size_t>(c)] > best_excess) {
                best_excess = quota[static_cast<std::size_t>(c)];
                best = c;
            }
        }
        if (best >= 0) {
            --quota[static_cast<std::size_t>(best)];
            progress = true;
        }
    }
    return quota;
}

}  // namespace detail

// Per-class random partition; deterministic for a fixed seed. Every class
// keeps at least one row on each side.
inline SplitPair stratified_split(const Dataset& d, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw error("stratified_split: train_fraction must be in (0,1)");
    }
    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(d.n_classes));
    for (int r = 0; r < d.n_rows(); ++r) {
        by_class[static_cast<std::size_t>(d.labels[static_cast<std::size_t>(r)])].push_back(r);
    }
    std::vector<int> class_sizes;
    for (int c = 0; c < d.n_classes; ++c) {
        const int sz = static_cast<int>(by_class[static_cast<std::size_t>(c)].size());
        if (sz < 2) {
            throw error("stratified_split: class '" + d.class_names[static_cast<std::size_t>(c)] +
                        "' has fewer than 2 instances");
        }
        class_sizes.push_back(sz);
    }
    const int target =
        static_cast<int>(std::llround(train_fraction * static_cast<double>(d.n_rows())));
    const std::vector<int> quota =
        detail::train_quota_per_class(class_sizes, train_fraction, target);

    Rng rng(seed);
    SplitPair split;
    split.seed = seed;
    split.train_fraction = train_fraction;
    for (int c = 0; c < d.n_classes; ++c) {
        auto& rows = by_class[static_cast<std::size_t>(c)];
        rng.shuffle(rows);
        const int q = quota[static_cast<std::size_t>(c)];
        split.train_indices.insert(split.train_indices.end(), rows.begin(), rows.begin() + q);
        split.test_indices.insert(split.test_indices.end(), rows.begin() + q, rows.end());
    }
    std::sort(split.train_indices.begin(), split.train_indices.end());
    std::sort(split.test_indices.begin(), split.test_indices.end());
    split.train = detail::take_rows(d, split.train_indices);
    split.test = detail::take_rows(d, split.test_indices);
    return split;
}

// Plain random partition without per-class balancing (deviation knob).
inline SplitPair random_split(const Dataset& d, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw error("random_split: train_fraction must be in (0,1)");
    }
    std::vector<int> rows(static_cast<std::size_t>(d.n_rows()));
    for (int r = 0; r < d.n_rows(); ++r) { rows[static_cast<std::size_t>(r)] = r; }
    Rng rng(seed);
    rng.shuffle(rows);
    int target = static_cast<int>(std::llround(train_fraction * static_cast<double>(d.n_rows())));
    target = std::clamp(target, 1, d.n_rows() - 1);

    SplitPair split;
    split.seed = seed;
    split.train_fraction = train_fraction;
    split.train_indices.assign(rows.begin(), rows.begin() + target);
    split.test_indices.assign(rows.begin() + target, rows.end());
    std::sort(split.train_indices.begin(), split.train_indices.end());
    std::sort(split.test_indices.begin(), split.test_indices.end());
    split.train = detail::take_rows(d, split.train_indices);
    split.test = detail::take_rows(d, split.test_indices);
    return split;
}

// Keep only the selected columns; rows and labels unchanged.
inline Dataset project(const Dataset& d, const FeatureSubset& subset) {
    if (subset.size() != d.n_features) {
        throw error("project: subset length does not match feature count");
    }
    if (!subset.any()) { throw error("project: empty subset"); }
    const std::vector<int> cols = subset.selected();
    Dataset out;
    out.name = d.name;
    out.n_features = static_cast<int>(cols.size());
    out.n_classes = d.n_classes;
    out.labels = d.labels;
    out.class_names = d.class_names;
    for (int c : cols) {
        if (c < static_cast<int>(d.feature_names.size())) {
            out.feature_names.push_back(d.feature_names[static_cast<std::size_t>(c)]);
        }
    }
    out.values.reserve(static_cast<std::size_t>(d.n_rows()) * cols.size());
    for (int r = 0; r < d.n_rows(); ++r) {
        for (int c : cols) { out.values.push_back(d.at(r, c)); }
    }
    return out;
}

}  // namespace mmifs

#endif
