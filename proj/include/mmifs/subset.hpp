#ifndef MMIFS_SUBSET_HPP
#define MMIFS_SUBSET_HPP

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "mmifs/error.hpp"

namespace mmifs {

// Inclusion mask over the n original features of a dataset.
class FeatureSubset {
  public:
    FeatureSubset() = default;

    explicit FeatureSubset(int n_features) :
        n_(n_features), words_((n_features + 63) / 64, 0) {
        if (n_features < 1) { throw error("FeatureSubset: need at least one feature"); }
    }

    static FeatureSubset full(int n_features) {
        FeatureSubset s(n_features);
        for (int i = 0; i < n_features; ++i) { s.set(i, true); }
        return s;
    }

    static FeatureSubset of(int n_features, std::initializer_list<int> indices) {
        FeatureSubset s(n_features);
        for (int i : indices) { s.set(i, true); }
        return s;
    }

    // '1'/'0' per feature, index 0 first
    static FeatureSubset from_bitstring(std::string_view bits) {
        FeatureSubset s(static_cast<int>(bits.size()));
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1') {
                s.set(static_cast<int>(i), true);
            } else if (bits[i] != '0') {
                throw error("FeatureSubset: bitstring may contain only '0' and '1'");
            }
        }
        return s;
    }

    int size() const { return n_; }
    int count() const { return count_; }
    bool any() const { return count_ > 0; }

    bool test(int i) const {
        check_index(i);
        return (words_[static_cast<std::size_t>(i) / 64] >> (i % 64)) & 1ULL;
    }

    void set(int i, bool value) {
        check_index(i);
        const std::uint64_t bit = 1ULL << (i % 64);
        std::uint64_t& w = words_[static_cast<std::size_t>(i) / 64];
        const bool was = (w & bit) != 0;
        if (value && !was) {
            w |= bit;
            ++count_;
        } else if (!value && was) {
            w &= ~bit;
            --count_;
        }
    }

    void flip(int i) { set(i, !test(i)); }

    std::vector<int> selected() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(count_));
        for (int i = 0; i < n_; ++i) {
            if (test(i)) { out.push_back(i); }
        }
        return out;
    }

    std::string to_bitstring() const {
        std::string s(static_cast<std::size_t>(n_), '0');
        for (int i = 0; i < n_; ++i) {
            if (test(i)) { s[static_cast<std::size_t>(i)] = '1'; }
        }
        return s;
    }

    bool operator==(const FeatureSubset& other) const = default;

    std::size_t hash() const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(n_);
        for (std::uint64_t w : words_) {
            h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }

  private:
    void check_index(int i) const {
        if (i < 0 || i >= n_) { throw error("FeatureSubset: feature index out of range"); }
    }

    int n_ = 0;
    int count_ = 0;
    std::vector<std::uint64_t> words_;
};

struct SubsetHash {
    std::size_t operator()(const FeatureSubset& s) const { return s.hash(); }
};

}  // namespace mmifs

#endif
