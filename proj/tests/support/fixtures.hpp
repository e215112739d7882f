#ifndef MMIFS_TESTS_FIXTURES_HPP
#define MMIFS_TESTS_FIXTURES_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mmifs/dataset.hpp"
#include "mmifs/subset.hpp"

namespace fixtures {

inline std::filesystem::path temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("mmifs_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path.string();
}

// Two tight clusters per class along both features; k=1 classifies the test
// points perfectly.
inline mmifs::SplitPair separable_split() {
    mmifs::Dataset train;
    train.name = "separable";
    train.n_features = 2;
    train.n_classes = 2;
    train.class_names = {"a", "b"};
    train.feature_names = {"f0", "f1"};
    const std::vector<std::pair<std::pair<double, double>, int>> rows = {
        {{0.0, 0.0}, 0}, {{0.1, 0.0}, 0}, {{0.0, 0.1}, 0}, {{0.1, 0.1}, 0},
        {{1.0, 1.0}, 1}, {{0.9, 1.0}, 1}, {{1.0, 0.9}, 1}, {{0.9, 0.9}, 1},
    };
    for (const auto& [xy, label] : rows) {
        train.values.push_back(xy.first);
        train.values.push_back(xy.second);
        train.labels.push_back(label);
    }
    mmifs::Dataset test = train;
    test.values = {0.05, 0.05, 0.95, 0.95, 0.02, 0.08, 0.98, 0.92};
    test.labels = {0, 1, 0, 1};

    mmifs::SplitPair split;
    split.train = train;
    split.test = test;
    split.seed = 0;
    split.train_fraction = 2.0 / 3.0;
    return split;
}

}  // namespace fixtures

#endif
