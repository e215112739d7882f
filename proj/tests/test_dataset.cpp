#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "mmifs/dataset.hpp"
#include "mmifs/synth.hpp"
#include "support/fixtures.hpp"

using namespace mmifs;

TEST_CASE("load_csv parses a small fixture", "[dataset]") {
    const auto dir = fixtures::temp_dir("load_csv");
    const auto path = fixtures::write_text(dir / "tiny.csv",
                                           "x,y,label\n"
                                           "1.0,2.0,a\n"
                                           "3.0,4.0,b\n"
                                           "5.0,6.0,a\n"
                                           "7.0,8.0,b\n");
    const Dataset d = load_csv(path, "label");
    REQUIRE(d.n_rows() == 4);
    REQUIRE(d.n_features == 2);
    REQUIRE(d.n_classes == 2);
    REQUIRE(d.labels == std::vector<int>{0, 1, 0, 1});  // first-appearance order
    REQUIRE(d.class_names == std::vector<std::string>{"a", "b"});
    REQUIRE(d.at(2, 1) == 6.0);
}

TEST_CASE("load_csv accepts a label column index", "[dataset]") {
    const auto dir = fixtures::temp_dir("load_csv_idx");
    const auto path = fixtures::write_text(dir / "t.csv", "c0,c1\nx,1\ny,2\n");
    const Dataset d = load_csv(path, "0");
    REQUIRE(d.n_features == 1);
    REQUIRE(d.class_names == std::vector<std::string>{"x", "y"});
}

TEST_CASE("load_csv error paths", "[dataset]") {
    const auto dir = fixtures::temp_dir("load_csv_err");
    REQUIRE_THROWS_WITH(load_csv((dir / "missing.csv").string(), "label"),
                        Catch::Matchers::ContainsSubstring("cannot open"));

    const auto header_only = fixtures::write_text(dir / "h.csv", "x,label\n");
    REQUIRE_THROWS_WITH(load_csv(header_only, "label"),
                        Catch::Matchers::ContainsSubstring("no data rows"));

    const auto one_row = fixtures::write_text(dir / "one.csv", "x,label\n1,a\n");
    REQUIRE_THROWS_WITH(load_csv(one_row, "label"),
                        Catch::Matchers::ContainsSubstring("fewer than 2"));

    const auto bad_cell = fixtures::write_text(dir / "bad.csv", "x,label\n1,a\noops,b\n");
    REQUIRE_THROWS_WITH(load_csv(bad_cell, "label"),
                        Catch::Matchers::ContainsSubstring("line 3") &&
                            Catch::Matchers::ContainsSubstring("'x'"));

    const auto one_class = fixtures::write_text(dir / "uni.csv", "x,label\n1,a\n2,a\n");
    REQUIRE_THROWS_WITH(load_csv(one_class, "label"),
                        Catch::Matchers::ContainsSubstring("single distinct label"));

    const auto ok = fixtures::write_text(dir / "ok.csv", "x,label\n1,a\n2,b\n");
    REQUIRE_THROWS_WITH(load_csv(ok, "nope"),
                        Catch::Matchers::ContainsSubstring("label column"));
}

TEST_CASE("synthetic benchmark shapes survive a CSV round trip", "[dataset]") {
    const auto dir = fixtures::temp_dir("synth_csv");
    const Dataset wine = synth::wine_like();
    REQUIRE(wine.n_rows() == 178);
    REQUIRE(wine.n_features == 13);
    REQUIRE(wine.n_classes == 3);

    write_csv(wine, (dir / "wine_like.csv").string());
    const Dataset loaded = load_csv((dir / "wine_like.csv").string(), "label");
    REQUIRE(loaded.n_rows() == wine.n_rows());
    REQUIRE(loaded.n_features == wine.n_features);
    REQUIRE(loaded.n_classes == wine.n_classes);
    REQUIRE(loaded.labels == wine.labels);
    for (int r = 0; r < wine.n_rows(); ++r) {
        for (int c = 0; c < wine.n_features; ++c) {
            REQUIRE(loaded.at(r, c) == wine.at(r, c));  // shortest round-trip formatting
        }
    }

    const Dataset breast = synth::breast_like();
    REQUIRE(breast.n_rows() == 699);
    REQUIRE(breast.n_features == 9);
    REQUIRE(breast.n_classes == 2);
}

TEST_CASE("min_max_normalize maps columns into [0,1]", "[dataset]") {
    Dataset d;
    d.n_features = 3;
    d.n_classes = 2;
    d.class_names = {"a", "b"};
    d.values = {2.0, 5.0, 0.0,
                4.0, 5.0, 1.0,
                6.0, 5.0, 0.5};
    d.labels = {0, 1, 0};

    const Dataset n = min_max_normalize(d);
    REQUIRE(n.at(0, 0) == 0.0);
    REQUIRE(n.at(1, 0) == 0.5);
    REQUIRE(n.at(2, 0) == 1.0);
    // constant column collapses to zero
    REQUIRE(n.at(0, 1) == 0.0);
    REQUIRE(n.at(2, 1) == 0.0);
    // already [0,1] stays put
    REQUIRE(n.at(0, 2) == 0.0);
    REQUIRE(n.at(1, 2) == 1.0);
    REQUIRE(n.at(2, 2) == 0.5);

    REQUIRE(min_max_normalize(n) == n);  // idempotent
}

TEST_CASE("normalize is idempotent on random data", "[dataset]") {
    Rng rng(7);
    Dataset d;
    d.n_features = 4;
    d.n_classes = 2;
    d.class_names = {"a", "b"};
    for (int r = 0; r < 30; ++r) {
        for (int c = 0; c < 4; ++c) { d.values.push_back(rng.normal() * 10.0); }
        d.labels.push_back(r % 2);
    }
    const Dataset once = min_max_normalize(d);
    REQUIRE(min_max_normalize(once) == once);
}

TEST_CASE("stratified_split hits the target counts", "[dataset]") {
    Dataset d;
    d.n_features = 1;
    d.n_classes = 2;
    d.class_names = {"a", "b"};
    for (int r = 0; r < 100; ++r) {
        d.values.push_back(static_cast<double>(r));
        d.labels.push_back(r < 50 ? 0 : 1);
    }
    const SplitPair split = stratified_split(d, 0.75, 42);
    REQUIRE(split.train.n_rows() == 75);
    REQUIRE(split.test.n_rows() == 25);

    // class ratios within one instance of the source ratios
    for (int c = 0; c < 2; ++c) {
        int train_c = 0;
        for (int lab : split.train.labels) {
            if (lab == c) { ++train_c; }
        }
        REQUIRE(std::abs(train_c - 38) <= 1);  // 0.75 * 50 = 37.5
    }
}

TEST_CASE("stratified_split is a deterministic partition", "[dataset]") {
    const Dataset d = synth::wine_like();
    const SplitPair a = stratified_split(d, 0.75, 5);
    const SplitPair b = stratified_split(d, 0.75, 5);
    REQUIRE(a.train_indices == b.train_indices);
    REQUIRE(a.test_indices == b.test_indices);
    REQUIRE(a.train == b.train);

    const SplitPair c = stratified_split(d, 0.75, 6);
    REQUIRE(a.train_indices != c.train_indices);

    std::set<int> seen(a.train_indices.begin(), a.train_indices.end());
    for (int idx : a.test_indices) { REQUIRE(seen.insert(idx).second); }
    REQUIRE(static_cast<int>(seen.size()) == d.n_rows());

    // every class present on both sides
    for (int cls = 0; cls < d.n_classes; ++cls) {
        REQUIRE(std::count(a.train.labels.begin(), a.train.labels.end(), cls) > 0);
        REQUIRE(std::count(a.test.labels.begin(), a.test.labels.end(), cls) > 0);
    }
}

TEST_CASE("stratified_split rejects singleton classes", "[dataset]") {
    Dataset d;
    d.n_features = 1;
    d.n_classes = 2;
    d.class_names = {"common", "rare"};
    d.values = {1.0, 2.0, 3.0, 4.0};
    d.labels = {0, 0, 0, 1};
    REQUIRE_THROWS_WITH(stratified_split(d, 0.75, 1),
                        Catch::Matchers::ContainsSubstring("rare"));
    REQUIRE_THROWS_AS(stratified_split(d, 1.5, 1), error);
}

TEST_CASE("random_split partitions without stratification", "[dataset]") {
    const Dataset d = synth::breast_like();
    const SplitPair s = random_split(d, 0.75, 3);
    REQUIRE(s.train.n_rows() + s.test.n_rows() == d.n_rows());
    REQUIRE(s.train.n_rows() == 524);  // round(0.75 * 699)
    const SplitPair again = random_split(d, 0.75, 3);
    REQUIRE(s.train_indices == again.train_indices);
}

TEST_CASE("project keeps selected columns in order", "[dataset]") {
    Dataset d;
    d.n_features = 4;
    d.n_classes = 2;
    d.class_names = {"a", "b"};
    d.feature_names = {"w", "x", "y", "z"};
    d.values = {0.0, 1.0, 2.0, 3.0,
                4.0, 5.0, 6.0, 7.0};
    d.labels = {0, 1};

    const Dataset p = project(d, FeatureSubset::of(4, {0, 2}));
    REQUIRE(p.n_features == 2);
    REQUIRE(p.feature_names == std::vector<std::string>{"w", "y"});
    REQUIRE(p.at(0, 0) == 0.0);
    REQUIRE(p.at(0, 1) == 2.0);
    REQUIRE(p.at(1, 1) == 6.0);
    REQUIRE(p.labels == d.labels);

    REQUIRE(project(d, FeatureSubset::full(4)) == d);
    REQUIRE_THROWS_WITH(project(d, FeatureSubset(4)),
                        Catch::Matchers::ContainsSubstring("empty subset"));
    REQUIRE_THROWS_AS(project(d, FeatureSubset::full(3)), error);
}
