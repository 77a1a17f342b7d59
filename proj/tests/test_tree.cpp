#include "mnemorank/dataset.hpp"
#include "mnemorank/error.hpp"
#include "mnemorank/random.hpp"
#include "mnemorank/tree.hpp"

#include <doctest.h>

#include <numeric>

using namespace mnemorank;

namespace {

LabeledDataset make(std::vector<std::vector<double>> rows, std::vector<std::string> labels) {
    std::vector<double> flat;
    for (const auto& r : rows) {
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return LabeledDataset(std::move(flat), rows.front().size(), labels);
}

std::vector<std::size_t> all_rows(const LabeledDataset& d) {
    std::vector<std::size_t> rows(d.size());
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

} // namespace

TEST_CASE("gini impurity") {
    CHECK(gini_impurity(std::vector<std::uint64_t>{4, 0}) == 0.0);
    CHECK(gini_impurity(std::vector<std::uint64_t>{2, 2}) == doctest::Approx(0.5));
    CHECK(gini_impurity(std::vector<std::uint64_t>{1, 1, 1}) == doctest::Approx(2.0 / 3.0));
    CHECK(gini_impurity(std::vector<std::uint64_t>{0, 0}) == 0.0);
}

TEST_CASE("class ids follow sorted names") {
    const auto d = make({{1}, {2}, {3}}, {"worm", "adware", "worm"});
    CHECK(d.class_names() == std::vector<std::string>{"adware", "worm"});
    CHECK(d.label(0) == 1);
    CHECK(d.label(1) == 0);
    const std::vector<std::size_t> pick{1};
    CHECK(d.subset(pick).class_count() == 2);
}

TEST_CASE("a separable feature is found and split at the midpoint") {
    // Feature 0 is noise, feature 1 separates the classes.
    const auto d = make({{5, 0.1}, {1, 0.2}, {4, 0.3}, {2, 0.9}, {5, 1.0}, {1, 1.1}}, {"a", "a", "a", "b", "b", "b"});
    Rng rng(1);
    const auto tree = train_tree(d, all_rows(d), 2, rng);
    REQUIRE(tree.nodes().size() == 3);
    CHECK(tree.nodes()[0].feature == 1);
    CHECK(tree.nodes()[0].threshold == doctest::Approx(0.6));
    CHECK(tree.leaf_count() == 2);
    CHECK(tree.depth() == 1);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(tree.predict(d.row(i)) == d.label(i));
    }
}

TEST_CASE("scanning continues past the subset size until a useful split appears") {
    // Only the last of many features carries information; with a subset size
    // of 1 the tree must still find it.
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    for (int i = 0; i < 20; ++i) {
        std::vector<double> r(8, 3.0);
        r[7] = i < 10 ? 0.0 : 1.0;
        rows.push_back(r);
        labels.push_back(i < 10 ? "x" : "y");
    }
    const auto d = make(rows, labels);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const auto tree = train_tree(d, all_rows(d), 1, rng);
        CHECK(tree.nodes()[0].feature == 7);
        CHECK(tree.leaf_count() == 2);
    }
}

TEST_CASE("unpruned trees fit consistent training data exactly") {
    Rng data_rng(77);
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    for (int i = 0; i < 120; ++i) {
        std::vector<double> r{uniform01(data_rng), uniform01(data_rng), uniform01(data_rng)};
        labels.push_back(r[0] + r[1] > 1.0 ? "hi" : (r[2] > 0.5 ? "mid" : "lo"));
        rows.push_back(std::move(r));
    }
    const auto d = make(rows, labels);
    Rng rng(5);
    const auto tree = train_tree(d, all_rows(d), 2, rng);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(tree.predict(d.row(i)) == d.label(i));
    }
}

TEST_CASE("identical rows with mixed labels become a majority leaf, ties to the lowest id") {
    const auto d = make({{1, 1}, {1, 1}, {1, 1}, {1, 1}}, {"b", "a", "b", "a"});
    Rng rng(2);
    const auto tree = train_tree(d, all_rows(d), 2, rng);
    REQUIRE(tree.nodes().size() == 1);
    CHECK(tree.nodes()[0].is_leaf());
    CHECK(tree.nodes()[0].label == 0);

    const std::vector<std::size_t> weighted{0, 0, 1, 2};
    Rng rng2(2);
    CHECK(train_tree(d, weighted, 2, rng2).nodes()[0].label == 1);
}

TEST_CASE("tree growth is a pure function of the seed") {
    Rng data_rng(8);
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    for (int i = 0; i < 60; ++i) {
        rows.push_back({uniform01(data_rng), uniform01(data_rng), uniform01(data_rng), uniform01(data_rng)});
        labels.push_back(i % 3 == 0 ? "p" : "q");
    }
    const auto d = make(rows, labels);
    Rng a(99);
    Rng b(99);
    CHECK(train_tree(d, all_rows(d), 2, a) == train_tree(d, all_rows(d), 2, b));
}
