#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cmpos/classifiers.hpp"
#include "cmpos/error.hpp"
#include "cmpos/io.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cmpos;
using namespace testutil;

namespace {

Dataset tiny_dataset(std::vector<std::vector<std::int32_t>> instances,
                     std::vector<std::int32_t> labels,
                     std::vector<std::size_t> domain_sizes,
                     std::size_t n_classes) {
  Dataset data;
  for (std::size_t a = 0; a < domain_sizes.size(); ++a) {
    Attribute attribute;
    attribute.name = "a" + std::to_string(a);
    for (std::size_t v = 0; v < domain_sizes[a]; ++v)
      attribute.domain.push_back("a" + std::to_string(a) + "v" + std::to_string(v));
    data.schema.attributes.push_back(std::move(attribute));
  }
  for (std::size_t c = 0; c < n_classes; ++c)
    data.schema.class_domain.push_back("c" + std::to_string(c));
  data.instances = std::move(instances);
  data.class_values = std::move(labels);
  return data;
}

// label follows attribute 1 exactly; attribute 0 is noise
Dataset second_attribute_rules() {
  return tiny_dataset(
      {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0, 2}, {1, 2}},
      {0, 0, 1, 1, 0, 0},
      {2, 3}, 2);
}

Dataset xor_dataset() {
  return tiny_dataset({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0}, {2, 2}, 2);
}

double training_accuracy(const DecisionTree& tree, const Dataset& data) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.instances.size(); ++i)
    if (predict(tree, data.instances[i]).label ==
        data.schema.class_domain[static_cast<std::size_t>(data.class_values[i])])
      ++hits;
  return static_cast<double>(hits) / static_cast<double>(data.instances.size());
}

}  // namespace

TEST_SUITE("classifiers") {

TEST_CASE("a single determining attribute becomes the root split") {
  Dataset data = second_attribute_rules();
  DecisionTree tree = train_tree(data);
  REQUIRE_FALSE(tree.nodes.empty());
  REQUIRE_FALSE(tree.nodes[0].is_leaf);
  CHECK(tree.nodes[0].attribute == 1);
  for (auto child : tree.nodes[0].children)
    CHECK(tree.nodes[static_cast<std::size_t>(child)].is_leaf);
  CHECK(training_accuracy(tree, data) == 1.0);
}

TEST_CASE("a pure dataset collapses to a single leaf") {
  Dataset data = tiny_dataset({{0, 0}, {1, 1}, {0, 1}}, {1, 1, 1}, {2, 2}, 2);
  DecisionTree tree = train_tree(data);
  REQUIRE(tree.nodes.size() == 1);
  CHECK(tree.nodes[0].is_leaf);
  CHECK(predict(tree, data.instances[0]).label == "c1");
}

TEST_CASE("xor needs both attributes and zero-gain splits still happen") {
  TreeParams params;
  params.prune = false;
  DecisionTree tree = train_tree(xor_dataset(), params);
  REQUIRE_FALSE(tree.nodes[0].is_leaf);
  CHECK(tree.nodes[0].attribute == 0);  // both gains are zero, lowest id wins
  for (auto child : tree.nodes[0].children) {
    const auto& node = tree.nodes[static_cast<std::size_t>(child)];
    REQUIRE_FALSE(node.is_leaf);
    CHECK(node.attribute == 1);
  }
  CHECK(training_accuracy(tree, xor_dataset()) == 1.0);
}

TEST_CASE("split choices match the reference gain-ratio computation") {
  std::mt19937_64 rng(103);
  TreeParams params;
  params.prune = false;
  for (int round = 0; round < 12; ++round) {
    Dataset data = random_dataset(rng, 20 + rng() % 181, 2 + rng() % 5, 4,
                                  2 + rng() % 3, round % 2 == 0);
    DecisionTree tree = train_tree(data, params);
    CHECK(oracle::check_tree_splits(tree, data).empty());
  }
}

TEST_CASE("pruned split choices also match the reference") {
  std::mt19937_64 rng(105);
  for (int round = 0; round < 6; ++round) {
    Dataset data = random_dataset(rng, 50 + rng() % 151, 3 + rng() % 4, 3, 2,
                                  false);
    DecisionTree tree = train_tree(data);
    CHECK(oracle::check_tree_splits(tree, data).empty());
  }
}

TEST_CASE("unpruned trees fit consistent data perfectly") {
  std::mt19937_64 rng(107);
  TreeParams params;
  params.prune = false;
  for (int round = 0; round < 8; ++round) {
    Dataset data = random_dataset(rng, 30 + rng() % 90, 3 + rng() % 3, 3, 3,
                                  /*consistent=*/true);
    DecisionTree tree = train_tree(data, params);
    CHECK(training_accuracy(tree, data) == 1.0);
  }
}

TEST_CASE("pruning never grows the tree") {
  std::mt19937_64 rng(109);
  for (int round = 0; round < 8; ++round) {
    Dataset data = random_dataset(rng, 40 + rng() % 160, 4, 3, 2, false);
    TreeParams unpruned;
    unpruned.prune = false;
    CHECK(train_tree(data).nodes.size() <=
          train_tree(data, unpruned).nodes.size());
  }
}

TEST_CASE("leaf distributions and unseen-value routing") {
  Dataset data = second_attribute_rules();
  DecisionTree tree = train_tree(data);

  auto pure = predict(tree, std::vector<std::int32_t>{0, 1});
  CHECK(pure.label == "c1");
  REQUIRE(pure.distribution.size() == 2);
  CHECK(pure.distribution[1] == doctest::Approx(1.0));

  // unseen value id routes to the branch with the largest training mass;
  // attribute 1 values 0 and 2 carry label c0 (4 rows) vs value 1 (2 rows)
  auto routed = predict(tree, std::vector<std::int32_t>{0, -1});
  CHECK(routed.label == "c0");

  std::vector<std::int32_t> wrong_arity = {0};
  CHECK_THROWS_AS(predict(tree, wrong_arity), std::invalid_argument);
}

TEST_CASE("naive Bayes matches the hand-computed posterior") {
  // priors 1/2 each; with alpha=1: P(a0=0|c0)=3/4, P(a1=0|c0)=2/5,
  // P(a0=0|c1)=1/4, P(a1=0|c1)=2/5 -> posterior (0.75, 0.25)
  Dataset data =
      tiny_dataset({{0, 0}, {0, 1}, {1, 0}, {1, 2}}, {0, 0, 1, 1}, {2, 3}, 2);
  NaiveBayesModel model = train_nb(data, 1.0);
  auto prediction = predict(model, std::vector<std::int32_t>{0, 0});
  CHECK(prediction.label == "c0");
  CHECK(prediction.distribution[0] == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(prediction.distribution[1] == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("unseen values use the zero-count smoothed estimate") {
  Dataset data =
      tiny_dataset({{0, 0}, {0, 1}, {1, 0}, {1, 2}}, {0, 0, 1, 1}, {2, 3}, 2);
  NaiveBayesModel model = train_nb(data, 1.0);
  // P(a0=unseen|c) = 1/4 for both classes, so a0 contributes nothing and the
  // posterior reduces to the a1 factor: P(a1=0|c0)=P(a1=0|c1)=2/5 -> (0.5, 0.5)
  auto prediction = predict(model, std::vector<std::int32_t>{-1, 0});
  CHECK(prediction.distribution[0] == doctest::Approx(0.5).epsilon(1e-9));

  auto expected = oracle::nb_posterior_ref(data, 1.0,
                                           std::vector<std::int32_t>{-1, 0});
  CHECK(prediction.distribution[0] == doctest::Approx(expected[0]).epsilon(1e-9));
}

TEST_CASE("single-class data always predicts that class") {
  Dataset data = tiny_dataset({{0, 0}, {1, 1}}, {0, 0}, {2, 2}, 1);
  NaiveBayesModel model = train_nb(data);
  CHECK(predict(model, std::vector<std::int32_t>{1, 0}).label == "c0");
  CHECK(predict(model, std::vector<std::int32_t>{1, 0}).distribution[0] ==
        doctest::Approx(1.0));
}

TEST_CASE("posteriors match the reference on random data") {
  std::mt19937_64 rng(113);
  for (int round = 0; round < 8; ++round) {
    Dataset data = random_dataset(rng, 10 + rng() % 120, 2 + rng() % 5, 4,
                                  2 + rng() % 3, false);
    double alpha = round % 2 == 0 ? 1.0 : 0.35;
    NaiveBayesModel model = train_nb(data, alpha);
    for (int probe = 0; probe < 15; ++probe) {
      std::vector<std::int32_t> instance;
      for (const auto& attribute : data.schema.attributes) {
        auto size = attribute.domain.size() + 1;
        auto v = static_cast<std::int32_t>(rng() % size);
        instance.push_back(v == static_cast<std::int32_t>(size - 1) ? -1 : v);
      }
      auto expected = oracle::nb_posterior_ref(data, alpha, instance);
      auto got = predict(model, instance);
      double sum = 0.0;
      for (std::size_t c = 0; c < expected.size(); ++c) {
        CHECK(got.distribution[c] == doctest::Approx(expected[c]).epsilon(1e-9));
        sum += got.distribution[c];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("smoothing must be positive") {
  Dataset data = xor_dataset();
  CHECK_THROWS_AS(train_nb(data, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(train_nb(data, -1.0), std::invalid_argument);
}

TEST_CASE("forests are deterministic under a fixed seed") {
  std::mt19937_64 rng(127);
  Dataset data = random_dataset(rng, 120, 4, 3, 3, true);
  ForestParams params;
  params.n_trees = 15;
  RandomForest first = train_forest(data, params);
  RandomForest second = train_forest(data, params);
  CHECK(first == second);

  params.seed = 43;
  RandomForest shifted = train_forest(data, params);
  CHECK(first.trees != shifted.trees);
}

TEST_CASE("a one-tree forest with full scope reduces to the plain tree") {
  std::mt19937_64 rng(131);
  Dataset data = random_dataset(rng, 80, 4, 3, 2, true);
  ForestParams params;
  params.n_trees = 1;
  params.bootstrap = false;
  params.mtry = static_cast<int>(data.schema.attributes.size());
  RandomForest forest = train_forest(data, params);
  TreeParams unpruned;
  unpruned.prune = false;
  DecisionTree tree = train_tree(data, unpruned);
  REQUIRE(forest.trees.size() == 1);
  CHECK(forest.trees[0] == tree.nodes);
}

TEST_CASE("forests fit the determining-attribute dataset") {
  Dataset data = second_attribute_rules();
  ForestParams params;
  params.n_trees = 25;
  RandomForest forest = train_forest(data, params);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.instances.size(); ++i)
    if (predict(forest, data.instances[i]).label ==
        data.schema.class_domain[static_cast<std::size_t>(data.class_values[i])])
      ++hits;
  CHECK(hits == data.instances.size());
}

TEST_CASE("forest votes average with a lexicographic tie-break") {
  Dataset data = second_attribute_rules();
  RandomForest forest;
  forest.schema = data.schema;
  forest.params.n_trees = 3;
  TreeNode leaf_c0;
  leaf_c0.is_leaf = true;
  leaf_c0.label = 0;
  leaf_c0.class_counts = {2.0, 0.0};
  TreeNode leaf_c1 = leaf_c0;
  leaf_c1.label = 1;
  leaf_c1.class_counts = {0.0, 2.0};
  forest.trees = {{leaf_c0}, {leaf_c0}, {leaf_c1}};

  auto prediction = predict(forest, std::vector<std::int32_t>{0, 0});
  CHECK(prediction.label == "c0");
  CHECK(prediction.distribution[0] == doctest::Approx(2.0 / 3));
  CHECK(prediction.distribution[1] == doctest::Approx(1.0 / 3));

  forest.trees = {{leaf_c0}, {leaf_c1}};
  forest.params.n_trees = 2;
  CHECK(predict(forest, std::vector<std::int32_t>{0, 0}).label == "c0");
}

TEST_CASE("empty datasets are rejected everywhere") {
  Dataset data = xor_dataset();
  data.instances.clear();
  data.class_values.clear();
  CHECK_THROWS_AS(train_tree(data), std::invalid_argument);
  CHECK_THROWS_AS(train_nb(data), std::invalid_argument);
  CHECK_THROWS_AS(train_forest(data), std::invalid_argument);
}

TEST_CASE("trees render as indented attribute tests") {
  Dataset data = second_attribute_rules();
  DecisionTree tree = train_tree(data);
  std::string text = describe_tree(tree.schema, tree.nodes);
  CHECK(text.find("a1 = a1v0: c0") != std::string::npos);
  CHECK(text.find("a1 = a1v1: c1") != std::string::npos);

  Dataset pure = tiny_dataset({{0, 0}, {1, 1}}, {1, 1}, {2, 2}, 2);
  CHECK(describe_tree(pure.schema, train_tree(pure).nodes) == ": c1 (2)\n");
}

TEST_CASE("all three model kinds save and load exactly") {
  TempDir dir;
  std::mt19937_64 rng(137);
  Dataset data = random_dataset(rng, 60, 3, 3, 2, true);

  DecisionTree tree = train_tree(data);
  save_classifier(tree, dir.file("tree.json"), {{"neighbors", "50"}});
  ClassifierFile tree_file = load_classifier(dir.file("tree.json"));
  REQUIRE(std::holds_alternative<DecisionTree>(tree_file.model));
  CHECK(std::get<DecisionTree>(tree_file.model) == tree);
  CHECK(tree_file.metadata.at("neighbors") == "50");

  NaiveBayesModel nb = train_nb(data, 0.5);
  save_classifier(nb, dir.file("nb.json"));
  ClassifierFile nb_file = load_classifier(dir.file("nb.json"));
  REQUIRE(std::holds_alternative<NaiveBayesModel>(nb_file.model));
  CHECK(std::get<NaiveBayesModel>(nb_file.model) == nb);

  ForestParams params;
  params.n_trees = 7;
  RandomForest forest = train_forest(data, params);
  save_classifier(forest, dir.file("rf.json"));
  ClassifierFile rf_file = load_classifier(dir.file("rf.json"));
  REQUIRE(std::holds_alternative<RandomForest>(rf_file.model));
  CHECK(std::get<RandomForest>(rf_file.model) == forest);
}

TEST_CASE("version and format mismatches are loud") {
  TempDir dir;
  Dataset data = xor_dataset();
  save_classifier(train_nb(data), dir.file("m.json"));
  std::string text = cmpos::read_file(dir.file("m.json"));

  auto v9 = text;
  auto pos = v9.find("\"version\":1");
  REQUIRE(pos != std::string::npos);
  v9.replace(pos, 11, "\"version\":9");
  cmpos::write_file(dir.file("v9.json"), v9);
  CHECK_THROWS_AS(load_classifier(dir.file("v9.json")), VersionError);

  cmpos::write_file(dir.file("junk.json"), "{not json");
  CHECK_THROWS_AS(load_classifier(dir.file("junk.json")), FormatError);
}

TEST_CASE("dataset validation catches arity and domain violations") {
  Dataset data = xor_dataset();
  validate_dataset(data);
  Dataset bad_arity = data;
  bad_arity.instances[0].pop_back();
  CHECK_THROWS_AS(validate_dataset(bad_arity), std::invalid_argument);
  Dataset bad_value = data;
  bad_value.instances[0][0] = 9;
  CHECK_THROWS_AS(validate_dataset(bad_value), std::invalid_argument);
}

}  // TEST_SUITE
