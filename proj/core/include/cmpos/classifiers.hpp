#ifndef CMPOS_CLASSIFIERS_HPP
#define CMPOS_CLASSIFIERS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cmpos {

struct Attribute {
  std::string name;
  std::vector<std::string> domain;

  std::optional<std::int32_t> value_id(std::string_view value) const;
  bool operator==(const Attribute&) const = default;
};

struct DatasetSchema {
  std::vector<Attribute> attributes;
  std::vector<std::string> class_domain;

  std::optional<std::int32_t> class_id(std::string_view label) const;
  bool operator==(const DatasetSchema&) const = default;
};

// Instances hold per-attribute value ids into the schema domains. A labeled
// dataset carries one class id per instance; an unlabeled one carries none.
struct Dataset {
  DatasetSchema schema;
  std::vector<std::vector<std::int32_t>> instances;
  std::vector<std::int32_t> class_values;

  bool labeled() const {
    return !instances.empty() && class_values.size() == instances.size();
  }
  bool operator==(const Dataset&) const = default;
};

// throws std::invalid_argument on the first arity or domain violation
void validate_dataset(const Dataset& data);

// One node of a decision tree stored in preorder; nodes[0] is the root.
// Split nodes keep one child per domain value of the split attribute (empty
// branches become zero-count leaves) and route unseen values to the child at
// fallback_value, the branch that received the largest training mass.
struct TreeNode {
  bool is_leaf = true;
  std::int32_t label = 0;
  std::vector<double> class_counts;
  std::int32_t attribute = -1;
  std::vector<std::int32_t> children;
  std::int32_t fallback_value = -1;

  bool operator==(const TreeNode&) const = default;
};

struct TreeParams {
  int min_leaf = 2;
  double prune_confidence = 0.25;
  bool prune = true;

  bool operator==(const TreeParams&) const = default;
};

struct DecisionTree {
  DatasetSchema schema;
  TreeParams params;
  std::vector<TreeNode> nodes;

  bool operator==(const DecisionTree&) const = default;
};

struct NaiveBayesModel {
  DatasetSchema schema;
  double alpha = 1.0;
  std::int64_t total = 0;
  std::vector<std::int64_t> class_counts;
  // value_counts[a][c * |domain(a)| + v] = training count of value v under
  // class c for attribute a
  std::vector<std::vector<std::int64_t>> value_counts;

  bool operator==(const NaiveBayesModel&) const = default;
};

struct ForestParams {
  int n_trees = 100;
  std::uint64_t seed = 42;
  int min_leaf = 2;
  int mtry = 0;  // attributes sampled per node; 0 picks ceil(sqrt(m))
  bool bootstrap = true;

  bool operator==(const ForestParams&) const = default;
};

struct RandomForest {
  DatasetSchema schema;
  ForestParams params;
  std::vector<std::vector<TreeNode>> trees;

  bool operator==(const RandomForest&) const = default;
};

struct Prediction {
  std::string label;
  std::vector<double> distribution;  // over schema.class_domain, sums to 1
};

// C4.5-style induction: multiway categorical splits chosen by maximal gain
// ratio among candidates whose information gain reaches the candidate mean,
// ties broken by lowest attribute id; optional pessimistic-error pruning by
// subtree replacement.
DecisionTree train_tree(const Dataset& data, const TreeParams& params = {});

// additive smoothing over each attribute domain; priors are unsmoothed MLE
NaiveBayesModel train_nb(const Dataset& data, double alpha = 1.0);

// bagged unpruned trees with per-node attribute sampling, deterministic for
// a fixed seed
RandomForest train_forest(const Dataset& data, const ForestParams& params = {});

// Instance values outside a model's domains (for example -1 for strings the
// schema never saw) route through each model's unseen-value rule: trees take
// the fallback branch, naive Bayes uses the zero-count smoothed estimate.
Prediction predict(const DecisionTree& model, std::span<const std::int32_t> instance);
Prediction predict(const NaiveBayesModel& model, std::span<const std::int32_t> instance);
Prediction predict(const RandomForest& model, std::span<const std::int32_t> instance);

std::string describe_tree(const DatasetSchema& schema,
                          const std::vector<TreeNode>& nodes);

using ClassifierVariant = std::variant<DecisionTree, NaiveBayesModel, RandomForest>;

struct ClassifierFile {
  ClassifierVariant model;
  std::map<std::string, std::string> metadata;
};

const DatasetSchema& classifier_schema(const ClassifierVariant& model);
Prediction predict(const ClassifierVariant& model, std::span<const std::int32_t> instance);

// metadata is an opaque string map persisted alongside the model (callers
// stash feature-extraction settings there)
void save_classifier(const ClassifierVariant& model, const std::string& path,
                     const std::map<std::string, std::string>& metadata = {});
ClassifierFile load_classifier(const std::string& path);

// keeps only the named attribute columns (ids into schema.attributes), in
// the given order; class column untouched
Dataset project_dataset(const Dataset& data, std::span<const std::size_t> keep);

}  // namespace cmpos

#endif  // CMPOS_CLASSIFIERS_HPP
