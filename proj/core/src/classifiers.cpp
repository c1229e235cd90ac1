#include "cmpos/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cmpos/error.hpp"
#include "cmpos/io.hpp"
#include "json_util.hpp"

namespace cmpos {

std::optional<std::int32_t> Attribute::value_id(std::string_view value) const {
  for (std::size_t i = 0; i < domain.size(); ++i)
    if (domain[i] == value) return static_cast<std::int32_t>(i);
  return std::nullopt;
}

std::optional<std::int32_t> DatasetSchema::class_id(std::string_view label) const {
  for (std::size_t i = 0; i < class_domain.size(); ++i)
    if (class_domain[i] == label) return static_cast<std::int32_t>(i);
  return std::nullopt;
}

void validate_dataset(const Dataset& data) {
  const auto& schema = data.schema;
  for (std::size_t a = 0; a < schema.attributes.size(); ++a)
    if (schema.attributes[a].domain.empty())
      throw std::invalid_argument("attribute '" + schema.attributes[a].name +
                                  "' has an empty domain");
  for (std::size_t i = 0; i < data.instances.size(); ++i) {
    const auto& row = data.instances[i];
    if (row.size() != schema.attributes.size())
      throw std::invalid_argument("instance " + std::to_string(i) + " has " +
                                  std::to_string(row.size()) + " values, expected " +
                                  std::to_string(schema.attributes.size()));
    for (std::size_t a = 0; a < row.size(); ++a) {
      if (row[a] < 0 ||
          row[a] >= static_cast<std::int32_t>(schema.attributes[a].domain.size()))
        throw std::invalid_argument("instance " + std::to_string(i) +
                                    ": value id out of domain for attribute '" +
                                    schema.attributes[a].name + "'");
    }
  }
  if (!data.class_values.empty()) {
    if (data.class_values.size() != data.instances.size())
      throw std::invalid_argument("class column length does not match instance count");
    for (auto c : data.class_values)
      if (c < 0 || c >= static_cast<std::int32_t>(schema.class_domain.size()))
        throw std::invalid_argument("class id out of domain");
  }
}

namespace {

constexpr double kGainEpsilon = 1e-12;

double entropy_bits(const std::vector<double>& counts, double total) {
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) {
      double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

// inverse standard normal CDF, Acklam's rational approximation
// (|relative error| < 1.2e-9 on (0,1))
double normal_inverse(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_inverse needs p in (0,1)");
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// C4.5's pessimistic error increment: the extra errors to charge a node with
// n instances and e observed errors at confidence cf (upper binomial bound
// via the normal approximation, with C4.5's small-count interpolation)
double add_errs(double n, double e, double cf) {
  if (cf > 0.5 || n <= 0.0) return 0.0;
  if (e < 1.0) {
    double base = n * (1.0 - std::pow(cf, 1.0 / n));
    if (e == 0.0) return base;
    return base + e * (add_errs(n, 1.0, cf) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  double z = normal_inverse(1.0 - cf);
  double f = (e + 0.5) / n;
  double r = (f + z * z / (2.0 * n) +
              z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) /
             (1.0 + z * z / n);
  return r * n - e;
}

struct SplitStats {
  std::int32_t attribute = -1;
  double gain = 0.0;
  double ratio = 0.0;
};

struct TreeBuilder {
  const Dataset& data;
  int min_leaf;
  std::size_t mtry;         // 0: consider every candidate attribute
  std::mt19937_64* rng;     // only consulted when mtry restricts candidates
  std::vector<TreeNode> nodes;

  std::int32_t majority(const std::vector<double>& counts) const {
    std::int32_t best = 0;
    for (std::int32_t c = 1; c < static_cast<std::int32_t>(counts.size()); ++c) {
      if (counts[c] > counts[best] ||
          (counts[c] == counts[best] &&
           data.schema.class_domain[c] < data.schema.class_domain[best]))
        best = c;
    }
    return best;
  }

  std::vector<std::int32_t> candidate_attributes(
      const std::vector<std::int32_t>& rows, const std::vector<bool>& used) const {
    std::vector<std::int32_t> candidates;
    for (std::size_t a = 0; a < data.schema.attributes.size(); ++a) {
      if (used[a]) continue;
      std::int32_t first = data.instances[rows[0]][a];
      for (auto r : rows) {
        if (data.instances[r][a] != first) {
          candidates.push_back(static_cast<std::int32_t>(a));
          break;
        }
      }
    }
    return candidates;
  }

  SplitStats split_stats(const std::vector<std::int32_t>& rows,
                         std::int32_t attribute, double node_entropy) const {
    const auto n_values = data.schema.attributes[attribute].domain.size();
    const auto n_classes = data.schema.class_domain.size();
    std::vector<double> value_totals(n_values, 0.0);
    std::vector<std::vector<double>> value_class(n_values,
                                                 std::vector<double>(n_classes, 0.0));
    for (auto r : rows) {
      auto v = static_cast<std::size_t>(data.instances[r][attribute]);
      value_totals[v] += 1.0;
      value_class[v][data.class_values[r]] += 1.0;
    }
    double total = static_cast<double>(rows.size());
    double remainder = 0.0;
    double split_info = 0.0;
    for (std::size_t v = 0; v < n_values; ++v) {
      if (value_totals[v] <= 0.0) continue;
      double frac = value_totals[v] / total;
      remainder += frac * entropy_bits(value_class[v], value_totals[v]);
      split_info -= frac * std::log2(frac);
    }
    SplitStats stats;
    stats.attribute = attribute;
    stats.gain = node_entropy - remainder;
    // candidates always have >= 2 present values, so split_info > 0
    stats.ratio = stats.gain / split_info;
    return stats;
  }

  std::int32_t build(const std::vector<std::int32_t>& rows, std::vector<bool>& used) {
    const auto n_classes = data.schema.class_domain.size();
    std::vector<double> counts(n_classes, 0.0);
    for (auto r : rows) counts[data.class_values[r]] += 1.0;
    double total = static_cast<double>(rows.size());

    auto idx = static_cast<std::int32_t>(nodes.size());
    TreeNode node;
    node.label = majority(counts);
    node.class_counts = counts;
    nodes.push_back(node);

    bool pure = counts[node.label] == total;
    if (pure || static_cast<int>(rows.size()) < min_leaf) return idx;

    auto candidates = candidate_attributes(rows, used);
    if (candidates.empty()) return idx;
    if (rng && mtry > 0 && mtry < candidates.size()) {
      // partial Fisher-Yates, then restore ascending order so the tie-break
      // stays "lowest attribute id"
      for (std::size_t i = 0; i < mtry; ++i) {
        std::size_t j = i + static_cast<std::size_t>((*rng)() % (candidates.size() - i));
        std::swap(candidates[i], candidates[j]);
      }
      candidates.resize(mtry);
      std::sort(candidates.begin(), candidates.end());
    }

    double node_entropy = entropy_bits(counts, total);
    std::vector<SplitStats> stats;
    stats.reserve(candidates.size());
    double mean_gain = 0.0;
    for (auto a : candidates) {
      stats.push_back(split_stats(rows, a, node_entropy));
      mean_gain += stats.back().gain;
    }
    mean_gain /= static_cast<double>(stats.size());

    const SplitStats* best = nullptr;
    for (const auto& s : stats) {
      if (s.gain + kGainEpsilon < mean_gain) continue;
      if (!best || s.ratio > best->ratio) best = &s;
    }
    if (!best) return idx;  // unreachable: the max-gain candidate is eligible

    auto attribute = best->attribute;
    const auto n_values = data.schema.attributes[attribute].domain.size();
    std::vector<std::vector<std::int32_t>> partitions(n_values);
    for (auto r : rows)
      partitions[static_cast<std::size_t>(data.instances[r][attribute])].push_back(r);

    std::int32_t fallback = 0;
    for (std::size_t v = 1; v < n_values; ++v)
      if (partitions[v].size() > partitions[fallback].size())
        fallback = static_cast<std::int32_t>(v);

    used[attribute] = true;
    std::vector<std::int32_t> children(n_values, -1);
    for (std::size_t v = 0; v < n_values; ++v) {
      if (partitions[v].empty()) {
        // empty branch: zero-count leaf predicting the parent majority
        TreeNode leaf;
        leaf.label = nodes[idx].label;
        leaf.class_counts.assign(n_classes, 0.0);
        children[v] = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(std::move(leaf));
      } else {
        children[v] = build(partitions[v], used);
      }
    }
    used[attribute] = false;

    nodes[idx].is_leaf = false;
    nodes[idx].attribute = attribute;
    nodes[idx].children = std::move(children);
    nodes[idx].fallback_value = fallback;
    return idx;
  }
};

double leaf_error_estimate(const std::vector<double>& counts, double cf) {
  double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (total <= 0.0) return 0.0;
  double errors = total - *std::max_element(counts.begin(), counts.end());
  return errors + add_errs(total, errors, cf);
}

// post-order subtree replacement: collapse a split whenever the pessimistic
// leaf estimate does not exceed the subtree estimate by more than 0.1 errors
double prune_walk(std::vector<TreeNode>& nodes, std::size_t idx, double cf) {
  if (nodes[idx].is_leaf) return leaf_error_estimate(nodes[idx].class_counts, cf);
  double subtree_errors = 0.0;
  for (auto child : nodes[idx].children)
    subtree_errors += prune_walk(nodes, static_cast<std::size_t>(child), cf);
  double leaf_errors = leaf_error_estimate(nodes[idx].class_counts, cf);
  if (leaf_errors <= subtree_errors + 0.1) {
    nodes[idx].is_leaf = true;
    nodes[idx].attribute = -1;
    nodes[idx].children.clear();
    nodes[idx].fallback_value = -1;
    return leaf_errors;
  }
  return subtree_errors;
}

void compact_preorder(std::vector<TreeNode>& nodes, std::size_t idx,
                      std::vector<TreeNode>& out) {
  auto new_idx = out.size();
  out.push_back(nodes[idx]);
  if (out[new_idx].is_leaf) return;
  for (auto& child : out[new_idx].children) {
    auto old_child = static_cast<std::size_t>(child);
    child = static_cast<std::int32_t>(out.size());
    compact_preorder(nodes, old_child, out);
  }
}

void require_trainable(const Dataset& data) {
  validate_dataset(data);
  if (data.instances.empty()) throw std::invalid_argument("empty dataset");
  if (!data.labeled()) throw std::invalid_argument("training needs a labeled dataset");
}

const TreeNode& walk_tree(const std::vector<TreeNode>& nodes,
                          std::span<const std::int32_t> instance) {
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf) {
    auto v = instance[static_cast<std::size_t>(node->attribute)];
    if (v < 0 || v >= static_cast<std::int32_t>(node->children.size()))
      v = node->fallback_value;
    node = &nodes[static_cast<std::size_t>(node->children[static_cast<std::size_t>(v)])];
  }
  return *node;
}

std::int32_t argmax_label(const std::vector<double>& scores,
                          const std::vector<std::string>& labels) {
  std::int32_t best = 0;
  for (std::int32_t c = 1; c < static_cast<std::int32_t>(scores.size()); ++c) {
    if (scores[c] > scores[best] ||
        (scores[c] == scores[best] && labels[c] < labels[best]))
      best = c;
  }
  return best;
}

void check_arity(const DatasetSchema& schema, std::span<const std::int32_t> instance) {
  if (instance.size() != schema.attributes.size())
    throw std::invalid_argument("instance has " + std::to_string(instance.size()) +
                                " values, model expects " +
                                std::to_string(schema.attributes.size()));
}

}  // namespace

DecisionTree train_tree(const Dataset& data, const TreeParams& params) {
  require_trainable(data);
  if (params.min_leaf < 1) throw std::invalid_argument("min_leaf must be >= 1");

  TreeBuilder builder{data, params.min_leaf, 0, nullptr, {}};
  std::vector<std::int32_t> rows(data.instances.size());
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<bool> used(data.schema.attributes.size(), false);
  builder.build(rows, used);

  if (params.prune) {
    prune_walk(builder.nodes, 0, params.prune_confidence);
    std::vector<TreeNode> compacted;
    compacted.reserve(builder.nodes.size());
    compact_preorder(builder.nodes, 0, compacted);
    builder.nodes = std::move(compacted);
  }
  return DecisionTree{data.schema, params, std::move(builder.nodes)};
}

NaiveBayesModel train_nb(const Dataset& data, double alpha) {
  require_trainable(data);
  if (!(alpha > 0.0)) throw std::invalid_argument("smoothing alpha must be > 0");

  NaiveBayesModel model;
  model.schema = data.schema;
  model.alpha = alpha;
  model.total = static_cast<std::int64_t>(data.instances.size());
  model.class_counts.assign(data.schema.class_domain.size(), 0);
  model.value_counts.resize(data.schema.attributes.size());
  for (std::size_t a = 0; a < data.schema.attributes.size(); ++a)
    model.value_counts[a].assign(
        data.schema.class_domain.size() * data.schema.attributes[a].domain.size(), 0);

  for (std::size_t i = 0; i < data.instances.size(); ++i) {
    auto c = static_cast<std::size_t>(data.class_values[i]);
    ++model.class_counts[c];
    for (std::size_t a = 0; a < data.instances[i].size(); ++a) {
      auto domain_size = data.schema.attributes[a].domain.size();
      ++model.value_counts[a][c * domain_size +
                              static_cast<std::size_t>(data.instances[i][a])];
    }
  }
  return model;
}

RandomForest train_forest(const Dataset& data, const ForestParams& params) {
  require_trainable(data);
  if (params.n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");
  if (params.min_leaf < 1) throw std::invalid_argument("min_leaf must be >= 1");
  if (params.mtry < 0) throw std::invalid_argument("mtry must be >= 0");

  auto m = data.schema.attributes.size();
  std::size_t mtry = params.mtry > 0
                         ? static_cast<std::size_t>(params.mtry)
                         : static_cast<std::size_t>(
                               std::ceil(std::sqrt(static_cast<double>(m))));

  // per-tree seeds drawn up front so trees are independent of build order
  std::mt19937_64 seeder(params.seed);
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(params.n_trees));
  for (auto& s : seeds) s = seeder();

  RandomForest forest;
  forest.schema = data.schema;
  forest.params = params;
  forest.trees.reserve(seeds.size());
  const auto n = data.instances.size();
  for (auto seed : seeds) {
    std::mt19937_64 rng(seed);
    std::vector<std::int32_t> rows(n);
    if (params.bootstrap) {
      for (auto& r : rows) r = static_cast<std::int32_t>(rng() % n);
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    TreeBuilder builder{data, params.min_leaf, mtry, &rng, {}};
    std::vector<bool> used(m, false);
    builder.build(rows, used);
    forest.trees.push_back(std::move(builder.nodes));
  }
  return forest;
}

Prediction predict(const DecisionTree& model, std::span<const std::int32_t> instance) {
  check_arity(model.schema, instance);
  const auto& leaf = walk_tree(model.nodes, instance);
  Prediction prediction;
  prediction.label = model.schema.class_domain[static_cast<std::size_t>(leaf.label)];
  double total =
      std::accumulate(leaf.class_counts.begin(), leaf.class_counts.end(), 0.0);
  prediction.distribution.assign(model.schema.class_domain.size(), 0.0);
  if (total > 0.0) {
    for (std::size_t c = 0; c < leaf.class_counts.size(); ++c)
      prediction.distribution[c] = leaf.class_counts[c] / total;
  } else {
    prediction.distribution[static_cast<std::size_t>(leaf.label)] = 1.0;
  }
  return prediction;
}

Prediction predict(const NaiveBayesModel& model,
                   std::span<const std::int32_t> instance) {
  check_arity(model.schema, instance);
  const auto n_classes = model.schema.class_domain.size();
  std::vector<double> log_scores(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    double score = std::log(static_cast<double>(model.class_counts[c]) /
                            static_cast<double>(model.total));
    for (std::size_t a = 0; a < instance.size(); ++a) {
      auto domain_size = model.schema.attributes[a].domain.size();
      std::int64_t count = 0;
      if (instance[a] >= 0 && instance[a] < static_cast<std::int32_t>(domain_size))
        count = model.value_counts[a][c * domain_size +
                                      static_cast<std::size_t>(instance[a])];
      score += std::log((static_cast<double>(count) + model.alpha) /
                        (static_cast<double>(model.class_counts[c]) +
                         model.alpha * static_cast<double>(domain_size)));
    }
    log_scores[c] = score;
  }
  double max_score = *std::max_element(log_scores.begin(), log_scores.end());
  double z = 0.0;
  Prediction prediction;
  prediction.distribution.resize(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    prediction.distribution[c] = std::exp(log_scores[c] - max_score);
    z += prediction.distribution[c];
  }
  for (auto& p : prediction.distribution) p /= z;
  prediction.label = model.schema.class_domain[static_cast<std::size_t>(
      argmax_label(prediction.distribution, model.schema.class_domain))];
  return prediction;
}

Prediction predict(const RandomForest& model, std::span<const std::int32_t> instance) {
  check_arity(model.schema, instance);
  std::vector<double> votes(model.schema.class_domain.size(), 0.0);
  for (const auto& nodes : model.trees)
    votes[static_cast<std::size_t>(walk_tree(nodes, instance).label)] += 1.0;
  Prediction prediction;
  prediction.distribution.resize(votes.size());
  for (std::size_t c = 0; c < votes.size(); ++c)
    prediction.distribution[c] = votes[c] / static_cast<double>(model.trees.size());
  prediction.label = model.schema.class_domain[static_cast<std::size_t>(
      argmax_label(votes, model.schema.class_domain))];
  return prediction;
}

namespace {

std::string render_count(const TreeNode& leaf) {
  double total =
      std::accumulate(leaf.class_counts.begin(), leaf.class_counts.end(), 0.0);
  double errors =
      total - leaf.class_counts[static_cast<std::size_t>(leaf.label)];
  std::ostringstream out;
  out << " (" << total;
  if (errors > 0.0) out << "/" << errors;
  out << ")";
  return out.str();
}

void render_node(const DatasetSchema& schema, const std::vector<TreeNode>& nodes,
                 std::size_t idx, int depth, std::ostringstream& out) {
  const auto& node = nodes[idx];
  const auto& attribute = schema.attributes[static_cast<std::size_t>(node.attribute)];
  for (std::size_t v = 0; v < node.children.size(); ++v) {
    for (int i = 0; i < depth; ++i) out << "|   ";
    out << attribute.name << " = " << attribute.domain[v];
    const auto& child = nodes[static_cast<std::size_t>(node.children[v])];
    if (child.is_leaf) {
      out << ": " << schema.class_domain[static_cast<std::size_t>(child.label)]
          << render_count(child) << "\n";
    } else {
      out << "\n";
      render_node(schema, nodes, static_cast<std::size_t>(node.children[v]),
                  depth + 1, out);
    }
  }
}

}  // namespace

std::string describe_tree(const DatasetSchema& schema,
                          const std::vector<TreeNode>& nodes) {
  if (nodes.empty()) return "";
  std::ostringstream out;
  if (nodes.front().is_leaf) {
    out << ": " << schema.class_domain[static_cast<std::size_t>(nodes.front().label)]
        << render_count(nodes.front()) << "\n";
  } else {
    render_node(schema, nodes, 0, 0, out);
  }
  return out.str();
}

namespace {

nlohmann::json schema_to_json(const DatasetSchema& schema) {
  nlohmann::json attributes = nlohmann::json::array();
  for (const auto& a : schema.attributes)
    attributes.push_back({{"name", a.name}, {"domain", a.domain}});
  return {{"attributes", std::move(attributes)}, {"classes", schema.class_domain}};
}

DatasetSchema schema_from_json(const nlohmann::json& j) {
  DatasetSchema schema;
  for (const auto& a : j.at("attributes")) {
    Attribute attribute;
    attribute.name = a.at("name").get<std::string>();
    attribute.domain = a.at("domain").get<std::vector<std::string>>();
    schema.attributes.push_back(std::move(attribute));
  }
  schema.class_domain = j.at("classes").get<std::vector<std::string>>();
  return schema;
}

nlohmann::json node_to_json(const std::vector<TreeNode>& nodes, std::size_t idx) {
  const auto& node = nodes[idx];
  nlohmann::json j;
  j["label"] = node.label;
  j["counts"] = node.class_counts;
  if (node.is_leaf) {
    j["leaf"] = true;
  } else {
    j["leaf"] = false;
    j["attribute"] = node.attribute;
    j["fallback"] = node.fallback_value;
    nlohmann::json children = nlohmann::json::array();
    for (auto child : node.children)
      children.push_back(node_to_json(nodes, static_cast<std::size_t>(child)));
    j["children"] = std::move(children);
  }
  return j;
}

// rebuilds the preorder layout the builder produces: parent first, then
// children in domain-value order
std::int32_t node_from_json(const nlohmann::json& j, const DatasetSchema& schema,
                            std::vector<TreeNode>& nodes) {
  auto idx = static_cast<std::int32_t>(nodes.size());
  nodes.emplace_back();
  {
    TreeNode node;
    node.is_leaf = j.at("leaf").get<bool>();
    node.label = j.at("label").get<std::int32_t>();
    node.class_counts = j.at("counts").get<std::vector<double>>();
    if (node.label < 0 ||
        node.label >= static_cast<std::int32_t>(schema.class_domain.size()))
      throw FormatError("tree node label out of range");
    if (node.class_counts.size() != schema.class_domain.size())
      throw FormatError("tree node count vector shape mismatch");
    if (!node.is_leaf) {
      node.attribute = j.at("attribute").get<std::int32_t>();
      node.fallback_value = j.at("fallback").get<std::int32_t>();
      if (node.attribute < 0 ||
          node.attribute >= static_cast<std::int32_t>(schema.attributes.size()))
        throw FormatError("tree split attribute out of range");
      auto domain_size =
          schema.attributes[static_cast<std::size_t>(node.attribute)].domain.size();
      if (j.at("children").size() != domain_size)
        throw FormatError("tree split child count does not match attribute domain");
      if (node.fallback_value < 0 ||
          node.fallback_value >= static_cast<std::int32_t>(domain_size))
        throw FormatError("tree fallback branch out of range");
    }
    nodes[static_cast<std::size_t>(idx)] = std::move(node);
  }
  if (!j.at("leaf").get<bool>()) {
    std::vector<std::int32_t> children;
    for (const auto& child : j.at("children"))
      children.push_back(node_from_json(child, schema, nodes));
    nodes[static_cast<std::size_t>(idx)].children = std::move(children);
  }
  return idx;
}

nlohmann::json tree_params_to_json(const TreeParams& p) {
  return {{"min_leaf", p.min_leaf},
          {"prune_confidence", p.prune_confidence},
          {"prune", p.prune}};
}

TreeParams tree_params_from_json(const nlohmann::json& j) {
  TreeParams p;
  p.min_leaf = j.at("min_leaf").get<int>();
  p.prune_confidence = j.at("prune_confidence").get<double>();
  p.prune = j.at("prune").get<bool>();
  return p;
}

void append_model_json(const DecisionTree& model, nlohmann::json& j) {
  j["algo"] = "j48";
  j["params"] = tree_params_to_json(model.params);
  j["tree"] = node_to_json(model.nodes, 0);
}

void append_model_json(const NaiveBayesModel& model, nlohmann::json& j) {
  j["algo"] = "nb";
  j["alpha"] = model.alpha;
  j["total"] = model.total;
  j["class_counts"] = model.class_counts;
  j["value_counts"] = model.value_counts;
}

void append_model_json(const RandomForest& model, nlohmann::json& j) {
  j["algo"] = "rf";
  j["params"] = {{"n_trees", model.params.n_trees},
                 {"seed", model.params.seed},
                 {"min_leaf", model.params.min_leaf},
                 {"mtry", model.params.mtry},
                 {"bootstrap", model.params.bootstrap}};
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& nodes : model.trees) trees.push_back(node_to_json(nodes, 0));
  j["trees"] = std::move(trees);
}

}  // namespace

const DatasetSchema& classifier_schema(const ClassifierVariant& model) {
  return std::visit([](const auto& m) -> const DatasetSchema& { return m.schema; },
                    model);
}

Prediction predict(const ClassifierVariant& model,
                   std::span<const std::int32_t> instance) {
  return std::visit([&](const auto& m) { return predict(m, instance); }, model);
}

void save_classifier(const ClassifierVariant& model, const std::string& path,
                     const std::map<std::string, std::string>& metadata) {
  nlohmann::json j;
  j["format"] = "cmpos.classifier";
  j["version"] = 1;
  j["schema"] = schema_to_json(classifier_schema(model));
  j["metadata"] = metadata;
  std::visit([&](const auto& m) { append_model_json(m, j); }, model);
  write_file(path, j.dump() + "\n");
}

ClassifierFile load_classifier(const std::string& path) {
  auto j = detail::parse_json_file(path);
  detail::check_format(j, "cmpos.classifier");
  auto schema = schema_from_json(j.at("schema"));
  if (schema.class_domain.empty()) throw FormatError(path + ": empty class domain");

  ClassifierFile file;
  file.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  auto algo = j.at("algo").get<std::string>();
  if (algo == "j48") {
    DecisionTree model;
    model.schema = std::move(schema);
    model.params = tree_params_from_json(j.at("params"));
    node_from_json(j.at("tree"), model.schema, model.nodes);
    file.model = std::move(model);
  } else if (algo == "nb") {
    NaiveBayesModel model;
    model.schema = std::move(schema);
    model.alpha = j.at("alpha").get<double>();
    model.total = j.at("total").get<std::int64_t>();
    model.class_counts = j.at("class_counts").get<std::vector<std::int64_t>>();
    model.value_counts =
        j.at("value_counts").get<std::vector<std::vector<std::int64_t>>>();
    if (!(model.alpha > 0.0)) throw FormatError(path + ": alpha must be > 0");
    if (model.class_counts.size() != model.schema.class_domain.size())
      throw FormatError(path + ": class count vector shape mismatch");
    if (model.value_counts.size() != model.schema.attributes.size())
      throw FormatError(path + ": value count table shape mismatch");
    for (std::size_t a = 0; a < model.value_counts.size(); ++a)
      if (model.value_counts[a].size() !=
          model.schema.class_domain.size() * model.schema.attributes[a].domain.size())
        throw FormatError(path + ": value count table shape mismatch");
    file.model = std::move(model);
  } else if (algo == "rf") {
    RandomForest model;
    model.schema = std::move(schema);
    const auto& params = j.at("params");
    model.params.n_trees = params.at("n_trees").get<int>();
    model.params.seed = params.at("seed").get<std::uint64_t>();
    model.params.min_leaf = params.at("min_leaf").get<int>();
    model.params.mtry = params.at("mtry").get<int>();
    model.params.bootstrap = params.at("bootstrap").get<bool>();
    for (const auto& tree : j.at("trees")) {
      std::vector<TreeNode> nodes;
      node_from_json(tree, model.schema, nodes);
      model.trees.push_back(std::move(nodes));
    }
    if (model.trees.size() != static_cast<std::size_t>(model.params.n_trees))
      throw FormatError(path + ": tree count does not match n_trees");
    file.model = std::move(model);
  } else {
    throw FormatError(path + ": unknown classifier algo '" + algo + "'");
  }
  return file;
}

Dataset project_dataset(const Dataset& data, std::span<const std::size_t> keep) {
  for (auto a : keep)
    if (a >= data.schema.attributes.size())
      throw std::invalid_argument("attribute id " + std::to_string(a) +
                                  " out of range");
  Dataset projected;
  projected.schema.class_domain = data.schema.class_domain;
  for (auto a : keep) projected.schema.attributes.push_back(data.schema.attributes[a]);
  projected.instances.reserve(data.instances.size());
  for (const auto& row : data.instances) {
    std::vector<std::int32_t> kept;
    kept.reserve(keep.size());
    for (auto a : keep) kept.push_back(row[a]);
    projected.instances.push_back(std::move(kept));
  }
  projected.class_values = data.class_values;
  return projected;
}

}  // namespace cmpos
