#include "cmpos/mlfeatures.hpp"

#include <stdexcept>
#include <unordered_map>

#include "cmpos/sentinels.hpp"

namespace cmpos {

std::string_view to_string(PositionBucket bucket) {
  switch (bucket) {
    case PositionBucket::First: return "FIRST";
    case PositionBucket::Second: return "SECOND";
    case PositionBucket::Middle: return "MIDDLE";
    case PositionBucket::Penult: return "PENULT";
    case PositionBucket::Last: return "LAST";
  }
  throw std::invalid_argument("bad position bucket");
}

PositionBucket position_bucket(std::size_t position, std::size_t length) {
  if (position >= length) throw std::invalid_argument("position out of range");
  if (position == 0) return PositionBucket::First;
  if (position == length - 1) return PositionBucket::Last;
  if (position == 1) return PositionBucket::Second;
  if (position == length - 2) return PositionBucket::Penult;
  return PositionBucket::Middle;
}

FeatureVector extract_vector(const Sentence& sentence, std::size_t position,
                             const FrequencyLexicon& lexicon,
                             const EmbeddingModel* embeddings,
                             std::span<const std::string> left_tags,
                             std::size_t neighbor_k) {
  const auto length = sentence.tokens.size();
  if (position >= length) throw std::invalid_argument("position out of range");
  if (left_tags.size() != position)
    throw std::invalid_argument("left_tags must hold exactly the tags before the "
                                "extracted position");

  FeatureVector vector;
  vector.position = position;
  vector.pos_bucket = position_bucket(position, length);
  vector.lang_cur = sentence.tokens[position].lang;
  vector.lang_prev = position > 0 ? sentence.tokens[position - 1].lang
                                  : std::string(kBos);
  vector.lang_next = position + 1 < length ? sentence.tokens[position + 1].lang
                                           : std::string(kEos);
  vector.tag_prev1 = position >= 1 ? left_tags[position - 1] : std::string(kBos);
  vector.tag_prev2 = position >= 2 ? left_tags[position - 2] : std::string(kBos);

  auto similar_tag = [&](std::size_t i) {
    if (i >= length) return std::string(kEos);
    return lexicon.fallback_tag(embeddings, sentence.tokens[i].form, neighbor_k).tag;
  };
  vector.tag_next1_sim = similar_tag(position + 1);
  vector.tag_next2_sim = similar_tag(position + 2);
  return vector;
}

std::vector<FeatureVector> extract_vectors(
    const Sentence& sentence, const FrequencyLexicon& lexicon,
    const EmbeddingModel* embeddings, ExtractionMode mode,
    const std::vector<std::string>* predicted_tags, std::size_t neighbor_k) {
  const auto length = sentence.tokens.size();
  std::vector<std::string> left_tags;
  left_tags.reserve(length);

  if (mode == ExtractionMode::Train) {
    if (predicted_tags)
      throw std::invalid_argument("train-mode extraction takes no predicted tags");
    for (const auto& token : sentence.tokens) {
      if (!token.tag)
        throw std::invalid_argument("train-mode extraction needs a tagged sentence");
    }
  } else {
    if (!predicted_tags || predicted_tags->size() != length)
      throw std::invalid_argument(
          "infer-mode extraction needs one predicted tag per token");
  }

  std::vector<FeatureVector> vectors;
  vectors.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    vectors.push_back(
        extract_vector(sentence, i, lexicon, embeddings, left_tags, neighbor_k));
    if (mode == ExtractionMode::Train) {
      vectors.back().label = *sentence.tokens[i].tag;
      left_tags.push_back(*sentence.tokens[i].tag);
    } else {
      left_tags.push_back((*predicted_tags)[i]);
    }
  }
  return vectors;
}

std::vector<std::string> feature_attribute_names(bool raw_position) {
  return {"lang_cur",      "lang_prev",     "lang_next",
          "tag_prev1",     "tag_prev2",     "tag_next1_sim",
          "tag_next2_sim", raw_position ? "position" : "pos_bucket"};
}

std::vector<std::string> feature_values(const FeatureVector& vector,
                                        bool raw_position) {
  return {vector.lang_cur,
          vector.lang_prev,
          vector.lang_next,
          vector.tag_prev1,
          vector.tag_prev2,
          vector.tag_next1_sim,
          vector.tag_next2_sim,
          raw_position ? std::to_string(vector.position)
                       : std::string(to_string(vector.pos_bucket))};
}

Dataset vectors_to_dataset(std::span<const FeatureVector> vectors,
                           bool raw_position) {
  if (vectors.empty())
    throw std::invalid_argument("cannot build a dataset from zero vectors");
  bool labeled = vectors.front().label.has_value();
  for (const auto& v : vectors)
    if (v.label.has_value() != labeled)
      throw std::invalid_argument("mixed labeled and unlabeled vectors");

  Dataset data;
  auto names = feature_attribute_names(raw_position);
  data.schema.attributes.resize(names.size());
  // sentinels are always representable, then observed values in
  // first-occurrence order
  std::vector<std::unordered_map<std::string, std::int32_t>> indexes(names.size());
  for (std::size_t a = 0; a < names.size(); ++a) {
    data.schema.attributes[a].name = names[a];
    for (auto sentinel : {kBos, kEos}) {
      indexes[a].emplace(std::string(sentinel),
                         static_cast<std::int32_t>(indexes[a].size()));
      data.schema.attributes[a].domain.emplace_back(sentinel);
    }
  }
  std::unordered_map<std::string, std::int32_t> class_index;

  for (const auto& vector : vectors) {
    auto values = feature_values(vector, raw_position);
    std::vector<std::int32_t> row(values.size());
    for (std::size_t a = 0; a < values.size(); ++a) {
      auto [it, inserted] = indexes[a].emplace(
          values[a], static_cast<std::int32_t>(indexes[a].size()));
      if (inserted) data.schema.attributes[a].domain.push_back(values[a]);
      row[a] = it->second;
    }
    data.instances.push_back(std::move(row));
    if (labeled) {
      auto [it, inserted] = class_index.emplace(
          *vector.label, static_cast<std::int32_t>(class_index.size()));
      if (inserted) data.schema.class_domain.push_back(*vector.label);
      data.class_values.push_back(it->second);
    }
  }
  return data;
}

std::vector<std::int32_t> vector_to_instance(const FeatureVector& vector,
                                             const DatasetSchema& schema) {
  std::vector<std::int32_t> instance(schema.attributes.size());
  for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
    const auto& attribute = schema.attributes[a];
    std::string value;
    if (attribute.name == "lang_cur") value = vector.lang_cur;
    else if (attribute.name == "lang_prev") value = vector.lang_prev;
    else if (attribute.name == "lang_next") value = vector.lang_next;
    else if (attribute.name == "tag_prev1") value = vector.tag_prev1;
    else if (attribute.name == "tag_prev2") value = vector.tag_prev2;
    else if (attribute.name == "tag_next1_sim") value = vector.tag_next1_sim;
    else if (attribute.name == "tag_next2_sim") value = vector.tag_next2_sim;
    else if (attribute.name == "pos_bucket") value = to_string(vector.pos_bucket);
    else if (attribute.name == "position") value = std::to_string(vector.position);
    else
      throw std::invalid_argument("schema attribute '" + attribute.name +
                                  "' is not a known feature");
    instance[a] = attribute.value_id(value).value_or(-1);
  }
  return instance;
}

std::string dataset_to_csv(const Dataset& dataset) {
  auto check = [](const std::string& value) -> const std::string& {
    if (value.find(',') != std::string::npos)
      throw std::invalid_argument("value '" + value + "' contains a comma");
    return value;
  };
  std::string out;
  for (std::size_t a = 0; a < dataset.schema.attributes.size(); ++a) {
    if (a > 0) out += ',';
    out += check(dataset.schema.attributes[a].name);
  }
  bool labeled = dataset.labeled();
  if (labeled) out += ",class";
  out += '\n';
  for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
    const auto& row = dataset.instances[i];
    for (std::size_t a = 0; a < row.size(); ++a) {
      if (a > 0) out += ',';
      out += check(dataset.schema.attributes[a]
                       .domain[static_cast<std::size_t>(row[a])]);
    }
    if (labeled) {
      out += ',';
      out += check(dataset.schema
                       .class_domain[static_cast<std::size_t>(dataset.class_values[i])]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace cmpos
