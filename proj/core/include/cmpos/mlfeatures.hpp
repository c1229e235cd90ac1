#ifndef CMPOS_MLFEATURES_HPP
#define CMPOS_MLFEATURES_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmpos/classifiers.hpp"
#include "cmpos/corpus.hpp"
#include "cmpos/embeddings.hpp"
#include "cmpos/lexicon.hpp"

namespace cmpos {

// Sentence position bucket; assignment precedence for short sentences is
// FIRST > LAST > SECOND > PENULT.
enum class PositionBucket { First, Second, Middle, Penult, Last };

std::string_view to_string(PositionBucket bucket);
PositionBucket position_bucket(std::size_t position, std::size_t length);

enum class ExtractionMode {
  Train,  // left-context tags come from the gold annotation
  Infer,  // left-context tags come from the caller's predictions
};

// One token's categorical feature vector: languages of the current and
// adjacent words, the two previous tags, the fallback-chain tags of the next
// two word forms, and the position bucket. Out-of-range contexts carry the
// boundary sentinels.
struct FeatureVector {
  std::string lang_cur;
  std::string lang_prev;
  std::string lang_next;
  std::string tag_prev1;
  std::string tag_prev2;
  std::string tag_next1_sim;
  std::string tag_next2_sim;
  PositionBucket pos_bucket = PositionBucket::First;
  std::size_t position = 0;
  std::optional<std::string> label;  // gold tag, training mode only

  bool operator==(const FeatureVector&) const = default;
};

// Extraction primitive for one position. left_tags must hold exactly the
// tags of positions 0..position-1 (gold or predicted); only the last two are
// consulted, so inference can proceed incrementally left to right. The gold
// tags of tokens at or after `position` are never read: tag_next*_sim comes
// from the fallback chain over the neighboring word forms.
FeatureVector extract_vector(const Sentence& sentence, std::size_t position,
                             const FrequencyLexicon& lexicon,
                             const EmbeddingModel* embeddings,
                             std::span<const std::string> left_tags,
                             std::size_t neighbor_k = 50);

// Whole-sentence extraction. Train mode requires a fully tagged sentence,
// fills labels, and forbids predicted_tags; Infer mode requires
// predicted_tags of sentence length and leaves labels empty.
std::vector<FeatureVector> extract_vectors(
    const Sentence& sentence, const FrequencyLexicon& lexicon,
    const EmbeddingModel* embeddings, ExtractionMode mode,
    const std::vector<std::string>* predicted_tags = nullptr,
    std::size_t neighbor_k = 50);

// Attribute names in the fixed dataset column order. raw_position swaps the
// pos_bucket column for the raw integer position (still categorical).
std::vector<std::string> feature_attribute_names(bool raw_position = false);

// The vector's attribute values in feature_attribute_names order.
std::vector<std::string> feature_values(const FeatureVector& vector,
                                        bool raw_position = false);

// Builds a categorical dataset: 8 attributes in the fixed order, domains
// collected from the data with both sentinels always present, class domain
// (labeled input only) in first-occurrence order.
Dataset vectors_to_dataset(std::span<const FeatureVector> vectors,
                           bool raw_position = false);

// Maps a vector onto an existing schema (typically a trained model's, which
// may keep any subset of the attributes, matched by name); values the schema
// never saw become -1, the classifiers' unseen-value id.
std::vector<std::int32_t> vector_to_instance(const FeatureVector& vector,
                                             const DatasetSchema& schema);

// Header line of attribute names (plus "class" when labeled), one instance
// per row. Throws when any value contains a comma.
std::string dataset_to_csv(const Dataset& dataset);

}  // namespace cmpos

#endif  // CMPOS_MLFEATURES_HPP
