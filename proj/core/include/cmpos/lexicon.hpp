#ifndef CMPOS_LEXICON_HPP
#define CMPOS_LEXICON_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cmpos/corpus.hpp"

namespace cmpos {

struct EmbeddingModel;

enum class FallbackStep : int { Exact = 1, Neighbor = 2, Global = 3 };

struct FallbackResult {
  std::string tag;
  FallbackStep step;
  std::optional<std::string> neighbor;  // set iff step == Neighbor

  bool operator==(const FallbackResult&) const = default;
};

// Word -> tag frequency table over a tagged training corpus, plus the global
// tag prior. Drives the 3-step fallback: exact hit, nearest embedding
// neighbor present in the lexicon, global most frequent tag.
class FrequencyLexicon {
 public:
  using TagCounts = std::map<std::string, std::int64_t>;

  static FrequencyLexicon build(const Corpus& corpus, bool lowercase = false);

  // Most frequent tag of `word`, absent when unseen. All "most frequent"
  // ties break to the lexicographically smallest tag.
  std::optional<std::string> most_frequent_tag(std::string_view word) const;

  std::string global_most_frequent_tag() const;

  // Step 1 if the word is in the lexicon; else step 2, the most frequent tag
  // of the first in-lexicon word among the top-k cosine neighbors; else step
  // 3. Step 2 is skipped when `embeddings` is null or the word is out of the
  // embedding vocabulary. Throws when the embedding model's lowercase flag
  // disagrees with the lexicon's.
  FallbackResult fallback_tag(const EmbeddingModel* embeddings,
                              std::string_view word, std::size_t k = 50) const;

  bool contains(std::string_view word) const;
  bool lowercased() const { return lowercased_; }
  std::int64_t total_tokens() const { return total_tokens_; }
  const std::map<std::string, TagCounts>& word_tag_counts() const {
    return word_tag_counts_;
  }
  const TagCounts& global_tag_counts() const { return global_tag_counts_; }

  void save(const std::string& path) const;
  static FrequencyLexicon load(const std::string& path);

  bool operator==(const FrequencyLexicon&) const = default;

 private:
  std::map<std::string, TagCounts> word_tag_counts_;
  TagCounts global_tag_counts_;
  std::int64_t total_tokens_ = 0;
  bool lowercased_ = false;
};

}  // namespace cmpos

#endif  // CMPOS_LEXICON_HPP
