#include "cmpos/lexicon.hpp"

#include <algorithm>
#include <stdexcept>

#include "cmpos/embeddings.hpp"
#include "cmpos/error.hpp"
#include "json_util.hpp"

namespace cmpos {

namespace {

std::string normalize(std::string_view word, bool lowercase) {
  std::string out(word);
  if (lowercase)
    for (char& c : out)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

// argmax by count, ties to the lexicographically smallest tag; relies on
// std::map iteration order
const std::string& argmax_tag(const FrequencyLexicon::TagCounts& counts) {
  const std::string* best = nullptr;
  std::int64_t best_count = -1;
  for (const auto& [tag, count] : counts) {
    if (count > best_count) {
      best = &tag;
      best_count = count;
    }
  }
  return *best;
}

}  // namespace

FrequencyLexicon FrequencyLexicon::build(const Corpus& corpus, bool lowercase) {
  if (!corpus.tagged)
    throw std::invalid_argument("lexicon requires a tagged corpus");
  FrequencyLexicon lex;
  lex.lowercased_ = lowercase;
  for (const auto& sentence : corpus.sentences) {
    for (const auto& token : sentence.tokens) {
      std::string form = normalize(token.form, lowercase);
      ++lex.word_tag_counts_[std::move(form)][*token.tag];
      ++lex.global_tag_counts_[*token.tag];
      ++lex.total_tokens_;
    }
  }
  return lex;
}

std::optional<std::string> FrequencyLexicon::most_frequent_tag(
    std::string_view word) const {
  auto it = word_tag_counts_.find(normalize(word, lowercased_));
  if (it == word_tag_counts_.end()) return std::nullopt;
  return argmax_tag(it->second);
}

std::string FrequencyLexicon::global_most_frequent_tag() const {
  if (global_tag_counts_.empty())
    throw std::logic_error("empty lexicon has no global tag");
  return argmax_tag(global_tag_counts_);
}

bool FrequencyLexicon::contains(std::string_view word) const {
  return word_tag_counts_.count(normalize(word, lowercased_)) > 0;
}

FallbackResult FrequencyLexicon::fallback_tag(const EmbeddingModel* embeddings,
                                              std::string_view word,
                                              std::size_t k) const {
  if (auto tag = most_frequent_tag(word))
    return {*tag, FallbackStep::Exact, std::nullopt};

  if (embeddings) {
    if (embeddings->config.lowercase != lowercased_)
      throw std::invalid_argument(
          "embedding model and lexicon disagree on lowercasing");
    std::string query = normalize(word, lowercased_);
    if (embeddings->vocab.id_of(query)) {
      for (const auto& [neighbor, sim] : nearest(*embeddings, query, k)) {
        if (auto tag = most_frequent_tag(neighbor))
          return {*tag, FallbackStep::Neighbor, neighbor};
      }
    }
  }
  return {global_most_frequent_tag(), FallbackStep::Global, std::nullopt};
}

void FrequencyLexicon::save(const std::string& path) const {
  nlohmann::json j;
  j["format"] = "cmpos.lexicon";
  j["version"] = 1;
  j["lowercased"] = lowercased_;
  j["total_tokens"] = total_tokens_;
  j["word_tags"] = word_tag_counts_;
  j["global_tags"] = global_tag_counts_;
  write_file(path, j.dump() + "\n");
}

FrequencyLexicon FrequencyLexicon::load(const std::string& path) {
  auto j = detail::parse_json_file(path);
  detail::check_format(j, "cmpos.lexicon");
  FrequencyLexicon lex;
  lex.lowercased_ = j.at("lowercased").get<bool>();
  lex.total_tokens_ = j.at("total_tokens").get<std::int64_t>();
  lex.word_tag_counts_ =
      j.at("word_tags").get<std::map<std::string, TagCounts>>();
  lex.global_tag_counts_ = j.at("global_tags").get<TagCounts>();

  // validate the marginal invariant
  TagCounts marginal;
  std::int64_t total = 0;
  for (const auto& [word, tags] : lex.word_tag_counts_) {
    for (const auto& [tag, count] : tags) {
      if (count < 1) throw FormatError(path + ": nonpositive count");
      marginal[tag] += count;
      total += count;
    }
  }
  if (marginal != lex.global_tag_counts_ || total != lex.total_tokens_)
    throw FormatError(path + ": global tag counts do not match the word-tag marginal");
  return lex;
}

}  // namespace cmpos
