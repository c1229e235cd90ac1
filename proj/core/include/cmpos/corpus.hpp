#ifndef CMPOS_CORPUS_HPP
#define CMPOS_CORPUS_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cmpos {

// One token line of the TAB-separated corpus format:
//   form<TAB>lang[<TAB>tag]
// Forms never contain TAB/CR/LF; fields are never empty.
struct Token {
  std::string form;
  std::string lang;
  std::optional<std::string> tag;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

// Tagging is homogeneous: either every token carries a tag or none does.
struct Corpus {
  std::vector<Sentence> sentences;
  bool tagged = false;

  std::size_t token_count() const;
  bool operator==(const Corpus&) const = default;
};

struct CorpusStats {
  std::size_t total = 0;
  std::size_t sentence_count = 0;
  std::map<std::string, std::size_t> per_lang;
  std::map<std::string, std::size_t> per_tag;  // empty for untagged corpora

  bool operator==(const CorpusStats&) const = default;
};

enum class ExpectTags { Auto, Yes, No };

// Parses the TAB-separated corpus format. Blank lines end a sentence; a
// trailing sentence is closed at EOF. Throws FormatError (with the 1-based
// line number) on a bad field count, an empty field, or a taggedness mix.
Corpus parse_corpus(std::string_view text, ExpectTags expect = ExpectTags::Auto);

// Exact inverse of parse_corpus for canonical files: one token per line,
// exactly one blank line between sentences, trailing newline.
std::string serialize_corpus(const Corpus& corpus);

// Sentence-level split: shuffle by a seeded permutation (Fisher-Yates over
// mt19937_64, so the result is identical across platforms), then take the
// first floor(ratio*N) sentences as train. shuffle=false keeps file order.
std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double ratio,
                                       std::uint64_t seed, bool shuffle = true);

CorpusStats corpus_stats(const Corpus& corpus);

std::string stats_to_json(const CorpusStats& stats);
std::string stats_to_text(const CorpusStats& stats);

// File helpers; FormatError from the parser is rethrown with "path:line".
Corpus load_corpus(const std::string& path, ExpectTags expect = ExpectTags::Auto);
void save_corpus(const Corpus& corpus, const std::string& path);

}  // namespace cmpos

#endif  // CMPOS_CORPUS_HPP
