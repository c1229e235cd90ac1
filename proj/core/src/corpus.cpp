#include "cmpos/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "cmpos/error.hpp"
#include "cmpos/io.hpp"
#include <json.hpp>

namespace cmpos {

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

namespace {

void check_field(std::string_view field, std::size_t line_no) {
  if (field.empty()) throw FormatError("empty field", line_no);
  if (field.find_first_of("\t\r\n") != std::string_view::npos)
    throw FormatError("field contains control character", line_no);
}

}  // namespace

Corpus parse_corpus(std::string_view text, ExpectTags expect) {
  Corpus corpus;
  Sentence current;
  // -1 unknown, 0 untagged, 1 tagged
  int tagged = expect == ExpectTags::Auto ? -1 : (expect == ExpectTags::Yes);

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) {
      if (pos == text.size()) break;  // no final newline, but consume the tail
      eol = text.size();
    }
    ++line_no;
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      if (!current.tokens.empty()) {
        corpus.sentences.push_back(std::move(current));
        current = {};
      }
      continue;
    }

    std::size_t tab1 = line.find('\t');
    if (tab1 == std::string_view::npos)
      throw FormatError("expected 2 or 3 tab-separated fields, got 1", line_no);
    std::size_t tab2 = line.find('\t', tab1 + 1);
    std::string_view form = line.substr(0, tab1);
    std::string_view lang, tag;
    bool has_tag = tab2 != std::string_view::npos;
    if (has_tag) {
      lang = line.substr(tab1 + 1, tab2 - tab1 - 1);
      tag = line.substr(tab2 + 1);
      if (tag.find('\t') != std::string_view::npos)
        throw FormatError("expected 2 or 3 tab-separated fields, got more",
                          line_no);
    } else {
      lang = line.substr(tab1 + 1);
    }
    check_field(form, line_no);
    check_field(lang, line_no);
    if (has_tag) check_field(tag, line_no);

    if (tagged == -1) {
      tagged = has_tag;
    } else if (tagged != static_cast<int>(has_tag)) {
      throw FormatError(has_tag ? "tagged token in untagged corpus"
                                : "untagged token in tagged corpus",
                        line_no);
    }

    Token token{std::string(form), std::string(lang), std::nullopt};
    if (has_tag) token.tag = std::string(tag);
    current.tokens.push_back(std::move(token));
  }
  if (!current.tokens.empty()) corpus.sentences.push_back(std::move(current));
  corpus.tagged = tagged == 1;
  return corpus;
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    if (i > 0) out += '\n';
    for (const auto& token : corpus.sentences[i].tokens) {
      out += token.form;
      out += '\t';
      out += token.lang;
      if (token.tag) {
        out += '\t';
        out += *token.tag;
      }
      out += '\n';
    }
  }
  return out;
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double ratio,
                                       std::uint64_t seed, bool shuffle) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("split ratio must be in (0,1)");
  const std::size_t n = corpus.sentences.size();
  if (n < 2) throw std::invalid_argument("split needs at least 2 sentences");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  if (shuffle) {
    // Hand-rolled Fisher-Yates: std::shuffle's draw sequence is
    // implementation-defined, this is not.
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(order[i], order[j]);
    }
  }

  auto n_train = static_cast<std::size_t>(ratio * static_cast<double>(n));
  Corpus train, test;
  train.tagged = test.tagged = corpus.tagged;
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? train : test).sentences.push_back(corpus.sentences[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.sentence_count = corpus.sentences.size();
  for (const auto& sentence : corpus.sentences) {
    for (const auto& token : sentence.tokens) {
      ++stats.total;
      ++stats.per_lang[token.lang];
      if (token.tag) ++stats.per_tag[*token.tag];
    }
  }
  return stats;
}

std::string stats_to_json(const CorpusStats& stats) {
  nlohmann::json j;
  j["format"] = "cmpos.stats";
  j["version"] = 1;
  j["total"] = stats.total;
  j["sentences"] = stats.sentence_count;
  j["per_lang"] = stats.per_lang;
  j["per_tag"] = stats.per_tag;
  return j.dump(2) + "\n";
}

std::string stats_to_text(const CorpusStats& stats) {
  std::size_t label_width = 5;  // "total"
  for (const auto& [lang, _] : stats.per_lang)
    label_width = std::max(label_width, lang.size());
  for (const auto& [tag, _] : stats.per_tag)
    label_width = std::max(label_width, tag.size());

  std::ostringstream out;
  auto row = [&](std::string_view label, std::size_t count) {
    out << label;
    for (std::size_t i = label.size(); i < label_width + 2; ++i) out << ' ';
    out << count << '\n';
  };
  row("total", stats.total);
  for (const auto& [lang, count] : stats.per_lang) row(lang, count);
  out << "sentences: " << stats.sentence_count << '\n';
  if (!stats.per_tag.empty()) {
    out << "tags:\n";
    for (const auto& [tag, count] : stats.per_tag) {
      out << "  ";
      row(tag, count);
    }
  }
  return out.str();
}

Corpus load_corpus(const std::string& path, ExpectTags expect) {
  std::string text = read_file(path);
  try {
    return parse_corpus(text, expect);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  write_file(path, serialize_corpus(corpus));
}

}  // namespace cmpos
