#include <map>
#include <random>
#include <string>
#include <vector>

#include "cmpos/corpus.hpp"
#include "cmpos/error.hpp"
#include "cmpos/io.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cmpos;
using namespace testutil;

namespace {

// Sentences as serialized blocks, order-insensitive, for partition checks.
std::multiset<std::string> sentence_multiset(const Corpus& corpus) {
  std::multiset<std::string> out;
  for (const auto& sentence : corpus.sentences)
    out.insert(serialize_corpus(Corpus{{sentence}, corpus.tagged}));
  return out;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("parses tagged sentences separated by blank lines") {
  Corpus corpus = parse_corpus("a\ten\tD\ncat\ten\tN\n\nok\ten\tV\n");
  REQUIRE(corpus.sentences.size() == 2);
  CHECK(corpus.sentences[0].size() == 2);
  CHECK(corpus.sentences[1].size() == 1);
  CHECK(corpus.tagged);
  CHECK(corpus.sentences[0].tokens[1] == tok("cat", "en", "N"));
}

TEST_CASE("parses two-column input as untagged") {
  Corpus corpus = parse_corpus("a\ten\nb\thi\n");
  REQUIRE(corpus.sentences.size() == 1);
  CHECK(corpus.sentences[0].size() == 2);
  CHECK_FALSE(corpus.tagged);
  CHECK(corpus.sentences[0].tokens[1] == tok("b", "hi"));
}

TEST_CASE("rejects a taggedness mix with the offending line number") {
  try {
    parse_corpus("a\ten\tD\nb\thi\n");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("rejects bad field counts and empty fields") {
  auto line_of = [](std::string_view text) {
    try {
      parse_corpus(text);
    } catch (const FormatError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("justoneword\n") == 1);
  CHECK(line_of("a\ten\tD\tEXTRA\n") == 1);
  CHECK(line_of("a\ten\tD\n\nb\t\tN\n") == 3);
  CHECK(line_of("\ten\tD\n") == 1);
}

TEST_CASE("enforces the expected taggedness when given") {
  CHECK_THROWS_AS(parse_corpus("a\ten\n", ExpectTags::Yes), FormatError);
  CHECK_THROWS_AS(parse_corpus("a\ten\tD\n", ExpectTags::No), FormatError);
  CHECK(parse_corpus("a\ten\tD\n", ExpectTags::Yes).tagged);
}

TEST_CASE("serialization is the exact inverse on canonical text") {
  std::string text = "a\ten\tD\ncat\ten\tN\n\nok\ten\tV\n";
  CHECK(serialize_corpus(parse_corpus(text)) == text);
  CHECK(serialize_corpus(parse_corpus("w\ten\tN\n")) == "w\ten\tN\n");
}

TEST_CASE("two sentences serialize with exactly one separator line") {
  Corpus corpus = make_corpus(
      {sent({tok("a", "en", "D")}), sent({tok("b", "en", "N")})}, true);
  CHECK(serialize_corpus(corpus) == "a\ten\tD\n\nb\ten\tN\n");
}

TEST_CASE("random corpora round-trip through serialize and parse") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 25; ++i) {
    Corpus corpus = random_corpus(rng, 1 + rng() % 20, rng() % 2 == 0);
    CHECK(parse_corpus(serialize_corpus(corpus)) == corpus);
  }
}

TEST_CASE("split takes floor(ratio*N) sentences for train") {
  std::mt19937_64 rng(3);
  Corpus corpus = random_corpus(rng, 10, true);
  auto [train, test] = split_corpus(corpus, 0.8, 7);
  CHECK(train.sentences.size() == 8);
  CHECK(test.sentences.size() == 2);
}

TEST_CASE("split is deterministic and partitions the corpus") {
  std::mt19937_64 rng(11);
  Corpus corpus = random_corpus(rng, 100, true);
  auto [train1, test1] = split_corpus(corpus, 0.8, 42);
  auto [train2, test2] = split_corpus(corpus, 0.8, 42);
  CHECK(train1 == train2);
  CHECK(test1 == test2);

  auto merged = sentence_multiset(train1);
  auto test_set = sentence_multiset(test1);
  merged.insert(test_set.begin(), test_set.end());
  CHECK(merged == sentence_multiset(corpus));
}

TEST_CASE("different seeds change the assignment, not the content") {
  std::mt19937_64 rng(13);
  Corpus corpus = random_corpus(rng, 100, true);
  auto [train1, test1] = split_corpus(corpus, 0.8, 1);
  auto [train2, test2] = split_corpus(corpus, 0.8, 2);
  CHECK(train1 != train2);

  auto all1 = sentence_multiset(train1);
  auto t1 = sentence_multiset(test1);
  all1.insert(t1.begin(), t1.end());
  auto all2 = sentence_multiset(train2);
  auto t2 = sentence_multiset(test2);
  all2.insert(t2.begin(), t2.end());
  CHECK(all1 == all2);
}

TEST_CASE("split without shuffle keeps file order") {
  Corpus corpus = make_corpus({sent({tok("s1", "en", "N")}),
                               sent({tok("s2", "en", "N")}),
                               sent({tok("s3", "en", "N")}),
                               sent({tok("s4", "en", "N")})},
                              true);
  auto [train, test] = split_corpus(corpus, 0.5, 99, /*shuffle=*/false);
  REQUIRE(train.sentences.size() == 2);
  CHECK(train.sentences[0].tokens[0].form == "s1");
  CHECK(train.sentences[1].tokens[0].form == "s2");
  CHECK(test.sentences[0].tokens[0].form == "s3");
}

TEST_CASE("split rejects out-of-range ratios and tiny corpora") {
  std::mt19937_64 rng(5);
  Corpus corpus = random_corpus(rng, 10, true);
  CHECK_THROWS_AS(split_corpus(corpus, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_corpus(corpus, 1.0, 1), std::invalid_argument);
  Corpus one = make_corpus({sent({tok("a", "en", "N")})}, true);
  CHECK_THROWS_AS(split_corpus(one, 0.5, 1), std::invalid_argument);
}

TEST_CASE("stats counts the 8-token fixture exactly") {
  CorpusStats stats = corpus_stats(toy1());
  CHECK(stats.total == 8);
  CHECK(stats.sentence_count == 3);
  CHECK(stats.per_lang == std::map<std::string, std::size_t>{{"en", 7}, {"hi", 1}});
  CHECK(stats.per_tag ==
        std::map<std::string, std::size_t>{{"D", 2}, {"N", 3}, {"V", 3}});
}

TEST_CASE("stats are additive across a split") {
  std::mt19937_64 rng(17);
  Corpus corpus = random_corpus(rng, 100, true);
  auto [train, test] = split_corpus(corpus, 0.7, 4);
  CorpusStats whole = corpus_stats(corpus);
  CorpusStats a = corpus_stats(train);
  CorpusStats b = corpus_stats(test);
  CHECK(a.total + b.total == whole.total);
  CHECK(a.sentence_count + b.sentence_count == whole.sentence_count);
  for (const auto& [lang, count] : whole.per_lang)
    CHECK(a.per_lang[lang] + b.per_lang[lang] == count);
  for (const auto& [tag, count] : whole.per_tag)
    CHECK(a.per_tag[tag] + b.per_tag[tag] == count);
}

TEST_CASE("stats render as versioned json and an aligned table") {
  CorpusStats stats = corpus_stats(toy1());
  std::string json = stats_to_json(stats);
  CHECK(json.find("\"cmpos.stats\"") != std::string::npos);
  CHECK(json.find("\"total\": 8") != std::string::npos);
  std::string text = stats_to_text(stats);
  CHECK(text.find("total") != std::string::npos);
  CHECK(text.find("en") != std::string::npos);
  CHECK(text.find("7") != std::string::npos);
}

TEST_CASE("file loading prefixes format errors with the path") {
  TempDir dir;
  write_file(dir.file("bad.tsv"), "oops\n");
  try {
    load_corpus(dir.file("bad.tsv"));
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("bad.tsv") != std::string::npos);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
  Corpus corpus = toy1();
  save_corpus(corpus, dir.file("ok.tsv"));
  CHECK(load_corpus(dir.file("ok.tsv")) == corpus);
}

}  // TEST_SUITE
