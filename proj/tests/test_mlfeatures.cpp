#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cmpos/corpus.hpp"
#include "cmpos/lexicon.hpp"
#include "cmpos/mlfeatures.hpp"
#include "cmpos/sentinels.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cmpos;
using namespace testutil;

namespace {

const std::string kBosStr{kBos};
const std::string kEosStr{kEos};

std::vector<PositionBucket> buckets_of_length(std::size_t length) {
  std::vector<PositionBucket> out;
  for (std::size_t i = 0; i < length; ++i)
    out.push_back(position_bucket(i, length));
  return out;
}

}  // namespace

TEST_SUITE("mlfeatures") {

TEST_CASE("position buckets follow the precedence rule for short sentences") {
  using enum PositionBucket;
  CHECK(buckets_of_length(1) == std::vector{First});
  CHECK(buckets_of_length(2) == std::vector{First, Last});
  CHECK(buckets_of_length(3) == std::vector{First, Second, Last});
  CHECK(buckets_of_length(4) == std::vector{First, Second, Penult, Last});
  CHECK(buckets_of_length(5) == std::vector{First, Second, Middle, Penult, Last});
  CHECK(buckets_of_length(6) ==
        std::vector{First, Second, Middle, Middle, Penult, Last});
}

TEST_CASE("first token of the documented sentence extracts as specified") {
  auto lex = FrequencyLexicon::build(toy1());
  Sentence s =
      sent({tok("a", "en", "D"), tok("cat", "en", "N"), tok("runs", "en", "V")});
  auto vectors = extract_vectors(s, lex, nullptr, ExtractionMode::Train);
  REQUIRE(vectors.size() == 3);

  const FeatureVector& first = vectors[0];
  CHECK(first.lang_cur == "en");
  CHECK(first.lang_prev == kBosStr);
  CHECK(first.lang_next == "en");
  CHECK(first.tag_prev1 == kBosStr);
  CHECK(first.tag_prev2 == kBosStr);
  CHECK(first.tag_next1_sim == "N");  // exact lexicon hit for "cat"
  CHECK(first.tag_next2_sim == "V");  // exact lexicon hit for "runs"
  CHECK(first.pos_bucket == PositionBucket::First);
  CHECK(first.label == "D");
}

TEST_CASE("last token carries end sentinels") {
  auto lex = FrequencyLexicon::build(toy1());
  Sentence s =
      sent({tok("a", "en", "D"), tok("cat", "en", "N"), tok("runs", "en", "V")});
  auto vectors = extract_vectors(s, lex, nullptr, ExtractionMode::Train);
  const FeatureVector& last = vectors[2];
  CHECK(last.lang_next == kEosStr);
  CHECK(last.tag_next1_sim == kEosStr);
  CHECK(last.tag_next2_sim == kEosStr);
  CHECK(last.pos_bucket == PositionBucket::Last);
  CHECK(last.tag_prev1 == "N");
  CHECK(last.tag_prev2 == "D");
}

TEST_CASE("a single-token sentence is FIRST") {
  auto lex = FrequencyLexicon::build(toy1());
  Sentence s = sent({tok("billi", "hi", "N")});
  auto vectors = extract_vectors(s, lex, nullptr, ExtractionMode::Train);
  CHECK(vectors[0].pos_bucket == PositionBucket::First);
  CHECK(vectors[0].lang_prev == kBosStr);
  CHECK(vectors[0].lang_next == kEosStr);
}

TEST_CASE("unseen next words run through the fallback chain") {
  auto lex = FrequencyLexicon::build(toy1());
  auto emb = toy_embeddings();
  Sentence s = sent({tok("a", "en", "D"), tok("kitten", "en", "N")});
  auto with_emb = extract_vectors(s, lex, &emb, ExtractionMode::Train);
  CHECK(with_emb[0].tag_next1_sim == "N");  // kitten -> neighbor cat -> N
  auto without = extract_vectors(s, lex, nullptr, ExtractionMode::Train);
  CHECK(without[0].tag_next1_sim == lex.global_most_frequent_tag());
}

TEST_CASE("gold tags of later positions are never consulted") {
  // the very next word has a wildly wrong gold tag; only its form matters
  auto lex = FrequencyLexicon::build(toy1());
  Sentence s = sent({tok("a", "en", "D"), tok("cat", "en", "WRONG")});
  auto vectors = extract_vectors(s, lex, nullptr, ExtractionMode::Train);
  CHECK(vectors[0].tag_next1_sim == "N");
}

TEST_CASE("train mode equals gold shifted by one, corpus-wide") {
  std::mt19937_64 rng(83);
  Corpus corpus = random_corpus(rng, 50, true);
  auto lex = FrequencyLexicon::build(corpus);
  for (const auto& sentence : corpus.sentences) {
    auto vectors = extract_vectors(sentence, lex, nullptr, ExtractionMode::Train);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      std::string expect1 = i >= 1 ? *sentence.tokens[i - 1].tag : kBosStr;
      std::string expect2 = i >= 2 ? *sentence.tokens[i - 2].tag : kBosStr;
      CHECK(vectors[i].tag_prev1 == expect1);
      CHECK(vectors[i].tag_prev2 == expect2);
      CHECK(vectors[i].label == sentence.tokens[i].tag);
    }
  }
}

TEST_CASE("similar tags come from the training tag set or the end sentinel") {
  std::mt19937_64 rng(89);
  Corpus train = random_corpus(rng, 40, true);
  Corpus probe = random_corpus(rng, 20, true, /*vocab=*/90);
  auto lex = FrequencyLexicon::build(train);
  std::set<std::string> allowed;
  for (const auto& [tag, count] : lex.global_tag_counts()) allowed.insert(tag);
  allowed.insert(kEosStr);
  for (const auto& sentence : probe.sentences)
    for (const auto& v :
         extract_vectors(sentence, lex, nullptr, ExtractionMode::Train)) {
      CHECK(allowed.count(v.tag_next1_sim));
      CHECK(allowed.count(v.tag_next2_sim));
    }
}

TEST_CASE("infer mode takes its left context from the predictions") {
  auto lex = FrequencyLexicon::build(toy1());
  Sentence s =
      sent({tok("a", "en", "D"), tok("cat", "en", "N"), tok("runs", "en", "V")});
  std::vector<std::string> predicted = {"X1", "X2", "X3"};
  auto vectors =
      extract_vectors(s, lex, nullptr, ExtractionMode::Infer, &predicted);
  CHECK(vectors[1].tag_prev1 == "X1");
  CHECK(vectors[2].tag_prev1 == "X2");
  CHECK(vectors[2].tag_prev2 == "X1");
  CHECK_FALSE(vectors[0].label.has_value());
}

TEST_CASE("the extraction primitive is incremental by construction") {
  auto lex = FrequencyLexicon::build(toy1());
  Sentence s = sent({tok("a", "en"), tok("cat", "en")});
  std::vector<std::string> left = {"D"};
  FeatureVector v = extract_vector(s, 1, lex, nullptr, left);
  CHECK(v.tag_prev1 == "D");

  // left context of the wrong length is a contract violation
  CHECK_THROWS_AS(extract_vector(s, 1, lex, nullptr, {}), std::invalid_argument);
  std::vector<std::string> too_many = {"D", "N"};
  CHECK_THROWS_AS(extract_vector(s, 1, lex, nullptr, too_many),
                  std::invalid_argument);
}

TEST_CASE("mode and taggedness must agree") {
  auto lex = FrequencyLexicon::build(toy1());
  Sentence untagged = sent({tok("a", "en"), tok("cat", "en")});
  CHECK_THROWS_AS(extract_vectors(untagged, lex, nullptr, ExtractionMode::Train),
                  std::invalid_argument);

  Sentence tagged = sent({tok("a", "en", "D")});
  std::vector<std::string> predictions = {"D"};
  CHECK_THROWS_AS(
      extract_vectors(tagged, lex, nullptr, ExtractionMode::Train, &predictions),
      std::invalid_argument);
  CHECK_THROWS_AS(extract_vectors(untagged, lex, nullptr, ExtractionMode::Infer),
                  std::invalid_argument);
  std::vector<std::string> short_predictions = {"D"};
  Sentence two = sent({tok("a", "en"), tok("b", "en")});
  CHECK_THROWS_AS(extract_vectors(two, lex, nullptr, ExtractionMode::Infer,
                                  &short_predictions),
                  std::invalid_argument);
}

TEST_CASE("vector count equals token count") {
  std::mt19937_64 rng(97);
  Corpus corpus = random_corpus(rng, 30, true);
  auto lex = FrequencyLexicon::build(corpus);
  for (const auto& sentence : corpus.sentences)
    CHECK(extract_vectors(sentence, lex, nullptr, ExtractionMode::Train).size() ==
          sentence.tokens.size());
}

TEST_CASE("datasets have the fixed schema and sentinel-bearing domains") {
  std::mt19937_64 rng(101);
  Corpus corpus = random_corpus(rng, 40, true);
  auto lex = FrequencyLexicon::build(corpus);
  std::vector<FeatureVector> vectors;
  for (const auto& sentence : corpus.sentences)
    for (auto& v : extract_vectors(sentence, lex, nullptr, ExtractionMode::Train))
      vectors.push_back(std::move(v));

  Dataset data = vectors_to_dataset(vectors);
  CHECK(data.instances.size() == vectors.size());
  CHECK(data.labeled());
  auto names = feature_attribute_names();
  REQUIRE(data.schema.attributes.size() == names.size());
  CHECK(names ==
        std::vector<std::string>{"lang_cur", "lang_prev", "lang_next",
                                 "tag_prev1", "tag_prev2", "tag_next1_sim",
                                 "tag_next2_sim", "pos_bucket"});
  for (std::size_t a = 0; a < names.size(); ++a)
    CHECK(data.schema.attributes[a].name == names[a]);

  // every domain holds both sentinels plus exactly the observed values
  for (std::size_t a = 0; a < names.size(); ++a) {
    const auto& domain = data.schema.attributes[a].domain;
    std::set<std::string> expected = {kBosStr, kEosStr};
    for (const auto& v : vectors) expected.insert(feature_values(v)[a]);
    CHECK(std::set<std::string>(domain.begin(), domain.end()) == expected);
    CHECK(domain[0] == kBosStr);
    CHECK(domain[1] == kEosStr);
  }

  // instances decode back to the original values
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    auto values = feature_values(vectors[i]);
    for (std::size_t a = 0; a < names.size(); ++a) {
      auto id = static_cast<std::size_t>(data.instances[i][a]);
      CHECK(data.schema.attributes[a].domain[id] == values[a]);
    }
    auto label = static_cast<std::size_t>(data.class_values[i]);
    CHECK(data.schema.class_domain[label] == *vectors[i].label);
  }
}

TEST_CASE("datasets reject empty and mixed-labeledness input") {
  CHECK_THROWS_AS(vectors_to_dataset({}), std::invalid_argument);

  auto lex = FrequencyLexicon::build(toy1());
  Sentence tagged = sent({tok("a", "en", "D")});
  Sentence untagged = sent({tok("a", "en")});
  auto labeled = extract_vectors(tagged, lex, nullptr, ExtractionMode::Train);
  std::vector<std::string> predictions = {"D"};
  auto unlabeled =
      extract_vectors(untagged, lex, nullptr, ExtractionMode::Infer, &predictions);
  std::vector<FeatureVector> mixed = {labeled[0], unlabeled[0]};
  CHECK_THROWS_AS(vectors_to_dataset(mixed), std::invalid_argument);
}

TEST_CASE("raw position swaps the bucket column for the integer position") {
  auto lex = FrequencyLexicon::build(toy1());
  Sentence s =
      sent({tok("a", "en", "D"), tok("cat", "en", "N"), tok("runs", "en", "V")});
  auto vectors = extract_vectors(s, lex, nullptr, ExtractionMode::Train);
  CHECK(feature_attribute_names(true).back() == "position");
  CHECK(feature_values(vectors[2], true).back() == "2");
  Dataset data = vectors_to_dataset(vectors, true);
  CHECK(data.schema.attributes.back().name == "position");
}

TEST_CASE("vectors map onto a model schema by attribute name") {
  auto lex = FrequencyLexicon::build(toy1());
  Sentence s =
      sent({tok("a", "en", "D"), tok("cat", "en", "N"), tok("runs", "en", "V")});
  auto vectors = extract_vectors(s, lex, nullptr, ExtractionMode::Train);
  Dataset data = vectors_to_dataset(vectors);

  auto instance = vector_to_instance(vectors[1], data.schema);
  CHECK(instance == data.instances[1]);

  // projected schema keeps a subset of the columns, matched by name
  std::vector<std::size_t> keep = {0, 7};
  Dataset projected = project_dataset(data, keep);
  auto narrow = vector_to_instance(vectors[1], projected.schema);
  REQUIRE(narrow.size() == 2);
  CHECK(projected.schema.attributes[0].domain[static_cast<std::size_t>(narrow[0])] ==
        "en");

  // values the schema never saw map to the unseen id
  FeatureVector alien = vectors[1];
  alien.lang_cur = "te";
  CHECK(vector_to_instance(alien, data.schema)[0] == -1);

  DatasetSchema bad = data.schema;
  bad.attributes[0].name = "mystery";
  CHECK_THROWS_AS(vector_to_instance(vectors[1], bad), std::invalid_argument);
}

TEST_CASE("csv export carries the header and forbids commas") {
  auto lex = FrequencyLexicon::build(toy1());
  Sentence s = sent({tok("a", "en", "D"), tok("cat", "en", "N")});
  auto vectors = extract_vectors(s, lex, nullptr, ExtractionMode::Train);
  Dataset data = vectors_to_dataset(vectors);
  std::string csv = dataset_to_csv(data);
  CHECK(csv.starts_with(
      "lang_cur,lang_prev,lang_next,tag_prev1,tag_prev2,tag_next1_sim,"
      "tag_next2_sim,pos_bucket,class\n"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  Dataset bad = data;
  bad.schema.attributes[0].domain[2] += ",oops";
  CHECK_THROWS_AS(dataset_to_csv(bad), std::invalid_argument);
}

}  // TEST_SUITE
