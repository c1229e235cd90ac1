#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cmpos/corpus.hpp"
#include "cmpos/eval.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cmpos;
using namespace testutil;

namespace {

// same forms and langs as gold, tags drawn from the given set
Corpus retag_random(const Corpus& gold, std::mt19937_64& rng,
                    const std::vector<std::string>& tags, double keep = 0.5) {
  Corpus pred = gold;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (auto& sentence : pred.sentences)
    for (auto& token : sentence.tokens)
      if (coin(rng) > keep) token.tag = tags[rng() % tags.size()];
  return pred;
}

void check_matches_recount(const EvalReport& report,
                           const oracle::EvalRecount& ref) {
  CHECK(report.total == ref.total);
  CHECK(report.correct == ref.correct);
  CHECK(report.token_accuracy == doctest::Approx(ref.accuracy).epsilon(1e-12));
  CHECK(report.weighted_f1 == doctest::Approx(ref.weighted_f1).epsilon(1e-12));
  CHECK(report.macro_f1 == doctest::Approx(ref.macro_f1).epsilon(1e-12));
  CHECK(report.micro_f1 == doctest::Approx(ref.accuracy).epsilon(1e-12));
  CHECK(report.per_tag.size() == ref.f1.size());
  for (const auto& [tag, score] : report.per_tag) {
    CHECK(score.precision == doctest::Approx(ref.precision.at(tag)).epsilon(1e-12));
    CHECK(score.recall == doctest::Approx(ref.recall.at(tag)).epsilon(1e-12));
    CHECK(score.f1 == doctest::Approx(ref.f1.at(tag)).epsilon(1e-12));
    CHECK(score.support == ref.support.at(tag));
    CHECK(score.predicted == ref.predicted.at(tag));
  }
  CHECK(report.per_lang_accuracy.size() == ref.lang_accuracy.size());
  for (const auto& [lang, accuracy] : report.per_lang_accuracy)
    CHECK(accuracy == doctest::Approx(ref.lang_accuracy.at(lang)).epsilon(1e-12));
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("identical corpora score perfectly") {
  Corpus gold = toy1();
  EvalReport report = evaluate(gold, gold);
  CHECK(report.token_accuracy == 1.0);
  CHECK(report.total == 8);
  CHECK(report.correct == 8);
  for (const auto& [tag, score] : report.per_tag) {
    CHECK(score.precision == 1.0);
    CHECK(score.recall == 1.0);
    CHECK(score.f1 == 1.0);
  }
  CHECK(report.weighted_f1 == 1.0);
  CHECK(report.macro_f1 == 1.0);
  CHECK(report.micro_f1 == 1.0);
}

TEST_CASE("half right is half accuracy") {
  Corpus gold = make_corpus({sent({tok("a", "en", "D"), tok("b", "en", "N"),
                                   tok("c", "en", "V"), tok("d", "en", "N")})},
                            true);
  Corpus pred = gold;
  pred.sentences[0].tokens[1].tag = "V";
  pred.sentences[0].tokens[2].tag = "N";
  EvalReport report = evaluate(gold, pred);
  CHECK(report.token_accuracy == doctest::Approx(0.5));
  CHECK(report.correct == 2);
}

TEST_CASE("report fields equal a naive recount on random pairs") {
  std::mt19937_64 rng(139);
  for (int round = 0; round < 20; ++round) {
    Corpus gold = random_corpus(rng, 25, true);
    Corpus pred = retag_random(gold, rng, {"A", "D", "N", "V", "X"});
    EvalReport report = evaluate(gold, pred);
    check_matches_recount(report, oracle::recount_eval(gold, pred));
  }
}

TEST_CASE("zero predicted means zero precision, zero support zero recall") {
  Corpus gold = make_corpus(
      {sent({tok("a", "en", "N"), tok("b", "en", "N"), tok("c", "en", "V")})},
      true);
  Corpus pred = gold;
  pred.sentences[0].tokens[2].tag = "X";  // V never predicted, X no support
  EvalReport report = evaluate(gold, pred);
  CHECK(report.per_tag.at("V").precision == 0.0);
  CHECK(report.per_tag.at("V").recall == 0.0);
  CHECK(report.per_tag.at("V").f1 == 0.0);
  CHECK(report.per_tag.at("X").recall == 0.0);
  CHECK(report.per_tag.at("X").precision == 0.0);
  CHECK(report.per_tag.at("X").support == 0);
  check_matches_recount(report, oracle::recount_eval(gold, pred));
}

TEST_CASE("confusion counts tie the report together") {
  std::mt19937_64 rng(149);
  Corpus gold = random_corpus(rng, 30, true);
  Corpus pred = retag_random(gold, rng, {"A", "D", "N", "V"});
  EvalReport report = evaluate(gold, pred);

  std::int64_t trace = 0, total = 0;
  for (const auto& [gold_tag, row] : report.confusion)
    for (const auto& [pred_tag, count] : row) {
      total += count;
      if (gold_tag == pred_tag) trace += count;
    }
  CHECK(trace == report.correct);
  CHECK(total == report.total);
  for (const auto& [gold_tag, row] : report.confusion) {
    std::int64_t support = 0;
    for (const auto& [pred_tag, count] : row) support += count;
    CHECK(support == report.per_tag.at(gold_tag).support);
  }

  std::int64_t lang_total = 0;
  double weighted_hits = 0.0;
  for (const auto& [lang, n] : report.per_lang_total) {
    lang_total += n;
    weighted_hits += report.per_lang_accuracy.at(lang) * static_cast<double>(n);
  }
  CHECK(lang_total == report.total);
  CHECK(weighted_hits / static_cast<double>(report.total) ==
        doctest::Approx(report.token_accuracy).epsilon(1e-12));
}

TEST_CASE("sentence order does not change the report") {
  std::mt19937_64 rng(151);
  Corpus gold = random_corpus(rng, 20, true);
  Corpus pred = retag_random(gold, rng, {"A", "D", "N", "V"});
  EvalReport before = evaluate(gold, pred);

  std::vector<std::size_t> order(gold.sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  Corpus gold2, pred2;
  gold2.tagged = pred2.tagged = true;
  for (auto i : order) {
    gold2.sentences.push_back(gold.sentences[i]);
    pred2.sentences.push_back(pred.sentences[i]);
  }
  CHECK(evaluate(gold2, pred2) == before);
}

TEST_CASE("excluded languages vanish from every count") {
  Corpus gold = make_corpus({sent({tok("a", "en", "N"), tok("b", "O", "X"),
                                   tok("c", "hi", "V")})},
                            true);
  Corpus pred = gold;
  pred.sentences[0].tokens[1].tag = "N";  // only the excluded token differs
  EvalReport report = evaluate(gold, pred, {"O"});
  CHECK(report.total == 2);
  CHECK(report.token_accuracy == 1.0);
  CHECK(report.per_tag.count("X") == 0);
  CHECK(report.per_lang_total.count("O") == 0);
  check_matches_recount(report, oracle::recount_eval(gold, pred, {"O"}));
}

TEST_CASE("misaligned corpora name the first differing position") {
  Corpus gold = toy1();
  Corpus changed_form = gold;
  changed_form.sentences[1].tokens[1].form = "dog";
  CHECK_THROWS_WITH_AS(evaluate(gold, changed_form),
                       doctest::Contains("sentence 2, token 2"),
                       std::invalid_argument);

  Corpus changed_lang = gold;
  changed_lang.sentences[0].tokens[0].lang = "te";
  CHECK_THROWS_WITH_AS(evaluate(gold, changed_lang),
                       doctest::Contains("sentence 1, token 1"),
                       std::invalid_argument);

  Corpus dropped = gold;
  dropped.sentences.pop_back();
  CHECK_THROWS_AS(evaluate(gold, dropped), std::invalid_argument);

  Corpus untagged = parse_corpus("a\ten\n");
  CHECK_THROWS_AS(evaluate(untagged, untagged), std::invalid_argument);
}

TEST_CASE("text rendering uses two-decimal percentages") {
  Corpus gold = toy1();
  std::string identity = render_report(evaluate(gold, gold), ReportFormat::Text);
  CHECK(identity.find("accuracy: 100.00%") != std::string::npos);

  // 4 tokens, 2 correct
  Corpus small = make_corpus({sent({tok("a", "en", "D"), tok("b", "en", "N"),
                                    tok("c", "en", "V"), tok("d", "en", "N")})},
                             true);
  Corpus pred = small;
  pred.sentences[0].tokens[0].tag = "N";
  pred.sentences[0].tokens[1].tag = "D";
  std::string text = render_report(evaluate(small, pred), ReportFormat::Text);
  CHECK(text.find("50.00") != std::string::npos);
  CHECK(text.find("weighted F1") != std::string::npos);
}

TEST_CASE("json reports round-trip") {
  std::mt19937_64 rng(157);
  Corpus gold = random_corpus(rng, 15, true);
  Corpus pred = retag_random(gold, rng, {"A", "D", "N", "V"});
  EvalReport report = evaluate(gold, pred);
  std::string json = render_report(report, ReportFormat::Json);
  CHECK(json.find("\"cmpos.report\"") != std::string::npos);
  CHECK(report_from_json(json) == report);
}

}  // TEST_SUITE
