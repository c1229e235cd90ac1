#ifndef CMPOS_EVAL_HPP
#define CMPOS_EVAL_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "cmpos/corpus.hpp"

namespace cmpos {

struct TagScore {
  double precision = 0.0;  // 0 when the tag is never predicted
  double recall = 0.0;     // 0 when the tag has no gold support
  double f1 = 0.0;         // 0 when precision + recall = 0
  std::int64_t support = 0;    // gold occurrences
  std::int64_t predicted = 0;  // predicted occurrences

  bool operator==(const TagScore&) const = default;
};

struct EvalReport {
  std::int64_t total = 0;
  std::int64_t correct = 0;
  double token_accuracy = 0.0;
  std::map<std::string, TagScore> per_tag;  // keys: gold or predicted tags
  double weighted_f1 = 0.0;  // support-weighted mean of per-tag f1
  double macro_f1 = 0.0;     // unweighted mean over tags with support > 0
  double micro_f1 = 0.0;     // equals token accuracy for one-tag-per-token scoring
  std::map<std::string, double> per_lang_accuracy;
  std::map<std::string, std::int64_t> per_lang_total;
  std::map<std::string, std::map<std::string, std::int64_t>> confusion;  // gold -> pred

  bool operator==(const EvalReport&) const = default;
};

// Scores pred against gold token by token. Both corpora must be tagged and
// aligned (same sentence count, lengths, forms, and lang labels); a mismatch
// raises std::invalid_argument naming the first differing position. Tokens
// whose lang is in exclude_langs are left out of every count.
EvalReport evaluate(const Corpus& gold, const Corpus& pred,
                    const std::set<std::string>& exclude_langs = {});

enum class ReportFormat { Json, Text };

// Text is a fixed-width table with percentages at 2 decimals; json is
// versioned with sorted keys and round-trips through report_from_json.
std::string render_report(const EvalReport& report, ReportFormat format);
EvalReport report_from_json(std::string_view text);

}  // namespace cmpos

#endif  // CMPOS_EVAL_HPP
