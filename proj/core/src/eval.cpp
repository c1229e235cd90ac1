#include "cmpos/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "cmpos/error.hpp"
#include "json_util.hpp"

namespace cmpos {

namespace {

[[noreturn]] void alignment_error(std::size_t sentence, std::size_t token,
                                  const std::string& what) {
  throw std::invalid_argument("gold/pred mismatch at sentence " +
                              std::to_string(sentence + 1) + ", token " +
                              std::to_string(token + 1) + ": " + what);
}

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

}  // namespace

EvalReport evaluate(const Corpus& gold, const Corpus& pred,
                    const std::set<std::string>& exclude_langs) {
  if (!gold.tagged || !pred.tagged)
    throw std::invalid_argument("evaluation needs tagged gold and pred corpora");
  if (gold.sentences.size() != pred.sentences.size())
    throw std::invalid_argument(
        "gold has " + std::to_string(gold.sentences.size()) + " sentences, pred has " +
        std::to_string(pred.sentences.size()));

  EvalReport report;
  std::map<std::string, std::int64_t> lang_correct;

  for (std::size_t s = 0; s < gold.sentences.size(); ++s) {
    const auto& g = gold.sentences[s].tokens;
    const auto& p = pred.sentences[s].tokens;
    if (g.size() != p.size())
      alignment_error(s, std::min(g.size(), p.size()),
                      "sentence lengths " + std::to_string(g.size()) + " vs " +
                          std::to_string(p.size()));
    for (std::size_t t = 0; t < g.size(); ++t) {
      if (g[t].form != p[t].form)
        alignment_error(s, t, "form '" + g[t].form + "' vs '" + p[t].form + "'");
      if (g[t].lang != p[t].lang)
        alignment_error(s, t, "lang '" + g[t].lang + "' vs '" + p[t].lang + "'");
      if (exclude_langs.count(g[t].lang)) continue;

      const std::string& gold_tag = *g[t].tag;
      const std::string& pred_tag = *p[t].tag;
      ++report.total;
      ++report.confusion[gold_tag][pred_tag];
      ++report.per_tag[gold_tag].support;
      ++report.per_tag[pred_tag].predicted;
      ++report.per_lang_total[g[t].lang];
      if (gold_tag == pred_tag) {
        ++report.correct;
        ++lang_correct[g[t].lang];
      }
    }
  }

  if (report.total > 0)
    report.token_accuracy =
        static_cast<double>(report.correct) / static_cast<double>(report.total);

  double weighted_sum = 0.0;
  double macro_sum = 0.0;
  std::int64_t tags_with_support = 0;
  for (auto& [tag, score] : report.per_tag) {
    std::int64_t true_positive = 0;
    auto row = report.confusion.find(tag);
    if (row != report.confusion.end()) {
      auto cell = row->second.find(tag);
      if (cell != row->second.end()) true_positive = cell->second;
    }
    score.precision = score.predicted > 0 ? static_cast<double>(true_positive) /
                                                static_cast<double>(score.predicted)
                                          : 0.0;
    score.recall = score.support > 0 ? static_cast<double>(true_positive) /
                                           static_cast<double>(score.support)
                                     : 0.0;
    score.f1 = score.precision + score.recall > 0.0
                   ? 2.0 * score.precision * score.recall /
                         (score.precision + score.recall)
                   : 0.0;
    weighted_sum += static_cast<double>(score.support) * score.f1;
    if (score.support > 0) {
      macro_sum += score.f1;
      ++tags_with_support;
    }
  }
  if (report.total > 0)
    report.weighted_f1 = weighted_sum / static_cast<double>(report.total);
  if (tags_with_support > 0)
    report.macro_f1 = macro_sum / static_cast<double>(tags_with_support);
  report.micro_f1 = report.token_accuracy;

  for (const auto& [lang, count] : report.per_lang_total)
    report.per_lang_accuracy[lang] =
        static_cast<double>(lang_correct[lang]) / static_cast<double>(count);
  return report;
}

namespace {

std::string render_text(const EvalReport& report) {
  std::ostringstream out;
  out << "tokens: " << report.total << "\n";
  out << "accuracy: " << pct(report.token_accuracy) << "%\n";

  std::size_t name_width = 4;
  for (const auto& [tag, score] : report.per_tag)
    name_width = std::max(name_width, tag.size());
  for (const auto& [lang, total] : report.per_lang_total)
    name_width = std::max(name_width, lang.size());
  auto pad = [&](const std::string& s) {
    return s + std::string(name_width - s.size() + 2, ' ');
  };
  auto col = [](const std::string& s, std::size_t width = 9) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
  };

  if (!report.per_lang_total.empty()) {
    out << "\nper-language accuracy:\n";
    out << "  " << pad("lang") << col("accuracy") << col("tokens") << "\n";
    for (const auto& [lang, total] : report.per_lang_total)
      out << "  " << pad(lang) << col(pct(report.per_lang_accuracy.at(lang)) + "%")
          << col(std::to_string(total)) << "\n";
  }

  if (!report.per_tag.empty()) {
    out << "\nper-tag scores:\n";
    out << "  " << pad("tag") << col("precision") << col("recall") << col("f1")
        << col("support") << "\n";
    for (const auto& [tag, score] : report.per_tag)
      out << "  " << pad(tag) << col(pct(score.precision), 9)
          << col(pct(score.recall)) << col(pct(score.f1))
          << col(std::to_string(score.support)) << "\n";
  }

  out << "\nweighted F1: " << pct(report.weighted_f1) << "\n";
  out << "macro F1: " << pct(report.macro_f1) << "\n";
  out << "micro F1: " << pct(report.micro_f1) << "\n";

  if (!report.confusion.empty()) {
    out << "\nconfusion (rows gold, columns predicted):\n";
    std::size_t cell = 6;
    for (const auto& [tag, score] : report.per_tag)
      cell = std::max(cell, tag.size() + 2);
    out << "  " << pad("");
    for (const auto& [tag, score] : report.per_tag) out << col(tag, cell);
    out << "\n";
    for (const auto& [gold_tag, score] : report.per_tag) {
      out << "  " << pad(gold_tag);
      auto row = report.confusion.find(gold_tag);
      for (const auto& [pred_tag, unused] : report.per_tag) {
        std::int64_t count = 0;
        if (row != report.confusion.end()) {
          auto it = row->second.find(pred_tag);
          if (it != row->second.end()) count = it->second;
        }
        out << col(std::to_string(count), cell);
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
  if (format == ReportFormat::Text) return render_text(report);

  nlohmann::json j;
  j["format"] = "cmpos.report";
  j["version"] = 1;
  j["total"] = report.total;
  j["correct"] = report.correct;
  j["token_accuracy"] = report.token_accuracy;
  j["weighted_f1"] = report.weighted_f1;
  j["macro_f1"] = report.macro_f1;
  j["micro_f1"] = report.micro_f1;
  j["per_tag"] = nlohmann::json::object();
  for (const auto& [tag, score] : report.per_tag)
    j["per_tag"][tag] = {{"precision", score.precision},
                         {"recall", score.recall},
                         {"f1", score.f1},
                         {"support", score.support},
                         {"predicted", score.predicted}};
  j["per_lang_accuracy"] = report.per_lang_accuracy;
  j["per_lang_total"] = report.per_lang_total;
  j["confusion"] = report.confusion;
  return j.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw FormatError("invalid JSON report");
  detail::check_format(j, "cmpos.report");

  EvalReport report;
  report.total = j.at("total").get<std::int64_t>();
  report.correct = j.at("correct").get<std::int64_t>();
  report.token_accuracy = j.at("token_accuracy").get<double>();
  report.weighted_f1 = j.at("weighted_f1").get<double>();
  report.macro_f1 = j.at("macro_f1").get<double>();
  report.micro_f1 = j.at("micro_f1").get<double>();
  for (const auto& [tag, s] : j.at("per_tag").items()) {
    TagScore score;
    score.precision = s.at("precision").get<double>();
    score.recall = s.at("recall").get<double>();
    score.f1 = s.at("f1").get<double>();
    score.support = s.at("support").get<std::int64_t>();
    score.predicted = s.at("predicted").get<std::int64_t>();
    report.per_tag[tag] = score;
  }
  report.per_lang_accuracy =
      j.at("per_lang_accuracy").get<std::map<std::string, double>>();
  report.per_lang_total =
      j.at("per_lang_total").get<std::map<std::string, std::int64_t>>();
  report.confusion =
      j.at("confusion")
          .get<std::map<std::string, std::map<std::string, std::int64_t>>>();
  return report;
}

}  // namespace cmpos
