#include "cmpos/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "cmpos/error.hpp"
#include "json_util.hpp"
#include "lbfgs.hpp"
#include "utf8.hpp"

namespace cmpos {

namespace {

void skip_space(std::string_view s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

// parses "name ( arg [, arg] )"
struct ArchItem {
  std::string name;
  std::vector<int> args;
};

ArchItem parse_arch_item(std::string_view s, std::size_t& i) {
  skip_space(s, i);
  ArchItem item;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
    item.name += s[i++];
  if (item.name.empty())
    throw std::invalid_argument("architecture: expected template name");
  skip_space(s, i);
  if (i >= s.size() || s[i] != '(')
    throw std::invalid_argument("architecture: expected '(' after " + item.name);
  ++i;
  while (true) {
    skip_space(s, i);
    std::size_t start = i;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start)
      throw std::invalid_argument("architecture: expected integer argument in " +
                                  item.name);
    item.args.push_back(std::stoi(std::string(s.substr(start, i - start))));
    skip_space(s, i);
    if (i < s.size() && s[i] == ',') {
      ++i;
      continue;
    }
    break;
  }
  if (i >= s.size() || s[i] != ')')
    throw std::invalid_argument("architecture: expected ')' in " + item.name);
  ++i;
  return item;
}

}  // namespace

FeatureTemplateSet parse_architecture(std::string_view arch) {
  FeatureTemplateSet templates;
  bool seen[5] = {false, false, false, false, false};
  std::size_t i = 0;
  skip_space(arch, i);
  if (i >= arch.size()) return templates;  // empty string: everything disabled
  while (true) {
    ArchItem item = parse_arch_item(arch, i);
    auto expect_args = [&](std::size_t n) {
      if (item.args.size() != n)
        throw std::invalid_argument("architecture: " + item.name + " takes " +
                                    std::to_string(n) + " argument(s)");
    };
    int which;
    if (item.name == "words") {
      which = 0;
      expect_args(2);
      if (item.args[0] > 0 || item.args[1] < 0 || item.args[0] > item.args[1])
        throw std::invalid_argument("architecture: words(lo,hi) needs lo <= 0 <= hi");
      templates.words = {item.args[0], item.args[1]};
    } else if (item.name == "order") {
      which = 1;
      expect_args(1);
      if (item.args[0] != 0 && item.args[0] != 1)
        throw std::invalid_argument("architecture: order must be 0 or 1");
      templates.order = item.args[0];
    } else if (item.name == "prefix") {
      which = 2;
      expect_args(1);
      if (item.args[0] < 0)
        throw std::invalid_argument("architecture: prefix length must be >= 0");
      templates.prefix_max = item.args[0];
    } else if (item.name == "suffix") {
      which = 3;
      expect_args(1);
      if (item.args[0] < 0)
        throw std::invalid_argument("architecture: suffix length must be >= 0");
      templates.suffix_max = item.args[0];
    } else if (item.name == "unicodeshapes") {
      which = 4;
      expect_args(1);
      if (item.args[0] < 0)
        throw std::invalid_argument("architecture: unicodeshapes radius must be >= 0");
      templates.shape_radius = item.args[0];
    } else {
      throw std::invalid_argument("architecture: unknown template '" + item.name + "'");
    }
    if (seen[which])
      throw std::invalid_argument("architecture: duplicate template '" + item.name + "'");
    seen[which] = true;

    skip_space(arch, i);
    if (i < arch.size() && arch[i] == ',') {
      ++i;
      continue;
    }
    if (i < arch.size())
      throw std::invalid_argument("architecture: trailing garbage");
    break;
  }
  return templates;
}

std::string architecture_to_string(const FeatureTemplateSet& templates) {
  std::string out;
  auto append = [&](const std::string& part) {
    if (!out.empty()) out += ',';
    out += part;
  };
  if (templates.words)
    append("words(" + std::to_string(templates.words->first) + "," +
           std::to_string(templates.words->second) + ")");
  if (templates.order != 0) append("order(" + std::to_string(templates.order) + ")");
  if (templates.prefix_max > 0)
    append("prefix(" + std::to_string(templates.prefix_max) + ")");
  if (templates.suffix_max > 0)
    append("suffix(" + std::to_string(templates.suffix_max) + ")");
  if (templates.shape_radius)
    append("unicodeshapes(" + std::to_string(*templates.shape_radius) + ")");
  return out;
}

namespace {

// Character classes for word shapes. Covers ASCII plus the ranges seen in
// Romanized/native code-mixed data (Latin extensions, Greek, Cyrillic,
// Devanagari, Bengali, Telugu); unknown letters land in 'x', everything
// unrecognized in '-'.
char shape_class(std::uint32_t cp) {
  if (cp < 0x80) {
    if (cp >= 'A' && cp <= 'Z') return 'X';
    if (cp >= 'a' && cp <= 'z') return 'x';
    if (cp >= '0' && cp <= '9') return '9';
    return '-';
  }
  struct Range {
    std::uint32_t lo, hi;
    char cls;
  };
  static constexpr Range ranges[] = {
      {0x00c0, 0x00d6, 'X'}, {0x00d8, 0x00de, 'X'},  // Latin-1 capitals
      {0x00df, 0x00f6, 'x'}, {0x00f8, 0x00ff, 'x'},  // Latin-1 small
      {0x0100, 0x024f, 'x'},                         // Latin extended
      {0x0391, 0x03a9, 'X'}, {0x03b1, 0x03c9, 'x'},  // Greek
      {0x0400, 0x042f, 'X'}, {0x0430, 0x045f, 'x'},  // Cyrillic
      {0x0660, 0x0669, '9'},                         // Arabic-Indic digits
      {0x0900, 0x0963, 'x'},                         // Devanagari letters/marks
      {0x0966, 0x096f, '9'},                         // Devanagari digits
      {0x0971, 0x097f, 'x'},
      {0x0980, 0x09e3, 'x'},                         // Bengali letters/marks
      {0x09e6, 0x09ef, '9'},                         // Bengali digits
      {0x09f0, 0x09f1, 'x'},
      {0x0c00, 0x0c63, 'x'},                         // Telugu letters/marks
      {0x0c66, 0x0c6f, '9'},                         // Telugu digits
  };
  for (const auto& r : ranges)
    if (cp >= r.lo && cp <= r.hi) return r.cls;
  return '-';
}

}  // namespace

std::string word_shape(std::string_view word) {
  std::string shape;
  char run_class = 0;
  int run_len = 0;
  std::size_t pos = 0;
  while (pos < word.size()) {
    char cls = shape_class(detail::utf8_next(word, pos));
    if (cls == run_class) {
      if (++run_len <= 2) shape += cls;
    } else {
      run_class = cls;
      run_len = 1;
      shape += cls;
    }
  }
  return shape;
}

std::vector<std::string> extract_history_features(
    const Sentence& sentence, std::size_t position, std::string_view prev_tag,
    const FeatureTemplateSet& templates) {
  const auto length = static_cast<std::ptrdiff_t>(sentence.tokens.size());
  const auto pos = static_cast<std::ptrdiff_t>(position);
  std::vector<std::string> features;

  auto form_at = [&](std::ptrdiff_t i) -> std::string_view {
    if (i < 0) return kBos;
    if (i >= length) return kEos;
    return sentence.tokens[static_cast<std::size_t>(i)].form;
  };
  auto offset_key = [](std::string_view family, int off) {
    std::string key(family);
    key += '[';
    if (off > 0) key += '+';
    key += std::to_string(off);
    key += "]=";
    return key;
  };

  if (templates.words) {
    for (int off = templates.words->first; off <= templates.words->second; ++off)
      features.push_back(offset_key("w", off).append(form_at(pos + off)));
  }

  const std::string& word = sentence.tokens[position].form;
  if (templates.prefix_max > 0 || templates.suffix_max > 0) {
    auto bounds = detail::utf8_boundaries(word);
    auto n_chars = bounds.size() - 1;
    for (std::size_t len = 1;
         len <= std::min<std::size_t>(templates.prefix_max, n_chars); ++len)
      features.push_back("pre" + std::to_string(len) + "=" +
                         word.substr(0, bounds[len]));
    for (std::size_t len = 1;
         len <= std::min<std::size_t>(templates.suffix_max, n_chars); ++len)
      features.push_back("suf" + std::to_string(len) + "=" +
                         word.substr(bounds[n_chars - len]));
  }

  if (templates.shape_radius) {
    for (int off = -*templates.shape_radius; off <= *templates.shape_radius; ++off) {
      std::ptrdiff_t i = pos + off;
      std::string value = (i < 0 || i >= length)
                              ? std::string(form_at(i))
                              : word_shape(form_at(i));
      features.push_back(offset_key("shape", off).append(value));
    }
  }

  if (templates.order == 1)
    features.push_back("prevtag=" + std::string(prev_tag));

  features.emplace_back("bias");
  return features;
}

std::optional<std::int32_t> MaxentModel::feature_id(std::string_view name) const {
  auto it = feature_index_.find(std::string(name));
  if (it == feature_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int32_t> MaxentModel::tag_id(std::string_view tag) const {
  auto it = std::lower_bound(tags.begin(), tags.end(), tag);
  if (it == tags.end() || *it != tag) return std::nullopt;
  return static_cast<std::int32_t>(it - tags.begin());
}

void MaxentModel::rebuild_index() {
  feature_index_.clear();
  feature_index_.reserve(feature_names.size());
  for (std::size_t i = 0; i < feature_names.size(); ++i)
    feature_index_[feature_names[i]] = static_cast<std::int32_t>(i);
}

bool MaxentModel::operator==(const MaxentModel& other) const {
  return templates == other.templates && tags == other.tags &&
         feature_names == other.feature_names && weights == other.weights &&
         options == other.options && converged == other.converged;
}

namespace {

// Per-token training context: active feature ids plus the gold tag.
struct TokenContext {
  std::vector<std::int32_t> features;
  std::int32_t gold;
};

std::vector<TokenContext> build_contexts(const MaxentModel& model,
                                         const Corpus& data) {
  std::vector<TokenContext> contexts;
  for (const auto& sentence : data.sentences) {
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
      std::string_view prev =
          i == 0 ? kBos : std::string_view(*sentence.tokens[i - 1].tag);
      TokenContext ctx;
      auto gold = model.tag_id(*sentence.tokens[i].tag);
      if (!gold)
        throw std::invalid_argument("gold tag '" + *sentence.tokens[i].tag +
                                    "' is not in the model tag set");
      ctx.gold = *gold;
      for (const auto& name :
           extract_history_features(sentence, i, prev, model.templates)) {
        if (auto id = model.feature_id(name)) ctx.features.push_back(*id);
      }
      contexts.push_back(std::move(ctx));
    }
  }
  return contexts;
}

// log-loss + gradient for one chunk of tokens; gradient accumulated into
// `grad` (data-term only)
double chunk_objective(const std::vector<double>& weights, std::size_t n_tags,
                       const std::vector<TokenContext>& contexts,
                       std::size_t begin, std::size_t end,
                       std::vector<double>* grad) {
  std::vector<double> scores(n_tags);
  double loss = 0.0;
  for (std::size_t c = begin; c < end; ++c) {
    const auto& ctx = contexts[c];
    std::fill(scores.begin(), scores.end(), 0.0);
    for (auto f : ctx.features) {
      const double* row = weights.data() + static_cast<std::size_t>(f) * n_tags;
      for (std::size_t t = 0; t < n_tags; ++t) scores[t] += row[t];
    }
    double max_score = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (auto& s : scores) {
      s = std::exp(s - max_score);
      z += s;
    }
    loss += -std::log(scores[static_cast<std::size_t>(ctx.gold)] / z);
    if (grad) {
      for (auto f : ctx.features) {
        double* row = grad->data() + static_cast<std::size_t>(f) * n_tags;
        for (std::size_t t = 0; t < n_tags; ++t) row[t] += scores[t] / z;
        row[ctx.gold] -= 1.0;
      }
    }
  }
  return loss;
}

// Full objective with L2 term. Parallel over fixed chunks; partial results
// merge in chunk order, so the sum is deterministic for a given thread count.
double cached_objective(const std::vector<double>& weights, std::size_t n_tags,
                        const std::vector<TokenContext>& contexts,
                        double l2_lambda, int threads,
                        std::vector<double>* grad) {
  if (grad) grad->assign(weights.size(), 0.0);
  double loss = 0.0;

  auto n_chunks = static_cast<std::size_t>(std::max(1, threads));
  n_chunks = std::min(n_chunks, std::max<std::size_t>(contexts.size(), 1));
  if (n_chunks <= 1) {
    loss = chunk_objective(weights, n_tags, contexts, 0, contexts.size(), grad);
  } else {
    std::vector<double> losses(n_chunks, 0.0);
    std::vector<std::vector<double>> grads(
        grad ? n_chunks : 0, std::vector<double>(weights.size(), 0.0));
    std::vector<std::thread> workers;
    std::size_t chunk_size = (contexts.size() + n_chunks - 1) / n_chunks;
    for (std::size_t k = 0; k < n_chunks; ++k) {
      std::size_t begin = k * chunk_size;
      std::size_t end = std::min(contexts.size(), begin + chunk_size);
      workers.emplace_back([&, k, begin, end] {
        losses[k] = chunk_objective(weights, n_tags, contexts, begin, end,
                                    grad ? &grads[k] : nullptr);
      });
    }
    for (auto& w : workers) w.join();
    for (std::size_t k = 0; k < n_chunks; ++k) {
      loss += losses[k];
      if (grad)
        for (std::size_t i = 0; i < weights.size(); ++i) (*grad)[i] += grads[k][i];
    }
  }

  if (l2_lambda > 0.0) {
    double sq = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      sq += weights[i] * weights[i];
      if (grad) (*grad)[i] += l2_lambda * weights[i];
    }
    loss += 0.5 * l2_lambda * sq;
  }
  return loss;
}

}  // namespace

double objective(const MaxentModel& model, const Corpus& data,
                 std::vector<double>* gradient) {
  if (!data.tagged) throw std::invalid_argument("objective needs a tagged corpus");
  auto contexts = build_contexts(model, data);
  return cached_objective(model.weights, model.tags.size(), contexts,
                          model.options.l2_lambda, model.options.threads, gradient);
}

MaxentModel train_maxent(const Corpus& data, const FeatureTemplateSet& templates,
                         const TrainOptions& options, MaxentTrainLog* log) {
  if (!data.tagged || data.sentences.empty())
    throw std::invalid_argument("training needs a non-empty tagged corpus");
  if (options.beam_width < 1 || options.tolerance <= 0.0 || options.l2_lambda < 0.0)
    throw std::invalid_argument("bad train options");

  MaxentModel model;
  model.templates = templates;
  model.options = options;

  std::vector<std::string> tags;
  for (const auto& sentence : data.sentences)
    for (const auto& token : sentence.tokens) tags.push_back(*token.tag);
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  model.tags = std::move(tags);

  // index features by first occurrence, then apply the count cutoff
  std::unordered_map<std::string, std::int64_t> counts;
  std::vector<std::string> ordered;
  for (const auto& sentence : data.sentences) {
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
      std::string_view prev =
          i == 0 ? kBos : std::string_view(*sentence.tokens[i - 1].tag);
      for (auto& name : extract_history_features(sentence, i, prev, templates)) {
        auto [it, inserted] = counts.emplace(std::move(name), 1);
        if (inserted)
          ordered.push_back(it->first);
        else
          ++it->second;
      }
    }
  }
  for (auto& name : ordered) {
    if (counts[name] >= options.feature_count_cutoff)
      model.feature_names.push_back(std::move(name));
  }
  if (model.feature_names.empty())
    throw std::runtime_error("no features survive the count cutoff");
  model.rebuild_index();

  auto contexts = build_contexts(model, data);
  const std::size_t n_tags = model.tags.size();
  model.weights.assign(model.feature_names.size() * n_tags, 0.0);

  detail::LbfgsOptions lopts;
  lopts.max_iterations = options.max_iterations;
  lopts.tolerance = options.tolerance;
  auto fg = [&](const std::vector<double>& x, std::vector<double>& grad) {
    double f = cached_objective(x, n_tags, contexts, options.l2_lambda,
                                options.threads, &grad);
    if (!std::isfinite(f)) throw std::runtime_error("non-finite training loss");
    return f;
  };
  auto result = detail::lbfgs_minimize(fg, model.weights, lopts,
                                       log ? &log->loss_history : nullptr);
  model.converged = result.converged;
  if (log) {
    log->final_gradient_norm = result.final_gradient_norm;
    log->iterations = result.iterations;
  }
  return model;
}

std::vector<double> tag_probabilities(const MaxentModel& model,
                                      const Sentence& sentence,
                                      std::size_t position,
                                      std::string_view prev_tag) {
  const std::size_t n_tags = model.tags.size();
  std::vector<double> scores(n_tags, 0.0);
  for (const auto& name :
       extract_history_features(sentence, position, prev_tag, model.templates)) {
    if (auto f = model.feature_id(name)) {
      const double* row =
          model.weights.data() + static_cast<std::size_t>(*f) * n_tags;
      for (std::size_t t = 0; t < n_tags; ++t) scores[t] += row[t];
    }
  }
  double max_score = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (auto& s : scores) {
    s = std::exp(s - max_score);
    z += s;
  }
  for (auto& s : scores) s /= z;
  return scores;
}

namespace {

struct Hypothesis {
  double score = 0.0;
  std::vector<std::int32_t> seq;
};

// higher score first; equal scores prefer the lexicographically smaller
// sequence (tag ids follow lexicographic tag order)
bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.seq < b.seq;
}

}  // namespace

std::vector<std::string> decode(const MaxentModel& model, const Sentence& sentence,
                                int beam_width) {
  if (beam_width < 1) throw std::invalid_argument("beam width must be >= 1");
  if (model.tags.empty()) throw std::invalid_argument("model has no tags");
  const std::size_t n_tags = model.tags.size();

  std::vector<Hypothesis> beam{{0.0, {}}};
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    // recombination: the model only sees one previous tag, so hypotheses
    // ending in the same tag collapse to the best of them
    std::vector<Hypothesis> best_by_tag(n_tags);
    std::vector<bool> filled(n_tags, false);
    for (const auto& hyp : beam) {
      std::string_view prev =
          hyp.seq.empty() ? kBos
                          : std::string_view(model.tags[static_cast<std::size_t>(
                                hyp.seq.back())]);
      auto probs = tag_probabilities(model, sentence, i, prev);
      for (std::size_t t = 0; t < n_tags; ++t) {
        Hypothesis extended;
        extended.score = hyp.score + std::log(probs[t]);
        extended.seq = hyp.seq;
        extended.seq.push_back(static_cast<std::int32_t>(t));
        if (!filled[t] || better(extended, best_by_tag[t])) {
          best_by_tag[t] = std::move(extended);
          filled[t] = true;
        }
      }
    }
    std::vector<Hypothesis> pruned;
    for (std::size_t t = 0; t < n_tags; ++t)
      if (filled[t]) pruned.push_back(std::move(best_by_tag[t]));
    std::sort(pruned.begin(), pruned.end(), better);
    if (pruned.size() > static_cast<std::size_t>(beam_width))
      pruned.resize(static_cast<std::size_t>(beam_width));
    beam = std::move(pruned);
  }

  std::vector<std::string> result;
  result.reserve(beam.front().seq.size());
  for (auto t : beam.front().seq)
    result.push_back(model.tags[static_cast<std::size_t>(t)]);
  return result;
}

Corpus tag_corpus(const MaxentModel& model, const Corpus& corpus, int beam_width) {
  if (beam_width == 0) beam_width = model.options.beam_width;
  Corpus tagged;
  tagged.tagged = true;
  tagged.sentences.reserve(corpus.sentences.size());
  for (const auto& sentence : corpus.sentences) {
    auto tags = decode(model, sentence, beam_width);
    Sentence out = sentence;
    for (std::size_t i = 0; i < out.tokens.size(); ++i)
      out.tokens[i].tag = std::move(tags[i]);
    tagged.sentences.push_back(std::move(out));
  }
  return tagged;
}

namespace {

nlohmann::json templates_to_json(const FeatureTemplateSet& t) {
  nlohmann::json j;
  j["words"] = t.words ? nlohmann::json{t.words->first, t.words->second}
                       : nlohmann::json(nullptr);
  j["order"] = t.order;
  j["prefix"] = t.prefix_max;
  j["suffix"] = t.suffix_max;
  j["unicodeshapes"] =
      t.shape_radius ? nlohmann::json(*t.shape_radius) : nlohmann::json(nullptr);
  return j;
}

FeatureTemplateSet templates_from_json(const nlohmann::json& j) {
  FeatureTemplateSet t;
  if (!j.at("words").is_null())
    t.words = {j["words"][0].get<int>(), j["words"][1].get<int>()};
  t.order = j.at("order").get<int>();
  t.prefix_max = j.at("prefix").get<int>();
  t.suffix_max = j.at("suffix").get<int>();
  if (!j.at("unicodeshapes").is_null()) t.shape_radius = j["unicodeshapes"].get<int>();
  return t;
}

nlohmann::json options_to_json(const TrainOptions& o) {
  return {{"l2_lambda", o.l2_lambda},
          {"tolerance", o.tolerance},
          {"max_iterations", o.max_iterations},
          {"beam_width", o.beam_width},
          {"feature_count_cutoff", o.feature_count_cutoff},
          {"threads", o.threads}};
}

TrainOptions options_from_json(const nlohmann::json& j) {
  TrainOptions o;
  o.l2_lambda = j.at("l2_lambda").get<double>();
  o.tolerance = j.at("tolerance").get<double>();
  o.max_iterations = j.at("max_iterations").get<int>();
  o.beam_width = j.at("beam_width").get<int>();
  o.feature_count_cutoff = j.at("feature_count_cutoff").get<int>();
  o.threads = j.at("threads").get<int>();
  return o;
}

}  // namespace

void save_maxent(const MaxentModel& model, const std::string& path) {
  nlohmann::json j;
  j["format"] = "cmpos.maxent";
  j["version"] = 1;
  j["templates"] = templates_to_json(model.templates);
  j["tags"] = model.tags;
  j["features"] = model.feature_names;
  j["weights"] = model.weights;
  j["options"] = options_to_json(model.options);
  j["converged"] = model.converged;
  write_file(path, j.dump() + "\n");
}

MaxentModel load_maxent(const std::string& path) {
  auto j = detail::parse_json_file(path);
  detail::check_format(j, "cmpos.maxent");
  MaxentModel model;
  model.templates = templates_from_json(j.at("templates"));
  model.tags = j.at("tags").get<std::vector<std::string>>();
  model.feature_names = j.at("features").get<std::vector<std::string>>();
  model.weights = j.at("weights").get<std::vector<double>>();
  model.options = options_from_json(j.at("options"));
  model.converged = j.at("converged").get<bool>();
  if (model.weights.size() != model.feature_names.size() * model.tags.size())
    throw FormatError(path + ": weight vector shape mismatch");
  for (double w : model.weights)
    if (!std::isfinite(w)) throw FormatError(path + ": non-finite weight");
  if (!std::is_sorted(model.tags.begin(), model.tags.end()))
    throw FormatError(path + ": tag list must be sorted");
  model.rebuild_index();
  return model;
}

}  // namespace cmpos
