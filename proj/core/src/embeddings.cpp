#include "cmpos/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "cmpos/error.hpp"
#include "cmpos/io.hpp"
#include "json_util.hpp"
#include <json.hpp>

namespace cmpos {

namespace {

std::string lowercase_ascii(std::string_view word) {
  std::string out(word);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

double log_sigmoid(double x) {
  // log(1/(1+e^-x)), stable on both tails
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::optional<std::int32_t> Vocab::id_of(std::string_view word) const {
  auto it = std::lower_bound(index_.begin(), index_.end(), word,
                             [](const auto& entry, std::string_view w) {
                               return entry.first < w;
                             });
  if (it == index_.end() || it->first != word) return std::nullopt;
  return it->second;
}

std::int64_t Vocab::total_count() const {
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

void Vocab::rebuild_index() {
  index_.clear();
  index_.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i)
    index_.emplace_back(words[i], static_cast<std::int32_t>(i));
  std::sort(index_.begin(), index_.end());
}

Vocab build_vocab(std::span<const Corpus> corpora, std::int64_t min_count,
                  bool lowercase) {
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& corpus : corpora) {
    for (const auto& sentence : corpus.sentences) {
      for (const auto& token : sentence.tokens) {
        ++counts[lowercase ? lowercase_ascii(token.form) : token.form];
      }
    }
  }
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (auto& [word, count] : counts) {
    if (count >= min_count) kept.emplace_back(word, count);
  }
  if (kept.empty())
    throw std::invalid_argument("vocabulary empty after min_count filtering");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocab vocab;
  for (auto& [word, count] : kept) {
    vocab.words.push_back(std::move(word));
    vocab.counts.push_back(count);
  }
  vocab.rebuild_index();
  return vocab;
}

double sgns_pair_loss(std::span<const double> center,
                      std::span<const double> positive,
                      std::span<const std::span<const double>> negatives,
                      std::vector<double>* grad_center,
                      std::vector<double>* grad_positive,
                      std::vector<std::vector<double>>* grad_negatives) {
  const std::size_t dim = center.size();
  if (positive.size() != dim)
    throw std::invalid_argument("dimension mismatch in sgns_pair_loss");

  auto dot = [dim](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) s += a[i] * b[i];
    return s;
  };

  if (grad_center) grad_center->assign(dim, 0.0);
  if (grad_positive) grad_positive->assign(dim, 0.0);
  if (grad_negatives) grad_negatives->assign(negatives.size(), std::vector<double>(dim, 0.0));

  double pos_score = dot(center, positive);
  double loss = -log_sigmoid(pos_score);
  double pos_coef = sigmoid(pos_score) - 1.0;  // d loss / d pos_score
  if (grad_positive)
    for (std::size_t i = 0; i < dim; ++i) (*grad_positive)[i] = pos_coef * center[i];
  if (grad_center)
    for (std::size_t i = 0; i < dim; ++i) (*grad_center)[i] = pos_coef * positive[i];

  for (std::size_t n = 0; n < negatives.size(); ++n) {
    if (negatives[n].size() != dim)
      throw std::invalid_argument("dimension mismatch in sgns_pair_loss");
    double neg_score = dot(center, negatives[n]);
    loss += -log_sigmoid(-neg_score);
    double neg_coef = sigmoid(neg_score);
    if (grad_negatives)
      for (std::size_t i = 0; i < dim; ++i)
        (*grad_negatives)[n][i] = neg_coef * center[i];
    if (grad_center)
      for (std::size_t i = 0; i < dim; ++i)
        (*grad_center)[i] += neg_coef * negatives[n][i];
  }
  return loss;
}

namespace {

constexpr std::size_t kUnigramTableSize = 1 << 20;

std::vector<std::int32_t> build_unigram_table(const Vocab& vocab,
                                              double distortion) {
  std::vector<std::int32_t> table(kUnigramTableSize);
  double norm = 0.0;
  for (auto c : vocab.counts) norm += std::pow(static_cast<double>(c), distortion);
  std::size_t word = 0;
  double cumulative =
      std::pow(static_cast<double>(vocab.counts[0]), distortion) / norm;
  for (std::size_t i = 0; i < kUnigramTableSize; ++i) {
    table[i] = static_cast<std::int32_t>(word);
    if (static_cast<double>(i + 1) / kUnigramTableSize > cumulative &&
        word + 1 < vocab.size()) {
      ++word;
      cumulative +=
          std::pow(static_cast<double>(vocab.counts[word]), distortion) / norm;
    }
  }
  return table;
}

std::vector<std::vector<std::int32_t>> encode_sentences(
    std::span<const Corpus> corpora, const Vocab& vocab, bool lowercase) {
  std::vector<std::vector<std::int32_t>> encoded;
  for (const auto& corpus : corpora) {
    for (const auto& sentence : corpus.sentences) {
      std::vector<std::int32_t> ids;
      ids.reserve(sentence.tokens.size());
      for (const auto& token : sentence.tokens) {
        auto id = vocab.id_of(lowercase ? lowercase_ascii(token.form)
                                        : token.form);
        if (id) ids.push_back(*id);  // out-of-vocab tokens are dropped
      }
      if (!ids.empty()) encoded.push_back(std::move(ids));
    }
  }
  return encoded;
}

struct TrainerShared {
  const EmbeddingConfig* config;
  const Vocab* vocab;
  const std::vector<std::vector<std::int32_t>>* sentences;
  const std::vector<std::int32_t>* unigram_table;
  std::vector<double>* input;
  std::vector<double>* output;
  std::int64_t total_positions = 0;  // in-vocab positions per epoch
  std::int64_t scheduled = 0;        // total over all epochs, for lr decay
};

// One SGD step for a (center, context) pair plus `negatives` sampled
// targets. Fused gradient/update form of sgns_pair_loss.
double sgns_update(TrainerShared& sh, std::int32_t center, std::int32_t context,
                   std::mt19937_64& rng, double lr,
                   std::vector<double>& center_grad_buf) {
  const int dim = sh.config->dim;
  double* v = sh.input->data() + static_cast<std::size_t>(center) * dim;
  center_grad_buf.assign(static_cast<std::size_t>(dim), 0.0);
  double loss = 0.0;

  for (int n = 0; n < sh.config->negatives + 1; ++n) {
    std::int32_t target;
    double label;
    if (n == 0) {
      target = context;
      label = 1.0;
    } else {
      target = (*sh.unigram_table)[rng() % kUnigramTableSize];
      if (target == context) continue;  // classic skip, one fewer update
      label = 0.0;
    }
    double* u = sh.output->data() + static_cast<std::size_t>(target) * dim;
    double score = 0.0;
    for (int i = 0; i < dim; ++i) score += v[i] * u[i];
    loss += label == 1.0 ? -log_sigmoid(score) : -log_sigmoid(-score);
    double coef = sigmoid(score) - label;  // d loss / d score
    for (int i = 0; i < dim; ++i) {
      center_grad_buf[static_cast<std::size_t>(i)] += coef * u[i];
      u[i] -= lr * coef * v[i];
    }
  }
  for (int i = 0; i < dim; ++i)
    v[i] -= lr * center_grad_buf[static_cast<std::size_t>(i)];
  return loss;
}

struct ShardResult {
  double loss_sum = 0.0;
  std::int64_t pair_count = 0;
};

void train_shard(TrainerShared& sh, std::size_t shard, std::size_t n_shards,
                 std::uint64_t shard_seed, std::int64_t* processed,
                 ShardResult* result) {
  std::mt19937_64 rng(shard_seed);
  const auto& cfg = *sh.config;
  const double lr0 = cfg.learning_rate;
  const double lr_floor = lr0 * 1e-4;
  const double total_count = static_cast<double>(sh.vocab->total_count());
  std::vector<double> grad_buf;
  std::vector<std::int32_t> kept;

  for (std::size_t si = shard; si < sh.sentences->size(); si += n_shards) {
    const auto& sentence = (*sh.sentences)[si];

    kept.clear();
    for (std::int32_t id : sentence) {
      if (cfg.subsample > 0.0) {
        double freq = static_cast<double>(sh.vocab->counts[id]) / total_count;
        double keep = (std::sqrt(freq / cfg.subsample) + 1.0) *
                      (cfg.subsample / freq);
        double roll = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (keep < roll) continue;
      }
      kept.push_back(id);
    }
    // lr schedule counts every in-vocab position, kept or not
    std::int64_t seen = *processed += static_cast<std::int64_t>(sentence.size());

    double lr = lr0 * (1.0 - static_cast<double>(seen) /
                                 static_cast<double>(sh.scheduled + 1));
    lr = std::max(lr, lr_floor);

    const auto len = static_cast<std::ptrdiff_t>(kept.size());
    for (std::ptrdiff_t pos = 0; pos < len; ++pos) {
      auto b = static_cast<std::ptrdiff_t>(1 + rng() % cfg.window);
      for (std::ptrdiff_t off = -b; off <= b; ++off) {
        if (off == 0) continue;
        std::ptrdiff_t cpos = pos + off;
        if (cpos < 0 || cpos >= len) continue;
        result->loss_sum += sgns_update(sh, kept[pos], kept[cpos], rng, lr, grad_buf);
        ++result->pair_count;
      }
    }
  }
}

}  // namespace

EmbeddingModel train_skipgram(std::span<const Corpus> corpora,
                              const EmbeddingConfig& config,
                              EmbeddingTrainLog* log) {
  if (config.dim < 1 || config.window < 1 || config.negatives < 1 ||
      config.epochs < 1 || !(config.learning_rate > 0.0))
    throw std::invalid_argument("bad embedding config");

  EmbeddingModel model;
  model.config = config;
  model.dim = config.dim;
  model.vocab = build_vocab(corpora, config.min_count, config.lowercase);

  const std::size_t v = model.vocab.size();
  const auto dim = static_cast<std::size_t>(config.dim);
  model.input_vectors.resize(v * dim);
  model.output_vectors.assign(v * dim, 0.0);
  std::mt19937_64 init_rng(config.seed);
  const double init_range = 0.5 / static_cast<double>(config.dim);
  for (auto& x : model.input_vectors) {
    double u = static_cast<double>(init_rng() >> 11) * 0x1.0p-53;  // [0,1)
    x = (2.0 * u - 1.0) * init_range;
  }

  auto sentences = encode_sentences(corpora, model.vocab, config.lowercase);
  auto table = build_unigram_table(model.vocab, config.distortion);

  TrainerShared sh;
  sh.config = &config;
  sh.vocab = &model.vocab;
  sh.sentences = &sentences;
  sh.unigram_table = &table;
  sh.input = &model.input_vectors;
  sh.output = &model.output_vectors;
  for (const auto& s : sentences)
    sh.total_positions += static_cast<std::int64_t>(s.size());
  sh.scheduled = sh.total_positions * config.epochs;

  const auto n_shards = static_cast<std::size_t>(std::max(1, config.threads));
  std::int64_t processed = 0;
  if (log) log->epoch_mean_loss.clear();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<ShardResult> results(n_shards);
    if (n_shards == 1) {
      std::uint64_t shard_seed = config.seed + 0x9e3779b97f4a7c15ULL *
                                                  (static_cast<std::uint64_t>(epoch) + 1);
      train_shard(sh, 0, 1, shard_seed, &processed, &results[0]);
    } else {
      // Hogwild over sentence shards: updates interleave without locks, so
      // the result is not bit-reproducible across runs.
      std::vector<std::thread> workers;
      std::vector<std::int64_t> shard_processed(n_shards, processed);
      for (std::size_t shard = 0; shard < n_shards; ++shard) {
        std::uint64_t shard_seed =
            config.seed +
            0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(epoch) * n_shards +
                                     shard + 1);
        workers.emplace_back(train_shard, std::ref(sh), shard, n_shards,
                             shard_seed, &shard_processed[shard], &results[shard]);
      }
      for (auto& w : workers) w.join();
      processed += sh.total_positions;
    }

    double loss_sum = 0.0;
    std::int64_t pairs = 0;
    for (const auto& r : results) {
      loss_sum += r.loss_sum;
      pairs += r.pair_count;
    }
    double mean = pairs > 0 ? loss_sum / static_cast<double>(pairs) : 0.0;
    if (!std::isfinite(mean))
      throw std::runtime_error("non-finite training loss (learning rate too high?)");
    if (log) log->epoch_mean_loss.push_back(mean);
  }
  return model;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0)
    throw std::invalid_argument("cosine: zero-norm vector");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::vector<std::pair<std::string, double>> nearest(const EmbeddingModel& model,
                                                    std::string_view word,
                                                    std::size_t k) {
  if (k < 1) throw std::invalid_argument("nearest: k must be >= 1");
  std::string query(word);
  if (model.config.lowercase) query = lowercase_ascii(query);
  auto id = model.vocab.id_of(query);
  if (!id) throw std::invalid_argument("nearest: out-of-vocabulary word '" +
                                       std::string(word) + "'");

  auto query_vec = model.vector_of(*id);
  double qnorm = 0.0;
  for (double x : query_vec) qnorm += x * x;
  if (qnorm == 0.0) throw std::invalid_argument("nearest: zero-norm query vector");

  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(model.vocab.size());
  for (std::size_t other = 0; other < model.vocab.size(); ++other) {
    if (static_cast<std::int32_t>(other) == *id) continue;
    auto vec = model.vector_of(static_cast<std::int32_t>(other));
    double norm = 0.0;
    for (double x : vec) norm += x * x;
    if (norm == 0.0) continue;
    double dot = 0.0;
    for (std::size_t i = 0; i < vec.size(); ++i) dot += query_vec[i] * vec[i];
    scored.emplace_back(model.vocab.words[other],
                        dot / (std::sqrt(qnorm) * std::sqrt(norm)));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

namespace {

nlohmann::json config_to_json(const EmbeddingConfig& c) {
  return {{"dim", c.dim},
          {"window", c.window},
          {"negatives", c.negatives},
          {"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"min_count", c.min_count},
          {"seed", c.seed},
          {"distortion", c.distortion},
          {"subsample", c.subsample},
          {"lowercase", c.lowercase},
          {"threads", c.threads}};
}

EmbeddingConfig config_from_json(const nlohmann::json& j) {
  EmbeddingConfig c;
  c.dim = j.at("dim").get<int>();
  c.window = j.at("window").get<int>();
  c.negatives = j.at("negatives").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.min_count = j.at("min_count").get<std::int64_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.distortion = j.at("distortion").get<double>();
  c.subsample = j.at("subsample").get<double>();
  c.lowercase = j.at("lowercase").get<bool>();
  c.threads = j.at("threads").get<int>();
  return c;
}

}  // namespace

void save_embeddings_json(const EmbeddingModel& model, const std::string& path) {
  nlohmann::json j;
  j["format"] = "cmpos.embeddings";
  j["version"] = 1;
  j["config"] = config_to_json(model.config);
  j["dim"] = model.dim;
  j["words"] = model.vocab.words;
  j["counts"] = model.vocab.counts;
  j["input_vectors"] = model.input_vectors;
  j["output_vectors"] = model.output_vectors;
  write_file(path, j.dump() + "\n");
}

EmbeddingModel load_embeddings_json(const std::string& path) {
  auto j = detail::parse_json_file(path);
  detail::check_format(j, "cmpos.embeddings");
  EmbeddingModel model;
  model.config = config_from_json(j.at("config"));
  model.dim = j.at("dim").get<int>();
  model.vocab.words = j.at("words").get<std::vector<std::string>>();
  model.vocab.counts = j.at("counts").get<std::vector<std::int64_t>>();
  model.input_vectors = j.at("input_vectors").get<std::vector<double>>();
  model.output_vectors = j.at("output_vectors").get<std::vector<double>>();
  if (model.vocab.words.size() != model.vocab.counts.size())
    throw FormatError(path + ": words/counts size mismatch");
  auto expected = model.vocab.size() * static_cast<std::size_t>(model.dim);
  if (model.input_vectors.size() != expected ||
      model.output_vectors.size() != expected)
    throw FormatError(path + ": vector matrix shape mismatch");
  for (double x : model.input_vectors)
    if (!std::isfinite(x)) throw FormatError(path + ": non-finite vector entry");
  for (double x : model.output_vectors)
    if (!std::isfinite(x)) throw FormatError(path + ": non-finite vector entry");
  model.vocab.rebuild_index();
  return model;
}

std::string embeddings_to_text(const EmbeddingModel& model) {
  std::string out = std::to_string(model.vocab.size()) + " " +
                    std::to_string(model.dim) + "\n";
  char buf[64];
  for (std::size_t w = 0; w < model.vocab.size(); ++w) {
    out += model.vocab.words[w];
    for (double x : model.vector_of(static_cast<std::int32_t>(w))) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
      out += ' ';
      out.append(buf, end);
    }
    out += '\n';
  }
  return out;
}

}  // namespace cmpos
