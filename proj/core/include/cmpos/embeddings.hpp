#ifndef CMPOS_EMBEDDINGS_HPP
#define CMPOS_EMBEDDINGS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmpos/corpus.hpp"

namespace cmpos {

// Word ids are 0..|V|-1, assigned by descending frequency, ties broken
// lexicographically.
struct Vocab {
  std::vector<std::string> words;    // by id
  std::vector<std::int64_t> counts;  // by id

  std::optional<std::int32_t> id_of(std::string_view word) const;
  std::size_t size() const { return words.size(); }
  std::int64_t total_count() const;

  // word -> id lookup table; deterministic from `words`, called by builders
  // and loaders
  void rebuild_index();

  bool operator==(const Vocab&) const = default;

 private:
  std::vector<std::pair<std::string, std::int32_t>> index_;  // sorted by word
};

struct EmbeddingConfig {
  int dim = 100;
  int window = 5;  // per-position window drawn uniformly from 1..window
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.025;  // linear decay, floor learning_rate * 1e-4
  std::int64_t min_count = 1;
  std::uint64_t seed = 42;
  double distortion = 0.75;  // unigram exponent for negative sampling
  double subsample = 0.0;    // frequent-word subsampling threshold, 0 = off
  bool lowercase = false;
  int threads = 1;  // 1 = bit-deterministic; >1 shards sentences, not reproducible

  bool operator==(const EmbeddingConfig&) const = default;
};

struct EmbeddingModel {
  Vocab vocab;
  int dim = 0;
  std::vector<double> input_vectors;   // |V| x dim, row-major; the word vectors
  std::vector<double> output_vectors;  // |V| x dim, context vectors
  EmbeddingConfig config;

  std::span<const double> vector_of(std::int32_t id) const {
    return {input_vectors.data() + static_cast<std::size_t>(id) * dim,
            static_cast<std::size_t>(dim)};
  }
  bool operator==(const EmbeddingModel&) const = default;
};

struct EmbeddingTrainLog {
  std::vector<double> epoch_mean_loss;  // mean per-pair loss, one entry per epoch
};

// Tags are ignored; corpora may be tagged or untagged (the fallback chain
// trains transductively on train+test).
Vocab build_vocab(std::span<const Corpus> corpora, std::int64_t min_count,
                  bool lowercase);

// Skip-gram with negative sampling over the binary logistic objective.
EmbeddingModel train_skipgram(std::span<const Corpus> corpora,
                              const EmbeddingConfig& config,
                              EmbeddingTrainLog* log = nullptr);

// Loss for one (center, positive, negatives) triple:
//   -log s(u_pos . v_c) - sum_i log s(-u_neg_i . v_c)
// Gradients (same shapes as the inputs) are written when grad_* is non-null.
double sgns_pair_loss(std::span<const double> center,
                      std::span<const double> positive,
                      std::span<const std::span<const double>> negatives,
                      std::vector<double>* grad_center = nullptr,
                      std::vector<double>* grad_positive = nullptr,
                      std::vector<std::vector<double>>* grad_negatives = nullptr);

double cosine(std::span<const double> u, std::span<const double> v);

// Top-k neighbors of `word` by cosine over input vectors, excluding the word
// itself; sorted by descending similarity, ties lexicographic. Throws
// std::invalid_argument for out-of-vocabulary queries.
std::vector<std::pair<std::string, double>> nearest(const EmbeddingModel& model,
                                                    std::string_view word,
                                                    std::size_t k);

void save_embeddings_json(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_embeddings_json(const std::string& path);

// Interchange export: "<vocab_size> <dim>" then one "word v1 .. vd" line per
// word. Export only; the JSON format is the native one.
std::string embeddings_to_text(const EmbeddingModel& model);

}  // namespace cmpos

#endif  // CMPOS_EMBEDDINGS_HPP
