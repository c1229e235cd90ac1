#ifndef CMPOS_MAXENT_HPP
#define CMPOS_MAXENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cmpos/corpus.hpp"
#include "cmpos/sentinels.hpp"

namespace cmpos {

// The five feature families of the architecture string, e.g.
// "words(-2,2),order(1),prefix(6),suffix(6),unicodeshapes(1)".
// Families left out of the string stay disabled.
struct FeatureTemplateSet {
  std::optional<std::pair<int, int>> words;  // inclusive offsets, lo <= 0 <= hi
  int order = 0;                             // 0 or 1: previous-tag conditioning
  int prefix_max = 0;                        // prefixes of length 1..prefix_max
  int suffix_max = 0;
  std::optional<int> shape_radius;           // unicodeshapes(s): offsets -s..+s

  bool operator==(const FeatureTemplateSet&) const = default;
};

// Parses a comma-separated "name(args)" list; whitespace-insensitive.
// Throws std::invalid_argument on unknown names, malformed or out-of-range
// arguments, and duplicated families.
FeatureTemplateSet parse_architecture(std::string_view arch);

// Canonical string for the active families; parse_architecture inverts it.
std::string architecture_to_string(const FeatureTemplateSet& templates);

// Character-class encoding of a word: uppercase letter -> 'X',
// lowercase/other letter -> 'x', digit -> '9', anything else -> '-';
// runs of one class collapse to at most 2 symbols.
std::string word_shape(std::string_view word);

// Feature strings for tagging decision at `position`, conditioned on
// `prev_tag` (gold during training, predicted or kBos during decoding).
// Out-of-range word/shape offsets produce kBos/kEos values. Order of the
// returned features is deterministic.
std::vector<std::string> extract_history_features(const Sentence& sentence,
                                                  std::size_t position,
                                                  std::string_view prev_tag,
                                                  const FeatureTemplateSet& templates);

struct TrainOptions {
  double l2_lambda = 1.0;
  double tolerance = 1e-5;  // relative gradient-norm stopping threshold
  int max_iterations = 200;
  int beam_width = 3;
  int feature_count_cutoff = 1;
  int threads = 1;

  bool operator==(const TrainOptions&) const = default;
};

// Log-linear conditional tagger: P(tag | context, prev tag) is a softmax
// over summed weights of active features. Weight layout is feature-major:
// weights[feature * |tags| + tag].
struct MaxentModel {
  FeatureTemplateSet templates;
  std::vector<std::string> tags;          // lexicographic order
  std::vector<std::string> feature_names; // by feature id
  std::vector<double> weights;
  TrainOptions options;
  bool converged = false;

  std::optional<std::int32_t> feature_id(std::string_view name) const;
  std::optional<std::int32_t> tag_id(std::string_view tag) const;
  void rebuild_index();  // from feature_names, after loading or editing

  bool operator==(const MaxentModel& other) const;

 private:
  std::unordered_map<std::string, std::int32_t> feature_index_;
};

// Regularized conditional negative log-likelihood over `data`, evaluated at
// model.weights; gold previous tags condition each local distribution.
// Writes the exact gradient when `gradient` is non-null.
double objective(const MaxentModel& model, const Corpus& data,
                 std::vector<double>* gradient = nullptr);

struct MaxentTrainLog {
  std::vector<double> loss_history;  // objective per accepted iterate
  double final_gradient_norm = 0.0;  // relative
  int iterations = 0;
};

// Builds the feature index from gold histories (dropping features seen fewer
// than feature_count_cutoff times) and minimizes `objective` by L-BFGS with a
// backtracking line search; the loss sequence is non-increasing.
MaxentModel train_maxent(const Corpus& data, const FeatureTemplateSet& templates,
                         const TrainOptions& options = {},
                         MaxentTrainLog* log = nullptr);

// Softmax over model.tags; unseen features are ignored.
std::vector<double> tag_probabilities(const MaxentModel& model,
                                      const Sentence& sentence,
                                      std::size_t position,
                                      std::string_view prev_tag);

// Left-to-right beam search over tag sequences. Hypotheses ending in the
// same tag are recombined (the model conditions on one previous tag), so
// beam_width >= |tags| decodes the exact argmax sequence. Score ties break
// to the lexicographically smaller tag sequence.
std::vector<std::string> decode(const MaxentModel& model, const Sentence& sentence,
                                int beam_width);

// Tags every sentence; beam_width 0 means model.options.beam_width.
Corpus tag_corpus(const MaxentModel& model, const Corpus& corpus,
                  int beam_width = 0);

void save_maxent(const MaxentModel& model, const std::string& path);
MaxentModel load_maxent(const std::string& path);

}  // namespace cmpos

#endif  // CMPOS_MAXENT_HPP
