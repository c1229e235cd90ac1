#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmpos/classifiers.hpp"
#include "cmpos/corpus.hpp"
#include "cmpos/embeddings.hpp"
#include "cmpos/error.hpp"
#include "cmpos/eval.hpp"
#include "cmpos/io.hpp"
#include "cmpos/lexicon.hpp"
#include "cmpos/maxent.hpp"
#include "cmpos/mlfeatures.hpp"

namespace cmpos::cli {

namespace {

constexpr const char* kDefaultArch =
    "words(-2,2),order(1),prefix(6),suffix(6),unicodeshapes(1)";

std::string fmt(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

// value holders for every subcommand; CLI11 options bind to these fields
struct Options {
  struct {
    std::string input;
    std::string format = "text";
  } stats;

  struct {
    std::string input;
    std::string out;
    std::string out2;
    double ratio = 0.8;
    std::uint64_t seed = 42;
    bool no_shuffle = false;
  } split;

  struct {
    std::string input;
    std::string out;
    std::string arch = kDefaultArch;
    TrainOptions train;
  } train_maxent;

  struct {
    std::string model;
    std::string input;
    std::string out;
    int beam = 0;
  } tag_maxent;

  struct {
    std::vector<std::string> inputs;
    std::string out;
    std::string text_out;
    EmbeddingConfig config;
  } train_embeddings;

  struct {
    std::string model;
    std::string word;
    std::size_t k = 10;
  } nearest;

  struct {
    std::string input;
    std::string out;
    bool lowercase = false;
  } build_lexicon;

  struct {
    std::string input;
    std::string lexicon;
    std::string embeddings;
    std::string out;
    std::string algo = "j48";
    std::size_t neighbors = 50;
    double alpha = 1.0;
    TreeParams tree;
    bool no_prune = false;
    int trees = 100;
    std::uint64_t seed = 42;
    int mtry = 0;
    bool raw_position = false;
    std::string attributes;
    std::string export_csv;
  } train_clf;

  struct {
    std::string model;
    std::string input;
    std::string lexicon;
    std::string embeddings;
    std::string out;
  } tag_clf;

  struct {
    std::string gold;
    std::string pred;
    std::string format = "text";
    std::vector<std::string> exclude_langs;
  } eval;

  struct {
    std::string model;
    int tree = -1;
  } describe;
};

void run_stats(const Options& o, std::ostream& out) {
  auto corpus = load_corpus(o.stats.input);
  auto stats = corpus_stats(corpus);
  out << (o.stats.format == "json" ? stats_to_json(stats) : stats_to_text(stats));
}

void run_split(const Options& o, std::ostream& out) {
  auto corpus = load_corpus(o.split.input);
  auto [train, test] =
      split_corpus(corpus, o.split.ratio, o.split.seed, !o.split.no_shuffle);
  save_corpus(train, o.split.out);
  save_corpus(test, o.split.out2);
  out << "train: " << train.sentences.size() << " sentences -> " << o.split.out
      << "\n"
      << "test: " << test.sentences.size() << " sentences -> " << o.split.out2
      << "\n";
}

void run_train_maxent(const Options& o, std::ostream& out, std::ostream& err) {
  auto corpus = load_corpus(o.train_maxent.input, ExpectTags::Yes);
  auto templates = parse_architecture(o.train_maxent.arch);
  MaxentTrainLog log;
  auto model = train_maxent(corpus, templates, o.train_maxent.train, &log);
  save_maxent(model, o.train_maxent.out);
  for (std::size_t i = 0; i < log.loss_history.size(); ++i)
    err << "iter " << i << ": loss " << fmt(log.loss_history[i]) << "\n";
  out << "features: " << model.feature_names.size() << "\n"
      << "tags: " << model.tags.size() << "\n"
      << "iterations: " << log.iterations << "\n"
      << "final loss: " << fmt(log.loss_history.back()) << "\n"
      << "converged: " << (model.converged ? "yes" : "no") << "\n"
      << "model -> " << o.train_maxent.out << "\n";
}

void run_tag_maxent(const Options& o, std::ostream& out) {
  auto model = load_maxent(o.tag_maxent.model);
  auto corpus = load_corpus(o.tag_maxent.input);
  auto tagged = tag_corpus(model, corpus, o.tag_maxent.beam);
  save_corpus(tagged, o.tag_maxent.out);
  out << "tagged " << tagged.token_count() << " tokens -> " << o.tag_maxent.out
      << "\n";
}

void run_train_embeddings(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<Corpus> corpora;
  corpora.reserve(o.train_embeddings.inputs.size());
  for (const auto& path : o.train_embeddings.inputs)
    corpora.push_back(load_corpus(path));
  EmbeddingTrainLog log;
  auto model = train_skipgram(corpora, o.train_embeddings.config, &log);
  save_embeddings_json(model, o.train_embeddings.out);
  if (!o.train_embeddings.text_out.empty())
    write_file(o.train_embeddings.text_out, embeddings_to_text(model));
  for (std::size_t e = 0; e < log.epoch_mean_loss.size(); ++e)
    err << "epoch " << e << ": mean pair loss " << fmt(log.epoch_mean_loss[e])
        << "\n";
  out << "vocabulary: " << model.vocab.size() << " words\n"
      << "dimensions: " << model.dim << "\n"
      << "model -> " << o.train_embeddings.out << "\n";
}

void run_nearest(const Options& o, std::ostream& out) {
  auto model = load_embeddings_json(o.nearest.model);
  for (const auto& [word, similarity] : nearest(model, o.nearest.word, o.nearest.k))
    out << word << "\t" << fmt(similarity) << "\n";
}

void run_build_lexicon(const Options& o, std::ostream& out) {
  auto corpus = load_corpus(o.build_lexicon.input, ExpectTags::Yes);
  auto lexicon = FrequencyLexicon::build(corpus, o.build_lexicon.lowercase);
  lexicon.save(o.build_lexicon.out);
  out << "words: " << lexicon.word_tag_counts().size() << "\n"
      << "tokens: " << lexicon.total_tokens() << "\n"
      << "global tag: " << lexicon.global_most_frequent_tag() << "\n"
      << "lexicon -> " << o.build_lexicon.out << "\n";
}

// comma-separated attribute names -> column ids of `data`
std::vector<std::size_t> parse_attribute_mask(const std::string& mask,
                                              const DatasetSchema& schema) {
  std::vector<std::size_t> keep;
  std::stringstream stream(mask);
  std::string name;
  while (std::getline(stream, name, ',')) {
    bool found = false;
    for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
      if (schema.attributes[a].name == name) {
        keep.push_back(a);
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("unknown attribute '" + name + "'");
  }
  if (keep.empty()) throw std::invalid_argument("empty attribute mask");
  return keep;
}

void run_train_clf(const Options& o, std::ostream& out) {
  const auto& a = o.train_clf;
  auto corpus = load_corpus(a.input, ExpectTags::Yes);
  auto lexicon = FrequencyLexicon::load(a.lexicon);
  std::optional<EmbeddingModel> embeddings;
  if (!a.embeddings.empty()) embeddings = load_embeddings_json(a.embeddings);

  std::vector<FeatureVector> vectors;
  for (const auto& sentence : corpus.sentences) {
    auto more = extract_vectors(sentence, lexicon,
                                embeddings ? &*embeddings : nullptr,
                                ExtractionMode::Train, nullptr, a.neighbors);
    std::move(more.begin(), more.end(), std::back_inserter(vectors));
  }
  auto dataset = vectors_to_dataset(vectors, a.raw_position);
  if (!a.attributes.empty())
    dataset = project_dataset(dataset, parse_attribute_mask(a.attributes,
                                                            dataset.schema));
  if (!a.export_csv.empty()) write_file(a.export_csv, dataset_to_csv(dataset));

  ClassifierVariant model;
  if (a.algo == "j48") {
    TreeParams params = a.tree;
    params.prune = !a.no_prune;
    model = train_tree(dataset, params);
  } else if (a.algo == "nb") {
    model = train_nb(dataset, a.alpha);
  } else {
    ForestParams params;
    params.n_trees = a.trees;
    params.seed = a.seed;
    params.min_leaf = a.tree.min_leaf;
    params.mtry = a.mtry;
    model = train_forest(dataset, params);
  }

  std::map<std::string, std::string> metadata{
      {"neighbors", std::to_string(a.neighbors)},
      {"embeddings", embeddings ? "1" : "0"},
      {"lowercase", lexicon.lowercased() ? "1" : "0"},
      {"raw_position", a.raw_position ? "1" : "0"},
  };
  save_classifier(model, a.out, metadata);
  out << "instances: " << dataset.instances.size() << "\n"
      << "attributes: " << dataset.schema.attributes.size() << "\n"
      << "classes: " << dataset.schema.class_domain.size() << "\n";
  if (const auto* tree = std::get_if<DecisionTree>(&model))
    out << "tree nodes: " << tree->nodes.size() << "\n";
  if (const auto* forest = std::get_if<RandomForest>(&model))
    out << "trees: " << forest->trees.size() << "\n";
  out << "model -> " << a.out << "\n";
}

void run_tag_clf(const Options& o, std::ostream& out) {
  const auto& a = o.tag_clf;
  auto file = load_classifier(a.model);
  auto lexicon = FrequencyLexicon::load(a.lexicon);
  std::optional<EmbeddingModel> embeddings;
  if (!a.embeddings.empty()) embeddings = load_embeddings_json(a.embeddings);

  auto meta = [&](const std::string& key, const std::string& fallback) {
    auto it = file.metadata.find(key);
    return it == file.metadata.end() ? fallback : it->second;
  };
  if (meta("embeddings", "0") == "1" && !embeddings)
    throw std::invalid_argument(
        "model was trained with embedding-neighbor features; pass --embeddings");
  if (meta("embeddings", "0") == "0" && embeddings)
    throw std::invalid_argument(
        "model was trained without embeddings; drop --embeddings");
  if (meta("lowercase", "0") != (lexicon.lowercased() ? "1" : "0"))
    throw std::invalid_argument(
        "lexicon lowercase setting differs from the one the model was trained "
        "with");
  auto neighbors =
      static_cast<std::size_t>(std::stoull(meta("neighbors", "50")));

  const auto& schema = classifier_schema(file.model);
  auto corpus = load_corpus(a.input);
  Corpus tagged;
  tagged.tagged = true;
  tagged.sentences.reserve(corpus.sentences.size());
  for (const auto& sentence : corpus.sentences) {
    // greedy left-to-right: each position sees the tags predicted so far
    std::vector<std::string> predicted;
    predicted.reserve(sentence.tokens.size());
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
      auto vector = extract_vector(sentence, i, lexicon,
                                   embeddings ? &*embeddings : nullptr, predicted,
                                   neighbors);
      auto instance = vector_to_instance(vector, schema);
      predicted.push_back(predict(file.model, instance).label);
    }
    Sentence copy = sentence;
    for (std::size_t i = 0; i < copy.tokens.size(); ++i)
      copy.tokens[i].tag = std::move(predicted[i]);
    tagged.sentences.push_back(std::move(copy));
  }
  save_corpus(tagged, a.out);
  out << "tagged " << tagged.token_count() << " tokens -> " << a.out << "\n";
}

void run_eval(const Options& o, std::ostream& out) {
  auto gold = load_corpus(o.eval.gold, ExpectTags::Yes);
  auto pred = load_corpus(o.eval.pred, ExpectTags::Yes);
  std::set<std::string> exclude(o.eval.exclude_langs.begin(),
                                o.eval.exclude_langs.end());
  auto report = evaluate(gold, pred, exclude);
  out << render_report(report, o.eval.format == "json" ? ReportFormat::Json
                                                       : ReportFormat::Text);
}

void run_describe(const Options& o, std::ostream& out) {
  auto text = read_file(o.describe.model);
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("format"))
    throw FormatError(o.describe.model + ": not a model file");
  auto format = j["format"].get<std::string>();

  if (format == "cmpos.classifier") {
    auto file = load_classifier(o.describe.model);
    if (const auto* tree = std::get_if<DecisionTree>(&file.model)) {
      out << "J48 tree: " << tree->nodes.size() << " nodes, min_leaf "
          << tree->params.min_leaf << ", "
          << (tree->params.prune
                  ? "pruned (confidence " + fmt(tree->params.prune_confidence) + ")"
                  : "unpruned")
          << "\n\n"
          << describe_tree(tree->schema, tree->nodes);
    } else if (const auto* nb = std::get_if<NaiveBayesModel>(&file.model)) {
      out << "naive Bayes: " << nb->schema.class_domain.size() << " classes, "
          << nb->total << " instances, alpha " << fmt(nb->alpha) << "\n";
      for (std::size_t c = 0; c < nb->schema.class_domain.size(); ++c)
        out << "  " << nb->schema.class_domain[c] << ": prior "
            << fmt(static_cast<double>(nb->class_counts[c]) /
                   static_cast<double>(nb->total))
            << " (" << nb->class_counts[c] << ")\n";
    } else {
      const auto& forest = std::get<RandomForest>(file.model);
      out << "random forest: " << forest.trees.size() << " trees, mtry "
          << forest.params.mtry << ", seed " << forest.params.seed << "\n";
      if (o.describe.tree >= 0) {
        if (static_cast<std::size_t>(o.describe.tree) >= forest.trees.size())
          throw std::invalid_argument("tree index out of range");
        out << "\n"
            << describe_tree(forest.schema,
                             forest.trees[static_cast<std::size_t>(o.describe.tree)]);
      } else {
        out << "(--tree N prints one member tree)\n";
      }
    }
  } else if (format == "cmpos.maxent") {
    auto model = load_maxent(o.describe.model);
    out << "maxent tagger\n"
        << "architecture: " << architecture_to_string(model.templates) << "\n"
        << "tags: " << model.tags.size() << ", features: "
        << model.feature_names.size() << "\n"
        << "beam width: " << model.options.beam_width << "\n"
        << "converged: " << (model.converged ? "yes" : "no") << "\n";
  } else if (format == "cmpos.embeddings") {
    auto model = load_embeddings_json(o.describe.model);
    out << "embeddings: " << model.vocab.size() << " words x " << model.dim
        << " dims\n"
        << "window " << model.config.window << ", negatives "
        << model.config.negatives << ", epochs " << model.config.epochs
        << ", seed " << model.config.seed << "\n";
  } else if (format == "cmpos.lexicon") {
    auto lexicon = FrequencyLexicon::load(o.describe.model);
    out << "lexicon: " << lexicon.word_tag_counts().size() << " words, "
        << lexicon.total_tokens() << " tokens"
        << (lexicon.lowercased() ? ", lowercased" : "") << "\n"
        << "global tag: " << lexicon.global_most_frequent_tag() << "\n";
  } else {
    throw std::invalid_argument("describe does not handle format '" + format +
                                "'");
  }
}

void build_app(CLI::App& app, Options& o, std::ostream& out, std::ostream& err) {
  app.require_subcommand(1);

  auto* stats = app.add_subcommand("stats", "Corpus token/language/tag counts");
  stats->add_option("input", o.stats.input, "corpus file")->required();
  stats->add_option("--format", o.stats.format, "output format (text|json)")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  stats->callback([&] { run_stats(o, out); });

  auto* split = app.add_subcommand("split", "Seeded sentence-level corpus split");
  split->add_option("input", o.split.input, "corpus file")->required();
  split->add_option("--ratio", o.split.ratio, "train fraction of sentences")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  split->add_option("--seed", o.split.seed, "shuffle seed")->capture_default_str();
  split->add_option("-o,--out", o.split.out, "train output file")->required();
  split->add_option("--out2", o.split.out2, "test output file (alias -o2)")
      ->required();
  split->add_flag("--no-shuffle", o.split.no_shuffle, "keep file order");
  split->callback([&] { run_split(o, out); });

  auto* tm = app.add_subcommand("train-maxent",
                                "Train the log-linear tagger on a tagged corpus");
  tm->add_option("input", o.train_maxent.input, "tagged corpus")->required();
  tm->add_option("-o,--out", o.train_maxent.out, "model output file")->required();
  tm->add_option("--arch", o.train_maxent.arch, "feature architecture string")
      ->capture_default_str();
  tm->add_option("--l2", o.train_maxent.train.l2_lambda, "L2 penalty weight")
      ->capture_default_str();
  tm->add_option("--tol", o.train_maxent.train.tolerance,
                 "relative gradient-norm stopping threshold")
      ->capture_default_str();
  tm->add_option("--max-iter", o.train_maxent.train.max_iterations,
                 "iteration cap")
      ->capture_default_str();
  tm->add_option("--beam", o.train_maxent.train.beam_width,
                 "beam width stored for tagging")
      ->capture_default_str();
  tm->add_option("--cutoff", o.train_maxent.train.feature_count_cutoff,
                 "drop features seen fewer times")
      ->capture_default_str();
  tm->add_option("--threads", o.train_maxent.train.threads,
                 "objective worker threads")
      ->capture_default_str();
  tm->callback([&] { run_train_maxent(o, out, err); });

  auto* gm = app.add_subcommand("tag-maxent", "Tag a corpus with a maxent model");
  gm->add_option("model", o.tag_maxent.model, "maxent model file")->required();
  gm->add_option("input", o.tag_maxent.input, "corpus to tag")->required();
  gm->add_option("-o,--out", o.tag_maxent.out, "tagged output file")->required();
  gm->add_option("--beam", o.tag_maxent.beam, "beam width (0 = model's)")
      ->capture_default_str();
  gm->callback([&] { run_tag_maxent(o, out); });

  auto* te = app.add_subcommand(
      "train-embeddings", "Train skip-gram negative-sampling word vectors");
  te->add_option("inputs", o.train_embeddings.inputs, "corpus files")
      ->required()
      ->expected(-1);
  te->add_option("-o,--out", o.train_embeddings.out, "model output file")
      ->required();
  te->add_option("--text-out", o.train_embeddings.text_out,
                 "also export text-format vectors");
  auto& ec = o.train_embeddings.config;
  te->add_option("--dim", ec.dim, "vector dimensions")->capture_default_str();
  te->add_option("--window", ec.window, "max context window")->capture_default_str();
  te->add_option("--negatives", ec.negatives, "negative samples per pair")
      ->capture_default_str();
  te->add_option("--epochs", ec.epochs, "training epochs")->capture_default_str();
  te->add_option("--lr", ec.learning_rate, "initial learning rate")
      ->capture_default_str();
  te->add_option("--min-count", ec.min_count, "drop rarer words")
      ->capture_default_str();
  te->add_option("--seed", ec.seed, "rng seed")->capture_default_str();
  te->add_option("--distortion", ec.distortion, "negative-table unigram exponent")
      ->capture_default_str();
  te->add_option("--subsample", ec.subsample,
                 "frequent-word subsampling threshold (0 = off)")
      ->capture_default_str();
  te->add_flag("--lowercase", ec.lowercase, "lowercase ASCII before training");
  te->add_option("--threads", ec.threads, "trainer threads (1 = reproducible)")
      ->capture_default_str();
  te->callback([&] { run_train_embeddings(o, out, err); });

  auto* ne = app.add_subcommand("nearest", "Cosine nearest neighbors of a word");
  ne->add_option("model", o.nearest.model, "embeddings model file")->required();
  ne->add_option("word", o.nearest.word, "query word")->required();
  ne->add_option("-k,--k", o.nearest.k, "neighbors to print")->capture_default_str();
  ne->callback([&] { run_nearest(o, out); });

  auto* bl = app.add_subcommand("build-lexicon",
                                "Word -> tag frequency lexicon from a tagged corpus");
  bl->add_option("input", o.build_lexicon.input, "tagged corpus")->required();
  bl->add_option("-o,--out", o.build_lexicon.out, "lexicon output file")->required();
  bl->add_flag("--lowercase", o.build_lexicon.lowercase,
               "fold words to ASCII lowercase");
  bl->callback([&] { run_build_lexicon(o, out); });

  auto* tc = app.add_subcommand(
      "train-clf", "Train a categorical classifier on extracted feature vectors");
  tc->add_option("input", o.train_clf.input, "tagged corpus")->required();
  tc->add_option("--lexicon", o.train_clf.lexicon, "frequency lexicon file")
      ->required();
  tc->add_option("--embeddings", o.train_clf.embeddings,
                 "embeddings model for the neighbor fallback");
  tc->add_option("-o,--out", o.train_clf.out, "model output file")->required();
  tc->add_option("--algo", o.train_clf.algo, "classifier (j48|nb|rf)")
      ->check(CLI::IsMember({"j48", "nb", "rf"}))
      ->capture_default_str();
  tc->add_option("-k,--neighbors", o.train_clf.neighbors,
                 "neighbor cap for the fallback chain")
      ->capture_default_str();
  tc->add_option("--alpha", o.train_clf.alpha, "naive Bayes smoothing")
      ->capture_default_str();
  tc->add_option("--min-leaf", o.train_clf.tree.min_leaf,
                 "minimum instances to keep splitting")
      ->capture_default_str();
  tc->add_option("--confidence", o.train_clf.tree.prune_confidence,
                 "pruning confidence factor")
      ->capture_default_str();
  tc->add_flag("--no-prune", o.train_clf.no_prune, "skip J48 pruning");
  tc->add_option("--trees", o.train_clf.trees, "forest size")->capture_default_str();
  tc->add_option("--seed", o.train_clf.seed, "forest rng seed")
      ->capture_default_str();
  tc->add_option("--mtry", o.train_clf.mtry,
                 "forest attributes sampled per node (0 = ceil(sqrt(m)))")
      ->capture_default_str();
  tc->add_flag("--raw-position", o.train_clf.raw_position,
               "use the raw integer position instead of the bucket");
  tc->add_option("--attributes", o.train_clf.attributes,
                 "comma-separated attribute subset to keep");
  tc->add_option("--export-csv", o.train_clf.export_csv,
                 "also write the extracted dataset as CSV");
  tc->callback([&] { run_train_clf(o, out); });

  auto* gc = app.add_subcommand("tag-clf",
                                "Tag a corpus with a trained classifier");
  gc->add_option("model", o.tag_clf.model, "classifier model file")->required();
  gc->add_option("input", o.tag_clf.input, "corpus to tag")->required();
  gc->add_option("--lexicon", o.tag_clf.lexicon, "frequency lexicon file")
      ->required();
  gc->add_option("--embeddings", o.tag_clf.embeddings,
                 "embeddings model (required iff the model trained with one)");
  gc->add_option("-o,--out", o.tag_clf.out, "tagged output file")->required();
  gc->callback([&] { run_tag_clf(o, out); });

  auto* ev = app.add_subcommand("eval", "Score a predicted corpus against gold");
  ev->add_option("gold", o.eval.gold, "gold tagged corpus")->required();
  ev->add_option("pred", o.eval.pred, "predicted tagged corpus")->required();
  ev->add_option("--format", o.eval.format, "output format (text|json)")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  ev->add_option("--exclude-lang", o.eval.exclude_langs,
                 "language labels to leave out of scoring");
  ev->callback([&] { run_eval(o, out); });

  auto* de = app.add_subcommand("describe", "Render a model file for inspection");
  de->add_option("model", o.describe.model, "model file")->required();
  de->add_option("--tree", o.describe.tree,
                 "forest member tree to render (-1 = summary only)")
      ->capture_default_str();
  de->callback([&] { run_describe(o, out); });
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  // CLI11 rejects multi-character single-dash names, so the documented -o2
  // spelling maps onto --out2 up front
  for (auto& arg : args)
    if (arg == "-o2") arg = "--out2";

  CLI::App app{"code-mixed POS tagging toolkit"};
  app.name("cmpos");
  Options options;
  build_app(app, options, out, err);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const VersionError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

std::vector<std::string> subcommands() {
  CLI::App app;
  Options options;
  std::ostringstream sink;
  build_app(app, options, sink, sink);
  std::vector<std::string> names;
  for (const auto* sub : app.get_subcommands({})) names.push_back(sub->get_name());
  return names;
}

std::vector<OptionDoc> options_of(const std::string& subcommand) {
  CLI::App app;
  Options options;
  std::ostringstream sink;
  build_app(app, options, sink, sink);
  const auto* sub = app.get_subcommand(subcommand);
  std::vector<OptionDoc> docs;
  for (const auto* option : sub->get_options()) {
    OptionDoc doc;
    if (!option->get_lnames().empty())
      doc.name = "--" + option->get_lnames().front();
    else if (!option->get_snames().empty())
      doc.name = "-" + option->get_snames().front();
    else
      doc.name = option->get_single_name();
    doc.default_str = option->get_default_str();
    doc.required = option->get_required();
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace cmpos::cli
