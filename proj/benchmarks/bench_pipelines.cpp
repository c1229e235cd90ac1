#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "cmpos/corpus.hpp"
#include "cmpos/embeddings.hpp"
#include "cmpos/maxent.hpp"

namespace {

using namespace cmpos;

constexpr const char* kFullArch =
    "words(-2,2),order(1),prefix(6),suffix(6),unicodeshapes(1)";

Corpus synthetic_corpus(std::size_t n_sentences, std::size_t vocab,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const char* tags[] = {"A", "D", "N", "V"};
  Corpus corpus;
  corpus.tagged = true;
  for (std::size_t s = 0; s < n_sentences; ++s) {
    Sentence sentence;
    std::size_t length = 4 + rng() % 9;
    for (std::size_t i = 0; i < length; ++i) {
      auto w = rng() % vocab;
      sentence.tokens.push_back({"w" + std::to_string(w),
                                 rng() % 2 ? "en" : "hi",
                                 tags[w % 4]});
    }
    corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

MaxentModel model_over(const Corpus& corpus, int iterations) {
  TrainOptions options;
  options.max_iterations = iterations;
  return train_maxent(corpus, parse_architecture(kFullArch), options);
}

void BM_MaxentObjective(benchmark::State& state) {
  Corpus corpus = synthetic_corpus(static_cast<std::size_t>(state.range(0)), 200, 1);
  MaxentModel model = model_over(corpus, 0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> init(-0.5, 0.5);
  for (auto& w : model.weights) w = init(rng);
  std::vector<double> gradient;
  for (auto _ : state)
    benchmark::DoNotOptimize(objective(model, corpus, &gradient));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(corpus.token_count()));
}
BENCHMARK(BM_MaxentObjective)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_BeamDecode(benchmark::State& state) {
  Corpus corpus = synthetic_corpus(100, 200, 3);
  MaxentModel model = model_over(corpus, 20);
  Sentence sentence = synthetic_corpus(1, 200, 4).sentences[0];
  while (sentence.tokens.size() < 12)
    sentence.tokens.push_back(sentence.tokens[0]);
  int width = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(decode(model, sentence, width));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(sentence.tokens.size()));
}
BENCHMARK(BM_BeamDecode)->Arg(1)->Arg(3)->Arg(4);

void BM_SkipgramEpoch(benchmark::State& state) {
  Corpus corpus = synthetic_corpus(static_cast<std::size_t>(state.range(0)), 500, 5);
  EmbeddingConfig config;
  config.dim = 32;
  config.window = 3;
  config.epochs = 1;
  config.threads = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(train_skipgram({&corpus, 1}, config));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(corpus.token_count()));
}
BENCHMARK(BM_SkipgramEpoch)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_NearestQuery(benchmark::State& state) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  EmbeddingModel model;
  auto vocab = static_cast<std::size_t>(state.range(0));
  for (std::size_t i = 0; i < vocab; ++i) {
    model.vocab.words.push_back("w" + std::to_string(i));
    model.vocab.counts.push_back(static_cast<std::int64_t>(vocab - i));
  }
  model.vocab.rebuild_index();
  model.dim = 64;
  model.config.dim = 64;
  model.input_vectors.resize(vocab * 64);
  for (auto& x : model.input_vectors) x = coord(rng);
  model.output_vectors.assign(vocab * 64, 0.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(nearest(model, model.vocab.words[rng() % vocab], 10));
}
BENCHMARK(BM_NearestQuery)->Arg(1000)->Arg(20000);

void BM_ParseCorpus(benchmark::State& state) {
  std::string text =
      serialize_corpus(synthetic_corpus(static_cast<std::size_t>(state.range(0)),
                                        500, 7));
  for (auto _ : state) benchmark::DoNotOptimize(parse_corpus(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseCorpus)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
