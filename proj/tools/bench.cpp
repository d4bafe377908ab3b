// Compares the serial reference path (jobs = 1) against the OpenMP path for
// the corpus-level kernels. Run: ./nbgec_bench [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include "nbgec/parallel.hpp"
#include "nbgec/pipeline.hpp"

namespace {

using namespace nbgec;

struct Fixture {
  SynthCorpus corpus;
  std::vector<NBestList> lists;
  AnnotationProvider provider = AnnotationProvider::builtin();
  NGramModel lm{5, 0.4, -7.0};
  FeatureContext ctx;
  FeatureDictionary dict;
  CWModel model;
  std::vector<SentenceAnalysis> analyses;

  Fixture() {
    ErrorModel em = ErrorModel::standard(9);
    corpus = generate_corpus(10, 800, em);
    SimulatedCorrector sc;
    sc.seed = 10;
    lists = simulate_nbest_corpus(corpus.annotated, sc);
    lm = train_lm(corpus.clean, 5);
    ctx = FeatureContext{&lm, &provider, FeatureGroups::all()};
    auto examples =
        featurize_corpus(lists, corpus.annotated.sentences, ctx, 0);
    dict = build_dictionary(examples);
    std::vector<SparseVector> xs(examples.size());
    std::vector<int> ys(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
      xs[i] = vectorize(examples[i].vector, dict);
      ys[i] = examples[i].valid ? 1 : -1;
    }
    model = cw_train(xs, ys, dict.dim(), CWTrainConfig{});
    analyses = analyze_corpus(lists, ctx, dict, model, 0);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_AnalyzeCorpus(benchmark::State& state) {
  Fixture& f = fixture();
  const int jobs = int(state.range(0));
  for (auto _ : state) {
    auto analyses = analyze_corpus(f.lists, f.ctx, f.dict, f.model, jobs);
    benchmark::DoNotOptimize(analyses);
  }
}

void BM_SelectCorpus(benchmark::State& state) {
  Fixture& f = fixture();
  const int jobs = int(state.range(0));
  DecisionConfig cfg{DecisionMode::Select, 5, 0.0};
  for (auto _ : state) {
    auto corrections = correct_corpus(f.analyses, cfg, nullptr, jobs);
    benchmark::DoNotOptimize(corrections);
  }
}

void BM_TuneThreshold(benchmark::State& state) {
  Fixture& f = fixture();
  const int jobs = int(state.range(0));
  for (auto _ : state) {
    double tau =
        tune_threshold_on(f.analyses, f.corpus.annotated.sentences, jobs);
    benchmark::DoNotOptimize(tau);
  }
}

void jobs_args(benchmark::internal::Benchmark* b) {
  b->Arg(1)->Arg(hardware_jobs())->Unit(benchmark::kMillisecond);
}

BENCHMARK(BM_AnalyzeCorpus)->Apply(jobs_args);
BENCHMARK(BM_SelectCorpus)->Apply(jobs_args);
BENCHMARK(BM_TuneThreshold)->Apply(jobs_args);

}  // namespace

BENCHMARK_MAIN();
