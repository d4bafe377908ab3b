#include <doctest.h>

#include <numeric>

#include "nbgec/parallel.hpp"
#include "nbgec/pipeline.hpp"
#include "test_util.hpp"

using namespace nbgec;

TEST_SUITE_BEGIN("parallel");

TEST_CASE("parallel_for covers every index exactly once") {
  for (int jobs : {1, 2, 4, 0}) {
    std::vector<int> hits(257, 0);
    parallel_for(hits.size(), jobs, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::accumulate(hits.begin(), hits.end(), 0) == int(hits.size()));
  }
  parallel_for(0, 4, [](std::size_t) { FAIL("must not run"); });
}

TEST_CASE("exceptions cross the parallel region intact") {
  CHECK_THROWS_AS(parallel_for(64, 4,
                               [](std::size_t i) {
                                 if (i == 13) throw Error("boom");
                               }),
                  Error);
}

namespace {

// A small end-to-end stack shared by the job-count comparisons.
struct MiniWorld {
  SynthCorpus corpus;
  std::vector<NBestList> lists;
  AnnotationProvider provider = AnnotationProvider::builtin();
  NGramModel lm{3, 0.4, -7.0};
  FeatureContext ctx;
  FeatureDictionary dict;
  CWModel model;

  MiniWorld() {
    corpus = generate_corpus(8, 120, ErrorModel::standard(77));
    SimulatedCorrector sc;
    sc.seed = 78;
    lists = simulate_nbest_corpus(corpus.annotated, sc);
    lm = train_lm(corpus.clean, 3);
    ctx = FeatureContext{&lm, &provider, FeatureGroups::all()};
    auto examples =
        featurize_corpus(lists, corpus.annotated.sentences, ctx, 1);
    dict = build_dictionary(examples);
    std::vector<SparseVector> xs(examples.size());
    std::vector<int> ys(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
      xs[i] = vectorize(examples[i].vector, dict);
      ys[i] = examples[i].valid ? 1 : -1;
    }
    model = cw_train(xs, ys, dict.dim(), CWTrainConfig{});
  }
};

}  // namespace

TEST_CASE("corpus kernels match the serial reference at any job count") {
  MiniWorld w;
  auto serial = analyze_corpus(w.lists, w.ctx, w.dict, w.model, 1);

  for (int jobs : {2, 4, 0}) {
    auto parallel = analyze_corpus(w.lists, w.ctx, w.dict, w.model, jobs);
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(parallel[i].entry_edit_feature == serial[i].entry_edit_feature);
      REQUIRE(parallel[i].pool.size() == serial[i].pool.size());
      for (std::size_t k = 0; k < serial[i].pool.size(); ++k)
        CHECK(parallel[i].pool[k].score == serial[i].pool[k].score);
    }
  }

  DecisionConfig cfg{DecisionMode::Select, 5, 0.0};
  auto base = correct_corpus(serial, cfg, nullptr, 1);
  for (int jobs : {2, 4}) {
    auto out = correct_corpus(serial, cfg, nullptr, jobs);
    REQUIRE(out.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
      CHECK(out[i].sentence == base[i].sentence);
  }

  double tau1 = tune_threshold_on(serial, w.corpus.annotated.sentences, 1);
  double tau4 = tune_threshold_on(serial, w.corpus.annotated.sentences, 4);
  CHECK(tau1 == tau4);
}

TEST_CASE("labeled examples ignore the job count") {
  MiniWorld w;
  auto a = featurize_corpus(w.lists, w.corpus.annotated.sentences, w.ctx, 1);
  auto b = featurize_corpus(w.lists, w.corpus.annotated.sentences, w.ctx, 4);
  CHECK(serialize_examples(a) == serialize_examples(b));
}

TEST_SUITE_END();
