#include <doctest.h>

#include <algorithm>

#include "nbgec/decision.hpp"
#include "test_util.hpp"

using namespace nbgec;
using nbgec::test::sent;

TEST_SUITE_BEGIN("decision");

namespace {

NBestList make_list(const Sentence& source,
                    const std::vector<Sentence>& hyps,
                    const std::vector<double>& scores) {
  NBestList list;
  list.source_id = 0;
  list.source = source;
  list.feature_names = {"s"};
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    NBestEntry e;
    e.rank = int(i) + 1;
    e.hypothesis = hyps[i];
    e.features = {scores[i]};
    e.decoder_score = scores[i];
    list.entries.push_back(e);
  }
  return list;
}

// Scores an edit by a lookup keyed on its replacement's first token.
EditScorer table_scorer(std::map<std::string, double> table) {
  return [table = std::move(table)](const Edit& e) {
    std::string key = e.replacement.empty() ? "" : e.replacement[0];
    auto it = table.find(key);
    return it == table.end() ? 0.0 : it->second;
  };
}

LogLinearWeights weights(double s, double edit) {
  LogLinearWeights w;
  w.names = {"s", std::string(kEditFeatureName)};
  w.lambda = {s, edit};
  return w;
}

Edit pool_edit(std::size_t start, std::size_t end, const std::string& repl,
               double score, int rank = 1) {
  Edit e;
  e.span = {start, end};
  for (std::size_t i = start; i < end; ++i) e.source_tokens.push_back("w");
  e.replacement = sent(repl);
  e.hyp_rank = rank;
  e.score = score;
  return e;
}

SentenceAnalysis pool_only(std::vector<Edit> pool) {
  static NBestList dummy;  // select_edits never touches the list itself
  SentenceAnalysis a;
  a.nbest = &dummy;
  a.pool = std::move(pool);
  return a;
}

// Literal re-enactment of the selection procedure: repeatedly scan the
// remaining candidates for the single best edit, drop everything that
// overlaps it, stop when nothing is left. Kept deliberately independent of
// select_edits' sort-then-sweep implementation.
std::vector<Edit> oracle_select(std::vector<Edit> pool, double tau, int n) {
  std::vector<Edit> remaining;
  for (const Edit& e : pool)
    if (e.hyp_rank <= n && *e.score >= tau) remaining.push_back(e);

  std::vector<Edit> chosen;
  while (!remaining.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < remaining.size(); ++i) {
      const Edit &a = remaining[i], &b = remaining[best];
      bool better = false;
      if (*a.score != *b.score) better = *a.score > *b.score;
      else if (a.span.start != b.span.start)
        better = a.span.start < b.span.start;
      else if (a.hyp_rank != b.hyp_rank) better = a.hyp_rank < b.hyp_rank;
      else if (a.replacement != b.replacement)
        better = a.replacement < b.replacement;
      else better = a.span.end < b.span.end;
      if (better) best = i;
    }
    Edit picked = remaining[best];
    std::vector<Edit> next;
    for (const Edit& e : remaining)
      if (!overlaps(e, picked)) next.push_back(e);
    chosen.push_back(std::move(picked));
    remaining = std::move(next);
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const Edit& a, const Edit& b) { return a.span < b.span; });
  return chosen;
}

bool same_edits(std::span<const Edit> a, std::span<const Edit> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].same_change(b[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("hypothesis edit feature averages the classifier scores") {
  Sentence src = sent("a b c d e");
  NBestList list = make_list(
      src,
      {sent("a X c d e"), sent("a X c Y e"), sent("a b c d e")},
      {3, 2, 1});
  SentenceAnalysis a = analyze_sentence(
      list, table_scorer({{"X", 0.7}, {"Y", -0.2}}));
  CHECK(hypothesis_edit_feature(a, 0) == doctest::Approx(0.7));
  CHECK(hypothesis_edit_feature(a, 1) == doctest::Approx(0.25));  // (0.7-0.2)/2
  CHECK(hypothesis_edit_feature(a, 2) == 0.0);  // no edits
}

TEST_CASE("rescore with decoder weights and zero edit weight keeps the order") {
  Sentence src = sent("a b");
  NBestList list =
      make_list(src, {sent("a X"), sent("a b"), sent("Y b")}, {5, 4, 3});
  SentenceAnalysis a =
      analyze_sentence(list, table_scorer({{"X", 1.0}, {"Y", -1.0}}));
  auto order = rescore(a, weights(1.0, 0.0));
  CHECK(order == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("the edit feature can flip equal decoder scores") {
  Sentence src = sent("a b");
  NBestList list = make_list(src, {sent("a Y"), sent("a X")}, {1, 1});
  SentenceAnalysis a =
      analyze_sentence(list, table_scorer({{"X", 0.5}, {"Y", -0.5}}));
  auto order = rescore(a, weights(1.0, 1.0));
  CHECK(order == std::vector<std::size_t>{1, 0});
}

TEST_CASE("all-zero weights fall back to the original ranks") {
  Sentence src = sent("a b");
  NBestList list = make_list(src, {sent("a X"), sent("a Y")}, {1, 2});
  SentenceAnalysis a =
      analyze_sentence(list, table_scorer({{"X", -2.0}, {"Y", 2.0}}));
  auto order = rescore(a, weights(0.0, 0.0));
  CHECK(order == std::vector<std::size_t>{0, 1});
}

TEST_CASE("rescore order is invariant under positive weight rescaling") {
  Sentence src = sent("a b c");
  NBestList list = make_list(
      src, {sent("a X c"), sent("a b Y"), sent("a b c"), sent("X b Y")},
      {2, 3, 1, 0});
  SentenceAnalysis a =
      analyze_sentence(list, table_scorer({{"X", 0.4}, {"Y", -0.3}}));
  auto base = rescore(a, weights(0.7, 1.3));
  auto scaled = rescore(a, weights(0.7 * 13.7, 1.3 * 13.7));
  CHECK(base == scaled);
}

TEST_CASE("schema mismatches are rejected") {
  Sentence src = sent("a b");
  NBestList list = make_list(src, {sent("a X")}, {1});
  SentenceAnalysis a = analyze_sentence(list, table_scorer({}));
  LogLinearWeights w;
  w.names = {"other", std::string(kEditFeatureName)};
  w.lambda = {1.0, 0.0};
  CHECK_THROWS_AS(rescore(a, w), Error);
}

TEST_CASE("greedy selection skips overlaps and keeps the rest") {
  SentenceAnalysis a = pool_only({pool_edit(2, 3, "A", 0.9),
                                  pool_edit(2, 4, "B", 0.8),
                                  pool_edit(7, 8, "C", 0.5)});
  auto picked = select_edits(a, 0.0, 5);
  REQUIRE(picked.size() == 2);
  CHECK(picked[0].replacement == sent("A"));
  CHECK(picked[1].replacement == sent("C"));
}

TEST_CASE("an empty pool selects nothing") {
  SentenceAnalysis a = pool_only({});
  CHECK(select_edits(a, 0.0, 5).empty());
}

TEST_CASE("selection honors the threshold and the rank window") {
  SentenceAnalysis a = pool_only({pool_edit(0, 1, "A", 0.4, 1),
                                  pool_edit(2, 3, "B", 0.6, 3)});
  CHECK(select_edits(a, 0.5, 5).size() == 1);   // A under tau
  CHECK(select_edits(a, 0.0, 1).size() == 1);   // B above rank window
  CHECK(select_edits(a, 0.0, 3).size() == 2);
  CHECK(select_edits(a, 0.7, 5).empty());
}

TEST_CASE("a fix found only below rank 1 is still selected") {
  Sentence src = sent("people with albinism is prone to sunburn .");
  Sentence fixed = sent("people with albinism are prone to sunburn .");
  Sentence other = sent("people with albinism is prone to sunburns .");
  NBestList list = make_list(src, {other, fixed}, {2, 1});
  SentenceAnalysis a = analyze_sentence(
      list, table_scorer({{"are", 0.9}, {"sunburns", -0.4}}));
  DecisionConfig cfg{DecisionMode::Select, 5, 0.0};
  Correction c = correct(a, cfg, nullptr);
  CHECK(c.sentence == fixed);
}

TEST_CASE("baseline mode reproduces the decoder's top hypothesis, mistakes included") {
  Sentence src = sent("The man with a huge number of friends feels lonely .");
  Sentence wrong = sent("The man with a huge number of friends feel lonely .");
  NBestList list = make_list(src, {wrong, src}, {2, 1});
  SentenceAnalysis a = analyze_sentence(list, table_scorer({{"feel", -1.0}}));
  Correction c = correct(a, {DecisionMode::Baseline, 1, 0.0}, nullptr);
  CHECK(c.sentence == wrong);
  REQUIRE(c.edits.size() == 1);
  CHECK(c.edits[0].replacement == sent("feel"));
}

TEST_CASE("select with everything under tau returns the source unchanged") {
  Sentence src = sent("a b c");
  NBestList list = make_list(src, {sent("a X c"), src}, {2, 1});
  SentenceAnalysis a = analyze_sentence(list, table_scorer({{"X", -0.9}}));
  Correction c = correct(a, {DecisionMode::Select, 5, 0.0}, nullptr);
  CHECK(c.sentence == src);
  CHECK(c.edits.empty());
}

TEST_CASE("selection can combine edits from different hypotheses") {
  Sentence src = sent("a b c d e f g");
  Sentence h1 = sent("a X c d e f g");
  Sentence h2 = sent("a b c d Y f g");
  NBestList list = make_list(src, {h1, h2}, {2, 1});
  SentenceAnalysis a =
      analyze_sentence(list, table_scorer({{"X", 0.8}, {"Y", 0.6}}));
  Correction c = correct(a, {DecisionMode::Select, 5, 0.0}, nullptr);
  CHECK(c.sentence == sent("a X c d Y f g"));
  for (const NBestEntry& e : list.entries)
    CHECK(c.sentence != e.hypothesis);
}

TEST_CASE("rerank with identity weights and zero edit weight equals baseline") {
  Rng rng(55);
  for (int iter = 0; iter < 50; ++iter) {
    Sentence src = test::random_sentence(rng, 8, 4);
    std::vector<Sentence> hyps;
    std::vector<double> scores;
    std::size_t k = 1 + rng.next_below(4);
    for (std::size_t i = 0; i < k; ++i) {
      hyps.push_back(test::random_sentence(rng, 8, 4));
      scores.push_back(double(k - i));  // decoder order
    }
    NBestList list = make_list(src, hyps, scores);
    SentenceAnalysis a = analyze_sentence(
        list, [&rng](const Edit&) { return rng.next_real(-1, 1); });
    LogLinearWeights w = LogLinearWeights::identity_for(list.feature_names);
    Correction rr = correct(a, {DecisionMode::Rerank, int(k), 0.0}, &w);
    Correction bl = correct(a, {DecisionMode::Baseline, 1, 0.0}, nullptr);
    CHECK(rr.sentence == bl.sentence);
  }
}

TEST_CASE("greedy selection matches the oracle on random pools") {
  Rng rng(4242);
  for (int iter = 0; iter < 3000; ++iter) {
    std::vector<Edit> pool;
    std::size_t n_edits = rng.next_below(11);
    for (std::size_t i = 0; i < n_edits; ++i) {
      std::size_t start = rng.next_below(10);
      std::size_t len = rng.next_below(3);
      // Quantized scores force plenty of ties through the tie-break chain.
      double score = double(rng.next_below(5)) / 4.0 - 0.5;
      pool.push_back(pool_edit(start, std::min<std::size_t>(start + len, 10),
                               "r" + std::to_string(rng.next_below(3)), score,
                               1 + int(rng.next_below(5))));
    }
    double tau = double(rng.next_below(5)) / 8.0 - 0.25;
    int n = 1 + int(rng.next_below(5));

    auto fast = select_edits(pool_only(pool), tau, n);
    auto slow = oracle_select(pool, tau, n);
    CHECK(same_edits(fast, slow));

    // Non-overlap and maximality of the selected set.
    for (std::size_t i = 0; i < fast.size(); ++i)
      for (std::size_t j = i + 1; j < fast.size(); ++j)
        CHECK_FALSE(overlaps(fast[i], fast[j]));
    for (const Edit& e : pool) {
      if (e.hyp_rank > n || *e.score < tau) continue;
      bool selected = false, blocked = false;
      for (const Edit& s : fast) {
        if (s.same_change(e)) selected = true;
        if (overlaps(s, e) && *s.score >= *e.score) blocked = true;
      }
      CHECK((selected || blocked));
    }
  }
}

TEST_CASE("selection is deterministic across repeated runs") {
  Rng rng(77);
  std::vector<Edit> pool;
  for (int i = 0; i < 8; ++i)
    pool.push_back(pool_edit(rng.next_below(6), rng.next_below(6) + 1, "x",
                             0.5, 1));
  auto a = select_edits(pool_only(pool), 0.0, 5);
  auto b = select_edits(pool_only(pool), 0.0, 5);
  CHECK(same_edits(a, b));
}

TEST_CASE("weight tuning finds a separating weight on a toy dev set") {
  // Two sentences; the good hypothesis has the better edit feature but the
  // worse decoder score, so only a positive edit weight fixes both.
  Sentence src = sent("a b c");
  auto make = [&](double good_score, double bad_score) {
    return make_list(src, {sent("a X c"), sent("a Y c")},
                     {bad_score, good_score});
  };
  std::vector<NBestList> lists = {make(1.0, 2.0), make(0.5, 1.5)};
  EditScorer scorer = table_scorer({{"X", -0.8}, {"Y", 0.9}});
  std::vector<SentenceAnalysis> dev;
  for (const NBestList& l : lists) dev.push_back(analyze_sentence(l, scorer));

  std::vector<AnnotatedSentence> gold(2);
  for (auto& g : gold) {
    g.source = src;
    g.annotations[0] = {{{1, 2}, sent("Y"), "T"}};
  }

  LogLinearWeights init = LogLinearWeights::identity_for(lists[0].feature_names);
  LogLinearWeights tuned = tune_weights(dev, gold, init, 11);

  auto f_of = [&](const LogLinearWeights& w) {
    std::vector<SentenceCounts> counts;
    for (const SentenceAnalysis& a : dev) {
      std::size_t top = rescore(a, w).front();
      SentenceCounts c{0, a.entry_edits[top].size(), 1};
      for (std::size_t id : a.entry_edits[top])
        if (a.pool[id].replacement == sent("Y")) c.matched = 1;
      counts.push_back(c);
    }
    return corpus_f05(counts);
  };
  CHECK(f_of(tuned) == 1.0);
  CHECK(f_of(tuned) > f_of(init));

  // Deterministic under the same seed.
  LogLinearWeights tuned2 = tune_weights(dev, gold, init, 11);
  CHECK(tuned.lambda == tuned2.lambda);
}

TEST_CASE("weight tuning keeps an already optimal starting point optimal") {
  Sentence src = sent("a b");
  NBestList list = make_list(src, {sent("a X"), sent("a b")}, {2, 1});
  std::vector<SentenceAnalysis> dev;
  dev.push_back(analyze_sentence(list, table_scorer({{"X", 0.4}})));
  std::vector<AnnotatedSentence> gold(1);
  gold[0].source = src;
  gold[0].annotations[0] = {{{1, 2}, sent("X"), "T"}};
  LogLinearWeights init = LogLinearWeights::identity_for(list.feature_names);
  LogLinearWeights tuned = tune_weights(dev, gold, init, 3);
  std::size_t top = rescore(dev[0], tuned).front();
  CHECK(top == 0);  // still picks the all-gold hypothesis
}

TEST_CASE("weights files round trip and validate their schema") {
  LogLinearWeights w = weights(0.25, -1.5);
  LogLinearWeights back = LogLinearWeights::from_string(w.to_string());
  CHECK(back.names == w.names);
  CHECK(back.lambda == w.lambda);
  CHECK_THROWS_AS(LogLinearWeights::from_string("a=1\n"), ParseError);
}

TEST_SUITE_END();
