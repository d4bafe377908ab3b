#include <doctest.h>

#include "nbgec/annotate.hpp"
#include "nbgec/edit.hpp"
#include "nbgec/synth.hpp"
#include "test_util.hpp"

using namespace nbgec;

TEST_SUITE_BEGIN("synth");

namespace {

ErrorModel sva_only(double p, std::uint64_t seed) {
  ErrorModel em;
  em.seed = seed;
  em.rules = {{"SVA", p}};
  return em;
}

}  // namespace

TEST_CASE("generation is deterministic given the seed") {
  ErrorModel em = ErrorModel::standard(42);
  SynthCorpus a = generate_corpus(8, 50, em);
  SynthCorpus b = generate_corpus(8, 50, em);
  CHECK(serialize_annotated(a.annotated) == serialize_annotated(b.annotated));
  CHECK(a.clean == b.clean);
}

TEST_CASE("an SVA-only model at one half corrupts about half the corpus") {
  SynthCorpus c = generate_corpus(10, 100, sva_only(0.5, 42));
  int with_sva = 0;
  for (const AnnotatedSentence& s : c.annotated.sentences) {
    bool hit = false;
    for (const GoldEdit& g : s.annotations.at(0))
      if (g.error_type == "SVA") hit = true;
    with_sva += hit;
  }
  CHECK(with_sva >= 30);
  CHECK(with_sva <= 70);
}

TEST_CASE("zero-probability rules corrupt nothing") {
  ErrorModel em = ErrorModel::standard(5);
  for (ErrorRule& r : em.rules) r.probability = 0.0;
  SynthCorpus c = generate_corpus(6, 40, em);
  for (std::size_t i = 0; i < c.annotated.sentences.size(); ++i) {
    const AnnotatedSentence& s = c.annotated.sentences[i];
    CHECK(s.annotations.at(0).empty());
    CHECK(s.source == c.clean[i]);
  }
}

TEST_CASE("gold edits are valid and restore the clean sentence") {
  ErrorModel em = ErrorModel::standard(7);
  SynthCorpus c = generate_corpus(10, 150, em);
  for (std::size_t i = 0; i < c.annotated.sentences.size(); ++i) {
    const AnnotatedSentence& s = c.annotated.sentences[i];
    std::vector<Edit> edits;
    for (const GoldEdit& g : s.annotations.at(0)) {
      REQUIRE(g.span.end <= s.source.size());
      Edit e;
      e.span = g.span;
      e.source_tokens.assign(
          s.source.begin() + std::ptrdiff_t(g.span.start),
          s.source.begin() + std::ptrdiff_t(g.span.end));
      e.replacement = g.replacement;
      edits.push_back(e);
    }
    CHECK(apply_edits(s.source, edits) == c.clean[i]);
  }
}

TEST_CASE("the closed vocabulary is tagged without falling back to defaults") {
  // Every clean token must hit a lexicon or suffix rule the chunker
  // understands; a default-NN verb would break the VP heads.
  SynthCorpus c = generate_corpus(10, 80, ErrorModel::standard(3));
  for (const Sentence& s : c.clean) {
    TokenAnnotations ann = builtin_annotations(s);
    CHECK(!ann.np_heads.empty());
    CHECK(!ann.vp_heads.empty());
  }
}

TEST_CASE("a perfect corrector's best hypothesis is the reference") {
  SynthCorpus c = generate_corpus(8, 60, ErrorModel::standard(11));
  SimulatedCorrector sc;
  sc.default_fix_probability = 1.0;
  sc.noise_rate = 0.0;
  sc.fix_conf_lo = 0.1;  // every noticed fix is applied in rank 1
  sc.n = 1;
  sc.seed = 13;
  for (std::size_t i = 0; i < c.annotated.sentences.size(); ++i) {
    const AnnotatedSentence& s = c.annotated.sentences[i];
    NBestList list = simulate_nbest(int(i), s.source, s.annotations.at(0), sc);
    REQUIRE(list.entries.size() == 1);
    CHECK(list.entries[0].hypothesis == c.clean[i]);
  }
}

TEST_CASE("a hopeless corrector emits only the source") {
  SynthCorpus c = generate_corpus(8, 40, ErrorModel::standard(19));
  SimulatedCorrector sc;
  sc.default_fix_probability = 0.0;
  sc.noise_rate = 0.0;
  sc.seed = 13;
  for (std::size_t i = 0; i < c.annotated.sentences.size(); ++i) {
    const AnnotatedSentence& s = c.annotated.sentences[i];
    NBestList list = simulate_nbest(int(i), s.source, s.annotations.at(0), sc);
    for (const NBestEntry& e : list.entries)
      CHECK(e.hypothesis == s.source);
  }
}

TEST_CASE("simulated lists are stable and well formed") {
  SynthCorpus c = generate_corpus(10, 30, ErrorModel::standard(23));
  SimulatedCorrector sc;
  sc.seed = 7;
  auto lists = simulate_nbest_corpus(c.annotated, sc);
  auto again = simulate_nbest_corpus(c.annotated, sc);
  CHECK(serialize_nbest(lists) == serialize_nbest(again));

  auto sources = std::vector<Sentence>();
  for (const auto& s : c.annotated.sentences) sources.push_back(s.source);
  auto parsed = parse_nbest(serialize_nbest(lists), sources);
  REQUIRE(parsed.size() == lists.size());
  for (std::size_t i = 0; i < lists.size(); ++i) {
    CHECK(parsed[i] == lists[i]);
    REQUIRE(!lists[i].entries.empty());
    CHECK(lists[i].entries.size() <= std::size_t(sc.n));
    for (std::size_t k = 0; k < lists[i].entries.size(); ++k) {
      CHECK(lists[i].entries[k].rank == int(k) + 1);
      // rank 1 is the corrector's own argmax of its internal score
      CHECK(lists[i].entries[0].decoder_score >=
            lists[i].entries[k].decoder_score);
    }
  }
}

TEST_CASE("some true fixes hide below rank 1, giving selection headroom") {
  SynthCorpus c = generate_corpus(10, 200, ErrorModel::standard(29));
  SimulatedCorrector sc;
  sc.seed = 7;
  int hidden = 0;
  for (std::size_t i = 0; i < c.annotated.sentences.size(); ++i) {
    const AnnotatedSentence& s = c.annotated.sentences[i];
    NBestList list = simulate_nbest(int(i), s.source, s.annotations.at(0), sc);
    std::vector<Edit> top = extract_edits(s.source, list.entries[0].hypothesis);
    for (std::size_t k = 1; k < list.entries.size(); ++k) {
      for (const Edit& e :
           extract_edits(s.source, list.entries[k].hypothesis)) {
        bool in_top = false;
        for (const Edit& t : top)
          if (t.same_change(e)) in_top = true;
        bool is_gold = false;
        for (const GoldEdit& g : s.annotations.at(0))
          if (edit_equal(e, g)) is_gold = true;
        if (is_gold && !in_top) ++hidden;
      }
    }
  }
  CHECK(hidden > 0);
}

TEST_SUITE_END();
