#include <doctest.h>

#include "nbgec/eval.hpp"
#include "test_util.hpp"

using namespace nbgec;
using nbgec::test::sent;

TEST_SUITE_BEGIN("eval");

namespace {

Edit sys_edit(const Sentence& src, std::size_t start, std::size_t end,
              const std::string& repl) {
  Edit e;
  e.span = {start, end};
  e.source_tokens.assign(src.begin() + std::ptrdiff_t(start),
                         src.begin() + std::ptrdiff_t(end));
  e.replacement = sent(repl);
  return e;
}

}  // namespace

TEST_CASE("f_beta reproduces the published corpus scores") {
  CHECK(f_beta(0.5056, 0.2268, 0.5) == doctest::Approx(0.4058).epsilon(5e-4));
  CHECK(f_beta(0.5079, 0.2292, 0.5) == doctest::Approx(0.4085).epsilon(5e-4));
  CHECK(f_beta(0.5035, 0.2384, 0.5) == doctest::Approx(0.4119).epsilon(5e-4));
}

TEST_CASE("f_beta degenerate points") {
  CHECK(f_beta(0.37, 0.37, 0.5) == doctest::Approx(0.37));
  CHECK(f_beta(1.0, 1.0, 0.5) == 1.0);
  CHECK(f_beta(0.0, 0.0, 0.5) == 0.0);
}

TEST_CASE("f_beta is monotone in precision and recall") {
  Rng rng(3);
  for (int iter = 0; iter < 500; ++iter) {
    double p = rng.next_real(), r = rng.next_real();
    double dp = rng.next_real() * (1.0 - p);
    double dr = rng.next_real() * (1.0 - r);
    CHECK(f_beta(p + dp, r, 0.5) >= f_beta(p, r, 0.5));
    CHECK(f_beta(p, r + dr, 0.5) >= f_beta(p, r, 0.5));
  }
}

TEST_CASE("a perfect single-edit system scores ones") {
  AnnotatedSentence s;
  s.source = sent("He carries a gun into his pocket .");
  s.annotations[0] = {{{4, 5}, sent("in"), "Prep"}};
  std::vector<std::vector<Edit>> sys = {
      {sys_edit(s.source, 4, 5, "in")}};
  EvalResult r = evaluate(std::vector<AnnotatedSentence>{s}, sys);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.f05 == 1.0);
  CHECK(r.matched == 1);
}

TEST_CASE("half precision with full recall lands at 5/9") {
  AnnotatedSentence s;
  s.source = sent("a b c d");
  s.annotations[0] = {{{0, 1}, sent("x"), "T"}};
  std::vector<std::vector<Edit>> sys = {
      {sys_edit(s.source, 0, 1, "x"), sys_edit(s.source, 2, 3, "y")}};
  EvalResult r = evaluate(std::vector<AnnotatedSentence>{s}, sys);
  CHECK(r.precision == 0.5);
  CHECK(r.recall == 1.0);
  CHECK(r.f05 == doctest::Approx(0.5556).epsilon(1e-4));
}

TEST_CASE("the annotator with more matches is chosen per sentence") {
  AnnotatedSentence s;
  s.source = sent("a b c");
  s.annotations[0] = {{{0, 1}, sent("z"), "T"}};
  s.annotations[1] = {{{0, 1}, sent("x"), "T"}, {{2, 3}, sent("y"), "T"}};
  std::vector<std::vector<Edit>> sys = {{sys_edit(s.source, 0, 1, "x")}};
  EvalResult r = evaluate(std::vector<AnnotatedSentence>{s}, sys);
  CHECK(r.matched == 1);
  CHECK(r.gold_count == 2);  // annotator 1's gold set
  // On a matched tie the annotator with fewer gold edits wins.
  std::vector<std::vector<Edit>> none = {{}};
  EvalResult r2 = evaluate(std::vector<AnnotatedSentence>{s}, none);
  CHECK(r2.gold_count == 1);
}

TEST_CASE("zero denominators follow the scorer conventions") {
  AnnotatedSentence clean;
  clean.source = sent("a b");
  clean.annotations[0] = {};
  std::vector<std::vector<Edit>> nothing = {{}};
  EvalResult r = evaluate(std::vector<AnnotatedSentence>{clean}, nothing);
  CHECK(r.precision == 1.0);  // proposed none
  CHECK(r.recall == 1.0);     // gold none
  CHECK(r.f05 == 1.0);

  std::vector<std::vector<Edit>> noisy = {{sys_edit(clean.source, 0, 1, "x")}};
  EvalResult r2 = evaluate(std::vector<AnnotatedSentence>{clean}, noisy);
  CHECK(r2.precision == 0.0);
  CHECK(r2.recall == 1.0);
  CHECK(r2.f05 == 0.0);
}

TEST_CASE("scalars always agree with the per-sentence triples") {
  Rng rng(21);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<AnnotatedSentence> gold;
    std::vector<std::vector<Edit>> sys;
    std::size_t n = 1 + rng.next_below(6);
    for (std::size_t i = 0; i < n; ++i) {
      AnnotatedSentence s;
      s.source = sent("a b c d e f");
      std::vector<GoldEdit> gs;
      if (rng.next_below(2)) gs.push_back({{0, 1}, sent("x"), "T"});
      if (rng.next_below(2)) gs.push_back({{3, 4}, sent("y"), "T"});
      s.annotations[0] = gs;
      gold.push_back(s);
      std::vector<Edit> es;
      if (rng.next_below(2)) es.push_back(sys_edit(s.source, 0, 1, "x"));
      if (rng.next_below(2)) es.push_back(sys_edit(s.source, 3, 4, "q"));
      sys.push_back(es);
    }
    EvalResult r = evaluate(gold, sys);
    EvalResult again = result_from_counts(r.per_sentence);
    CHECK(again.precision == r.precision);
    CHECK(again.recall == r.recall);
    CHECK(again.f05 == r.f05);
    CHECK(r.matched <= r.proposed);
    CHECK(r.matched <= r.gold_count);
  }
}

TEST_CASE("adding matches helps recall, adding noise hurts precision") {
  std::vector<SentenceCounts> base = {{1, 2, 3}, {0, 1, 1}};
  EvalResult r = result_from_counts(base);
  EvalResult plus_match = result_from_counts({{2, 3, 3}, {0, 1, 1}});
  CHECK(plus_match.recall >= r.recall);
  EvalResult plus_noise = result_from_counts({{1, 3, 3}, {0, 1, 1}});
  CHECK(plus_noise.precision <= r.precision);
}

TEST_CASE("a dominated comparison is significant at one over n-plus-one") {
  std::vector<SentenceCounts> a(40, {1, 1, 1});  // always perfect
  std::vector<SentenceCounts> b(40, {0, 1, 1});  // never right
  SignificanceResult sig = sign_test(a, b, 100, 9);
  CHECK(sig.wins_a == 100);
  CHECK(sig.p_value == doctest::Approx(1.0 / 101.0));
  CHECK(sig.p_value < 0.01);
}

TEST_CASE("identical systems are never significant") {
  std::vector<SentenceCounts> a(25, {1, 2, 2});
  SignificanceResult sig = sign_test(a, a, 100, 5);
  CHECK(sig.ties == 100);
  CHECK(sig.p_value == 1.0);
}

TEST_CASE("the sign test is deterministic given the seed") {
  Rng rng(33);
  std::vector<SentenceCounts> a, b;
  for (int i = 0; i < 50; ++i) {
    a.push_back({rng.next_below(3), rng.next_below(3) + 1, 2});
    b.push_back({rng.next_below(3), rng.next_below(3) + 1, 2});
  }
  SignificanceResult s1 = sign_test(a, b, 100, 77);
  SignificanceResult s2 = sign_test(a, b, 100, 77);
  CHECK(s1.p_value == s2.p_value);
  CHECK(s1.wins_a == s2.wins_a);
  CHECK(s1.wins_a + s1.wins_b + s1.ties == 100);
  CHECK_THROWS_AS(sign_test(a, std::vector<SentenceCounts>{}, 100, 1), Error);
}

TEST_CASE("report blocks carry the four lines plus a tsv twin") {
  EvalResult r = result_from_counts({{1, 2, 4}});
  std::string text = format_report(r);
  CHECK(text == "P 50.00\nR 25.00\nF0.5 41.67\nmatched/proposed/gold 1/2/4\n");
  CHECK(format_report_tsv(r).find("0.500000\t0.250000") != std::string::npos);
}

TEST_SUITE_END();
