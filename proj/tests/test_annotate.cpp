#include <doctest.h>

#include <algorithm>

#include "nbgec/annotate.hpp"
#include "test_util.hpp"

using namespace nbgec;
using nbgec::test::sent;

TEST_SUITE_BEGIN("annotate");

namespace {

bool contains(std::span<const std::size_t> v, std::size_t x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

TEST_CASE("builtin analyzer finds the example NP and VP heads") {
  TokenAnnotations ann =
      builtin_annotations(sent("the cat waits on the dog and eats a mouse ."));
  CHECK(contains(ann.np_heads, 1));   // cat
  CHECK(contains(ann.np_heads, 5));   // dog
  CHECK(contains(ann.np_heads, 9));   // mouse
  CHECK(contains(ann.vp_heads, 2));   // waits
  CHECK(contains(ann.vp_heads, 7));   // eats
  CHECK(ann.pos ==
        std::vector<std::string>{"DT", "NN", "VBZ", "IN", "DT", "NN", "CC",
                                 "VBZ", "DT", "NN", "."});
}

TEST_CASE("empty sentence gets empty annotations") {
  TokenAnnotations ann = builtin_annotations({});
  CHECK(ann.pos.empty());
  CHECK(ann.np_heads.empty());
  CHECK(ann.vp_heads.empty());
}

TEST_CASE("bare verb is a VP head and not an NP head") {
  TokenAnnotations ann = builtin_annotations(sent("run"));
  CHECK(ann.pos == std::vector<std::string>{"VB"});
  CHECK(ann.vp_heads == std::vector<std::size_t>{0});
  CHECK(ann.np_heads.empty());
}

TEST_CASE("irregular past forms are tagged VBD") {
  CHECK(builtin_pos_tag("sat") == "VBD");
  CHECK(builtin_pos_tag("waited") == "VBD");
  CHECK(builtin_pos_tag("walks") == "VBZ");
  CHECK(builtin_pos_tag("carries") == "VBZ");
  CHECK(builtin_pos_tag("walking") == "VBG");
  CHECK(builtin_pos_tag("mice") == "NNS");
  CHECK(builtin_pos_tag("cats") == "NNS");
}

TEST_CASE("nearest head left is strictly before the edit") {
  std::vector<std::size_t> heads = {1, 5};
  CHECK(nearest_head_left(heads, 2) == 1);
  CHECK_FALSE(nearest_head_left({}, 3).has_value());
  CHECK_FALSE(nearest_head_left(heads, 1).has_value());
  CHECK_FALSE(nearest_head_left(heads, 0).has_value());
}

TEST_CASE("nearest head right starts at the edit end") {
  std::vector<std::size_t> heads5 = {5};
  CHECK(nearest_head_right(std::vector<std::size_t>{1, 5}, 3) == 5);
  CHECK_FALSE(nearest_head_right(heads5, 6).has_value());
  CHECK(nearest_head_right(heads5, 5) == 5);
}

TEST_CASE("head helpers respect their bounds") {
  Rng rng(11);
  for (int iter = 0; iter < 300; ++iter) {
    std::vector<std::size_t> heads;
    for (std::size_t h = 0; h < 12; ++h)
      if (rng.next_below(3) == 0) heads.push_back(h);
    std::size_t q = rng.next_below(13);
    if (auto l = nearest_head_left(heads, q)) CHECK(*l < q);
    if (auto r = nearest_head_right(heads, q)) CHECK(*r >= q);
  }
}

TEST_CASE("builtin annotation is deterministic") {
  Sentence s = sent("the hungry cats eat mice and sleep in the barn .");
  CHECK(builtin_annotations(s) == builtin_annotations(s));
}

TEST_CASE("file provider returns stored annotations and misses loudly") {
  std::string file =
      "the cat waits .\n"
      "DT NN VBZ .\n"
      "NP:1 VP:2\n"
      "\n"
      "dogs bark\n"
      "NNS VBP\n"
      "NP:0 VP:1\n";
  AnnotationProvider p = AnnotationProvider::from_file(file);
  TokenAnnotations ann = p.annotate(sent("the cat waits ."));
  CHECK(ann.pos == std::vector<std::string>{"DT", "NN", "VBZ", "."});
  CHECK(ann.np_heads == std::vector<std::size_t>{1});
  CHECK(ann.vp_heads == std::vector<std::size_t>{2});
  CHECK_THROWS_WITH_AS(p.annotate(sent("unknown sentence")),
                       doctest::Contains("unknown sentence"), Error);
}

TEST_CASE("annotation file round trips through the serializer") {
  std::vector<Sentence> sentences = {sent("the cat waits ."), sent("run")};
  std::vector<TokenAnnotations> anns = {
      builtin_annotations(sentences[0]), builtin_annotations(sentences[1])};
  AnnotationProvider p =
      AnnotationProvider::from_file(serialize_annotations(sentences, anns));
  CHECK(p.annotate(sentences[0]) == anns[0]);
  CHECK(p.annotate(sentences[1]) == anns[1]);
}

TEST_CASE("file provider rejects arity mismatches") {
  CHECK_THROWS_AS(
      AnnotationProvider::from_file("a b\nDT\nNP: VP:\n"), ParseError);
}

TEST_SUITE_END();
