#ifndef NBGEC_CORPUS_HPP
#define NBGEC_CORPUS_HPP

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nbgec/util.hpp"

namespace nbgec {

// Tokens are opaque UTF-8 byte strings, compared exactly. A valid token is
// nonempty and contains no whitespace.
using Token = std::string;
using Sentence = std::vector<Token>;

std::string join_tokens(const Sentence& s);
Sentence split_tokens(std::string_view line);

// Half-open token interval [start, end) into a source sentence.
struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool empty() const { return start == end; }
  auto operator<=>(const TokenSpan&) const = default;
};

// Two span edits conflict when their intervals intersect, when both are
// zero-width at the same position, or when a zero-width span sits strictly
// inside the other. Insertions touching a replaced region cannot be applied
// in a well-defined order, hence the zero-width rules.
bool spans_conflict(TokenSpan a, TokenSpan b);

// One annotator's correction: replace the source tokens at `span` with
// `replacement` (empty replacement = deletion, empty span = insertion).
struct GoldEdit {
  TokenSpan span;
  std::vector<Token> replacement;
  std::string error_type;

  bool operator==(const GoldEdit&) const = default;
};

struct AnnotatedSentence {
  Sentence source;
  // annotator id -> gold edits sorted by span; edits of one annotator are
  // pairwise non-conflicting. Always holds at least one annotator (possibly
  // with an empty edit set) so recall denominators count error-free
  // sentences.
  std::map<int, std::vector<GoldEdit>> annotations;

  bool operator==(const AnnotatedSentence&) const = default;
};

struct Dataset {
  std::vector<AnnotatedSentence> sentences;

  bool operator==(const Dataset&) const = default;
};

struct NBestEntry {
  int rank = 0;  // 1 = decoder's best
  Sentence hypothesis;
  std::vector<double> features;  // values for NBestList::feature_names
  double decoder_score = 0.0;

  bool operator==(const NBestEntry&) const = default;
};

struct NBestList {
  int source_id = 0;
  Sentence source;
  std::vector<std::string> feature_names;  // schema, fixed per corpus
  std::vector<NBestEntry> entries;         // ranks 1..k, ascending

  bool operator==(const NBestList&) const = default;
};

// Annotated corpus format: "S <tokens>" followed by zero or more
// "A <start> <end>|||<type>|||<replacement>|||REQUIRED|||-NONE-|||<annotator>"
// lines, blank line between sentences.
Dataset parse_annotated(std::string_view text);
std::string serialize_annotated(const Dataset& d);

// N-best format: "<source_id> ||| <hypothesis> ||| <name= value ...> |||
// <score>", one entry per line, grouped by source id. Sources come from a
// companion file, one tokenized sentence per line; every source must have at
// least one hypothesis.
std::vector<NBestList> parse_nbest(std::string_view text,
                                   std::span<const Sentence> sources);
std::string serialize_nbest(std::span<const NBestList> lists);

// Plain tokenized text, one sentence per line.
std::vector<Sentence> parse_plain(std::string_view text);
std::string serialize_plain(std::span<const Sentence> sentences);

}  // namespace nbgec

#endif  // NBGEC_CORPUS_HPP
