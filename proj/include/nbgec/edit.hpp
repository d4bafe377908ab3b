#ifndef NBGEC_EDIT_HPP
#define NBGEC_EDIT_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbgec/corpus.hpp"

namespace nbgec {

// A phrase edit on a tokenized source sentence: the tokens at `span` are
// replaced by `replacement`. No-op edits (identical sides) are never
// constructed.
struct Edit {
  TokenSpan span;
  std::vector<Token> source_tokens;  // source slice at span
  std::vector<Token> replacement;
  int hyp_rank = 0;  // lowest hypothesis rank carrying this edit; 0 = unset
  std::optional<double> score;  // classifier margin, filled after scoring

  bool same_change(const Edit& other) const {
    return span == other.span && replacement == other.replacement;
  }
};

// Orders edits by (span, replacement); used for deduplication and for
// deterministic output.
bool edit_key_less(const Edit& a, const Edit& b);

// Extracts the phrase edits turning `source` into `hypothesis`. Token-level
// alignment with unit costs; maximal runs of consecutive non-match operations
// merge into one phrase edit. Guarantees: edits are pairwise non-conflicting,
// sorted by span start, and apply_edits(source, edits) == hypothesis.
std::vector<Edit> extract_edits(const Sentence& source,
                                const Sentence& hypothesis);

// Applies pairwise non-conflicting edits to `source` (right to left, so
// spans stay valid). Throws Error on conflicting edits or when an edit's
// source_tokens disagree with the sentence.
Sentence apply_edits(const Sentence& source, std::span<const Edit> edits);

bool overlaps(const Edit& a, const Edit& b);

// Strict match predicate against a gold edit: identical span and identical
// replacement token sequence (exact byte comparison).
bool edit_equal(const Edit& e, const GoldEdit& g);

// Edit list file: one edit per line,
// "<sentence_id>\t<start>\t<end>\t<source phrase>\t<replacement>\t<rank>\t<score-or-NA>".
struct SentenceEdit {
  int sentence_id = 0;
  Edit edit;
};
std::string serialize_edit_list(std::span<const SentenceEdit> edits);
std::vector<SentenceEdit> parse_edit_list(std::string_view text);

}  // namespace nbgec

#endif  // NBGEC_EDIT_HPP
