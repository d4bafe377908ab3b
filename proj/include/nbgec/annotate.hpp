#ifndef NBGEC_ANNOTATE_HPP
#define NBGEC_ANNOTATE_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nbgec/corpus.hpp"

namespace nbgec {

// Per-token POS tags (Penn style) plus the head positions of noun and verb
// phrases, as consumed by the context features.
struct TokenAnnotations {
  std::vector<std::string> pos;     // one tag per token
  std::vector<std::size_t> np_heads;  // sorted, in-bounds
  std::vector<std::size_t> vp_heads;  // sorted, in-bounds

  bool operator==(const TokenAnnotations&) const = default;
};

// Rule-based tagger: closed-class lexicon, a small verb/irregular-form list,
// suffix rules, default NN. Covers the synthetic grammar exactly; real
// experiments should feed parser output through the file backend.
std::string builtin_pos_tag(const Token& token);
std::vector<std::string> builtin_pos_tags(const Sentence& s);

// NP = maximal DT? JJ* NN+ run, head = last noun.
// VP = maximal MD/TO/VB* run, head = last VB* token.
std::vector<std::size_t> chunk_np_heads(std::span<const std::string> pos);
std::vector<std::size_t> chunk_vp_heads(std::span<const std::string> pos);

TokenAnnotations builtin_annotations(const Sentence& s);

// Largest head strictly left of the edit start, if any.
std::optional<std::size_t> nearest_head_left(
    std::span<const std::size_t> heads, std::size_t edit_start);
// Smallest head at or after the edit end, if any.
std::optional<std::size_t> nearest_head_right(
    std::span<const std::size_t> heads, std::size_t edit_end);

// Supplies annotations either from precomputed blocks (keyed by the exact
// token sequence) or from the builtin rules. Immutable after construction;
// annotate() is safe to call concurrently.
class AnnotationProvider {
public:
  static AnnotationProvider builtin();
  // Annotation file: per sentence a tokens line, a POS line with the same
  // arity, and a heads line "NP:<i,...> VP:<k,...>", blank line between
  // blocks.
  static AnnotationProvider from_file(std::string_view text);

  TokenAnnotations annotate(const Sentence& s) const;
  bool is_builtin() const { return builtin_; }

private:
  AnnotationProvider() = default;
  bool builtin_ = true;
  std::unordered_map<std::string, TokenAnnotations> table_;
};

std::string serialize_annotations(
    std::span<const Sentence> sentences,
    std::span<const TokenAnnotations> annotations);

}  // namespace nbgec

#endif  // NBGEC_ANNOTATE_HPP
