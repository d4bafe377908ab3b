#ifndef NBGEC_NGRAM_LM_HPP
#define NBGEC_NGRAM_LM_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "nbgec/corpus.hpp"

namespace nbgec {

inline constexpr std::string_view kBeginMarker = "<s>";
inline constexpr std::string_view kEndMarker = "</s>";

// Count-based language model of order 1..5 scored with stupid backoff:
// the relative frequency at the longest seen order, else backoff_factor
// times the next lower order, bottoming out at a fixed OOV floor. Scores
// are log10 and unnormalized across orders. Immutable once trained and
// safe to query concurrently.
class NGramModel {
public:
  NGramModel(int order, double backoff_factor, double oov_log10)
      : order_(order), backoff_(backoff_factor), oov_log10_(oov_log10) {}

  int order() const { return order_; }
  double backoff_factor() const { return backoff_; }
  double oov_log10() const { return oov_log10_; }
  std::uint64_t total_unigrams() const { return total_unigrams_; }

  std::uint64_t count(std::span<const Token> ngram) const;

  // Log10 score of a token sequence. With pad=true the sequence is treated
  // as a full sentence: order-1 begin markers supply left context and the
  // end marker is scored too. With pad=false the bare phrase is scored with
  // only in-phrase context (empty sequence scores 0).
  double score_sequence(std::span<const Token> tokens, bool pad) const;

  std::string to_string() const;
  static NGramModel from_string(std::string_view text);

private:
  friend NGramModel train_lm(std::span<const Sentence>, int, double, double);

  double score_token(std::span<const Token> padded, std::size_t pos) const;
  void add_count(std::span<const Token> ngram, std::uint64_t n = 1);

  int order_;
  double backoff_;
  double oov_log10_;
  std::uint64_t total_unigrams_ = 0;  // excludes begin markers
  std::unordered_map<std::string, std::uint64_t> counts_;
};

// Counts all n-grams up to `order` over the padded corpus. Deterministic and
// independent of sentence order.
NGramModel train_lm(std::span<const Sentence> corpus, int order,
                    double backoff_factor = 0.4, double oov_log10 = -7.0);

// score(b, padded) - score(a, padded); the sentence-level fluency change.
double lm_delta(const NGramModel& m, const Sentence& a, const Sentence& b);

}  // namespace nbgec

#endif  // NBGEC_NGRAM_LM_HPP
