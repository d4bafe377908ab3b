#ifndef NBGEC_EVAL_HPP
#define NBGEC_EVAL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nbgec/edit.hpp"

namespace nbgec {

// Per-sentence suffient statistics: matched system edits, proposed system
// edits, gold edits of the chosen annotator.
struct SentenceCounts {
  std::uint64_t matched = 0;
  std::uint64_t proposed = 0;
  std::uint64_t gold = 0;

  bool operator==(const SentenceCounts&) const = default;
};

struct EvalResult {
  double precision = 0.0;
  double recall = 0.0;
  double f05 = 0.0;
  std::uint64_t matched = 0;
  std::uint64_t proposed = 0;
  std::uint64_t gold_count = 0;
  std::vector<SentenceCounts> per_sentence;
};

// Weighted F measure; 0 when the denominator vanishes.
double f_beta(double p, double r, double beta);

// Corpus precision/recall/F0.5 from accumulated counts. Zero denominators
// follow scorer convention: no proposals -> P = 1, no gold -> R = 1.
EvalResult result_from_counts(std::vector<SentenceCounts> counts);
double corpus_f05(std::span<const SentenceCounts> counts);

// Scores system edits against multi-annotator gold. Per sentence the
// annotator maximizing (matched, then fewer gold edits, then lower id) is
// chosen; matching is exact span + replacement equality.
EvalResult evaluate(std::span<const AnnotatedSentence> gold,
                    std::span<const std::vector<Edit>> system_edits);

struct SignificanceResult {
  double p_value = 1.0;
  int wins_a = 0;
  int wins_b = 0;
  int ties = 0;
};

// One-tailed sign test with bootstrap resampling: `samples` seeded resamples
// of the sentence set (with replacement); a win for A is a resample where
// A's corpus F0.5 strictly exceeds B's. p = (#{F_A <= F_B} + 1)/(samples+1).
SignificanceResult sign_test(std::span<const SentenceCounts> a,
                             std::span<const SentenceCounts> b,
                             int samples = 100, std::uint64_t seed = 1);

// Human-readable block plus a one-line tab-separated record.
std::string format_report(const EvalResult& r);
std::string format_report_tsv(const EvalResult& r);

}  // namespace nbgec

#endif  // NBGEC_EVAL_HPP
