#ifndef NBGEC_DECISION_HPP
#define NBGEC_DECISION_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nbgec/cw.hpp"
#include "nbgec/eval.hpp"
#include "nbgec/features.hpp"

namespace nbgec {

// Name of the classifier-average feature appended to the decoder features.
inline constexpr std::string_view kEditFeatureName = "edit_classifier_avg";

// Log-linear weights over the decoder feature schema plus the edit
// classifier average.
struct LogLinearWeights {
  std::vector<std::string> names;
  std::vector<double> lambda;

  static LogLinearWeights identity_for(
      std::span<const std::string> decoder_features);
  double edit_weight() const { return lambda.back(); }
  void check_schema(const NBestList& nbest) const;

  std::string to_string() const;
  static LogLinearWeights from_string(std::string_view text);
};

using EditScorer = std::function<double(const Edit&)>;

// Per-sentence cache shared by reranking, selection, and tuning: the
// deduplicated scored edit pool plus, for each hypothesis, its edits and the
// Eq.-style average classifier score.
struct SentenceAnalysis {
  const NBestList* nbest = nullptr;
  std::vector<Edit> pool;  // distinct edits, lowest rank, scores filled
  std::vector<std::vector<std::size_t>> entry_edits;  // pool indices per entry
  std::vector<double> entry_edit_feature;  // mean pool score per entry
};

// Builds the pool over the whole list, scores each distinct edit once with
// `scorer`, and averages per hypothesis (0.0 for an edit-free hypothesis).
SentenceAnalysis analyze_sentence(const NBestList& nbest,
                                  const EditScorer& scorer);

// Convenience scorer: Table-2 features -> dictionary -> classifier margin.
EditScorer make_classifier_scorer(const Sentence& source,
                                  const NBestList& nbest,
                                  const TokenAnnotations& ann,
                                  const FeatureContext& ctx,
                                  const FeatureDictionary& dict,
                                  const CWModel& model);

double hypothesis_edit_feature(const SentenceAnalysis& a,
                               std::size_t entry_index);

// Rescoring order over the first `n` entries (0 = all): combined score is
// sum_i lambda_i h_i plus the edit weight times the hypothesis edit feature;
// descending, stable in the original rank.
std::vector<std::size_t> rescore(const SentenceAnalysis& a,
                                 const LogLinearWeights& w, int n = 0);

// Greedy edit selection over pool edits with hyp_rank <= n and score >= tau:
// highest score first (ties: span start, hyp_rank, replacement, span end),
// skipping anything conflicting with an accepted edit. Returned sorted by
// span start.
std::vector<Edit> select_edits(const SentenceAnalysis& a, double tau, int n);

enum class DecisionMode { Baseline, Rerank, Select };

DecisionMode parse_mode(std::string_view name);
std::string_view mode_name(DecisionMode m);

struct DecisionConfig {
  DecisionMode mode = DecisionMode::Baseline;
  int n = 1;         // hypotheses considered
  double tau = 0.0;  // selection threshold
};

struct Correction {
  Sentence sentence;
  std::vector<Edit> edits;
};

// Applies one strategy to one sentence. Rerank requires weights.
Correction correct(const SentenceAnalysis& a, const DecisionConfig& cfg,
                   const LogLinearWeights* w);

// Coordinate line search maximizing corpus F0.5 of rerank top-1 on the dev
// set: per coordinate 51 evenly spaced values in [c-1, c+1], up to 10 full
// sweeps or until the gain drops below 1e-6, run from `init` and from two
// seeded perturbations of it, best run kept. Deterministic given the seed.
LogLinearWeights tune_weights(std::span<const SentenceAnalysis> dev,
                              std::span<const AnnotatedSentence> gold,
                              const LogLinearWeights& init,
                              std::uint64_t seed, int jobs = 1);

}  // namespace nbgec

#endif  // NBGEC_DECISION_HPP
