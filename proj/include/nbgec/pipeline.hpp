#ifndef NBGEC_PIPELINE_HPP
#define NBGEC_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nbgec/annotate.hpp"
#include "nbgec/corpus.hpp"
#include "nbgec/cw.hpp"
#include "nbgec/decision.hpp"
#include "nbgec/eval.hpp"
#include "nbgec/features.hpp"
#include "nbgec/ngram_lm.hpp"
#include "nbgec/synth.hpp"

namespace nbgec {

// Flat key=value configuration; command-line flags override file values and
// the NBGEC_CONFIG environment variable supplies a default path.
struct PipelineConfig {
  std::string train_annotated, dev_annotated, test_annotated;
  std::string train_nbest, dev_nbest, test_nbest;
  std::string lm_corpus;
  std::string annotations;  // empty -> builtin provider
  std::string out_dir = "out";

  int lm_order = 5;
  double lm_backoff = 0.4;
  double lm_oov = -7.0;

  FeatureGroups groups;
  int min_count = 1;

  int cw_epochs = 10;
  double cw_eta = 0.9;
  double cw_variance = 1.0;
  std::uint64_t cw_seed = 1;

  std::vector<int> rerank_ns = {5, 10};
  std::vector<int> select_ns = {1, 2, 3, 4, 5};
  std::uint64_t mert_seed = 2;

  int significance_samples = 100;
  std::uint64_t significance_seed = 3;

  int jobs = 1;

  static PipelineConfig from_file(const std::string& path);
  void apply(const std::map<std::string, std::string>& overrides);
};

FeatureGroups parse_groups(std::string_view csv);
std::string groups_to_string(FeatureGroups g);

// ---- corpus-level stages (parallel over sentences, source-order merge) ----

std::vector<Sentence> sources_of(const Dataset& d);

// Labeled examples for every sentence, flattened in corpus order.
std::vector<LabeledExample> featurize_corpus(
    std::span<const NBestList> lists, std::span<const AnnotatedSentence> gold,
    const FeatureContext& ctx, int jobs);

// Scored per-sentence analyses for a whole corpus.
std::vector<SentenceAnalysis> analyze_corpus(std::span<const NBestList> lists,
                                             const FeatureContext& ctx,
                                             const FeatureDictionary& dict,
                                             const CWModel& model, int jobs);

std::vector<Correction> correct_corpus(
    std::span<const SentenceAnalysis> analyses, const DecisionConfig& cfg,
    const LogLinearWeights* w, int jobs);

// Decision threshold maximizing dev F0.5 of full-list edit selection.
double tune_threshold_on(std::span<const SentenceAnalysis> dev,
                         std::span<const AnnotatedSentence> gold, int jobs);

// ---- whole-experiment drivers ----

struct ReportRow {
  std::string system;
  int n = 0;
  EvalResult result;
  std::optional<double> p_vs_baseline;
};

struct PipelineResult {
  std::vector<ReportRow> rows;
  double tuned_tau = 0.0;
  LogLinearWeights tuned_weights;
  std::string report_text;
  std::string report_tsv;
};

// train-lm -> featurize -> train-classifier -> tune-threshold ->
// tune-weights -> {baseline, rerank, select} -> evaluate. Writes all
// artifacts under cfg.out_dir.
PipelineResult run_pipeline(const PipelineConfig& cfg);

struct AblationRow {
  std::string variant;
  FeatureGroups groups;
  double accuracy = 0.0;
};

struct AblationResult {
  std::vector<AblationRow> rows;
  std::string report_text;
  std::string report_tsv;
};

// Classifier accuracy on dev edits for the full feature set and for each
// feature group removed in turn.
AblationResult run_ablation(const PipelineConfig& cfg);

// Writes <out-dir>/{train,dev,test}.{m2,src,nbest}, lm_corpus.txt and a
// ready-to-run pipeline.cfg.
struct SynthConfig {
  std::string out_dir = "data";
  std::uint64_t seed = 42;
  int train = 2000, dev = 300, test = 300;
  int grammar_size = 10;
  int nbest = 5;
};
void run_synth(const SynthConfig& sc);

}  // namespace nbgec

#endif  // NBGEC_PIPELINE_HPP
