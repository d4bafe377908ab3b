#ifndef NBGEC_FEATURES_HPP
#define NBGEC_FEATURES_HPP

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nbgec/annotate.hpp"
#include "nbgec/corpus.hpp"
#include "nbgec/edit.hpp"
#include "nbgec/ngram_lm.hpp"

namespace nbgec {

// Sentinels used in categorical templates.
inline constexpr std::string_view kNullValue = "NULL";   // missing neighbor/head
inline constexpr std::string_view kEmptyPhrase = "<eps>";  // empty edit side

struct FeatureGroups {
  bool smt = true;          // hypothesis rank
  bool lexical_pos = true;  // edit phrases and their POS
  bool context = true;      // neighbors and NP/VP heads
  bool lm = true;           // language model scores

  static FeatureGroups all() { return {}; }
  static FeatureGroups only_lm() { return {false, false, false, true}; }
  bool any() const { return smt || lexical_pos || context || lm; }

  bool operator==(const FeatureGroups&) const = default;
};

// Sparse categorical indicators ("template=value" strings, emission order
// preserved) plus named dense numerical features.
struct FeatureVector {
  std::vector<std::string> categorical;
  std::vector<std::pair<std::string, double>> numerical;

  bool operator==(const FeatureVector&) const = default;
};

// Everything feature extraction needs besides the edit itself.
struct FeatureContext {
  const NGramModel* lm = nullptr;
  const AnnotationProvider* annotations = nullptr;
  FeatureGroups groups;
};

// Emits the feature templates for the enabled groups. The edit's context is
// the source sentence; the "hypothesis sentence" LM features score the
// source with this single edit applied. Rank comes from edit.hyp_rank (the
// lowest rank when the same edit occurs in several hypotheses).
FeatureVector extract_features(const Edit& edit, const Sentence& source,
                               const NBestList& nbest,
                               const TokenAnnotations& ann,
                               const NGramModel& lm, FeatureGroups groups);

struct LabeledExample {
  FeatureVector vector;
  bool valid = false;
  int sentence_id = 0;
  Edit edit;
};

// Pools the edits of every hypothesis, deduplicated by (span, replacement)
// with hyp_rank kept at the lowest occurrence, and labels each valid iff it
// exactly matches a gold edit of any annotator.
std::vector<LabeledExample> label_edits(const NBestList& nbest,
                                        const AnnotatedSentence& gold,
                                        const FeatureContext& ctx);

// Maps categorical feature strings to dense ids (first occurrence order) and
// records standardization statistics for the numerical features.
struct FeatureDictionary {
  std::unordered_map<std::string, int> index;
  std::vector<std::string> names;  // id -> feature string
  struct NumStat {
    std::string name;
    double mean = 0.0;
    double stddev = 1.0;
  };
  std::vector<NumStat> numerical;

  std::size_t dim() const { return names.size() + numerical.size(); }

  std::string to_string() const;
  static FeatureDictionary from_string(std::string_view text);
};

FeatureDictionary build_dictionary(std::span<const LabeledExample> examples,
                                   int min_count = 1);

// Sparse indexed vector, sorted by id. Categorical hits contribute 1.0;
// unknown categorical strings are dropped; numerical features are
// standardized and placed after all categorical ids.
using SparseVector = std::vector<std::pair<int, double>>;
SparseVector vectorize(const FeatureVector& v, const FeatureDictionary& d);

// Labeled example file: one per line, "<label 0/1>\t<sentence_id>\t<start>\t
// <end>\t<source phrase>\t<replacement>\t<rank>\t<cat features ;-joined>\t
// <name=value numeric pairs space-joined>".
std::string serialize_examples(std::span<const LabeledExample> examples);
std::vector<LabeledExample> parse_examples(std::string_view text);

}  // namespace nbgec

#endif  // NBGEC_FEATURES_HPP
