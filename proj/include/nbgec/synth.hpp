#ifndef NBGEC_SYNTH_HPP
#define NBGEC_SYNTH_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nbgec/corpus.hpp"

namespace nbgec {

// Error types produced by the generator. Triggers and corruptions are built
// in per type: SVA swaps verb agreement, ArtOrDet swaps/deletes/inserts
// articles, Prep replaces a preposition with one the verb does not select,
// Nn toggles noun number, Vform bends a verb into its -ing form.
struct ErrorRule {
  std::string error_type;  // SVA | ArtOrDet | Prep | Nn | Vform
  double probability = 0.0;
};

struct ErrorModel {
  std::vector<ErrorRule> rules;
  std::uint64_t seed = 42;

  static ErrorModel standard(std::uint64_t seed);
};

// Stand-in for an upstream corrector: notices each gold error with a
// per-type probability, assigns each noticed fix an internal confidence,
// adds the occasional spurious corruption, and emits the top-n edit subsets
// ranked by total confidence (rank 1 = its own best guess).
struct SimulatedCorrector {
  std::map<std::string, double> fix_probability;  // per error type
  double default_fix_probability = 0.75;
  double noise_rate = 0.35;  // chance per attempt (two attempts/sentence)
  double fix_conf_lo = -0.3;
  double fix_conf_hi = 1.0;
  double noise_conf_lo = -1.0;
  double noise_conf_hi = 0.4;
  int n = 5;
  std::uint64_t seed = 7;

  double fix_prob(const std::string& type) const {
    auto it = fix_probability.find(type);
    return it == fix_probability.end() ? default_fix_probability : it->second;
  }
};

struct SynthCorpus {
  Dataset annotated;            // corrupted sources + gold edits
  std::vector<Sentence> clean;  // the grammatical originals, for LM training
};

// Deterministic toy corpus: sentences from a small template grammar over a
// closed vocabulary the builtin annotator tags exactly, corrupted according
// to the error model. grammar_size caps lexical variety (>= 2).
SynthCorpus generate_corpus(int grammar_size, int sentence_count,
                            const ErrorModel& em);

// Simulated n-best list for one source sentence. Deterministic given
// (sc.seed, source_id).
NBestList simulate_nbest(int source_id, const Sentence& source,
                         std::span<const GoldEdit> gold,
                         const SimulatedCorrector& sc);

std::vector<NBestList> simulate_nbest_corpus(const Dataset& d,
                                             const SimulatedCorrector& sc);

}  // namespace nbgec

#endif  // NBGEC_SYNTH_HPP
