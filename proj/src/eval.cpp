#include "nbgec/eval.hpp"

#include <cmath>
#include <cstdio>

#include "nbgec/util.hpp"

namespace nbgec {

double f_beta(double p, double r, double beta) {
  const double b2 = beta * beta;
  const double den = r + b2 * p;
  if (den == 0.0) return 0.0;
  return (1.0 + b2) * r * p / den;
}

namespace {

void fill_prf(EvalResult& r) {
  r.precision = r.proposed == 0 ? 1.0
                                : double(r.matched) / double(r.proposed);
  r.recall = r.gold_count == 0 ? 1.0
                               : double(r.matched) / double(r.gold_count);
  r.f05 = f_beta(r.precision, r.recall, 0.5);
}

}  // namespace

EvalResult result_from_counts(std::vector<SentenceCounts> counts) {
  EvalResult r;
  for (const SentenceCounts& c : counts) {
    r.matched += c.matched;
    r.proposed += c.proposed;
    r.gold_count += c.gold;
  }
  fill_prf(r);
  r.per_sentence = std::move(counts);
  return r;
}

double corpus_f05(std::span<const SentenceCounts> counts) {
  std::uint64_t matched = 0, proposed = 0, gold = 0;
  for (const SentenceCounts& c : counts) {
    matched += c.matched;
    proposed += c.proposed;
    gold += c.gold;
  }
  double p = proposed == 0 ? 1.0 : double(matched) / double(proposed);
  double r = gold == 0 ? 1.0 : double(matched) / double(gold);
  return f_beta(p, r, 0.5);
}

EvalResult evaluate(std::span<const AnnotatedSentence> gold,
                    std::span<const std::vector<Edit>> system_edits) {
  if (gold.size() != system_edits.size())
    throw Error("gold/system sentence counts differ");

  std::vector<SentenceCounts> counts(gold.size());
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto& edits = system_edits[s];
    for (const Edit& e : edits)
      if (e.span.start > e.span.end || e.span.end > gold[s].source.size())
        throw Error("system edit span out of bounds in sentence " +
                    std::to_string(s));

    bool first = true;
    SentenceCounts best;
    for (const auto& [annotator, gold_edits] : gold[s].annotations) {
      (void)annotator;
      SentenceCounts c;
      c.proposed = edits.size();
      c.gold = gold_edits.size();
      for (const Edit& e : edits)
        for (const GoldEdit& g : gold_edits)
          if (edit_equal(e, g)) {
            ++c.matched;
            break;
          }
      // Prefer more matches, then fewer gold edits; map order gives the
      // lowest annotator id on remaining ties.
      if (first || c.matched > best.matched ||
          (c.matched == best.matched && c.gold < best.gold)) {
        best = c;
        first = false;
      }
    }
    counts[s] = best;
  }
  return result_from_counts(std::move(counts));
}

SignificanceResult sign_test(std::span<const SentenceCounts> a,
                             std::span<const SentenceCounts> b, int samples,
                             std::uint64_t seed) {
  if (a.size() != b.size())
    throw Error("sign test requires aligned per-sentence results");
  if (a.empty()) throw Error("sign test over zero sentences");

  SignificanceResult res;
  Rng rng(seed);
  std::vector<SentenceCounts> ra(a.size()), rb(b.size());
  for (int s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::size_t j = std::size_t(rng.next_below(a.size()));
      ra[i] = a[j];
      rb[i] = b[j];
    }
    double fa = corpus_f05(ra), fb = corpus_f05(rb);
    if (fa > fb)
      ++res.wins_a;
    else if (fb > fa)
      ++res.wins_b;
    else
      ++res.ties;
  }
  res.p_value = double(samples - res.wins_a + 1) / double(samples + 1);
  return res;
}

namespace {

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v * 100.0);
  return buf;
}

}  // namespace

std::string format_report(const EvalResult& r) {
  return "P " + pct(r.precision) + "\nR " + pct(r.recall) + "\nF0.5 " +
         pct(r.f05) + "\nmatched/proposed/gold " + std::to_string(r.matched) +
         "/" + std::to_string(r.proposed) + "/" +
         std::to_string(r.gold_count) + "\n";
}

std::string format_report_tsv(const EvalResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\t%.6f\t%llu\t%llu\t%llu\n",
                r.precision, r.recall, r.f05,
                (unsigned long long)r.matched, (unsigned long long)r.proposed,
                (unsigned long long)r.gold_count);
  return buf;
}

}  // namespace nbgec
