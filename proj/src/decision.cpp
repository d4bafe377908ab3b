#include "nbgec/decision.hpp"

#include <algorithm>
#include <cmath>

#include "nbgec/parallel.hpp"

namespace nbgec {

LogLinearWeights LogLinearWeights::identity_for(
    std::span<const std::string> decoder_features) {
  LogLinearWeights w;
  w.names.assign(decoder_features.begin(), decoder_features.end());
  w.names.emplace_back(kEditFeatureName);
  w.lambda.assign(w.names.size(), 1.0);
  w.lambda.back() = 0.0;
  return w;
}

void LogLinearWeights::check_schema(const NBestList& nbest) const {
  bool ok = names.size() == nbest.feature_names.size() + 1 &&
            std::equal(nbest.feature_names.begin(),
                       nbest.feature_names.end(), names.begin()) &&
            names.back() == kEditFeatureName;
  if (!ok)
    throw Error("weight schema does not match the n-best decoder features");
}

std::string LogLinearWeights::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i)
    out += names[i] + "=" + format_double(lambda[i]) + "\n";
  return out;
}

LogLinearWeights LogLinearWeights::from_string(std::string_view text) {
  LogLinearWeights w;
  std::size_t lineno = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected name=value", lineno);
    w.names.emplace_back(line.substr(0, eq));
    w.lambda.push_back(parse_double(line.substr(eq + 1), lineno));
  }
  if (w.names.empty() || w.names.back() != kEditFeatureName)
    throw ParseError("weights file must end with " +
                     std::string(kEditFeatureName));
  return w;
}

SentenceAnalysis analyze_sentence(const NBestList& nbest,
                                  const EditScorer& scorer) {
  SentenceAnalysis a;
  a.nbest = &nbest;
  a.entry_edits.resize(nbest.entries.size());

  for (std::size_t k = 0; k < nbest.entries.size(); ++k) {
    const NBestEntry& entry = nbest.entries[k];
    for (Edit& e : extract_edits(nbest.source, entry.hypothesis)) {
      e.hyp_rank = entry.rank;
      auto it = std::find_if(a.pool.begin(), a.pool.end(),
                             [&](const Edit& p) { return p.same_change(e); });
      if (it == a.pool.end()) {
        a.pool.push_back(std::move(e));
        it = std::prev(a.pool.end());
      } else if (e.hyp_rank < it->hyp_rank) {
        it->hyp_rank = e.hyp_rank;
      }
      a.entry_edits[k].push_back(std::size_t(it - a.pool.begin()));
    }
  }

  // Score each distinct edit once, then average per hypothesis.
  for (Edit& e : a.pool) e.score = scorer(e);
  a.entry_edit_feature.assign(nbest.entries.size(), 0.0);
  for (std::size_t k = 0; k < nbest.entries.size(); ++k) {
    const auto& ids = a.entry_edits[k];
    if (ids.empty()) continue;
    double sum = 0.0;
    for (std::size_t id : ids) sum += *a.pool[id].score;
    a.entry_edit_feature[k] = sum / double(ids.size());
  }
  return a;
}

EditScorer make_classifier_scorer(const Sentence& source,
                                  const NBestList& nbest,
                                  const TokenAnnotations& ann,
                                  const FeatureContext& ctx,
                                  const FeatureDictionary& dict,
                                  const CWModel& model) {
  return [&source, &nbest, &ann, &ctx, &dict, &model](const Edit& e) {
    FeatureVector v =
        extract_features(e, source, nbest, ann, *ctx.lm, ctx.groups);
    return score(model, vectorize(v, dict));
  };
}

double hypothesis_edit_feature(const SentenceAnalysis& a,
                               std::size_t entry_index) {
  return a.entry_edit_feature[entry_index];
}

namespace {

double combined_score(const SentenceAnalysis& a, const LogLinearWeights& w,
                      std::size_t entry_index) {
  const NBestEntry& entry = a.nbest->entries[entry_index];
  double s = 0.0;
  for (std::size_t i = 0; i < entry.features.size(); ++i)
    s += w.lambda[i] * entry.features[i];
  s += w.lambda.back() * a.entry_edit_feature[entry_index];
  return s;
}

}  // namespace

std::vector<std::size_t> rescore(const SentenceAnalysis& a,
                                 const LogLinearWeights& w, int n) {
  w.check_schema(*a.nbest);
  std::size_t limit = a.nbest->entries.size();
  if (n > 0) limit = std::min(limit, std::size_t(n));

  std::vector<std::pair<double, std::size_t>> scored(limit);
  for (std::size_t k = 0; k < limit; ++k)
    scored[k] = {combined_score(a, w, k), k};
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& x, const auto& y) {
                     return x.first > y.first;  // ties keep original rank
                   });
  std::vector<std::size_t> order(limit);
  for (std::size_t k = 0; k < limit; ++k) order[k] = scored[k].second;
  return order;
}

namespace {

bool selection_priority(const Edit& x, const Edit& y) {
  double sx = *x.score, sy = *y.score;
  if (sx != sy) return sx > sy;
  if (x.span.start != y.span.start) return x.span.start < y.span.start;
  if (x.hyp_rank != y.hyp_rank) return x.hyp_rank < y.hyp_rank;
  if (x.replacement != y.replacement) return x.replacement < y.replacement;
  return x.span.end < y.span.end;
}

}  // namespace

std::vector<Edit> select_edits(const SentenceAnalysis& a, double tau, int n) {
  std::vector<Edit> candidates;
  for (const Edit& e : a.pool)
    if (e.hyp_rank <= n && *e.score >= tau) candidates.push_back(e);
  std::sort(candidates.begin(), candidates.end(), selection_priority);

  std::vector<Edit> accepted;
  for (const Edit& e : candidates) {
    bool conflict = false;
    for (const Edit& kept : accepted)
      if (overlaps(e, kept)) {
        conflict = true;
        break;
      }
    if (!conflict) accepted.push_back(e);
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const Edit& x, const Edit& y) { return x.span < y.span; });
  return accepted;
}

DecisionMode parse_mode(std::string_view name) {
  if (name == "baseline" || name == "baseline_1best")
    return DecisionMode::Baseline;
  if (name == "rerank") return DecisionMode::Rerank;
  if (name == "select") return DecisionMode::Select;
  throw Error("unknown decision mode \"" + std::string(name) + "\"");
}

std::string_view mode_name(DecisionMode m) {
  switch (m) {
    case DecisionMode::Baseline: return "baseline";
    case DecisionMode::Rerank: return "rerank";
    case DecisionMode::Select: return "select";
  }
  return "?";
}

Correction correct(const SentenceAnalysis& a, const DecisionConfig& cfg,
                   const LogLinearWeights* w) {
  Correction c;
  switch (cfg.mode) {
    case DecisionMode::Baseline: {
      c.sentence = a.nbest->entries.front().hypothesis;
      for (std::size_t id : a.entry_edits.front())
        c.edits.push_back(a.pool[id]);
      break;
    }
    case DecisionMode::Rerank: {
      if (!w) throw Error("rerank mode needs log-linear weights");
      std::size_t best = rescore(a, *w, cfg.n).front();
      c.sentence = a.nbest->entries[best].hypothesis;
      for (std::size_t id : a.entry_edits[best]) c.edits.push_back(a.pool[id]);
      break;
    }
    case DecisionMode::Select: {
      c.edits = select_edits(a, cfg.tau, cfg.n);
      c.sentence = apply_edits(a.nbest->source, c.edits);
      break;
    }
  }
  std::sort(c.edits.begin(), c.edits.end(),
            [](const Edit& x, const Edit& y) { return x.span < y.span; });
  return c;
}

namespace {

// Sentence counts of picking entry `k`, with the annotator chosen per the
// evaluator's rule; precomputable because it does not depend on the weights.
SentenceCounts entry_counts(const SentenceAnalysis& a,
                            const AnnotatedSentence& gold, std::size_t k) {
  SentenceCounts best;
  bool first = true;
  for (const auto& [annotator, gold_edits] : gold.annotations) {
    (void)annotator;
    SentenceCounts c;
    c.proposed = a.entry_edits[k].size();
    c.gold = gold_edits.size();
    for (std::size_t id : a.entry_edits[k])
      for (const GoldEdit& g : gold_edits)
        if (edit_equal(a.pool[id], g)) {
          ++c.matched;
          break;
        }
    if (first || c.matched > best.matched ||
        (c.matched == best.matched && c.gold < best.gold)) {
      best = c;
      first = false;
    }
  }
  return best;
}

struct TuneCache {
  // per sentence, per entry: counts when that entry wins the rerank
  std::vector<std::vector<SentenceCounts>> counts;
};

double objective(std::span<const SentenceAnalysis> dev, const TuneCache& cache,
                 const LogLinearWeights& w, int jobs,
                 std::vector<SentenceCounts>& scratch) {
  parallel_for(dev.size(), jobs, [&](std::size_t s) {
    const SentenceAnalysis& a = dev[s];
    std::size_t best = 0;
    double best_score = combined_score(a, w, 0);
    for (std::size_t k = 1; k < a.nbest->entries.size(); ++k) {
      double sc = combined_score(a, w, k);
      if (sc > best_score) {  // strict: ties keep the lower original rank
        best_score = sc;
        best = k;
      }
    }
    scratch[s] = cache.counts[s][best];
  });
  return corpus_f05(scratch);
}

}  // namespace

LogLinearWeights tune_weights(std::span<const SentenceAnalysis> dev,
                              std::span<const AnnotatedSentence> gold,
                              const LogLinearWeights& init,
                              std::uint64_t seed, int jobs) {
  if (dev.empty()) throw Error("cannot tune weights on an empty dev set");
  if (dev.size() != gold.size())
    throw Error("dev n-best lists and gold annotations differ in size");
  for (const SentenceAnalysis& a : dev) init.check_schema(*a.nbest);

  TuneCache cache;
  cache.counts.resize(dev.size());
  parallel_for(dev.size(), jobs, [&](std::size_t s) {
    const SentenceAnalysis& a = dev[s];
    cache.counts[s].resize(a.nbest->entries.size());
    for (std::size_t k = 0; k < a.nbest->entries.size(); ++k)
      cache.counts[s][k] = entry_counts(a, gold[s], k);
  });

  std::vector<SentenceCounts> scratch(dev.size());
  LogLinearWeights best = init;
  double best_f = -1.0;

  for (int restart = 0; restart < 3; ++restart) {
    LogLinearWeights w = init;
    Rng rng(derive_seed(seed, std::uint64_t(restart)));
    if (restart > 0)
      for (double& v : w.lambda) v += rng.next_real(-0.5, 0.5);

    double current = objective(dev, cache, w, jobs, scratch);
    for (int sweep = 0; sweep < 10; ++sweep) {
      double sweep_start = current;
      for (std::size_t j = 0; j < w.lambda.size(); ++j) {
        const double center = w.lambda[j];
        double arg_best = center, f_best = current;
        for (int step = 0; step <= 50; ++step) {
          double v = center - 1.0 + double(step) * (2.0 / 50.0);
          w.lambda[j] = v;
          double f = objective(dev, cache, w, jobs, scratch);
          if (f > f_best) {
            f_best = f;
            arg_best = v;
          }
        }
        w.lambda[j] = arg_best;
        current = f_best;
      }
      if (current - sweep_start < 1e-6) break;
    }
    if (current > best_f) {
      best_f = current;
      best = w;
    }
  }
  return best;
}

}  // namespace nbgec
