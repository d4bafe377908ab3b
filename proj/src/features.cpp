#include "nbgec/features.hpp"

#include <algorithm>
#include <cmath>

namespace nbgec {

namespace {

std::string phrase_or_eps(std::span<const Token> tokens) {
  return tokens.empty() ? std::string(kEmptyPhrase) : join_tokens(Sentence(tokens.begin(), tokens.end()));
}

std::string pos_of_phrase(std::span<const std::string> pos, TokenSpan span) {
  if (span.empty()) return std::string(kEmptyPhrase);
  std::string out;
  for (std::size_t i = span.start; i < span.end; ++i) {
    if (i > span.start) out += '_';
    out += pos[i];
  }
  return out;
}

std::string pos_of_tokens(std::span<const Token> tokens) {
  if (tokens.empty()) return std::string(kEmptyPhrase);
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += '_';
    out += builtin_pos_tag(tokens[i]);
  }
  return out;
}

std::string head_token(const Sentence& source,
                       std::optional<std::size_t> head) {
  return head ? source[*head] : std::string(kNullValue);
}

}  // namespace

FeatureVector extract_features(const Edit& edit, const Sentence& source,
                               const NBestList& nbest,
                               const TokenAnnotations& ann,
                               const NGramModel& lm, FeatureGroups groups) {
  (void)nbest;  // rank travels on the edit itself
  if (ann.pos.size() != source.size())
    throw Error("annotation arity " + std::to_string(ann.pos.size()) +
                " does not match sentence length " +
                std::to_string(source.size()));

  FeatureVector v;
  auto cat = [&](std::string_view name, const std::string& value) {
    v.categorical.push_back(std::string(name) + "=" + value);
  };
  auto num = [&](std::string_view name, double value) {
    v.numerical.emplace_back(std::string(name), value);
  };

  const std::string src_phrase = phrase_or_eps(std::span<const Token>(
      source.begin() + std::ptrdiff_t(edit.span.start),
      source.begin() + std::ptrdiff_t(edit.span.end)));
  const std::string hyp_phrase = phrase_or_eps(edit.replacement);
  const std::string before = edit.span.start > 0
                                 ? source[edit.span.start - 1]
                                 : std::string(kNullValue);
  const std::string after = edit.span.end < source.size()
                                ? source[edit.span.end]
                                : std::string(kNullValue);

  if (groups.smt) num("rank", double(edit.hyp_rank));

  if (groups.lexical_pos) {
    cat("src_phrase", src_phrase);
    cat("hyp_phrase", hyp_phrase);
    cat("src_hyp", src_phrase + "+" + hyp_phrase);
    const std::string pos_src = pos_of_phrase(ann.pos, edit.span);
    const std::string pos_hyp = pos_of_tokens(edit.replacement);
    cat("pos_src", pos_src);
    cat("pos_hyp", pos_hyp);
    cat("pos_src_hyp", pos_src + "+" + pos_hyp);
  }

  if (groups.context) {
    cat("before_src", before + "+" + src_phrase);
    cat("before_hyp", before + "+" + hyp_phrase);
    cat("after_src", src_phrase + "+" + after);
    cat("after_hyp", hyp_phrase + "+" + after);
    const std::string pair = src_phrase + "+" + hyp_phrase;
    cat("npL", head_token(source, nearest_head_left(ann.np_heads,
                                                    edit.span.start)) +
                   "+" + pair);
    cat("npR", head_token(source, nearest_head_right(ann.np_heads,
                                                     edit.span.end)) +
                   "+" + pair);
    cat("vpL", head_token(source, nearest_head_left(ann.vp_heads,
                                                    edit.span.start)) +
                   "+" + pair);
    cat("vpR", head_token(source, nearest_head_right(ann.vp_heads,
                                                     edit.span.end)) +
                   "+" + pair);
  }

  if (groups.lm) {
    const Sentence hyp_sentence = apply_edits(source, {&edit, 1});
    const double lm_src_sent = lm.score_sequence(source, true);
    const double lm_hyp_sent = lm.score_sequence(hyp_sentence, true);

    auto phrase_score = [&](const std::string& b,
                            std::span<const Token> mid,
                            const std::string& a) {
      Sentence seq;
      if (b != kNullValue) seq.push_back(b);
      seq.insert(seq.end(), mid.begin(), mid.end());
      if (a != kNullValue) seq.push_back(a);
      return lm.score_sequence(seq, false);
    };
    const std::string none(kNullValue);
    std::span<const Token> src_span(
        source.begin() + std::ptrdiff_t(edit.span.start),
        source.begin() + std::ptrdiff_t(edit.span.end));
    const double lm_src_phrase = phrase_score(none, src_span, none);
    const double lm_hyp_phrase = phrase_score(none, edit.replacement, none);

    num("lm_src_sent", lm_src_sent);
    num("lm_hyp_sent", lm_hyp_sent);
    num("lm_src_phrase", lm_src_phrase);
    num("lm_hyp_phrase", lm_hyp_phrase);
    num("lm_before_src", phrase_score(before, src_span, none));
    num("lm_before_hyp", phrase_score(before, edit.replacement, none));
    num("lm_src_after", phrase_score(none, src_span, after));
    num("lm_hyp_after", phrase_score(none, edit.replacement, after));
    num("lm_diff_phrase", lm_hyp_phrase - lm_src_phrase);
    num("lm_diff_sent", lm_hyp_sent - lm_src_sent);
  }
  return v;
}

std::vector<LabeledExample> label_edits(const NBestList& nbest,
                                        const AnnotatedSentence& gold,
                                        const FeatureContext& ctx) {
  // Distinct edits across all hypotheses, lowest rank wins.
  std::vector<Edit> pool;
  for (const NBestEntry& entry : nbest.entries) {
    for (Edit& e : extract_edits(nbest.source, entry.hypothesis)) {
      e.hyp_rank = entry.rank;
      auto it = std::find_if(pool.begin(), pool.end(), [&](const Edit& p) {
        return p.same_change(e);
      });
      if (it == pool.end())
        pool.push_back(std::move(e));
      else if (e.hyp_rank < it->hyp_rank)
        it->hyp_rank = e.hyp_rank;
    }
  }
  std::sort(pool.begin(), pool.end(), edit_key_less);

  const TokenAnnotations ann = ctx.annotations->annotate(nbest.source);
  std::vector<LabeledExample> out;
  out.reserve(pool.size());
  for (Edit& e : pool) {
    LabeledExample ex;
    ex.sentence_id = nbest.source_id;
    ex.valid = false;
    for (const auto& [annotator, edits] : gold.annotations) {
      (void)annotator;
      for (const GoldEdit& g : edits)
        if (edit_equal(e, g)) ex.valid = true;
    }
    ex.vector = extract_features(e, nbest.source, nbest, ann, *ctx.lm,
                                 ctx.groups);
    ex.edit = std::move(e);
    out.push_back(std::move(ex));
  }
  return out;
}

FeatureDictionary build_dictionary(std::span<const LabeledExample> examples,
                                   int min_count) {
  if (examples.empty())
    throw Error("cannot build a feature dictionary from zero examples");

  FeatureDictionary d;
  std::unordered_map<std::string, int> counts;
  for (const LabeledExample& ex : examples)
    for (const std::string& f : ex.vector.categorical) ++counts[f];

  for (const LabeledExample& ex : examples) {
    for (const std::string& f : ex.vector.categorical) {
      if (counts[f] < min_count) continue;
      if (d.index.emplace(f, int(d.names.size())).second) d.names.push_back(f);
    }
  }

  // Welford over each numerical feature, schema ordered by first occurrence.
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<double> mean, m2;
  std::vector<std::uint64_t> n;
  for (const LabeledExample& ex : examples) {
    for (const auto& [name, value] : ex.vector.numerical) {
      auto [it, fresh] = slot.emplace(name, d.numerical.size());
      if (fresh) {
        d.numerical.push_back({name, 0.0, 1.0});
        mean.push_back(0.0);
        m2.push_back(0.0);
        n.push_back(0);
      }
      std::size_t k = it->second;
      ++n[k];
      double delta = value - mean[k];
      mean[k] += delta / double(n[k]);
      m2[k] += delta * (value - mean[k]);
    }
  }
  for (std::size_t k = 0; k < d.numerical.size(); ++k) {
    d.numerical[k].mean = mean[k];
    double var = n[k] > 1 ? m2[k] / double(n[k]) : 0.0;
    double sd = std::sqrt(var);
    d.numerical[k].stddev = sd > 0.0 ? sd : 1.0;  // constant feature: shift only
  }
  return d;
}

SparseVector vectorize(const FeatureVector& v, const FeatureDictionary& d) {
  SparseVector x;
  x.reserve(v.categorical.size() + v.numerical.size());
  for (const std::string& f : v.categorical) {
    auto it = d.index.find(f);
    if (it != d.index.end()) x.emplace_back(it->second, 1.0);
  }
  const int base = int(d.names.size());
  for (const auto& [name, value] : v.numerical) {
    for (std::size_t k = 0; k < d.numerical.size(); ++k) {
      if (d.numerical[k].name == name) {
        x.emplace_back(base + int(k),
                       (value - d.numerical[k].mean) / d.numerical[k].stddev);
        break;
      }
    }
  }
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end(),
                      [](const auto& a, const auto& b) {
                        return a.first == b.first;
                      }),
          x.end());
  return x;
}

std::string FeatureDictionary::to_string() const {
  std::string out;
  for (std::size_t id = 0; id < names.size(); ++id)
    out += "cat\t" + std::to_string(id) + "\t" + names[id] + "\n";
  for (const NumStat& s : numerical)
    out += "num\t" + s.name + "\t" + format_double(s.mean) + "\t" +
           format_double(s.stddev) + "\n";
  return out;
}

FeatureDictionary FeatureDictionary::from_string(std::string_view text) {
  FeatureDictionary d;
  std::size_t lineno = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++lineno;
    if (raw.empty()) continue;
    auto fields = split(raw, '\t');
    if (fields[0] == "cat") {
      if (fields.size() != 3) throw ParseError("bad cat line", lineno);
      int id = int(parse_long(fields[1], lineno));
      if (id != int(d.names.size()))
        throw ParseError("ids must be dense from 0", lineno);
      d.index.emplace(fields[2], id);
      d.names.push_back(fields[2]);
    } else if (fields[0] == "num") {
      if (fields.size() != 4) throw ParseError("bad num line", lineno);
      d.numerical.push_back({fields[1], parse_double(fields[2], lineno),
                             parse_double(fields[3], lineno)});
    } else {
      throw ParseError("unrecognized dictionary line", lineno);
    }
  }
  return d;
}

std::string serialize_examples(std::span<const LabeledExample> examples) {
  std::string out;
  for (const LabeledExample& ex : examples) {
    out += std::string(ex.valid ? "1" : "0") + "\t" +
           std::to_string(ex.sentence_id) + "\t" +
           std::to_string(ex.edit.span.start) + "\t" +
           std::to_string(ex.edit.span.end) + "\t" +
           join(ex.edit.source_tokens, " ") + "\t" +
           join(ex.edit.replacement, " ") + "\t" +
           std::to_string(ex.edit.hyp_rank) + "\t" +
           join(ex.vector.categorical, ";") + "\t";
    for (std::size_t i = 0; i < ex.vector.numerical.size(); ++i) {
      if (i) out += " ";
      out += ex.vector.numerical[i].first + "=" +
             format_double(ex.vector.numerical[i].second);
    }
    out += "\n";
  }
  return out;
}

std::vector<LabeledExample> parse_examples(std::string_view text) {
  std::vector<LabeledExample> out;
  std::size_t lineno = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++lineno;
    if (raw.empty()) continue;
    auto fields = split(raw, '\t');
    if (fields.size() != 9)
      throw ParseError("expected 9 tab-separated fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    LabeledExample ex;
    if (fields[0] != "0" && fields[0] != "1")
      throw ParseError("label must be 0 or 1", lineno);
    ex.valid = fields[0] == "1";
    ex.sentence_id = int(parse_long(fields[1], lineno));
    ex.edit.span.start = std::size_t(parse_long(fields[2], lineno));
    ex.edit.span.end = std::size_t(parse_long(fields[3], lineno));
    ex.edit.source_tokens = split_tokens(fields[4]);
    ex.edit.replacement = split_tokens(fields[5]);
    ex.edit.hyp_rank = int(parse_long(fields[6], lineno));
    if (!fields[7].empty()) ex.vector.categorical = split(fields[7], ';');
    for (const std::string& pair : split_ws(fields[8])) {
      auto eq = pair.rfind('=');
      if (eq == std::string::npos)
        throw ParseError("bad numeric pair \"" + pair + "\"", lineno);
      ex.vector.numerical.emplace_back(pair.substr(0, eq),
                                       parse_double(pair.substr(eq + 1),
                                                    lineno));
    }
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace nbgec
