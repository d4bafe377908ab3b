#include "nbgec/synth.hpp"

#include <algorithm>

#include "nbgec/edit.hpp"
#include "nbgec/util.hpp"

namespace nbgec {

namespace {

struct NounLemma {
  const char* singular;
  const char* plural;
};

struct VerbLemma {
  const char* third;  // 3sg present
  const char* base;   // plural present
  const char* past;
  const char* ing;
  const char* preps[2];  // prepositions this verb selects
};

constexpr NounLemma kNouns[] = {
    {"cat", "cats"},         {"dog", "dogs"},       {"boy", "boys"},
    {"girl", "girls"},       {"bird", "birds"},     {"mouse", "mice"},
    {"teacher", "teachers"}, {"student", "students"},
    {"farmer", "farmers"},   {"child", "children"},
};

constexpr VerbLemma kVerbs[] = {
    {"waits", "wait", "waited", "waiting", {"on", "at"}},
    {"eats", "eat", "ate", "eating", {"with", "at"}},
    {"runs", "run", "ran", "running", {"in", "near"}},
    {"sees", "see", "saw", "seeing", {"with", "near"}},
    {"likes", "like", "liked", "liking", {"on", "in"}},
    {"watches", "watch", "watched", "watching", {"at", "near"}},
    {"chases", "chase", "chased", "chasing", {"in", "with"}},
    {"plays", "play", "played", "playing", {"on", "with"}},
    {"jumps", "jump", "jumped", "jumping", {"on", "near"}},
    {"sleeps", "sleep", "slept", "sleeping", {"in", "at"}},
    {"barks", "bark", "barked", "barking", {"at", "in"}},
    {"walks", "walk", "walked", "walking", {"near", "with"}},
};

constexpr const char* kAdjectives[] = {"big",   "small", "old",
                                       "young", "happy", "hungry",
                                       "lazy",  "red",   "black"};

constexpr const char* kPreps[] = {"in", "on", "at", "with", "near"};

int noun_count(int grammar_size) {
  return std::clamp(grammar_size, 2, int(std::size(kNouns)));
}
int verb_count(int grammar_size) {
  return std::clamp(grammar_size, 2, int(std::size(kVerbs)));
}
int adj_count(int grammar_size) {
  return std::clamp(grammar_size, 2, int(std::size(kAdjectives)));
}

// One clean token plus the generation metadata the error model needs.
struct GenToken {
  Token text;
  enum Kind { Det, Adj, Noun, Verb, Prep, Conj, Punct } kind = Punct;
  bool plural = false;        // noun number / subject agreement for verbs
  bool present = false;       // verbs only
  int lemma = -1;             // verb or noun table index
  bool bare_plural = false;   // noun with no determiner in front
};

// NP -> (DT)? (JJ)? N ; singular nouns always take a determiner, plurals
// take "the" or nothing.
void gen_np(Rng& rng, int g, bool plural, std::vector<GenToken>& out) {
  bool bare = false;
  if (plural) {
    if (rng.next_real() < 0.45) {
      out.push_back({"the", GenToken::Det, plural, false, -1, false});
    } else {
      bare = true;
    }
  } else {
    bool definite = rng.next_real() < 0.6;
    out.push_back({definite ? "the" : "a", GenToken::Det, plural, false, -1,
                   false});
  }
  if (rng.next_real() < 0.3) {
    int a = int(rng.next_below(std::uint64_t(adj_count(g))));
    out.push_back({kAdjectives[a], GenToken::Adj, plural, false, -1, false});
  }
  int n = int(rng.next_below(std::uint64_t(noun_count(g))));
  out.push_back({plural ? kNouns[n].plural : kNouns[n].singular,
                 GenToken::Noun, plural, false, n, bare});
}

// VP -> V (NP | PP)? with agreement against the subject.
void gen_vp(Rng& rng, int g, bool subject_plural, std::vector<GenToken>& out) {
  int v = int(rng.next_below(std::uint64_t(verb_count(g))));
  bool present = rng.next_real() >= 0.3;
  const char* form = present ? (subject_plural ? kVerbs[v].base
                                               : kVerbs[v].third)
                             : kVerbs[v].past;
  out.push_back({form, GenToken::Verb, subject_plural, present, v, false});
  double roll = rng.next_real();
  if (roll < 0.35) {
    gen_np(rng, g, rng.next_real() < 0.4, out);
  } else if (roll < 0.7) {
    const char* prep = kVerbs[v].preps[rng.next_below(2)];
    out.push_back({prep, GenToken::Prep, false, false, v, false});
    gen_np(rng, g, rng.next_real() < 0.4, out);
  }
}

std::vector<GenToken> gen_sentence(Rng& rng, int g) {
  std::vector<GenToken> out;
  bool subject_plural = rng.next_real() < 0.4;
  gen_np(rng, g, subject_plural, out);
  gen_vp(rng, g, subject_plural, out);
  if (rng.next_real() < 0.25) {
    out.push_back({"and", GenToken::Conj, false, false, -1, false});
    gen_vp(rng, g, subject_plural, out);
  }
  out.push_back({".", GenToken::Punct, false, false, -1, false});
  return out;
}

// A corruption replaces clean[cs, ce) with `bad` (possibly empty; cs == ce
// inserts). The gold edit is the inverse, in source coordinates.
struct Corruption {
  std::size_t cs = 0, ce = 0;
  std::vector<Token> bad;
  std::string type;
};

int find_verb(const Token& t, bool* plural_form, bool* past, bool* ing) {
  for (std::size_t v = 0; v < std::size(kVerbs); ++v) {
    if (t == kVerbs[v].third) {
      *plural_form = false, *past = false, *ing = false;
      return int(v);
    }
    if (t == kVerbs[v].base) {
      *plural_form = true, *past = false, *ing = false;
      return int(v);
    }
    if (t == kVerbs[v].past) {
      *past = true, *ing = false;
      return int(v);
    }
    if (t == kVerbs[v].ing) {
      *past = false, *ing = true;
      return int(v);
    }
  }
  return -1;
}

int find_noun(const Token& t, bool* plural) {
  for (std::size_t n = 0; n < std::size(kNouns); ++n) {
    if (t == kNouns[n].singular) {
      *plural = false;
      return int(n);
    }
    if (t == kNouns[n].plural) {
      *plural = true;
      return int(n);
    }
  }
  return -1;
}

bool is_prep(const Token& t) {
  return std::find(std::begin(kPreps), std::end(kPreps), t) !=
         std::end(kPreps);
}

// Candidate corruptions of one clean sentence under one rule type.
std::vector<Corruption> opportunities(const std::vector<GenToken>& clean,
                                      const std::string& type, Rng& rng) {
  std::vector<Corruption> out;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const GenToken& t = clean[i];
    if (type == "SVA" && t.kind == GenToken::Verb && t.present) {
      const VerbLemma& v = kVerbs[t.lemma];
      out.push_back({i, i + 1, {t.plural ? v.third : v.base}, type});
    } else if (type == "Vform" && t.kind == GenToken::Verb) {
      out.push_back({i, i + 1, {kVerbs[t.lemma].ing}, type});
    } else if (type == "Prep" && t.kind == GenToken::Prep) {
      // Swap in a preposition the verb does not select.
      const VerbLemma& v = kVerbs[t.lemma];
      std::vector<const char*> others;
      for (const char* p : kPreps)
        if (p != t.text && p != v.preps[0] && p != v.preps[1])
          others.push_back(p);
      out.push_back(
          {i, i + 1, {others[rng.next_below(others.size())]}, type});
    } else if (type == "Nn" && t.kind == GenToken::Noun) {
      const NounLemma& n = kNouns[t.lemma];
      out.push_back({i, i + 1, {t.plural ? n.singular : n.plural}, type});
    } else if (type == "ArtOrDet") {
      if (t.kind == GenToken::Det) {
        if (t.text == "a" || rng.next_real() < 0.5)
          out.push_back({i, i + 1, {t.text == "a" ? "the" : "a"}, type});
        else
          out.push_back({i, i + 1, {}, type});  // drop the article
      } else if (t.kind == GenToken::Noun && t.bare_plural) {
        out.push_back({i, i, {"a"}, type});  // spurious article
      }
    }
  }
  return out;
}

Sentence strip(const std::vector<GenToken>& clean) {
  Sentence s;
  s.reserve(clean.size());
  for (const GenToken& t : clean) s.push_back(t.text);
  return s;
}

}  // namespace

ErrorModel ErrorModel::standard(std::uint64_t seed) {
  ErrorModel em;
  em.seed = seed;
  em.rules = {{"SVA", 0.40},   {"ArtOrDet", 0.40}, {"Prep", 0.40},
              {"Nn", 0.25},    {"Vform", 0.25}};
  return em;
}

SynthCorpus generate_corpus(int grammar_size, int sentence_count,
                            const ErrorModel& em) {
  if (sentence_count < 1 || grammar_size < 1)
    throw Error("generate_corpus needs positive sizes");

  SynthCorpus corpus;
  corpus.clean.reserve(std::size_t(sentence_count));
  corpus.annotated.sentences.reserve(std::size_t(sentence_count));

  for (int s = 0; s < sentence_count; ++s) {
    Rng rng(derive_seed(em.seed, std::uint64_t(s)));
    std::vector<GenToken> clean = gen_sentence(rng, grammar_size);

    // Gather firing corruptions over all rules ...
    std::vector<Corruption> firing;
    for (const ErrorRule& rule : em.rules)
      for (Corruption& c : opportunities(clean, rule.error_type, rng))
        if (rng.next_real() < rule.probability) firing.push_back(std::move(c));

    // ... then keep at most two, pairwise at least two tokens apart so the
    // alignment can never merge neighboring corrections.
    rng.shuffle(firing);
    std::vector<Corruption> applied;
    for (Corruption& c : firing) {
      if (applied.size() >= 2) break;
      bool clash = false;
      for (const Corruption& kept : applied)
        if (!(c.ce + 2 <= kept.cs || kept.ce + 2 <= c.cs)) clash = true;
      if (!clash) applied.push_back(std::move(c));
    }
    std::sort(applied.begin(), applied.end(),
              [](const Corruption& a, const Corruption& b) {
                return a.cs < b.cs;
              });

    // Render the corrupted source, recording the inverse gold edits.
    AnnotatedSentence annotated;
    std::size_t pos = 0;
    for (const Corruption& c : applied) {
      while (pos < c.cs) annotated.source.push_back(clean[pos++].text);
      GoldEdit g;
      g.span.start = annotated.source.size();
      for (const Token& bad : c.bad) annotated.source.push_back(bad);
      g.span.end = annotated.source.size();
      for (std::size_t k = c.cs; k < c.ce; ++k)
        g.replacement.push_back(clean[k].text);
      g.error_type = c.type;
      annotated.annotations[0].push_back(std::move(g));
      pos = c.ce;
    }
    while (pos < clean.size()) annotated.source.push_back(clean[pos++].text);
    if (annotated.annotations.empty()) annotated.annotations[0] = {};

    corpus.clean.push_back(strip(clean));
    corpus.annotated.sentences.push_back(std::move(annotated));
  }
  return corpus;
}

namespace {

// Spurious corruption of the (already noisy) source at a fresh position.
std::vector<Corruption> noise_sites(const Sentence& source) {
  std::vector<Corruption> out;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Token& t = source[i];
    bool plural_form = false, past = false, ing = false;
    int v = find_verb(t, &plural_form, &past, &ing);
    if (v >= 0 && !ing) {
      if (past)
        out.push_back({i, i + 1, {kVerbs[v].ing}, "Vform"});
      else
        out.push_back({i, i + 1,
                       {plural_form ? kVerbs[v].third : kVerbs[v].base},
                       "SVA"});
      continue;
    }
    bool plural = false;
    int n = find_noun(t, &plural);
    if (n >= 0) {
      out.push_back(
          {i, i + 1, {plural ? kNouns[n].singular : kNouns[n].plural}, "Nn"});
      bool bare = i == 0 || (source[i - 1] != "the" && source[i - 1] != "a");
      if (plural && bare) out.push_back({i, i, {"a"}, "ArtOrDet"});
      continue;
    }
    if (is_prep(t)) {
      for (const char* p : kPreps)
        if (p != t) out.push_back({i, i + 1, {p}, "Prep"});
    }
  }
  return out;
}

struct Candidate {
  Edit edit;
  double confidence = 0.0;
};

// Candidate edits stay at least two tokens apart so extracting them back
// from a hypothesis can never merge neighbors.
bool too_close(TokenSpan a, TokenSpan b) {
  return !(a.end + 2 <= b.start || b.end + 2 <= a.start);
}

}  // namespace

NBestList simulate_nbest(int source_id, const Sentence& source,
                         std::span<const GoldEdit> gold,
                         const SimulatedCorrector& sc) {
  Rng rng(derive_seed(sc.seed, std::uint64_t(source_id)));

  std::vector<Candidate> candidates;
  for (const GoldEdit& g : gold) {
    if (rng.next_real() >= sc.fix_prob(g.error_type)) continue;
    Candidate c;
    c.edit.span = g.span;
    c.edit.source_tokens.assign(
        source.begin() + std::ptrdiff_t(g.span.start),
        source.begin() + std::ptrdiff_t(g.span.end));
    c.edit.replacement = g.replacement;
    c.confidence = rng.next_real(sc.fix_conf_lo, sc.fix_conf_hi);
    candidates.push_back(std::move(c));
  }

  auto sites = noise_sites(source);
  for (int attempt = 0; attempt < 2 && !sites.empty(); ++attempt) {
    if (rng.next_real() >= sc.noise_rate) continue;
    const Corruption& site = sites[rng.next_below(sites.size())];
    Edit e;
    e.span = {site.cs, site.ce};
    e.source_tokens.assign(source.begin() + std::ptrdiff_t(site.cs),
                           source.begin() + std::ptrdiff_t(site.ce));
    e.replacement = site.bad;
    bool clash = false;
    for (const Candidate& c : candidates)
      if (too_close(c.edit.span, e.span)) clash = true;
    if (clash) continue;
    Candidate c;
    c.edit = std::move(e);
    c.confidence = rng.next_real(sc.noise_conf_lo, sc.noise_conf_hi);
    candidates.push_back(std::move(c));
  }

  if (candidates.size() > 6) candidates.resize(6);
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.edit.span < b.edit.span;
            });

  // Every subset of candidate edits is a hypothesis, ranked by total
  // confidence (rank 1 = the corrector's own pick).
  struct Subset {
    std::uint32_t mask;
    double conf;
    int count;
  };
  std::vector<Subset> subsets;
  const std::uint32_t full = std::uint32_t(1u << candidates.size());
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    double conf = 0.0;
    int count = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k)
      if (mask & (1u << k)) {
        conf += candidates[k].confidence;
        ++count;
      }
    subsets.push_back({mask, conf, count});
  }
  std::sort(subsets.begin(), subsets.end(), [](const Subset& a,
                                               const Subset& b) {
    if (a.conf != b.conf) return a.conf > b.conf;
    if (a.count != b.count) return a.count < b.count;
    return a.mask < b.mask;
  });
  if (int(subsets.size()) > sc.n) subsets.resize(std::size_t(sc.n));

  NBestList list;
  list.source_id = source_id;
  list.source = source;
  list.feature_names = {"conf", "nedit"};
  for (std::size_t r = 0; r < subsets.size(); ++r) {
    std::vector<Edit> chosen;
    for (std::size_t k = 0; k < candidates.size(); ++k)
      if (subsets[r].mask & (1u << k)) chosen.push_back(candidates[k].edit);
    NBestEntry entry;
    entry.rank = int(r) + 1;
    entry.hypothesis = apply_edits(source, chosen);
    entry.features = {subsets[r].conf, double(subsets[r].count)};
    entry.decoder_score = subsets[r].conf;
    list.entries.push_back(std::move(entry));
  }
  return list;
}

std::vector<NBestList> simulate_nbest_corpus(const Dataset& d,
                                             const SimulatedCorrector& sc) {
  std::vector<NBestList> lists;
  lists.reserve(d.sentences.size());
  for (std::size_t i = 0; i < d.sentences.size(); ++i) {
    const AnnotatedSentence& s = d.sentences[i];
    auto it = s.annotations.find(0);
    static const std::vector<GoldEdit> none;
    const std::vector<GoldEdit>& gold =
        it == s.annotations.end() ? none : it->second;
    lists.push_back(simulate_nbest(int(i), s.source, gold, sc));
  }
  return lists;
}

}  // namespace nbgec
