#include "nbgec/annotate.hpp"

#include <algorithm>
#include <cctype>

namespace nbgec {

namespace {

const std::unordered_map<std::string, std::string>& closed_class() {
  static const std::unordered_map<std::string, std::string> lexicon = {
      {"the", "DT"},   {"a", "DT"},      {"an", "DT"},    {"this", "DT"},
      {"that", "DT"},  {"these", "DT"},  {"those", "DT"}, {"every", "DT"},
      {"some", "DT"},  {"no", "DT"},
      {"in", "IN"},    {"on", "IN"},     {"at", "IN"},    {"with", "IN"},
      {"of", "IN"},    {"for", "IN"},    {"from", "IN"},  {"by", "IN"},
      {"into", "IN"},  {"over", "IN"},   {"under", "IN"}, {"near", "IN"},
      {"about", "IN"}, {"after", "IN"},  {"before", "IN"},
      {"to", "TO"},
      {"and", "CC"},   {"or", "CC"},     {"but", "CC"},
      {"he", "PRP"},   {"she", "PRP"},   {"it", "PRP"},   {"they", "PRP"},
      {"we", "PRP"},   {"i", "PRP"},     {"you", "PRP"},
      {"his", "PRP$"}, {"her", "PRP$"},  {"its", "PRP$"}, {"their", "PRP$"},
      {"our", "PRP$"}, {"my", "PRP$"},   {"your", "PRP$"},
      {"can", "MD"},   {"could", "MD"},  {"will", "MD"},  {"would", "MD"},
      {"may", "MD"},   {"might", "MD"},  {"must", "MD"},  {"should", "MD"},
      {"shall", "MD"},
      {"is", "VBZ"},   {"are", "VBP"},   {"was", "VBD"},  {"were", "VBD"},
      {"be", "VB"},    {"been", "VBN"},  {"being", "VBG"},
      {"has", "VBZ"},  {"have", "VBP"},  {"had", "VBD"},
      {"does", "VBZ"}, {"do", "VBP"},    {"did", "VBD"},
      {"not", "RB"},   {"very", "RB"},   {"often", "RB"}, {"always", "RB"},
      {"never", "RB"}, {"sometimes", "RB"},
      {"big", "JJ"},   {"small", "JJ"},  {"old", "JJ"},   {"young", "JJ"},
      {"red", "JJ"},   {"black", "JJ"},  {"happy", "JJ"}, {"hungry", "JJ"},
      {"lazy", "JJ"},  {"huge", "JJ"},   {"lonely", "JJ"},
  };
  return lexicon;
}

// Irregular forms the suffix rules cannot reach.
const std::unordered_map<std::string, std::string>& irregular() {
  static const std::unordered_map<std::string, std::string> lexicon = {
      {"sat", "VBD"},  {"ate", "VBD"},   {"ran", "VBD"},  {"saw", "VBD"},
      {"went", "VBD"}, {"came", "VBD"},  {"felt", "VBD"}, {"got", "VBD"},
      {"made", "VBD"}, {"took", "VBD"},  {"gave", "VBD"}, {"found", "VBD"},
      {"knew", "VBD"}, {"slept", "VBD"}, {"flew", "VBD"},
      {"mice", "NNS"}, {"men", "NNS"},   {"women", "NNS"},
      {"children", "NNS"}, {"people", "NNS"}, {"feet", "NNS"},
      {"geese", "NNS"},
  };
  return lexicon;
}

// Base forms treated as verbs; bare form -> VB, -s form -> VBZ.
const std::unordered_map<std::string, bool>& verb_stems() {
  static const std::unordered_map<std::string, bool> stems = [] {
    std::unordered_map<std::string, bool> s;
    for (const char* v :
         {"wait",  "eat",   "sit",   "run",   "see",    "go",    "come",
          "feel",  "walk",  "crash", "die",   "carry",  "like",  "watch",
          "chase", "play",  "jump",  "sleep", "bark",   "drink", "find",
          "know",  "make",  "take",  "give",  "get",    "fly",   "swim",
          "sing",  "read",  "write", "open",  "close",  "want",  "need",
          "hear",  "help",  "call",  "follow"})
      s[v] = true;
    return s;
  }();
  return stems;
}

bool is_verb_stem(const std::string& w) {
  return verb_stems().count(w) != 0;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool all_punct(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
           return std::ispunct(c);
         });
}

}  // namespace

std::string builtin_pos_tag(const Token& token) {
  if (all_punct(token)) return token == "." ? "." : token == "," ? "," : "SYM";
  if (auto it = closed_class().find(token); it != closed_class().end())
    return it->second;
  if (auto it = irregular().find(token); it != irregular().end())
    return it->second;
  if (is_verb_stem(token)) return "VB";
  if (ends_with(token, "ies") && token.size() > 3 &&
      is_verb_stem(token.substr(0, token.size() - 3) + "y"))
    return "VBZ";
  if (ends_with(token, "es") && token.size() > 2 &&
      is_verb_stem(token.substr(0, token.size() - 2)))
    return "VBZ";
  if (ends_with(token, "s") && token.size() > 1 &&
      is_verb_stem(token.substr(0, token.size() - 1)))
    return "VBZ";
  if (ends_with(token, "ing") && token.size() > 4) return "VBG";
  if (ends_with(token, "ed") && token.size() > 3) return "VBD";
  if (ends_with(token, "ly") && token.size() > 3) return "RB";
  if (ends_with(token, "tion") || ends_with(token, "ness") ||
      ends_with(token, "ment"))
    return "NN";
  if (ends_with(token, "s") && token.size() > 1) return "NNS";
  return "NN";
}

std::vector<std::string> builtin_pos_tags(const Sentence& s) {
  std::vector<std::string> tags;
  tags.reserve(s.size());
  for (const Token& t : s) tags.push_back(builtin_pos_tag(t));
  return tags;
}

namespace {

bool is_noun(const std::string& tag) { return tag.rfind("NN", 0) == 0; }
bool is_verb(const std::string& tag) { return tag.rfind("VB", 0) == 0; }

}  // namespace

std::vector<std::size_t> chunk_np_heads(std::span<const std::string> pos) {
  std::vector<std::size_t> heads;
  std::size_t i = 0;
  while (i < pos.size()) {
    std::size_t j = i;
    if (j < pos.size() && pos[j] == "DT") ++j;
    while (j < pos.size() && pos[j] == "JJ") ++j;
    std::size_t noun_begin = j;
    while (j < pos.size() && is_noun(pos[j])) ++j;
    if (j > noun_begin) {
      heads.push_back(j - 1);  // last noun of the run
      i = j;
    } else {
      ++i;
    }
  }
  return heads;
}

std::vector<std::size_t> chunk_vp_heads(std::span<const std::string> pos) {
  std::vector<std::size_t> heads;
  std::size_t i = 0;
  while (i < pos.size()) {
    if (pos[i] == "MD" || pos[i] == "TO" || is_verb(pos[i])) {
      std::size_t j = i;
      std::size_t last_verb = pos.size();  // sentinel: none seen
      while (j < pos.size() &&
             (pos[j] == "MD" || pos[j] == "TO" || is_verb(pos[j]))) {
        if (is_verb(pos[j])) last_verb = j;
        ++j;
      }
      if (last_verb != pos.size()) heads.push_back(last_verb);
      i = j;
    } else {
      ++i;
    }
  }
  return heads;
}

TokenAnnotations builtin_annotations(const Sentence& s) {
  TokenAnnotations ann;
  ann.pos = builtin_pos_tags(s);
  ann.np_heads = chunk_np_heads(ann.pos);
  ann.vp_heads = chunk_vp_heads(ann.pos);
  return ann;
}

std::optional<std::size_t> nearest_head_left(
    std::span<const std::size_t> heads, std::size_t edit_start) {
  std::optional<std::size_t> best;
  for (std::size_t h : heads) {
    if (h < edit_start) best = h;
    else break;
  }
  return best;
}

std::optional<std::size_t> nearest_head_right(
    std::span<const std::size_t> heads, std::size_t edit_end) {
  for (std::size_t h : heads)
    if (h >= edit_end) return h;
  return std::nullopt;
}

AnnotationProvider AnnotationProvider::builtin() {
  AnnotationProvider p;
  p.builtin_ = true;
  return p;
}

namespace {

std::vector<std::size_t> parse_head_list(std::string_view field,
                                         std::string_view prefix,
                                         std::size_t arity,
                                         std::size_t lineno) {
  if (field.substr(0, prefix.size()) != prefix)
    throw ParseError("expected \"" + std::string(prefix) + "\" head list",
                     lineno);
  field.remove_prefix(prefix.size());
  std::vector<std::size_t> heads;
  if (!field.empty()) {
    for (const std::string& part : split(field, ',')) {
      long v = parse_long(part, lineno);
      if (v < 0 || std::size_t(v) >= arity)
        throw ParseError("head index " + part + " out of bounds", lineno);
      heads.push_back(std::size_t(v));
    }
  }
  if (!std::is_sorted(heads.begin(), heads.end()))
    throw ParseError("head indices must be sorted", lineno);
  return heads;
}

}  // namespace

AnnotationProvider AnnotationProvider::from_file(std::string_view text) {
  AnnotationProvider p;
  p.builtin_ = false;

  auto lines = split(text, '\n');
  std::size_t i = 0;
  while (i < lines.size()) {
    if (trim(lines[i]).empty()) {
      ++i;
      continue;
    }
    if (i + 2 >= lines.size())
      throw ParseError("truncated annotation block", i + 1);
    Sentence tokens = split_tokens(lines[i]);
    TokenAnnotations ann;
    ann.pos = split_tokens(lines[i + 1]);
    if (ann.pos.size() != tokens.size())
      throw ParseError("POS line arity " + std::to_string(ann.pos.size()) +
                           " does not match " +
                           std::to_string(tokens.size()) + " tokens",
                       i + 2);
    auto head_fields = split_ws(lines[i + 2]);
    if (head_fields.size() != 2)
      throw ParseError("expected \"NP:<...> VP:<...>\"", i + 3);
    ann.np_heads =
        parse_head_list(head_fields[0], "NP:", tokens.size(), i + 3);
    ann.vp_heads =
        parse_head_list(head_fields[1], "VP:", tokens.size(), i + 3);
    p.table_[join_tokens(tokens)] = std::move(ann);
    i += 3;
  }
  return p;
}

TokenAnnotations AnnotationProvider::annotate(const Sentence& s) const {
  if (builtin_) return builtin_annotations(s);
  auto it = table_.find(join_tokens(s));
  if (it == table_.end())
    throw Error("no annotation for sentence \"" + join_tokens(s) + "\"");
  return it->second;
}

std::string serialize_annotations(
    std::span<const Sentence> sentences,
    std::span<const TokenAnnotations> annotations) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const TokenAnnotations& ann = annotations[i];
    if (i) out += "\n";
    out += join_tokens(sentences[i]) + "\n";
    out += join(ann.pos, " ") + "\n";
    out += "NP:";
    for (std::size_t k = 0; k < ann.np_heads.size(); ++k)
      out += (k ? "," : "") + std::to_string(ann.np_heads[k]);
    out += " VP:";
    for (std::size_t k = 0; k < ann.vp_heads.size(); ++k)
      out += (k ? "," : "") + std::to_string(ann.vp_heads[k]);
    out += "\n";
  }
  return out;
}

}  // namespace nbgec
