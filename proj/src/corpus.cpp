#include "nbgec/corpus.hpp"

#include <algorithm>

namespace nbgec {

std::string join_tokens(const Sentence& s) { return join(s, " "); }

Sentence split_tokens(std::string_view line) { return split_ws(line); }

bool spans_conflict(TokenSpan a, TokenSpan b) {
  if (a.empty() && b.empty()) return a.start == b.start;
  if (a.empty()) return b.start < a.start && a.start < b.end;
  if (b.empty()) return a.start < b.start && b.start < a.end;
  return a.start < b.end && b.start < a.end;
}

namespace {

void check_gold_edit(const GoldEdit& g, const Sentence& source,
                     std::size_t line) {
  if (g.span.start > g.span.end || g.span.end > source.size())
    throw ParseError("edit span [" + std::to_string(g.span.start) + "," +
                         std::to_string(g.span.end) +
                         ") out of bounds for sentence \"" +
                         join_tokens(source) + "\"",
                     line);
  if (g.span.empty() && g.replacement.empty())
    throw ParseError("no-op edit (empty span and empty replacement)", line);
}

void finish_sentence(Dataset& d, AnnotatedSentence& cur, bool have_sentence,
                     std::size_t line) {
  if (!have_sentence) return;
  if (cur.annotations.empty()) cur.annotations[0] = {};
  for (auto& [annotator, edits] : cur.annotations) {
    std::stable_sort(edits.begin(), edits.end(),
                     [](const GoldEdit& a, const GoldEdit& b) {
                       return a.span < b.span;
                     });
    for (std::size_t i = 0; i + 1 < edits.size(); ++i)
      if (spans_conflict(edits[i].span, edits[i + 1].span))
        throw ParseError("overlapping gold edits for annotator " +
                             std::to_string(annotator) + " in sentence \"" +
                             join_tokens(cur.source) + "\"",
                         line);
    (void)annotator;
  }
  d.sentences.push_back(std::move(cur));
  cur = {};
}

}  // namespace

Dataset parse_annotated(std::string_view text) {
  Dataset d;
  AnnotatedSentence cur;
  bool have_sentence = false;

  std::size_t lineno = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++lineno;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      finish_sentence(d, cur, have_sentence, lineno);
      have_sentence = false;
      continue;
    }
    if (line == "S" || line.rfind("S ", 0) == 0) {
      finish_sentence(d, cur, have_sentence, lineno);
      cur.source = split_tokens(line.substr(1));
      have_sentence = true;
      continue;
    }
    if (line.rfind("A ", 0) == 0) {
      if (!have_sentence)
        throw ParseError("annotation before any S line", lineno);
      auto fields = split_on(line.substr(2), "|||");
      if (fields.size() != 6)
        throw ParseError("expected 6 |||-separated fields, got " +
                             std::to_string(fields.size()),
                         lineno);
      auto span_parts = split_ws(fields[0]);
      if (span_parts.size() != 2)
        throw ParseError("expected \"<start> <end>\" span", lineno);
      long start = parse_long(span_parts[0], lineno);
      long end = parse_long(span_parts[1], lineno);
      if (fields[1] == "noop") {
        // "A -1 -1|||noop|||..." marks an annotator with no corrections.
        int annotator = int(parse_long(trim(fields[5]), lineno));
        cur.annotations.try_emplace(annotator);
        continue;
      }
      if (start < 0 || end < start)
        throw ParseError("invalid span " + fields[0], lineno);
      GoldEdit g;
      g.span = {std::size_t(start), std::size_t(end)};
      g.error_type = fields[1];
      g.replacement = split_tokens(fields[2]);
      check_gold_edit(g, cur.source, lineno);
      int annotator = int(parse_long(trim(fields[5]), lineno));
      cur.annotations[annotator].push_back(std::move(g));
      continue;
    }
    throw ParseError("unrecognized line \"" + std::string(line) + "\"",
                     lineno);
  }
  finish_sentence(d, cur, have_sentence, lineno);
  return d;
}

std::string serialize_annotated(const Dataset& d) {
  std::string out;
  for (std::size_t i = 0; i < d.sentences.size(); ++i) {
    const auto& sent = d.sentences[i];
    if (i) out += "\n";
    out += "S";
    if (!sent.source.empty()) out += " " + join_tokens(sent.source);
    out += "\n";
    // A lone annotator 0 with no edits is the implicit default; any other
    // empty annotator needs an explicit noop line to survive the round trip.
    bool implicit_empty = sent.annotations.size() == 1 &&
                          sent.annotations.count(0) == 1 &&
                          sent.annotations.at(0).empty();
    for (const auto& [annotator, edits] : sent.annotations) {
      if (edits.empty() && !implicit_empty)
        out += "A -1 -1|||noop||||||REQUIRED|||-NONE-|||" +
               std::to_string(annotator) + "\n";
      for (const GoldEdit& g : edits) {
        out += "A " + std::to_string(g.span.start) + " " +
               std::to_string(g.span.end) + "|||" + g.error_type + "|||" +
               join(g.replacement, " ") + "|||REQUIRED|||-NONE-|||" +
               std::to_string(annotator) + "\n";
      }
    }
  }
  return out;
}

namespace {

// "<name>=" tokens introduce a decoder feature; following bare numbers are
// its values. Multi-valued features expand to name_0, name_1, ...
void parse_feature_field(std::string_view field, std::size_t lineno,
                         std::vector<std::string>& names,
                         std::vector<double>& values) {
  auto tokens = split_ws(field);
  std::size_t i = 0;
  while (i < tokens.size()) {
    const std::string& tok = tokens[i];
    if (tok.size() < 2 || tok.back() != '=')
      throw ParseError("expected feature name ending in '=', got \"" + tok +
                           "\"",
                       lineno);
    std::string name = tok.substr(0, tok.size() - 1);
    std::size_t first_value = values.size();
    ++i;
    while (i < tokens.size() && tokens[i].back() != '=') {
      values.push_back(parse_double(tokens[i], lineno));
      ++i;
    }
    std::size_t n = values.size() - first_value;
    if (n == 0)
      throw ParseError("feature \"" + name + "\" has no value", lineno);
    if (n == 1) {
      names.push_back(std::move(name));
    } else {
      for (std::size_t k = 0; k < n; ++k)
        names.push_back(name + "_" + std::to_string(k));
    }
  }
}

}  // namespace

std::vector<NBestList> parse_nbest(std::string_view text,
                                   std::span<const Sentence> sources) {
  std::vector<NBestList> lists;
  std::size_t lineno = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    auto fields = split_on(line, "|||");
    if (fields.size() != 4)
      throw ParseError("expected 4 |||-separated fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    long id = parse_long(trim(fields[0]), lineno);
    if (id < 0 || std::size_t(id) >= sources.size())
      throw ParseError("source id " + std::to_string(id) +
                           " outside companion source file (" +
                           std::to_string(sources.size()) + " sentences)",
                       lineno);

    NBestEntry entry;
    entry.hypothesis = split_tokens(fields[1]);
    std::vector<std::string> names;
    parse_feature_field(fields[2], lineno, names, entry.features);
    entry.decoder_score = parse_double(trim(fields[3]), lineno);

    if (lists.empty() || lists.back().source_id != id) {
      if (!lists.empty() && id <= lists.back().source_id)
        throw ParseError("source ids out of order (" + std::to_string(id) +
                             " after " +
                             std::to_string(lists.back().source_id) + ")",
                         lineno);
      if (!lists.empty() && names != lists.front().feature_names)
        throw ParseError("decoder feature schema mismatch within the file",
                         lineno);
      NBestList list;
      list.source_id = int(id);
      list.source = sources[std::size_t(id)];
      list.feature_names = names;
      lists.push_back(std::move(list));
    } else if (names != lists.back().feature_names) {
      throw ParseError("decoder feature schema mismatch within the file",
                       lineno);
    }
    entry.rank = int(lists.back().entries.size()) + 1;
    lists.back().entries.push_back(std::move(entry));
  }
  if (lists.size() != sources.size())
    throw ParseError("n-best file covers " + std::to_string(lists.size()) +
                     " sources but companion file has " +
                     std::to_string(sources.size()) +
                     "; every source needs at least one hypothesis");
  return lists;
}

std::string serialize_nbest(std::span<const NBestList> lists) {
  std::string out;
  for (const NBestList& list : lists) {
    for (const NBestEntry& e : list.entries) {
      out += std::to_string(list.source_id) + " ||| " +
             join_tokens(e.hypothesis) + " ||| ";
      for (std::size_t i = 0; i < list.feature_names.size(); ++i) {
        if (i) out += " ";
        out += list.feature_names[i] + "= " + format_double(e.features[i]);
      }
      out += " ||| " + format_double(e.decoder_score) + "\n";
    }
  }
  return out;
}

std::vector<Sentence> parse_plain(std::string_view text) {
  std::vector<Sentence> out;
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  out.reserve(lines.size());
  for (const std::string& line : lines) out.push_back(split_tokens(line));
  return out;
}

std::string serialize_plain(std::span<const Sentence> sentences) {
  std::string out;
  for (const Sentence& s : sentences) out += join_tokens(s) + "\n";
  return out;
}

}  // namespace nbgec
