#include "nbgec/edit.hpp"

#include <algorithm>
#include <cstdint>

namespace nbgec {

bool edit_key_less(const Edit& a, const Edit& b) {
  if (a.span != b.span) return a.span < b.span;
  return a.replacement < b.replacement;
}

namespace {

enum class Op : std::uint8_t { Match, Substitute, Delete, Insert };

// Unit-cost alignment of source (rows) against hypothesis (columns).
// Optimizes (cost, -matches) lexicographically: among minimal-cost
// alignments the one matching the most tokens touches the fewest, so the
// merged phrase edits are as small as any unit-cost diff allows. Remaining
// ties break by preferring match > substitution > deletion > insertion,
// making the alignment deterministic.
std::vector<Op> align(const Sentence& src, const Sentence& hyp) {
  const std::size_t m = src.size(), n = hyp.size();
  struct Cell {
    std::uint32_t cost;
    std::uint32_t matches;
  };
  std::vector<Cell> dp((m + 1) * (n + 1));
  auto at = [&](std::size_t i, std::size_t j) -> Cell& {
    return dp[i * (n + 1) + j];
  };

  // better = lower cost, then more matches
  auto better = [](Cell a, Cell b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.matches > b.matches;
  };

  at(0, 0) = {0, 0};
  for (std::size_t i = 1; i <= m; ++i) at(i, 0) = {std::uint32_t(i), 0};
  for (std::size_t j = 1; j <= n; ++j) at(0, j) = {std::uint32_t(j), 0};
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      Cell best;
      if (src[i - 1] == hyp[j - 1]) {
        best = at(i - 1, j - 1);
        best.matches += 1;
      } else {
        best = at(i - 1, j - 1);
        best.cost += 1;
      }
      Cell del = at(i - 1, j);
      del.cost += 1;
      if (better(del, best)) best = del;
      Cell ins = at(i, j - 1);
      ins.cost += 1;
      if (better(ins, best)) best = ins;
      at(i, j) = best;
    }
  }

  std::vector<Op> ops;
  ops.reserve(m + n);
  std::size_t i = m, j = n;
  while (i > 0 || j > 0) {
    const Cell cur = at(i, j);
    if (i > 0 && j > 0 && src[i - 1] == hyp[j - 1]) {
      Cell via = at(i - 1, j - 1);
      via.matches += 1;
      if (via.cost == cur.cost && via.matches == cur.matches) {
        ops.push_back(Op::Match);
        --i, --j;
        continue;
      }
    }
    if (i > 0 && j > 0 && src[i - 1] != hyp[j - 1]) {
      Cell via = at(i - 1, j - 1);
      via.cost += 1;
      if (via.cost == cur.cost && via.matches == cur.matches) {
        ops.push_back(Op::Substitute);
        --i, --j;
        continue;
      }
    }
    if (i > 0) {
      Cell via = at(i - 1, j);
      via.cost += 1;
      if (via.cost == cur.cost && via.matches == cur.matches) {
        ops.push_back(Op::Delete);
        --i;
        continue;
      }
    }
    ops.push_back(Op::Insert);
    --j;
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

}  // namespace

std::vector<Edit> extract_edits(const Sentence& source,
                                const Sentence& hypothesis) {
  std::vector<Edit> edits;
  const auto ops = align(source, hypothesis);

  std::size_t i = 0, j = 0;  // cursors into source / hypothesis
  std::size_t k = 0;
  while (k < ops.size()) {
    if (ops[k] == Op::Match) {
      ++i, ++j, ++k;
      continue;
    }
    // Merge the maximal run of non-match operations into one phrase edit.
    Edit e;
    e.span.start = i;
    std::size_t hyp_begin = j;
    while (k < ops.size() && ops[k] != Op::Match) {
      switch (ops[k]) {
        case Op::Substitute: ++i, ++j; break;
        case Op::Delete: ++i; break;
        case Op::Insert: ++j; break;
        case Op::Match: break;
      }
      ++k;
    }
    e.span.end = i;
    e.source_tokens.assign(source.begin() + std::ptrdiff_t(e.span.start),
                           source.begin() + std::ptrdiff_t(e.span.end));
    e.replacement.assign(hypothesis.begin() + std::ptrdiff_t(hyp_begin),
                         hypothesis.begin() + std::ptrdiff_t(j));
    edits.push_back(std::move(e));
  }
  return edits;
}

Sentence apply_edits(const Sentence& source, std::span<const Edit> edits) {
  std::vector<const Edit*> ordered;
  ordered.reserve(edits.size());
  for (const Edit& e : edits) {
    if (e.span.start > e.span.end || e.span.end > source.size())
      throw Error("edit span out of bounds");
    if (!std::equal(e.source_tokens.begin(), e.source_tokens.end(),
                    source.begin() + std::ptrdiff_t(e.span.start),
                    source.begin() + std::ptrdiff_t(e.span.end)))
      throw Error("edit source tokens disagree with sentence \"" +
                  join_tokens(source) + "\"");
    ordered.push_back(&e);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const Edit* a, const Edit* b) { return a->span < b->span; });
  for (std::size_t i = 0; i + 1 < ordered.size(); ++i)
    if (spans_conflict(ordered[i]->span, ordered[i + 1]->span))
      throw Error("conflicting edits cannot be applied");

  Sentence out = source;
  for (auto it = ordered.rbegin(); it != ordered.rend(); ++it) {
    const Edit& e = **it;
    out.erase(out.begin() + std::ptrdiff_t(e.span.start),
              out.begin() + std::ptrdiff_t(e.span.end));
    out.insert(out.begin() + std::ptrdiff_t(e.span.start),
               e.replacement.begin(), e.replacement.end());
  }
  return out;
}

bool overlaps(const Edit& a, const Edit& b) {
  return spans_conflict(a.span, b.span);
}

bool edit_equal(const Edit& e, const GoldEdit& g) {
  return e.span == g.span && e.replacement == g.replacement;
}

std::string serialize_edit_list(std::span<const SentenceEdit> edits) {
  std::string out;
  for (const SentenceEdit& se : edits) {
    const Edit& e = se.edit;
    out += std::to_string(se.sentence_id) + "\t" +
           std::to_string(e.span.start) + "\t" + std::to_string(e.span.end) +
           "\t" + join(e.source_tokens, " ") + "\t" +
           join(e.replacement, " ") + "\t" + std::to_string(e.hyp_rank) +
           "\t" + (e.score ? format_double(*e.score) : "NA") + "\n";
  }
  return out;
}

std::vector<SentenceEdit> parse_edit_list(std::string_view text) {
  std::vector<SentenceEdit> out;
  std::size_t lineno = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++lineno;
    if (raw.empty()) continue;
    auto fields = split(raw, '\t');
    if (fields.size() != 7)
      throw ParseError("expected 7 tab-separated fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    SentenceEdit se;
    se.sentence_id = int(parse_long(fields[0], lineno));
    se.edit.span.start = std::size_t(parse_long(fields[1], lineno));
    se.edit.span.end = std::size_t(parse_long(fields[2], lineno));
    se.edit.source_tokens = split_tokens(fields[3]);
    se.edit.replacement = split_tokens(fields[4]);
    se.edit.hyp_rank = int(parse_long(fields[5], lineno));
    if (fields[6] != "NA") se.edit.score = parse_double(fields[6], lineno);
    out.push_back(std::move(se));
  }
  return out;
}

}  // namespace nbgec
