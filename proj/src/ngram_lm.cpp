#include "nbgec/ngram_lm.hpp"

#include <algorithm>
#include <cmath>

namespace nbgec {

namespace {

std::string ngram_key(std::span<const Token> ngram) {
  std::string key;
  for (std::size_t i = 0; i < ngram.size(); ++i) {
    if (i) key += ' ';
    key += ngram[i];
  }
  return key;
}

}  // namespace

std::uint64_t NGramModel::count(std::span<const Token> ngram) const {
  auto it = counts_.find(ngram_key(ngram));
  return it == counts_.end() ? 0 : it->second;
}

void NGramModel::add_count(std::span<const Token> ngram, std::uint64_t n) {
  counts_[ngram_key(ngram)] += n;
}

double NGramModel::score_token(std::span<const Token> padded,
                               std::size_t pos) const {
  // Longest available context first, one backoff step per missing order.
  std::size_t max_ctx = std::min(pos, std::size_t(order_) - 1);
  double penalty = 0.0;
  for (std::size_t ctx = max_ctx; ctx > 0; --ctx) {
    auto gram = padded.subspan(pos - ctx, ctx + 1);
    std::uint64_t num = count(gram);
    std::uint64_t den = num > 0 ? count(gram.first(ctx)) : 0;
    if (num > 0 && den > 0)
      return penalty + std::log10(double(num) / double(den));
    penalty += std::log10(backoff_);
  }
  std::uint64_t unigram = count(padded.subspan(pos, 1));
  if (unigram == 0 || total_unigrams_ == 0) return penalty + oov_log10_;
  return penalty + std::log10(double(unigram) / double(total_unigrams_));
}

double NGramModel::score_sequence(std::span<const Token> tokens,
                                  bool pad) const {
  if (!pad) {
    double total = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i)
      total += score_token(tokens, i);
    return total;
  }
  Sentence padded;
  padded.reserve(tokens.size() + std::size_t(order_));
  for (int i = 0; i + 1 < order_; ++i) padded.emplace_back(kBeginMarker);
  padded.insert(padded.end(), tokens.begin(), tokens.end());
  padded.emplace_back(kEndMarker);
  double total = 0.0;
  for (std::size_t i = std::size_t(order_) - 1; i < padded.size(); ++i)
    total += score_token(padded, i);
  return total;
}

NGramModel train_lm(std::span<const Sentence> corpus, int order,
                    double backoff_factor, double oov_log10) {
  if (order < 1 || order > 5)
    throw Error("LM order must be in [1,5], got " + std::to_string(order));
  if (corpus.empty()) throw Error("cannot train LM on an empty corpus");

  NGramModel m(order, backoff_factor, oov_log10);
  for (const Sentence& sentence : corpus) {
    Sentence padded;
    padded.reserve(sentence.size() + std::size_t(order));
    for (int i = 0; i + 1 < order; ++i) padded.emplace_back(kBeginMarker);
    padded.insert(padded.end(), sentence.begin(), sentence.end());
    padded.emplace_back(kEndMarker);

    std::span<const Token> view(padded);
    for (std::size_t pos = 0; pos < padded.size(); ++pos) {
      // All n-grams ending at pos, shortest to longest.
      std::size_t max_len =
          std::min(pos + 1, std::size_t(order));
      for (std::size_t len = 1; len <= max_len; ++len)
        m.add_count(view.subspan(pos + 1 - len, len));
      if (padded[pos] != Token(kBeginMarker)) ++m.total_unigrams_;
    }
  }
  return m;
}

double lm_delta(const NGramModel& m, const Sentence& a, const Sentence& b) {
  return m.score_sequence(b, true) - m.score_sequence(a, true);
}

std::string NGramModel::to_string() const {
  std::string out = "order " + std::to_string(order_) + " backoff " +
                    format_double(backoff_) + " oov " +
                    format_double(oov_log10_) + "\n";
  std::vector<const std::pair<const std::string, std::uint64_t>*> entries;
  entries.reserve(counts_.size());
  for (const auto& kv : counts_) entries.push_back(&kv);
  std::sort(entries.begin(), entries.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });
  for (const auto* kv : entries)
    out += std::to_string(kv->second) + "\t" + kv->first + "\n";
  return out;
}

NGramModel NGramModel::from_string(std::string_view text) {
  auto lines = split(text, '\n');
  if (lines.empty()) throw ParseError("empty LM file");
  auto header = split_ws(lines[0]);
  if (header.size() != 6 || header[0] != "order" || header[2] != "backoff" ||
      header[4] != "oov")
    throw ParseError("bad LM header \"" + lines[0] + "\"", 1);
  NGramModel m(int(parse_long(header[1], 1)), parse_double(header[3], 1),
               parse_double(header[5], 1));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = split(lines[i], '\t');
    if (fields.size() != 2)
      throw ParseError("expected \"<count>\\t<tokens>\"", i + 1);
    long n = parse_long(fields[0], i + 1);
    if (n < 1) throw ParseError("counts must be positive", i + 1);
    m.counts_[fields[1]] = std::uint64_t(n);
  }
  // Unigram total excludes begin markers, matching training.
  for (const auto& [key, n] : m.counts_) {
    if (key.find(' ') == std::string::npos && key != kBeginMarker)
      m.total_unigrams_ += n;
  }
  return m;
}

}  // namespace nbgec
