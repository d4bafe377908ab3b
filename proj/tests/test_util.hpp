#ifndef NBGEC_TEST_UTIL_HPP
#define NBGEC_TEST_UTIL_HPP

#include <string>
#include <vector>

#include "nbgec/corpus.hpp"
#include "nbgec/util.hpp"

namespace nbgec::test {

inline Sentence sent(const std::string& text) { return split_tokens(text); }

// Random sentence over a tiny vocabulary, for property tests.
inline Sentence random_sentence(Rng& rng, std::size_t max_len,
                                std::size_t vocab) {
  static const char* words[] = {"a", "b", "c", "d", "e", "f"};
  Sentence s;
  std::size_t len = rng.next_below(max_len + 1);
  for (std::size_t i = 0; i < len; ++i)
    s.push_back(words[rng.next_below(vocab)]);
  return s;
}

}  // namespace nbgec::test

#endif  // NBGEC_TEST_UTIL_HPP
