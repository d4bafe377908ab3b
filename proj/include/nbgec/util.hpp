#ifndef NBGEC_UTIL_HPP
#define NBGEC_UTIL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nbgec {

// Base class for all toolkit errors surfaced to callers.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file; carries a 1-based line number when known.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split_on(std::string_view s, std::string_view sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view s);

// Strict numeric parsing; the whole field must be consumed.
long parse_long(std::string_view s, std::size_t line = 0);
double parse_double(std::string_view s, std::size_t line = 0);

// Shortest decimal form that round-trips a double exactly.
std::string format_double(double v);

std::string read_file(const std::string& path);
// Writes via a temp file + rename so a failed run leaves no partial output.
void write_file(const std::string& path, std::string_view content);

// SplitMix64: tiny seeded generator with a portable, fully specified output
// sequence. All randomness in the toolkit flows through this type so results
// are reproducible across platforms and standard-library versions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n); n > 0.
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_real() { return double(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_real(double lo, double hi) {
    return lo + (hi - lo) * next_real();
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = next_below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  std::uint64_t state_;
};

// Derives an independent stream for item `index` of a seeded collection.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  Rng rng(seed ^ (0x517cc1b727220a95ull * (index + 1)));
  return rng.next();
}

}  // namespace nbgec

#endif  // NBGEC_UTIL_HPP
