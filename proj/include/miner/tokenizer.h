#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace miner {

enum class TokenizerMode { unicode_word, lexicon_max_match };

struct TokenizerConfig {
  TokenizerMode mode = TokenizerMode::unicode_word;
  // Segmentation lexicon, one term per line. Required for lexicon_max_match.
  std::optional<std::string> lexicon_path;
  bool lowercase = true;
};

TokenizerMode parse_tokenizer_mode(std::string_view name);
std::string_view to_string(TokenizerMode mode);

// Splits UTF-8 text into word tokens.
//
// unicode_word: tokens are maximal runs of letters, digits and combining
// marks. Han ideographs carry no inter-character word boundary, so each one
// is a token of its own.
//
// lexicon_max_match: Han runs are segmented by greedy longest match against
// the lexicon, falling back to a single character; everything else is
// handled as in unicode_word.
//
// Lowercasing applies to cased scripts only; Han text is left untouched.
class Tokenizer {
 public:
  // Loads the lexicon file when the mode needs one.
  explicit Tokenizer(const TokenizerConfig& config);

  // Builds a lexicon_max_match tokenizer from in-memory terms.
  static Tokenizer with_lexicon(const std::vector<std::string>& terms,
                                bool lowercase = true);

  std::vector<std::string> tokenize(std::string_view text) const;

  const TokenizerConfig& config() const { return config_; }

 private:
  Tokenizer() = default;
  void add_term(std::string_view term);

  TokenizerConfig config_;
  std::unordered_set<std::u32string> lexicon_;
  std::size_t max_term_length_ = 0;  // in code points
};

}  // namespace miner
