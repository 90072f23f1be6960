#include "miner/tokenizer.h"

#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include "miner/error.h"
#include "miner/util.h"

namespace miner {

namespace {

enum class CharClass { separator, word, han };

CharClass classify(UChar32 c) {
  UErrorCode status = U_ZERO_ERROR;
  if (uscript_getScript(c, &status) == USCRIPT_HAN && U_SUCCESS(status) &&
      u_isalpha(c)) {
    return CharClass::han;
  }
  if (u_isalnum(c)) return CharClass::word;
  auto cat = u_charType(c);
  if (cat == U_NON_SPACING_MARK || cat == U_COMBINING_SPACING_MARK ||
      cat == U_ENCLOSING_MARK) {
    return CharClass::word;
  }
  return CharClass::separator;
}

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool err = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, c, err);
  if (!err) out.append(buf, static_cast<std::size_t>(len));
}

std::u32string decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  int32_t i = 0;
  const auto n = static_cast<int32_t>(text.size());
  while (i < n) {
    UChar32 c;
    U8_NEXT(s, i, n, c);
    // Invalid sequences decode to a negative value; treat them as separators.
    out.push_back(c < 0 ? U' ' : static_cast<char32_t>(c));
  }
  return out;
}

std::string encode(std::u32string_view chars, bool lowercase) {
  std::string out;
  for (char32_t c : chars) {
    append_utf8(out, lowercase ? u_tolower(static_cast<UChar32>(c))
                               : static_cast<UChar32>(c));
  }
  return out;
}

}  // namespace

TokenizerMode parse_tokenizer_mode(std::string_view name) {
  if (name == "unicode_word") return TokenizerMode::unicode_word;
  if (name == "lexicon_max_match") return TokenizerMode::lexicon_max_match;
  throw InvalidArgument("unknown tokenizer mode '" + std::string(name) + "'");
}

std::string_view to_string(TokenizerMode mode) {
  return mode == TokenizerMode::unicode_word ? "unicode_word"
                                             : "lexicon_max_match";
}

Tokenizer::Tokenizer(const TokenizerConfig& config) : config_(config) {
  if (config_.mode != TokenizerMode::lexicon_max_match) return;
  if (!config_.lexicon_path) {
    throw InvalidArgument("lexicon_max_match tokenizer requires a lexicon path");
  }
  for (const auto& line : split_lines(read_file(*config_.lexicon_path))) {
    add_term(trim(line));
  }
}

Tokenizer Tokenizer::with_lexicon(const std::vector<std::string>& terms,
                                  bool lowercase) {
  Tokenizer t;
  t.config_.mode = TokenizerMode::lexicon_max_match;
  t.config_.lowercase = lowercase;
  for (const auto& term : terms) t.add_term(trim(term));
  return t;
}

void Tokenizer::add_term(std::string_view term) {
  if (term.empty() || term.front() == '#') return;
  std::u32string chars = decode(term);
  max_term_length_ = std::max(max_term_length_, chars.size());
  lexicon_.insert(std::move(chars));
}

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
  const std::u32string chars = decode(text);
  const std::u32string_view view(chars);
  const bool max_match = config_.mode == TokenizerMode::lexicon_max_match;
  std::vector<std::string> tokens;

  std::size_t i = 0;
  while (i < view.size()) {
    CharClass cls = classify(static_cast<UChar32>(view[i]));
    if (cls == CharClass::separator) {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    if (cls == CharClass::word) {
      while (end < view.size() &&
             classify(static_cast<UChar32>(view[end])) == CharClass::word) {
        ++end;
      }
      tokens.push_back(encode(view.substr(i, end - i), config_.lowercase));
      i = end;
      continue;
    }
    // Han run.
    while (end < view.size() &&
           classify(static_cast<UChar32>(view[end])) == CharClass::han) {
      ++end;
    }
    while (i < end) {
      std::size_t take = 1;
      if (max_match) {
        for (std::size_t len = std::min(max_term_length_, end - i); len > 1;
             --len) {
          if (lexicon_.count(std::u32string(view.substr(i, len)))) {
            take = len;
            break;
          }
        }
      }
      tokens.push_back(encode(view.substr(i, take), false));
      i += take;
    }
  }
  return tokens;
}

}  // namespace miner
