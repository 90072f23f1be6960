#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "miner/corpus.h"
#include "miner/tokenizer.h"

namespace miner {

// Word -> orientation (+1 / -1).
class SentimentLexicon {
 public:
  SentimentLexicon() = default;
  // Throws when empty or when an orientation is not +1 / -1.
  explicit SentimentLexicon(std::map<std::string, int> entries);

  // UTF-8 TSV `word<TAB>score`. Scores are binarized at 0: > 0 is +1, < 0 is
  // -1, exactly 0 carries no orientation and is skipped. A word listed with
  // both orientations is an error. Words are lowercased when `lowercase` is
  // set, to match the tokenizer.
  static SentimentLexicon load(const std::string& path, bool lowercase = true);

  // 0 when the word is not a sentiment word.
  int orientation(const std::string& word) const {
    auto it = entries_.find(word);
    return it == entries_.end() ? 0 : it->second;
  }
  std::size_t size() const { return entries_.size(); }
  SentimentLexicon negated() const;

 private:
  std::map<std::string, int> entries_;
};

// A canonical aspect plus the token sequences that count as a mention of it.
struct Aspect {
  std::string name;
  std::vector<std::vector<std::string>> aliases;

  // Single-token aspect whose only alias is its own name.
  static Aspect single(const std::string& term) { return Aspect{term, {{term}}}; }
};

// Parsed alias / bilingual dictionary file, `source<TAB>target[<TAB>a,b,...]`.
// The first two columns give the bilingual map; the optional third column
// lists extra surface forms of the source term.
struct AliasFile {
  std::map<std::string, std::string> bilingual;
  std::map<std::string, std::vector<std::string>> aliases;

  static AliasFile load(const std::string& path);
  static AliasFile parse(std::string_view text, const std::string& source);
};

// Resolves candidate terms to aspects for one corpus, tokenizing alias
// surface forms with that corpus's tokenizer.
class AspectInventory {
 public:
  AspectInventory(const AliasFile& file, const Tokenizer& tokenizer);

  // The aspect owning `term` as canonical name or alias, else a single-token
  // aspect named `term`.
  Aspect resolve(const std::string& term) const;

 private:
  std::map<std::string, Aspect> by_name_;
  std::map<std::string, std::string> alias_owner_;  // joined alias tokens -> name
};

// Distance-weighted lexicon score of an aspect in one review:
//   S = sum over sentiment tokens w of orientation(w) / dis(w)
// where dis is the token distance to the nearest aspect mention (0 inside a
// multiword mention), floored at 1. Terms are summed in token order.
// nullopt when the review does not mention the aspect.
std::optional<double> aspect_score(std::span<const std::string> tokens, const Aspect& aspect,
                                   const SentimentLexicon& lexicon);

// +1 when S > 0, otherwise -1 (including S == 0); nullopt without a mention.
std::optional<int> aspect_sentiment(std::span<const std::string> tokens, const Aspect& aspect,
                                    const SentimentLexicon& lexicon);

struct AspectStats {
  std::string aspect;
  std::vector<std::string> aliases;  // surface forms, tokens joined by ' '
  std::int64_t pos = 0;
  std::int64_t neg = 0;
  std::int64_t fa = 0;
  std::optional<double> pa;          // unset without mentions
  std::int64_t mention_count = 0;
  // Mentions whose score was exactly 0 (counted as negative).
  std::int64_t zero_score_mentions = 0;

  nlohmann::json to_json() const;
  static AspectStats from_json(const nlohmann::json& j);
};

// One pass over the reviews; each review counts at most once.
AspectStats aspect_stats(const Aspect& aspect, std::span<const ReviewDocument> reviews,
                         const SentimentLexicon& lexicon);

// FA: reviews with SP = +1 plus reviews with SP = -1.
std::int64_t frequency_score(const Aspect& aspect, std::span<const ReviewDocument> reviews,
                             const SentimentLexicon& lexicon);

// PA over the mentioning reviews. Throws when there are none.
double popularity_score(const Aspect& aspect, std::span<const ReviewDocument> reviews,
                        const SentimentLexicon& lexicon);

// sum(SP_i + 1) / (2 sum |SP_i|) for SP values in {+1, -1}.
double popularity_from_polarities(std::span<const int> sp);

struct FrequentRanking {
  std::vector<AspectStats> aspects;  // FA descending, ties by name
  std::size_t requested = 0;
  bool shortfall = false;            // fewer than `requested` aspects with FA > 0
};

// Candidates resolving to the same aspect are scored once.
FrequentRanking top_frequent(std::span<const Aspect> candidates,
                             std::span<const ReviewDocument> reviews,
                             const SentimentLexicon& lexicon, std::size_t n);

// -sum p_i log10 p_i with p_i = FA_i / sum FA. Every FA_i must be > 0.
double entropy_frequent(std::span<const std::int64_t> fa);

// -sum PA_i log10 PA_i on the raw values. Every PA_i must be in (0, 1].
double entropy_popular(std::span<const double> pa);

struct AlignedPair {
  AspectStats source;
  AspectStats target;
};

struct Alignment {
  std::vector<AlignedPair> pairs;
  std::vector<std::string> unmatched_source;
  std::vector<std::string> unmatched_target;
};

// Pairs x with y when bilingual[x] == y (or x == y when x has no entry).
// Each target aspect pairs at most once.
Alignment align_bilingual(std::span<const AspectStats> source,
                          std::span<const AspectStats> target,
                          const std::map<std::string, std::string>& bilingual);

}  // namespace miner
