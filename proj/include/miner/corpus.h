#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "miner/tokenizer.h"

namespace miner {

enum class Polarity { negative, positive };

Polarity parse_polarity(std::string_view name);
std::string_view to_string(Polarity p);

struct ReviewDocument {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;  // token i sits at position i
  std::string category;
  std::string brand;
  std::string corpus_tag;
  std::optional<Polarity> gold_polarity;
};

struct LoadResult {
  std::vector<ReviewDocument> documents;
  // Records whose text is empty or whitespace-only.
  std::size_t dropped_empty_text = 0;
  // Records with text that produced no tokens (punctuation only, etc.).
  std::size_t dropped_no_tokens = 0;

  std::size_t dropped_count() const { return dropped_empty_text + dropped_no_tokens; }
};

// Reads reviews and tokenizes them. The only schema is "jsonl": one JSON
// object per line with string fields id, text, category, brand, corpus_tag
// and an optional polarity ("positive" | "negative"). Blank lines are
// skipped. Malformed records and duplicate ids throw InputError carrying the
// line number. A nonempty `corpus_tag` keeps only records with that tag;
// other records are validated but neither returned nor counted as dropped.
LoadResult load_reviews(const std::string& path, std::string_view schema,
                        const Tokenizer& tokenizer, std::string_view corpus_tag = {});

// Same as load_reviews over in-memory JSON Lines text; `source` names the
// input in error messages.
LoadResult parse_reviews(std::string_view jsonl, const std::string& source,
                         const Tokenizer& tokenizer, std::string_view corpus_tag = {});

// Documents that all carry a gold polarity, with both classes present.
class LabeledCorpus {
 public:
  explicit LabeledCorpus(std::vector<ReviewDocument> documents);

  const std::vector<ReviewDocument>& documents() const { return documents_; }
  std::size_t size() const { return documents_.size(); }
  std::size_t count(Polarity p) const {
    return p == Polarity::positive ? positives_ : negatives_;
  }

 private:
  std::vector<ReviewDocument> documents_;
  std::size_t positives_ = 0;
  std::size_t negatives_ = 0;
};

// Stratified k-fold assignment, doc id -> fold in [0, k). Each class is
// ordered by id, shuffled with `seed`, and dealt round-robin; the deal for
// the second class continues where the first stopped so fold totals stay
// within one of each other. Throws when k < 2 or a class has fewer than k
// documents.
std::map<std::string, int> kfold_split(const LabeledCorpus& corpus, int k,
                                       std::uint64_t seed);

}  // namespace miner
