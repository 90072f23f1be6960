#include "miner/corpus.h"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "miner/error.h"
#include "miner/util.h"

namespace miner {

using nlohmann::json;

Polarity parse_polarity(std::string_view name) {
  if (name == "positive") return Polarity::positive;
  if (name == "negative") return Polarity::negative;
  throw InvalidArgument("unknown polarity '" + std::string(name) + "'");
}

std::string_view to_string(Polarity p) {
  return p == Polarity::positive ? "positive" : "negative";
}

namespace {

std::string required_string(const json& record, const char* field,
                            const std::string& source, std::size_t line) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_string()) {
    throw InputError(source, line,
                     std::string("missing or non-string field '") + field + "'");
  }
  return it->get<std::string>();
}

}  // namespace

LoadResult parse_reviews(std::string_view jsonl, const std::string& source,
                         const Tokenizer& tokenizer, std::string_view corpus_tag) {
  LoadResult result;
  std::set<std::string> seen;
  const auto lines = split_lines(jsonl);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (trim(lines[i]).empty()) continue;
    json record;
    try {
      record = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw InputError(source, lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw InputError(source, lineno, "record is not an object");

    ReviewDocument doc;
    doc.id = required_string(record, "id", source, lineno);
    doc.text = required_string(record, "text", source, lineno);
    doc.category = required_string(record, "category", source, lineno);
    doc.brand = required_string(record, "brand", source, lineno);
    doc.corpus_tag = required_string(record, "corpus_tag", source, lineno);
    if (auto it = record.find("polarity"); it != record.end() && !it->is_null()) {
      if (!it->is_string()) throw InputError(source, lineno, "polarity must be a string");
      try {
        doc.gold_polarity = parse_polarity(it->get<std::string>());
      } catch (const InvalidArgument& e) {
        throw InputError(source, lineno, e.what());
      }
    }
    if (!seen.insert(doc.id).second) {
      throw InputError(source, lineno, "duplicate review id '" + doc.id + "'");
    }

    if (!corpus_tag.empty() && doc.corpus_tag != corpus_tag) continue;
    if (trim(doc.text).empty()) {
      ++result.dropped_empty_text;
      continue;
    }
    doc.tokens = tokenizer.tokenize(doc.text);
    if (doc.tokens.empty()) {
      ++result.dropped_no_tokens;
      continue;
    }
    result.documents.push_back(std::move(doc));
  }
  return result;
}

LoadResult load_reviews(const std::string& path, std::string_view schema,
                        const Tokenizer& tokenizer, std::string_view corpus_tag) {
  if (schema != "jsonl") {
    throw InvalidArgument("unknown review schema '" + std::string(schema) + "'");
  }
  return parse_reviews(read_file(path), path, tokenizer, corpus_tag);
}

LabeledCorpus::LabeledCorpus(std::vector<ReviewDocument> documents)
    : documents_(std::move(documents)) {
  for (const auto& d : documents_) {
    if (!d.gold_polarity) {
      throw InvalidArgument("labeled corpus document '" + d.id + "' has no polarity");
    }
    (*d.gold_polarity == Polarity::positive ? positives_ : negatives_)++;
  }
  if (positives_ == 0 || negatives_ == 0) {
    throw InvalidArgument("labeled corpus needs both positive and negative documents");
  }
}

std::map<std::string, int> kfold_split(const LabeledCorpus& corpus, int k,
                                       std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("k-fold split needs k >= 2");
  const std::size_t smallest = std::min(corpus.count(Polarity::positive),
                                        corpus.count(Polarity::negative));
  if (static_cast<std::size_t>(k) > smallest) {
    throw InvalidArgument("k = " + std::to_string(k) +
                          " exceeds the smallest class size " + std::to_string(smallest));
  }

  Rng rng(seed);
  std::map<std::string, int> folds;
  std::size_t dealt = 0;
  for (Polarity cls : {Polarity::positive, Polarity::negative}) {
    std::vector<std::string> ids;
    for (const auto& d : corpus.documents()) {
      if (*d.gold_polarity == cls) ids.push_back(d.id);
    }
    std::sort(ids.begin(), ids.end());
    shuffle(ids, rng);
    for (const auto& id : ids) {
      folds[id] = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
    }
  }
  return folds;
}

}  // namespace miner
