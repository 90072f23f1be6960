#include "miner/textfeat.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "miner/error.h"
#include "miner/util.h"

namespace miner {

using nlohmann::json;

double chi_square(const Contingency& c, std::int64_t n) {
  if (c.term_in_class < 0 || c.term_not_in_class < 0 || c.absent_in_class < 0 ||
      c.absent_not_in_class < 0) {
    throw InvalidArgument("chi_square: negative count");
  }
  if (n != c.total()) throw InvalidArgument("chi_square: n does not match cell total");

  const double a = static_cast<double>(c.term_in_class);
  const double b = static_cast<double>(c.term_not_in_class);
  const double cc = static_cast<double>(c.absent_in_class);
  const double d = static_cast<double>(c.absent_not_in_class);
  const double denom = (a + cc) * (b + d) * (a + b) * (cc + d);
  if (denom == 0.0) return 0.0;
  const double diff = a * d - cc * b;
  return static_cast<double>(n) * diff * diff / denom;
}

FeatureSet::FeatureSet(std::vector<std::string> terms, std::vector<double> idf,
                       std::vector<double> chi, std::size_t doc_count,
                       FeatureParams params)
    : terms_(std::move(terms)),
      idf_(std::move(idf)),
      chi_(std::move(chi)),
      doc_count_(doc_count),
      params_(params) {
  if (idf_.size() != terms_.size() || chi_.size() != terms_.size()) {
    throw InvalidArgument("feature set: terms, idf and chi lengths differ");
  }
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!(idf_[i] >= 0.0) || !std::isfinite(idf_[i])) {
      throw InvalidArgument("feature set: idf must be finite and >= 0");
    }
    if (!index_.emplace(terms_[i], i).second) {
      throw InvalidArgument("feature set: duplicate term '" + terms_[i] + "'");
    }
  }
}

std::ptrdiff_t FeatureSet::column(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

json FeatureSet::to_json() const {
  return json{{"terms", terms_},
              {"idf", idf_},
              {"chi", chi_},
              {"doc_count", doc_count_},
              {"top_k", params_.top_k},
              {"min_df", params_.min_df}};
}

FeatureSet FeatureSet::from_json(const json& j) {
  FeatureParams p{j.at("top_k").get<int>(), j.at("min_df").get<int>()};
  return FeatureSet(j.at("terms").get<std::vector<std::string>>(),
                    j.at("idf").get<std::vector<double>>(),
                    j.at("chi").get<std::vector<double>>(),
                    j.at("doc_count").get<std::size_t>(), p);
}

std::uint64_t FeatureSet::fingerprint() const { return fnv1a64(to_json().dump()); }

FeatureSet select_features(const LabeledCorpus& corpus, const FeatureParams& params) {
  if (params.top_k < 1) throw InvalidArgument("select_features: top_k must be >= 1");

  struct Counts {
    std::int64_t df = 0;
    std::int64_t df_positive = 0;
  };
  std::unordered_map<std::string, Counts> counts;
  for (const auto& doc : corpus.documents()) {
    const bool pos = *doc.gold_polarity == Polarity::positive;
    std::set<std::string_view> unique(doc.tokens.begin(), doc.tokens.end());
    for (auto term : unique) {
      auto& c = counts[std::string(term)];
      ++c.df;
      if (pos) ++c.df_positive;
    }
  }

  const auto n = static_cast<std::int64_t>(corpus.size());
  const auto n_pos = static_cast<std::int64_t>(corpus.count(Polarity::positive));
  struct Scored {
    std::string term;
    double chi;
    std::int64_t df;
  };
  std::vector<Scored> scored;
  for (const auto& [term, c] : counts) {
    if (c.df < params.min_df) continue;
    Contingency table{c.df_positive, c.df - c.df_positive, n_pos - c.df_positive,
                      (n - n_pos) - (c.df - c.df_positive)};
    scored.push_back({term, chi_square(table, n), c.df});
  }
  if (scored.empty()) {
    throw InvalidArgument("select_features: no term reaches min_df = " +
                          std::to_string(params.min_df));
  }

  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.chi != b.chi) return a.chi > b.chi;
    return a.term < b.term;
  });
  scored.resize(std::min(scored.size(), static_cast<std::size_t>(params.top_k)));

  std::vector<std::string> terms;
  std::vector<double> idf, chi;
  for (auto& s : scored) {
    idf.push_back(std::log(static_cast<double>(n) / static_cast<double>(s.df)));
    chi.push_back(s.chi);
    terms.push_back(std::move(s.term));
  }
  return FeatureSet(std::move(terms), std::move(idf), std::move(chi), corpus.size(), params);
}

double SparseVector::dot(std::span<const double> dense) const {
  double sum = 0.0;
  for (const auto& [col, w] : entries) sum += dense[col] * w;
  return sum;
}

double SparseVector::squared_norm() const {
  double sum = 0.0;
  for (const auto& [col, w] : entries) sum += w * w;
  return sum;
}

SparseVector vectorize(std::span<const std::string> tokens, const FeatureSet& fs) {
  std::map<std::size_t, double> tf;
  for (const auto& tok : tokens) {
    auto col = fs.column(tok);
    if (col >= 0) tf[static_cast<std::size_t>(col)] += 1.0;
  }
  SparseVector v;
  double norm2 = 0.0;
  for (const auto& [col, count] : tf) {
    const double w = count * fs.idf()[col];
    if (w == 0.0) continue;
    v.entries.emplace_back(col, w);
    norm2 += w * w;
  }
  if (norm2 > 0.0) {
    const double norm = std::sqrt(norm2);
    for (auto& e : v.entries) e.second /= norm;
  }
  return v;
}

}  // namespace miner
