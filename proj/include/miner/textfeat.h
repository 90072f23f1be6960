#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "miner/corpus.h"

namespace miner {

// 2x2 document counts for one term against one class.
struct Contingency {
  std::int64_t term_in_class = 0;       // A
  std::int64_t term_not_in_class = 0;   // B
  std::int64_t absent_in_class = 0;     // C
  std::int64_t absent_not_in_class = 0; // D

  std::int64_t total() const {
    return term_in_class + term_not_in_class + absent_in_class + absent_not_in_class;
  }
};

// n(AD - CB)^2 / ((A+C)(B+D)(A+B)(C+D)); 0 when any marginal is 0.
// Throws on negative counts or when n does not equal A+B+C+D.
double chi_square(const Contingency& counts, std::int64_t n);

struct FeatureParams {
  int top_k = 2000;
  int min_df = 2;
};

// Selected vocabulary with idf weights. Terms are kept in selection order
// (descending CHI score, ties by byte-wise term order); a term's column is
// its position in that order.
class FeatureSet {
 public:
  FeatureSet() = default;
  FeatureSet(std::vector<std::string> terms, std::vector<double> idf,
             std::vector<double> chi, std::size_t doc_count, FeatureParams params);

  std::size_t dimension() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  const std::vector<double>& chi() const { return chi_; }
  std::size_t doc_count() const { return doc_count_; }
  const FeatureParams& params() const { return params_; }

  // Column of `term`, or -1 when not selected.
  std::ptrdiff_t column(const std::string& term) const;

  nlohmann::json to_json() const;
  static FeatureSet from_json(const nlohmann::json& j);
  // Hash of the serialized form; models record it to detect mismatches.
  std::uint64_t fingerprint() const;

 private:
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::vector<double> chi_;
  std::map<std::string, std::size_t> index_;
  std::size_t doc_count_ = 0;
  FeatureParams params_;
};

// CHI-scored selection over tokens with document frequency >= min_df,
// scored against the positive class. idf(t) = ln(N / df(t)).
FeatureSet select_features(const LabeledCorpus& corpus, const FeatureParams& params);

struct SparseVector {
  std::vector<std::pair<std::size_t, double>> entries;  // strictly increasing columns

  double dot(std::span<const double> dense) const;
  double squared_norm() const;
};

// tf * idf over selected terms, L2-normalized; empty when nothing survives.
SparseVector vectorize(std::span<const std::string> tokens, const FeatureSet& fs);

}  // namespace miner
