#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "miner/corpus.h"
#include "miner/textfeat.h"

namespace miner {

struct SvmParams {
  double c = 1.0;
  // Per-class cost multipliers. When unset, inverse class frequency
  // N / (2 N_class) is used.
  std::optional<double> positive_weight;
  std::optional<double> negative_weight;
  int max_epochs = 1000;
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
};

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  SvmParams params;  // weights resolved to the values actually used
  int epochs = 0;    // epochs run before stopping
  bool converged = false;
  std::uint64_t feature_fingerprint = 0;

  std::size_t dimension() const { return weights.size(); }

  nlohmann::json to_json() const;
  static LinearModel from_json(const nlohmann::json& j);
};

// L2-regularized hinge-loss linear SVM solved by dual coordinate descent.
// The bias is learned as the weight of an implicit constant feature 1. Each
// epoch visits examples in a seeded random order; training stops once the
// spread of projected gradients drops below params.tolerance or after
// params.max_epochs. Results are bitwise reproducible for a given seed.
LinearModel train(std::span<const SparseVector> vectors, std::span<const Polarity> labels,
                  std::size_t dimension, const SvmParams& params);

double decision_value(const LinearModel& model, const SparseVector& v);

// Positive iff the decision value is > 0; exactly 0 is negative.
Polarity predict(const LinearModel& model, const SparseVector& v);

struct EvalMetrics {
  // confusion[actual][predicted], index 1 = positive.
  std::array<std::array<std::size_t, 2>, 2> confusion{};
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  std::size_t total() const;
  static EvalMetrics from_confusion(const std::array<std::array<std::size_t, 2>, 2>& c);
  nlohmann::json to_json() const;
};

EvalMetrics evaluate(const LinearModel& model, std::span<const SparseVector> vectors,
                     std::span<const Polarity> labels);

struct CrossValidation {
  std::vector<EvalMetrics> folds;
  EvalMetrics pooled;  // from the summed confusion matrices
};

// Stratified k-fold evaluation. Feature selection and training run on the
// training folds only.
CrossValidation cross_validate(const LabeledCorpus& corpus, int k,
                               const FeatureParams& features, const SvmParams& svm,
                               std::uint64_t fold_seed);

}  // namespace miner
