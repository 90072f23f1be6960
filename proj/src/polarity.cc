#include "miner/polarity.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "miner/error.h"
#include "miner/util.h"

namespace miner {

using nlohmann::json;

namespace {

void check_dimension(const SparseVector& v, std::size_t dimension) {
  if (!v.entries.empty() && v.entries.back().first >= dimension) {
    throw InvalidArgument("vector column " + std::to_string(v.entries.back().first) +
                          " exceeds model dimension " + std::to_string(dimension));
  }
}

double label_sign(Polarity p) { return p == Polarity::positive ? 1.0 : -1.0; }

}  // namespace

LinearModel train(std::span<const SparseVector> vectors, std::span<const Polarity> labels,
                  std::size_t dimension, const SvmParams& params) {
  if (vectors.size() != labels.size()) {
    throw InvalidArgument("train: vectors and labels differ in length");
  }
  if (!(params.c > 0.0)) throw InvalidArgument("train: C must be > 0");
  if (params.max_epochs < 1) throw InvalidArgument("train: max_epochs must be >= 1");
  const auto n_pos = static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), Polarity::positive));
  const std::size_t n = labels.size();
  if (n_pos == 0 || n_pos == n) throw InvalidArgument("train: need examples of both classes");
  for (const auto& v : vectors) check_dimension(v, dimension);

  LinearModel model;
  model.params = params;
  if (!model.params.positive_weight) {
    model.params.positive_weight = static_cast<double>(n) / (2.0 * static_cast<double>(n_pos));
  }
  if (!model.params.negative_weight) {
    model.params.negative_weight =
        static_cast<double>(n) / (2.0 * static_cast<double>(n - n_pos));
  }
  if (!(*model.params.positive_weight > 0.0) || !(*model.params.negative_weight > 0.0)) {
    throw InvalidArgument("train: class weights must be > 0");
  }

  std::vector<double> w(dimension, 0.0);
  double b = 0.0;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> upper(n), qdiag(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = label_sign(labels[i]);
    upper[i] = params.c * (labels[i] == Polarity::positive ? *model.params.positive_weight
                                                           : *model.params.negative_weight);
    qdiag[i] = vectors[i].squared_norm() + 1.0;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(params.seed);

  for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
    model.epochs = epoch;
    shuffle(order, rng);
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (std::size_t i : order) {
      const double g = y[i] * (vectors[i].dot(w) + b) - 1.0;
      double pg = g;
      if (alpha[i] == 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] == upper[i]) {
        pg = std::max(g, 0.0);
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (pg == 0.0) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / qdiag[i], 0.0, upper[i]);
      const double delta = (alpha[i] - old) * y[i];
      for (const auto& [col, x] : vectors[i].entries) w[col] += delta * x;
      b += delta;
    }
    if (pg_max - pg_min <= params.tolerance) {
      model.converged = true;
      break;
    }
  }

  model.weights = std::move(w);
  model.bias = b;
  return model;
}

double decision_value(const LinearModel& model, const SparseVector& v) {
  check_dimension(v, model.dimension());
  return v.dot(model.weights) + model.bias;
}

Polarity predict(const LinearModel& model, const SparseVector& v) {
  return decision_value(model, v) > 0.0 ? Polarity::positive : Polarity::negative;
}

json LinearModel::to_json() const {
  return json{{"weights", weights},
              {"bias", bias},
              {"C", params.c},
              {"class_weights",
               {{"positive", params.positive_weight.value_or(1.0)},
                {"negative", params.negative_weight.value_or(1.0)}}},
              {"max_epochs", params.max_epochs},
              {"tolerance", params.tolerance},
              {"seed", params.seed},
              {"epochs", epochs},
              {"converged", converged},
              {"feature_fingerprint", hex64(feature_fingerprint)}};
}

LinearModel LinearModel::from_json(const json& j) {
  LinearModel m;
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.params.c = j.at("C").get<double>();
  m.params.positive_weight = j.at("class_weights").at("positive").get<double>();
  m.params.negative_weight = j.at("class_weights").at("negative").get<double>();
  m.params.max_epochs = j.at("max_epochs").get<int>();
  m.params.tolerance = j.at("tolerance").get<double>();
  m.params.seed = j.at("seed").get<std::uint64_t>();
  m.epochs = j.at("epochs").get<int>();
  m.converged = j.at("converged").get<bool>();
  m.feature_fingerprint =
      std::stoull(j.at("feature_fingerprint").get<std::string>(), nullptr, 16);
  for (double x : m.weights) {
    if (!std::isfinite(x)) throw InvalidArgument("model weights must be finite");
  }
  return m;
}

std::size_t EvalMetrics::total() const {
  return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
}

EvalMetrics EvalMetrics::from_confusion(const std::array<std::array<std::size_t, 2>, 2>& c) {
  EvalMetrics m;
  m.confusion = c;
  const auto tp = static_cast<double>(c[1][1]);
  const auto tn = static_cast<double>(c[0][0]);
  const auto fp = static_cast<double>(c[0][1]);
  const auto fn = static_cast<double>(c[1][0]);
  const double total = tp + tn + fp + fn;
  m.accuracy = total > 0 ? (tp + tn) / total : 0.0;
  m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

json EvalMetrics::to_json() const {
  return json{{"accuracy", accuracy},
              {"precision", precision},
              {"recall", recall},
              {"f1", f1},
              {"confusion",
               {{"true_negative", confusion[0][0]},
                {"false_positive", confusion[0][1]},
                {"false_negative", confusion[1][0]},
                {"true_positive", confusion[1][1]}}}};
}

EvalMetrics evaluate(const LinearModel& model, std::span<const SparseVector> vectors,
                     std::span<const Polarity> labels) {
  if (vectors.empty()) throw InvalidArgument("evaluate: empty test set");
  if (vectors.size() != labels.size()) {
    throw InvalidArgument("evaluate: vectors and labels differ in length");
  }
  std::array<std::array<std::size_t, 2>, 2> c{};
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto predicted = predict(model, vectors[i]);
    ++c[labels[i] == Polarity::positive][predicted == Polarity::positive];
  }
  return EvalMetrics::from_confusion(c);
}

CrossValidation cross_validate(const LabeledCorpus& corpus, int k,
                               const FeatureParams& features, const SvmParams& svm,
                               std::uint64_t fold_seed) {
  const auto assignment = kfold_split(corpus, k, fold_seed);
  CrossValidation cv;
  std::array<std::array<std::size_t, 2>, 2> pooled{};
  for (int fold = 0; fold < k; ++fold) {
    std::vector<ReviewDocument> train_docs;
    std::vector<const ReviewDocument*> test_docs;
    for (const auto& d : corpus.documents()) {
      if (assignment.at(d.id) == fold) {
        test_docs.push_back(&d);
      } else {
        train_docs.push_back(d);
      }
    }
    LabeledCorpus train_corpus(std::move(train_docs));
    const FeatureSet fs = select_features(train_corpus, features);

    std::vector<SparseVector> xs;
    std::vector<Polarity> ys;
    for (const auto& d : train_corpus.documents()) {
      xs.push_back(vectorize(d.tokens, fs));
      ys.push_back(*d.gold_polarity);
    }
    const LinearModel model = train(xs, ys, fs.dimension(), svm);

    std::vector<SparseVector> test_x;
    std::vector<Polarity> test_y;
    for (const auto* d : test_docs) {
      test_x.push_back(vectorize(d->tokens, fs));
      test_y.push_back(*d->gold_polarity);
    }
    cv.folds.push_back(evaluate(model, test_x, test_y));
    for (int a = 0; a < 2; ++a) {
      for (int p = 0; p < 2; ++p) pooled[a][p] += cv.folds.back().confusion[a][p];
    }
  }
  cv.pooled = EvalMetrics::from_confusion(pooled);
  return cv;
}

}  // namespace miner
