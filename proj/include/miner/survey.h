#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "miner/aspects.h"

namespace miner {

enum class QuestionLevel { overall, product, brand, frequent_aspect, popular_aspect };

QuestionLevel parse_question_level(std::string_view name);
std::string_view to_string(QuestionLevel level);

// Placeholder marking the blank in a question template.
inline constexpr std::string_view kBlank = "____";

struct QuestionTemplate {
  QuestionLevel level;
  std::string text;  // contains kBlank exactly once
};

class TemplateSet {
 public:
  // Throws unless every level has exactly one template with one blank.
  explicit TemplateSet(std::vector<QuestionTemplate> templates);

  // {"templates": [{"level": "overall", "template": "Do you like ____?"}, ...]}
  static TemplateSet from_json(const nlohmann::json& j);
  static TemplateSet load(const std::string& path);
  static TemplateSet defaults();

  const QuestionTemplate& get(QuestionLevel level) const;

 private:
  std::vector<QuestionTemplate> templates_;
};

std::string fill_template(const QuestionTemplate& tmpl, std::string_view slot);
// The slot value that fills `tmpl` to give `text`, if any.
std::optional<std::string> parse_slot(const QuestionTemplate& tmpl, std::string_view text);

struct Brand {
  std::string id;
  std::string name;
};

struct Category {
  std::string id;
  std::string name;
  std::vector<Brand> brands;
};

struct ProductTaxonomy {
  std::string overall_label;
  std::vector<Category> categories;

  // {"overall_label": "...", "categories": [{"id", "name", "brands": [{"id", "name"}]}]}
  static ProductTaxonomy from_json(const nlohmann::json& j);
  static ProductTaxonomy load(const std::string& path);
  const Category* find(const std::string& id) const;
};

struct Question {
  QuestionLevel level;
  std::string text;              // template with the blank filled
  std::string slot;
  std::string category_id;       // empty for the overall question
  std::vector<Brand> options;    // brand questions only

  // Text followed by lettered options: "... prefer? A. Cannon B. Nikon".
  std::string display() const;
  nlohmann::json to_json() const;
};

// One overall question; per category a product question, a brand question
// when it has at least two brands, and the two aspect questions.
std::vector<Question> generate_questions(const ProductTaxonomy& taxonomy,
                                         const TemplateSet& templates);

struct PolarityCounts {
  std::int64_t pos = 0;
  std::int64_t neg = 0;

  std::int64_t total() const { return pos + neg; }
  PolarityCounts& operator+=(const PolarityCounts& o) {
    pos += o.pos;
    neg += o.neg;
    return *this;
  }
};

// #pos / (#pos + #neg). Throws when both counts are 0 or either is negative.
double overall_sentiment(const PolarityCounts& counts);

enum class AggregationMode { micro, macro };

AggregationMode parse_aggregation_mode(std::string_view name);
std::string_view to_string(AggregationMode mode);

struct InsufficientData {
  std::string reason;
};

struct GroupSentiment {
  std::string group;
  PolarityCounts counts;
  double os = 0.0;
};

struct OverallAnswer {
  AggregationMode mode = AggregationMode::micro;
  PolarityCounts pooled;
  double os = 0.0;
  double micro_os = 0.0;  // pooled counts, reported alongside for auditing
  std::vector<GroupSentiment> groups;
};

struct BrandAnswer {
  std::vector<GroupSentiment> brands;  // group = brand id
  std::string preferred;               // brand id
};

struct AspectAnswer {
  QuestionLevel level = QuestionLevel::frequent_aspect;
  std::vector<AspectStats> aspects;
  double entropy = 0.0;
  std::size_t requested = 0;
  bool shortfall = false;
  // Popular ranking only: aspects with PA = 0, whose terms are taken as 0
  // (the limit of PA log PA) rather than passed to entropy_popular.
  std::size_t zero_pa_aspects = 0;
};

using AnswerPayload = std::variant<InsufficientData, OverallAnswer, BrandAnswer, AspectAnswer>;

nlohmann::json answer_to_json(const AnswerPayload& payload);

// Micro pools all groups (#pos / (#pos + #neg) over the union); macro is the
// unweighted mean of per-group OS. An empty group yields InsufficientData.
AnswerPayload answer_overall(std::span<const std::pair<std::string, PolarityCounts>> groups,
                             AggregationMode mode);

// Brand with the highest OS. Between two brands A, B the answer is A only
// when OS(A) > OS(B); ties go to the later option.
AnswerPayload answer_brand(std::span<const std::pair<std::string, PolarityCounts>> brands);

// Frequent answer: top-n by FA with entropy_frequent. Popular answer: the
// same aspects re-ranked by PA (ties by name) with entropy_popular.
std::pair<AnswerPayload, AnswerPayload> answer_decision_factors(
    std::span<const Aspect> candidates, std::span<const ReviewDocument> reviews,
    const SentimentLexicon& lexicon, std::size_t n);

// Same as above from an already computed frequent ranking.
std::pair<AnswerPayload, AnswerPayload> answer_decision_factors(const FrequentRanking& ranking);

}  // namespace miner
