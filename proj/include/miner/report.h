#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "miner/survey.h"

namespace miner {

// Answers from one corpus, index-aligned with SurveyReport::questions.
struct CorpusAnswers {
  std::string tag;
  std::size_t reviews = 0;
  std::size_t dropped = 0;
  std::vector<AnswerPayload> answers;
};

struct CategoryAlignment {
  std::string category;
  std::string source_tag;
  std::string target_tag;
  std::variant<InsufficientData, Alignment> result;
};

struct SurveyReport {
  nlohmann::json metadata = nlohmann::json::object();
  ProductTaxonomy taxonomy;
  std::vector<Question> questions;
  std::vector<CorpusAnswers> corpora;
  std::vector<CategoryAlignment> alignments;
};

// Section keys of the rendered report.
inline constexpr const char* kReportSections[] = {
    "overall_sentiment", "brand_preference", "top_aspects", "entropy", "aspect_alignment"};

// Machine-readable report: metadata, questions, per-corpus answers and the
// five table sections. Every OS value sits next to the counts (or, for macro
// averages, the component OS values) it was computed from.
nlohmann::json render_json(const SurveyReport& report);

// Markdown tables mirroring the JSON sections; numbers to 4 decimals.
std::string render_markdown(const SurveyReport& report);

}  // namespace miner
