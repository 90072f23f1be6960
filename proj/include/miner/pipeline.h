#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "miner/error.h"
#include "miner/polarity.h"
#include "miner/survey.h"
#include "miner/textfeat.h"
#include "miner/tokenizer.h"
#include "miner/topics.h"

namespace miner {

// Stages in execution order. The numeric value is the process exit code
// used when that stage fails.
enum class Stage { config = 2, ingest = 3, polarity = 4, topics = 5, aspects = 6, survey = 7 };

std::string_view to_string(Stage stage);

class StageError : public Error {
 public:
  StageError(Stage stage, const std::string& what)
      : Error(std::string(to_string(stage)) + ": " + what), stage_(stage) {}
  Stage stage() const { return stage_; }
  int exit_code() const { return static_cast<int>(stage_); }

 private:
  Stage stage_;
};

struct CorpusConfig {
  std::string tag;
  std::filesystem::path reviews;
  std::filesystem::path labeled;
  TokenizerConfig tokenizer;
  std::filesystem::path sentiment_lexicon;
  std::filesystem::path nouns;
  bool nouns_tagged = false;  // nouns file holds token/TAG text instead of a term list
};

struct PipelineConfig {
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir;
  std::filesystem::path taxonomy;
  std::optional<std::filesystem::path> templates;
  std::optional<std::filesystem::path> aliases;
  std::optional<std::string> compare_source;
  std::optional<std::string> compare_target;
  std::vector<CorpusConfig> corpora;
  FeatureParams features;
  SvmParams svm;
  int lda_k = 10;
  std::optional<double> lda_alpha;  // 50 / k when unset
  double lda_beta = 0.01;
  int lda_iterations = 1000;
  int candidates = 50;
  int top = 10;
  AggregationMode overall_mode = AggregationMode::macro;

  // Relative paths resolve against `base_dir`.
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& path);

  // Throws StageError(Stage::config) on a missing seed, missing files or
  // out-of-range parameters.
  void validate() const;

  std::uint64_t require_seed() const;
  LdaParams lda_params(std::uint64_t seed) const;
  const CorpusConfig& corpus(const std::string& tag) const;
};

// Per-stage fingerprints over the inputs (file contents, not paths) and
// parameters each stage depends on, including everything upstream of it.
struct StageHashes {
  std::string polarity;
  std::string topics;
  std::string aspects;
  std::string survey;  // covers the whole configuration; reported as config_hash
};

StageHashes compute_stage_hashes(const PipelineConfig& config);

struct RunOptions {
  bool allow_hash_mismatch = false;
  std::ostream* log = nullptr;
};

// Individual stages. Each persists its artifacts under config.output_dir,
// returning the file names written, and reads upstream artifacts from there.
// Artifacts whose recorded hash differs from the current configuration are
// refused unless allow_hash_mismatch is set.
using Artifacts = std::vector<std::string>;

Artifacts run_polarity_stage(const PipelineConfig& config, const RunOptions& options);
Artifacts run_topics_stage(const PipelineConfig& config, const RunOptions& options);
Artifacts run_aspects_stage(const PipelineConfig& config, const RunOptions& options);
Artifacts run_survey_stage(const PipelineConfig& config, const RunOptions& options);

// Validates the config, then runs every stage. Always writes manifest.json
// listing the artifacts produced; returns 0 or the failing stage's exit code.
int run_pipeline(const PipelineConfig& config, const RunOptions& options);

// Cross-validated polarity metrics for one corpus's labeled file.
CrossValidation evaluate_polarity(const PipelineConfig& config, const std::string& tag, int folds);

}  // namespace miner
