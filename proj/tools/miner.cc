// miner: questionnaire generation from product reviews.
//
//   miner run --config pipeline.json [--seed N]
//   miner ingest --input reviews.jsonl --tokenizer unicode_word [--lexicon words.txt]
//   miner train-polarity | eval-polarity | fit-topics | aspects | survey --config ...

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "miner/corpus.h"
#include "miner/pipeline.h"

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool allow_mismatch = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Pipeline configuration (JSON)")->required();
  cmd->add_option("--seed", c.seed, "Override the configured seed");
  cmd->add_option("--out-dir", c.out_dir, "Override the output directory");
  cmd->add_flag("--allow-hash-mismatch", c.allow_mismatch,
                "Use upstream artifacts produced under a different configuration");
}

miner::PipelineConfig load_config(const Common& c) {
  auto config = miner::PipelineConfig::load(c.config_path);
  if (c.seed) config.seed = c.seed;
  if (c.out_dir) config.output_dir = *c.out_dir;
  return config;
}

int run_stage(const Common& c, miner::PipelineConfig config,
              miner::Artifacts (*stage)(const miner::PipelineConfig&, const miner::RunOptions&)) {
  config.validate();
  miner::RunOptions options;
  options.allow_hash_mismatch = c.allow_mismatch;
  for (const auto& name : stage(config, options)) std::cout << (config.output_dir / name).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Questionnaire generation and answering from product reviews"};
  app.require_subcommand(1);

  // run
  Common run_opts;
  auto* run = app.add_subcommand("run", "Run the whole pipeline");
  add_common(run, run_opts);

  // ingest
  std::string input, mode = "unicode_word";
  std::optional<std::string> lexicon;
  bool keep_case = false, print_tokens = false;
  auto* ingest = app.add_subcommand("ingest", "Load and tokenize a review file");
  ingest->add_option("--input", input, "JSON Lines review file")->required();
  ingest->add_option("--tokenizer", mode, "unicode_word | lexicon_max_match");
  ingest->add_option("--lexicon", lexicon, "Segmentation lexicon, one term per line");
  ingest->add_flag("--keep-case", keep_case, "Do not lowercase cased scripts");
  ingest->add_flag("--tokens", print_tokens, "Print one JSON line of tokens per review");

  // train-polarity
  Common train_opts;
  std::optional<double> c_param;
  std::optional<int> top_k, min_df;
  auto* train = app.add_subcommand("train-polarity", "Train polarity classifiers and classify reviews");
  add_common(train, train_opts);
  train->add_option("--C", c_param, "SVM cost");
  train->add_option("--top-k", top_k, "Number of CHI-selected features");
  train->add_option("--min-df", min_df, "Minimum document frequency");

  // eval-polarity
  Common eval_opts;
  int folds = 5;
  std::optional<std::string> eval_tag;
  auto* eval = app.add_subcommand("eval-polarity", "Stratified k-fold evaluation of the classifier");
  add_common(eval, eval_opts);
  eval->add_option("--folds", folds, "Number of folds")->check(CLI::Range(2, 1000));
  eval->add_option("--corpus", eval_tag, "Corpus tag (default: all)");

  // fit-topics
  Common topic_opts;
  std::optional<int> k, iters;
  std::optional<double> alpha, beta;
  auto* topics = app.add_subcommand("fit-topics", "Fit LDA per corpus and category");
  add_common(topics, topic_opts);
  topics->add_option("--k", k, "Number of topics");
  topics->add_option("--alpha", alpha, "Document-topic prior");
  topics->add_option("--beta", beta, "Topic-word prior");
  topics->add_option("--iters", iters, "Gibbs sweeps");

  // aspects
  Common aspect_opts;
  std::optional<int> candidates, top;
  std::optional<std::string> sentiment_lexicon;
  auto* aspects = app.add_subcommand("aspects", "Rank aspects by FA and score PA");
  add_common(aspects, aspect_opts);
  aspects->add_option("--candidates", candidates, "Candidate nouns taken from the topic model");
  aspects->add_option("--top", top, "Aspects per ranking");
  aspects->add_option("--sentiment-lexicon", sentiment_lexicon,
                      "Sentiment lexicon used for every corpus");

  // survey
  Common survey_opts;
  std::optional<std::string> taxonomy, templates;
  auto* survey = app.add_subcommand("survey", "Generate and answer the questionnaire");
  add_common(survey, survey_opts);
  survey->add_option("--taxonomy", taxonomy, "Product taxonomy (JSON)");
  survey->add_option("--templates", templates, "Question templates (JSON)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto config = load_config(run_opts);
      miner::RunOptions options;
      options.allow_hash_mismatch = run_opts.allow_mismatch;
      return miner::run_pipeline(config, options);
    }
    if (*ingest) {
      miner::TokenizerConfig tc;
      tc.mode = miner::parse_tokenizer_mode(mode);
      tc.lexicon_path = lexicon;
      tc.lowercase = !keep_case;
      miner::Tokenizer tokenizer(tc);
      auto result = miner::load_reviews(input, "jsonl", tokenizer);
      if (print_tokens) {
        for (const auto& d : result.documents) {
          std::cout << nlohmann::json{{"id", d.id}, {"tokens", d.tokens}}.dump() << "\n";
        }
      }
      std::cerr << fmt::format("{} documents, {} dropped ({} empty text, {} without tokens)\n",
                               result.documents.size(), result.dropped_count(),
                               result.dropped_empty_text, result.dropped_no_tokens);
      return 0;
    }
    if (*train) {
      auto config = load_config(train_opts);
      if (c_param) config.svm.c = *c_param;
      if (top_k) config.features.top_k = *top_k;
      if (min_df) config.features.min_df = *min_df;
      return run_stage(train_opts, config, miner::run_polarity_stage);
    }
    if (*eval) {
      auto config = load_config(eval_opts);
      config.validate();
      for (const auto& corpus : config.corpora) {
        if (eval_tag && corpus.tag != *eval_tag) continue;
        auto cv = miner::evaluate_polarity(config, corpus.tag, folds);
        for (std::size_t f = 0; f < cv.folds.size(); ++f) {
          std::cout << fmt::format("{} fold {}: accuracy {:.4f} precision {:.4f} recall {:.4f} f1 {:.4f}\n",
                                   corpus.tag, f, cv.folds[f].accuracy, cv.folds[f].precision,
                                   cv.folds[f].recall, cv.folds[f].f1);
        }
        std::cout << fmt::format("{} pooled: accuracy {:.4f} precision {:.4f} recall {:.4f} f1 {:.4f}\n",
                                 corpus.tag, cv.pooled.accuracy, cv.pooled.precision,
                                 cv.pooled.recall, cv.pooled.f1);
      }
      return 0;
    }
    if (*topics) {
      auto config = load_config(topic_opts);
      if (k) config.lda_k = *k;
      if (alpha) config.lda_alpha = *alpha;
      if (beta) config.lda_beta = *beta;
      if (iters) config.lda_iterations = *iters;
      return run_stage(topic_opts, config, miner::run_topics_stage);
    }
    if (*aspects) {
      auto config = load_config(aspect_opts);
      if (candidates) config.candidates = *candidates;
      if (top) config.top = *top;
      if (sentiment_lexicon) {
        for (auto& c : config.corpora) c.sentiment_lexicon = *sentiment_lexicon;
      }
      return run_stage(aspect_opts, config, miner::run_aspects_stage);
    }
    if (*survey) {
      auto config = load_config(survey_opts);
      if (taxonomy) config.taxonomy = *taxonomy;
      if (templates) config.templates = *templates;
      return run_stage(survey_opts, config, miner::run_survey_stage);
    }
  } catch (const miner::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
