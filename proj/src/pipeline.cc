#include "miner/pipeline.h"

#include <fstream>
#include <iostream>
#include <set>

#include <fmt/format.h>

#include "miner/aspects.h"
#include "miner/corpus.h"
#include "miner/report.h"
#include "miner/util.h"

namespace miner {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::config: return "config";
    case Stage::ingest: return "ingest";
    case Stage::polarity: return "train-polarity";
    case Stage::topics: return "fit-topics";
    case Stage::aspects: return "aspects";
    case Stage::survey: return "survey";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

[[noreturn]] void config_error(const std::string& what) { throw StageError(Stage::config, what); }

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base) {
  PipelineConfig c;
  try {
    if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
    c.output_dir = resolve(base, j.value("output_dir", std::string("out")));
    c.taxonomy = resolve(base, j.at("taxonomy").get<std::string>());
    if (j.contains("templates")) c.templates = resolve(base, j.at("templates").get<std::string>());
    if (j.contains("aliases")) c.aliases = resolve(base, j.at("aliases").get<std::string>());
    if (j.contains("comparison")) {
      c.compare_source = j.at("comparison").at("source").get<std::string>();
      c.compare_target = j.at("comparison").at("target").get<std::string>();
    }
    for (const auto& cj : j.at("corpora")) {
      CorpusConfig cc;
      cc.tag = cj.at("tag").get<std::string>();
      cc.reviews = resolve(base, cj.at("reviews").get<std::string>());
      cc.labeled = resolve(base, cj.at("labeled").get<std::string>());
      cc.sentiment_lexicon = resolve(base, cj.at("sentiment_lexicon").get<std::string>());
      cc.nouns = resolve(base, cj.at("nouns").get<std::string>());
      cc.nouns_tagged = cj.value("nouns_format", std::string("list")) == "tagged";
      if (cj.contains("tokenizer")) {
        const auto& t = cj.at("tokenizer");
        cc.tokenizer.mode = parse_tokenizer_mode(t.value("mode", std::string("unicode_word")));
        if (t.contains("lexicon")) {
          cc.tokenizer.lexicon_path = resolve(base, t.at("lexicon").get<std::string>()).string();
        }
        cc.tokenizer.lowercase = t.value("lowercase", true);
      }
      c.corpora.push_back(std::move(cc));
    }
    if (j.contains("features")) {
      const auto& f = j.at("features");
      c.features.top_k = f.value("top_k", c.features.top_k);
      c.features.min_df = f.value("min_df", c.features.min_df);
    }
    if (j.contains("svm")) {
      const auto& s = j.at("svm");
      c.svm.c = s.value("C", c.svm.c);
      c.svm.tolerance = s.value("tolerance", c.svm.tolerance);
      c.svm.max_epochs = s.value("max_epochs", c.svm.max_epochs);
    }
    if (j.contains("lda")) {
      const auto& l = j.at("lda");
      c.lda_k = l.value("k", c.lda_k);
      if (l.contains("alpha") && !l.at("alpha").is_null()) c.lda_alpha = l.at("alpha").get<double>();
      c.lda_beta = l.value("beta", c.lda_beta);
      c.lda_iterations = l.value("iterations", c.lda_iterations);
    }
    if (j.contains("aspects")) {
      const auto& a = j.at("aspects");
      c.candidates = a.value("candidates", c.candidates);
      c.top = a.value("top", c.top);
    }
    if (j.contains("survey")) {
      c.overall_mode =
          parse_aggregation_mode(j.at("survey").value("overall_mode", std::string("macro")));
    }
  } catch (const json::exception& e) {
    config_error(std::string("malformed config: ") + e.what());
  } catch (const InvalidArgument& e) {
    config_error(e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path.string()));
  } catch (const json::parse_error& e) {
    config_error(path.string() + ": invalid JSON: " + e.what());
  } catch (const InputError& e) {
    config_error(e.what());
  }
  return from_json(j, path.parent_path());
}

void PipelineConfig::validate() const {
  if (!seed) config_error("'seed' is required");
  auto need_file = [](const fs::path& p, const char* what) {
    if (!fs::is_regular_file(p)) config_error(std::string(what) + " not found: " + p.string());
  };
  need_file(taxonomy, "taxonomy");
  if (templates) need_file(*templates, "templates");
  if (aliases) need_file(*aliases, "aliases");
  if (corpora.empty()) config_error("no corpora configured");
  std::set<std::string> tags;
  for (const auto& c : corpora) {
    if (c.tag.empty()) config_error("corpus tag must be nonempty");
    if (!tags.insert(c.tag).second) config_error("duplicate corpus tag '" + c.tag + "'");
    need_file(c.reviews, "reviews");
    need_file(c.labeled, "labeled corpus");
    need_file(c.sentiment_lexicon, "sentiment lexicon");
    need_file(c.nouns, "noun lexicon");
    if (c.tokenizer.mode == TokenizerMode::lexicon_max_match) {
      if (!c.tokenizer.lexicon_path) config_error("corpus '" + c.tag + "': tokenizer needs a lexicon");
      need_file(*c.tokenizer.lexicon_path, "segmentation lexicon");
    }
  }
  if (compare_source.has_value() != compare_target.has_value()) {
    config_error("comparison needs both source and target");
  }
  if (compare_source && (!tags.count(*compare_source) || !tags.count(*compare_target))) {
    config_error("comparison names an unknown corpus tag");
  }
  if (features.top_k < 1) config_error("features.top_k must be >= 1");
  if (features.min_df < 1) config_error("features.min_df must be >= 1");
  if (!(svm.c > 0.0)) config_error("svm.C must be > 0");
  if (!(svm.tolerance > 0.0)) config_error("svm.tolerance must be > 0");
  if (svm.max_epochs < 1) config_error("svm.max_epochs must be >= 1");
  if (lda_k < 2) config_error("lda.k must be >= 2");
  if (lda_alpha && !(*lda_alpha > 0.0)) config_error("lda.alpha must be > 0");
  if (!(lda_beta > 0.0)) config_error("lda.beta must be > 0");
  if (lda_iterations < 1) config_error("lda.iterations must be >= 1");
  if (candidates < 1) config_error("aspects.candidates must be >= 1");
  if (top < 1) config_error("aspects.top must be >= 1");
}

std::uint64_t PipelineConfig::require_seed() const {
  if (!seed) config_error("'seed' is required");
  return *seed;
}

LdaParams PipelineConfig::lda_params(std::uint64_t stage_seed) const {
  LdaParams p;
  p.k = lda_k;
  p.alpha = lda_alpha.value_or(50.0 / lda_k);
  p.beta = lda_beta;
  p.iterations = lda_iterations;
  p.seed = stage_seed;
  return p;
}

const CorpusConfig& PipelineConfig::corpus(const std::string& tag) const {
  for (const auto& c : corpora) {
    if (c.tag == tag) return c;
  }
  throw InvalidArgument("unknown corpus tag '" + tag + "'");
}

// ---------------------------------------------------------------------------
// Hashing

namespace {

std::string file_hash(const fs::path& p) { return hex64(fnv1a64(read_file(p.string()))); }

json tokenizer_json(const TokenizerConfig& t) {
  return json{{"mode", to_string(t.mode)},
              {"lexicon", t.lexicon_path ? json(file_hash(*t.lexicon_path)) : json(nullptr)},
              {"lowercase", t.lowercase}};
}

std::string hash_json(const json& j) { return hex64(fnv1a64(j.dump())); }

}  // namespace

StageHashes compute_stage_hashes(const PipelineConfig& c) {
  const std::uint64_t seed = c.require_seed();
  json polarity{{"seed", seed},
                {"features", {{"top_k", c.features.top_k}, {"min_df", c.features.min_df}}},
                {"svm", {{"C", c.svm.c}, {"tolerance", c.svm.tolerance}, {"max_epochs", c.svm.max_epochs}}}};
  json topics{{"seed", seed},
              {"taxonomy", file_hash(c.taxonomy)},
              {"lda",
               {{"k", c.lda_k},
                {"alpha", c.lda_params(0).alpha},
                {"beta", c.lda_beta},
                {"iterations", c.lda_iterations}}}};
  json aspects{{"candidates", c.candidates},
               {"top", c.top},
               {"aliases", c.aliases ? json(file_hash(*c.aliases)) : json(nullptr)}};
  for (const auto& corpus : c.corpora) {
    const json tok = tokenizer_json(corpus.tokenizer);
    const std::string reviews = file_hash(corpus.reviews);
    polarity["corpora"].push_back(
        {{"tag", corpus.tag}, {"reviews", reviews}, {"labeled", file_hash(corpus.labeled)}, {"tokenizer", tok}});
    topics["corpora"].push_back({{"tag", corpus.tag}, {"reviews", reviews}, {"tokenizer", tok}});
    aspects["corpora"].push_back({{"tag", corpus.tag},
                                  {"sentiment_lexicon", file_hash(corpus.sentiment_lexicon)},
                                  {"nouns", file_hash(corpus.nouns)},
                                  {"nouns_tagged", corpus.nouns_tagged}});
  }
  StageHashes h;
  h.polarity = hash_json(polarity);
  h.topics = hash_json(topics);
  aspects["topics"] = h.topics;
  h.aspects = hash_json(aspects);
  json survey{{"polarity", h.polarity},
              {"aspects", h.aspects},
              {"taxonomy", file_hash(c.taxonomy)},
              {"templates", c.templates ? json(file_hash(*c.templates)) : json(nullptr)},
              {"comparison",
               c.compare_source ? json{*c.compare_source, *c.compare_target} : json(nullptr)},
              {"overall_mode", to_string(c.overall_mode)}};
  h.survey = hash_json(survey);
  return h;
}

// ---------------------------------------------------------------------------
// Artifact helpers

namespace {

std::ostream& log_of(const RunOptions& o) { return o.log ? *o.log : std::clog; }

std::string safe_name(std::string_view s) {
  std::string out;
  for (unsigned char ch : s) {
    out += (std::isalnum(ch) || ch == '-' || ch == '_') ? static_cast<char>(ch) : '_';
  }
  return out;
}

std::string polarity_file(const std::string& tag) { return "polarity_" + safe_name(tag) + ".json"; }
std::string predictions_file(const std::string& tag) {
  return "predictions_" + safe_name(tag) + ".json";
}
std::string topics_file(const std::string& tag, const std::string& category) {
  return "topics_" + safe_name(tag) + "_" + safe_name(category) + ".json";
}
std::string aspects_file(const std::string& tag, const std::string& category) {
  return "aspects_" + safe_name(tag) + "_" + safe_name(category) + ".json";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(1) + "\n"); }

json read_artifact(Stage stage, const PipelineConfig& config, const std::string& name,
                   const std::string& expected_hash, const RunOptions& options) {
  const fs::path path = config.output_dir / name;
  json j;
  try {
    j = json::parse(read_file(path.string()));
  } catch (const std::exception& e) {
    throw StageError(stage, "cannot read upstream artifact " + path.string() + ": " + e.what());
  }
  const std::string recorded = j.value("config_hash", std::string());
  if (recorded != expected_hash) {
    if (!options.allow_hash_mismatch) {
      throw StageError(stage, path.string() + " was produced under config hash " + recorded +
                                  ", current is " + expected_hash +
                                  " (rerun the upstream stage or pass --allow-hash-mismatch)");
    }
    log_of(options) << "[" << to_string(stage) << "] warning: using " << name
                    << " despite config hash mismatch\n";
  }
  return j;
}

LoadResult ingest(const CorpusConfig& corpus, const fs::path& path) {
  try {
    Tokenizer tokenizer(corpus.tokenizer);
    return load_reviews(path.string(), "jsonl", tokenizer, corpus.tag);
  } catch (const Error& e) {
    throw StageError(Stage::ingest, e.what());
  }
}

// Taxonomy categories in order, for grouping reviews.
std::vector<std::string> category_ids(const ProductTaxonomy& tax) {
  std::vector<std::string> ids;
  for (const auto& c : tax.categories) ids.push_back(c.id);
  return ids;
}

ProductTaxonomy load_taxonomy(const PipelineConfig& config, Stage stage) {
  try {
    return ProductTaxonomy::load(config.taxonomy.string());
  } catch (const Error& e) {
    throw StageError(stage, e.what());
  }
}

void ensure_output_dir(const PipelineConfig& config, Stage stage) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw StageError(stage, "cannot create " + config.output_dir.string() + ": " + ec.message());
}

}  // namespace

// ---------------------------------------------------------------------------
// Stages

Artifacts run_polarity_stage(const PipelineConfig& config, const RunOptions& options) {
  const auto hashes = compute_stage_hashes(config);
  const std::uint64_t seed = config.require_seed();
  ensure_output_dir(config, Stage::polarity);
  Artifacts written;
  for (const auto& corpus : config.corpora) {
    auto labeled = ingest(corpus, corpus.labeled);
    auto reviews = ingest(corpus, corpus.reviews);
    try {
      LabeledCorpus training(std::move(labeled.documents));
      const FeatureSet features = select_features(training, config.features);
      std::vector<SparseVector> xs;
      std::vector<Polarity> ys;
      for (const auto& d : training.documents()) {
        xs.push_back(vectorize(d.tokens, features));
        ys.push_back(*d.gold_polarity);
      }
      SvmParams params = config.svm;
      params.seed = derive_seed(seed, "polarity/" + corpus.tag);
      LinearModel model = train(xs, ys, features.dimension(), params);
      model.feature_fingerprint = features.fingerprint();
      const EvalMetrics fit = evaluate(model, xs, ys);
      log_of(options) << fmt::format(
          "[train-polarity] {}: {} labeled docs, {} features, {} epochs, training accuracy {:.4f}\n",
          corpus.tag, training.size(), features.dimension(), model.epochs, fit.accuracy);

      write_json(config.output_dir / polarity_file(corpus.tag),
                 json{{"stage", "train-polarity"},
                      {"config_hash", hashes.polarity},
                      {"corpus", corpus.tag},
                      {"training",
                       {{"documents", training.size()},
                        {"positive", training.count(Polarity::positive)},
                        {"negative", training.count(Polarity::negative)},
                        {"dropped", labeled.dropped_count()},
                        {"fit", fit.to_json()}}},
                      {"features", features.to_json()},
                      {"model", model.to_json()}});
      written.push_back(polarity_file(corpus.tag));

      json predictions = json::array();
      for (const auto& d : reviews.documents) {
        const auto v = vectorize(d.tokens, features);
        predictions.push_back({{"id", d.id},
                               {"category", d.category},
                               {"brand", d.brand},
                               {"polarity", to_string(predict(model, v))},
                               {"decision", decision_value(model, v)}});
      }
      write_json(config.output_dir / predictions_file(corpus.tag),
                 json{{"stage", "train-polarity"},
                      {"config_hash", hashes.polarity},
                      {"corpus", corpus.tag},
                      {"reviews", reviews.documents.size()},
                      {"dropped", reviews.dropped_count()},
                      {"predictions", predictions}});
      written.push_back(predictions_file(corpus.tag));
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(Stage::polarity, corpus.tag + ": " + e.what());
    }
  }
  return written;
}

Artifacts run_topics_stage(const PipelineConfig& config, const RunOptions& options) {
  const auto hashes = compute_stage_hashes(config);
  const std::uint64_t seed = config.require_seed();
  const auto taxonomy = load_taxonomy(config, Stage::topics);
  ensure_output_dir(config, Stage::topics);
  Artifacts written;
  for (const auto& corpus : config.corpora) {
    const auto reviews = ingest(corpus, corpus.reviews);
    for (const auto& category : category_ids(taxonomy)) {
      std::vector<std::vector<std::string>> docs;
      std::vector<std::string> ids;
      for (const auto& d : reviews.documents) {
        if (d.category != category) continue;
        docs.push_back(d.tokens);
        ids.push_back(d.id);
      }
      json artifact{{"stage", "fit-topics"},
                    {"config_hash", hashes.topics},
                    {"corpus", corpus.tag},
                    {"category", category},
                    {"doc_ids", ids}};
      if (docs.empty()) {
        artifact["model"] = nullptr;
        artifact["reason"] = "no reviews in this category";
      } else {
        try {
          const auto params =
              config.lda_params(derive_seed(seed, "topics/" + corpus.tag + "/" + category));
          artifact["model"] = fit_lda(docs, params).to_json();
        } catch (const Error& e) {
          throw StageError(Stage::topics, corpus.tag + "/" + category + ": " + e.what());
        }
      }
      log_of(options) << fmt::format("[fit-topics] {}/{}: {} documents\n", corpus.tag, category,
                                     docs.size());
      write_json(config.output_dir / topics_file(corpus.tag, category), artifact);
      written.push_back(topics_file(corpus.tag, category));
    }
  }
  return written;
}

Artifacts run_aspects_stage(const PipelineConfig& config, const RunOptions& options) {
  const auto hashes = compute_stage_hashes(config);
  const auto taxonomy = load_taxonomy(config, Stage::aspects);
  ensure_output_dir(config, Stage::aspects);
  AliasFile alias_file;
  try {
    if (config.aliases) alias_file = AliasFile::load(config.aliases->string());
  } catch (const Error& e) {
    throw StageError(Stage::aspects, e.what());
  }
  Artifacts written;
  for (const auto& corpus : config.corpora) {
    const auto reviews = ingest(corpus, corpus.reviews);
    SentimentLexicon lexicon;
    NounLexicon nouns;
    std::optional<AspectInventory> inventory;
    try {
      lexicon = SentimentLexicon::load(corpus.sentiment_lexicon.string(), corpus.tokenizer.lowercase);
      const Tokenizer tokenizer(corpus.tokenizer);
      nouns = corpus.nouns_tagged ? NounLexicon::from_tagged(read_file(corpus.nouns.string()))
                                  : NounLexicon::load(corpus.nouns.string());
      nouns = nouns.normalized(tokenizer);
      inventory.emplace(alias_file, tokenizer);
    } catch (const Error& e) {
      throw StageError(Stage::aspects, corpus.tag + ": " + e.what());
    }

    for (const auto& category : category_ids(taxonomy)) {
      const json topics = read_artifact(Stage::aspects, config, topics_file(corpus.tag, category),
                                        hashes.topics, options);
      json artifact{{"stage", "aspects"},
                    {"config_hash", hashes.aspects},
                    {"corpus", corpus.tag},
                    {"category", category}};
      std::vector<ReviewDocument> docs;
      for (const auto& d : reviews.documents) {
        if (d.category == category) docs.push_back(d);
      }
      if (topics.at("model").is_null()) {
        artifact["status"] = "insufficient_data";
        artifact["reason"] = topics.value("reason", std::string("no topic model"));
      } else {
        try {
          const auto model = TopicModel::from_json(topics.at("model"));
          const auto candidates = candidate_aspects(model, nouns, config.candidates);
          std::vector<Aspect> aspects;
          json cand = json::array();
          for (const auto& c : candidates) {
            aspects.push_back(inventory->resolve(c.term));
            cand.push_back({{"term", c.term}, {"score", c.score}, {"aspect", aspects.back().name}});
          }
          const auto ranking =
              top_frequent(aspects, docs, lexicon, static_cast<std::size_t>(config.top));
          json ranked = json::array();
          for (const auto& s : ranking.aspects) ranked.push_back(s.to_json());
          artifact["status"] = "answered";
          artifact["candidates"] = cand;
          artifact["ranking"] = {{"aspects", ranked},
                                 {"requested", ranking.requested},
                                 {"shortfall", ranking.shortfall}};
        } catch (const InvalidArgument& e) {
          // No nouns in this vocabulary and similar data gaps are reported, not fatal.
          artifact["status"] = "insufficient_data";
          artifact["reason"] = e.what();
        }
      }
      log_of(options) << fmt::format("[aspects] {}/{}: {}\n", corpus.tag, category,
                                     artifact.at("status").get<std::string>());
      write_json(config.output_dir / aspects_file(corpus.tag, category), artifact);
      written.push_back(aspects_file(corpus.tag, category));
    }
  }
  return written;
}

Artifacts run_survey_stage(const PipelineConfig& config, const RunOptions& options) {
  const auto hashes = compute_stage_hashes(config);
  const auto taxonomy = load_taxonomy(config, Stage::survey);
  ensure_output_dir(config, Stage::survey);

  SurveyReport report;
  report.taxonomy = taxonomy;
  try {
    const TemplateSet templates =
        config.templates ? TemplateSet::load(config.templates->string()) : TemplateSet::defaults();
    report.questions = generate_questions(taxonomy, templates);
  } catch (const Error& e) {
    throw StageError(Stage::survey, e.what());
  }

  std::map<std::string, std::map<std::string, FrequentRanking>> rankings;  // tag -> category
  for (const auto& corpus : config.corpora) {
    const json preds = read_artifact(Stage::survey, config, predictions_file(corpus.tag),
                                     hashes.polarity, options);
    std::map<std::string, PolarityCounts> by_category;
    std::map<std::pair<std::string, std::string>, PolarityCounts> by_brand;
    for (const auto& p : preds.at("predictions")) {
      const bool positive = p.at("polarity").get<std::string>() == "positive";
      auto bump = [&](PolarityCounts& c) { (positive ? c.pos : c.neg)++; };
      bump(by_category[p.at("category").get<std::string>()]);
      bump(by_brand[{p.at("category").get<std::string>(), p.at("brand").get<std::string>()}]);
    }

    for (const auto& category : category_ids(taxonomy)) {
      const json a = read_artifact(Stage::survey, config, aspects_file(corpus.tag, category),
                                   hashes.aspects, options);
      if (a.at("status") != "answered") continue;
      FrequentRanking r;
      for (const auto& s : a.at("ranking").at("aspects")) r.aspects.push_back(AspectStats::from_json(s));
      r.requested = a.at("ranking").at("requested").get<std::size_t>();
      r.shortfall = a.at("ranking").at("shortfall").get<bool>();
      rankings[corpus.tag][category] = std::move(r);
    }

    CorpusAnswers answers;
    answers.tag = corpus.tag;
    answers.reviews = preds.at("reviews").get<std::size_t>();
    answers.dropped = preds.at("dropped").get<std::size_t>();
    for (const auto& q : report.questions) {
      switch (q.level) {
        case QuestionLevel::overall: {
          std::vector<std::pair<std::string, PolarityCounts>> groups;
          for (const auto& c : taxonomy.categories) groups.emplace_back(c.id, by_category[c.id]);
          answers.answers.push_back(answer_overall(groups, config.overall_mode));
          break;
        }
        case QuestionLevel::product: {
          std::vector<std::pair<std::string, PolarityCounts>> groups{
              {q.category_id, by_category[q.category_id]}};
          answers.answers.push_back(answer_overall(groups, AggregationMode::micro));
          break;
        }
        case QuestionLevel::brand: {
          std::vector<std::pair<std::string, PolarityCounts>> brands;
          for (const auto& b : q.options) brands.emplace_back(b.id, by_brand[{q.category_id, b.id}]);
          answers.answers.push_back(answer_brand(brands));
          break;
        }
        case QuestionLevel::frequent_aspect:
        case QuestionLevel::popular_aspect: {
          auto it = rankings[corpus.tag].find(q.category_id);
          if (it == rankings[corpus.tag].end()) {
            answers.answers.push_back(InsufficientData{"no aspect statistics for this category"});
            break;
          }
          auto [frequent, popular] = answer_decision_factors(it->second);
          answers.answers.push_back(q.level == QuestionLevel::frequent_aspect ? frequent : popular);
          break;
        }
      }
    }
    report.corpora.push_back(std::move(answers));
  }

  std::optional<std::pair<std::string, std::string>> comparison;
  if (config.compare_source) {
    comparison.emplace(*config.compare_source, *config.compare_target);
  } else if (config.corpora.size() == 2) {
    comparison.emplace(config.corpora[0].tag, config.corpora[1].tag);
  }
  std::map<std::string, std::string> bilingual;
  if (config.aliases) {
    try {
      bilingual = AliasFile::load(config.aliases->string()).bilingual;
    } catch (const Error& e) {
      throw StageError(Stage::survey, e.what());
    }
  }
  for (const auto& c : taxonomy.categories) {
    CategoryAlignment al;
    al.category = c.id;
    if (!comparison) {
      al.result = InsufficientData{"comparison needs two corpora"};
    } else {
      al.source_tag = comparison->first;
      al.target_tag = comparison->second;
      auto& src = rankings[al.source_tag];
      auto& tgt = rankings[al.target_tag];
      if (!src.count(c.id) || !tgt.count(c.id)) {
        al.result = InsufficientData{"frequent aspects missing on one side"};
      } else {
        al.result = align_bilingual(src[c.id].aspects, tgt[c.id].aspects, bilingual);
      }
    }
    report.alignments.push_back(std::move(al));
  }

  json tags = json::array();
  for (const auto& c : config.corpora) tags.push_back(c.tag);
  report.metadata = json{
      {"config_hash", hashes.survey},
      {"stage_hashes",
       {{"train-polarity", hashes.polarity},
        {"fit-topics", hashes.topics},
        {"aspects", hashes.aspects},
        {"survey", hashes.survey}}},
      {"seed", config.require_seed()},
      {"corpus_tags", tags},
      {"overall_mode", to_string(config.overall_mode)},
      {"notes",
       {"Overall OS in macro mode is the unweighted mean of the per-category OS values; "
        "micro_os is the pooled #pos/(#pos+#neg). The macro reading is an inferred "
        "explanation of published overall figures that differ from their pooled counts.",
        "Aspect mentions with a zero or empty sentiment score are classified negative and "
        "counted in zero_score_mentions."}}};

  write_json(config.output_dir / "report.json", render_json(report));
  write_text(config.output_dir / "report.md", render_markdown(report));
  log_of(options) << "[survey] wrote report.json and report.md to " << config.output_dir.string()
                  << "\n";
  return {"report.json", "report.md"};
}

int run_pipeline(const PipelineConfig& config, const RunOptions& options) {
  json stages = json::array();
  std::optional<StageError> failure;
  std::string config_hash;
  try {
    config.validate();
    config_hash = compute_stage_hashes(config).survey;
    ensure_output_dir(config, Stage::config);
    using StageFn = Artifacts (*)(const PipelineConfig&, const RunOptions&);
    const std::pair<Stage, StageFn> order[] = {{Stage::polarity, run_polarity_stage},
                                               {Stage::topics, run_topics_stage},
                                               {Stage::aspects, run_aspects_stage},
                                               {Stage::survey, run_survey_stage}};
    for (const auto& [stage, fn] : order) {
      try {
        Artifacts written = fn(config, options);
        stages.push_back({{"stage", to_string(stage)}, {"status", "ok"}, {"artifacts", written}});
      } catch (const StageError&) {
        throw;
      } catch (const std::exception& e) {
        throw StageError(stage, e.what());
      }
    }
  } catch (const StageError& e) {
    failure = e;
    log_of(options) << "error: " << e.what() << "\n";
  }

  if (!failure || failure->stage() != Stage::config) {
    json manifest{{"config_hash", config_hash}, {"stages", stages}};
    if (failure) {
      manifest["failed_stage"] = to_string(failure->stage());
      manifest["error"] = failure->what();
    }
    try {
      write_json(config.output_dir / "manifest.json", manifest);
    } catch (const Error& e) {
      log_of(options) << "error: " << e.what() << "\n";
    }
  }
  return failure ? failure->exit_code() : 0;
}

CrossValidation evaluate_polarity(const PipelineConfig& config, const std::string& tag, int folds) {
  const auto& corpus = config.corpus(tag);
  auto labeled = ingest(corpus, corpus.labeled);
  const std::uint64_t seed = config.require_seed();
  SvmParams params = config.svm;
  params.seed = derive_seed(seed, "polarity/" + tag);
  try {
    LabeledCorpus training(std::move(labeled.documents));
    return cross_validate(training, folds, config.features, params,
                          derive_seed(seed, "folds/" + tag));
  } catch (const Error& e) {
    throw StageError(Stage::polarity, tag + ": " + e.what());
  }
}

}  // namespace miner
