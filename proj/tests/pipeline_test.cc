#include "miner/pipeline.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "miner/report.h"
#include "miner/util.h"

namespace miner {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kFixtures = MINER_FIXTURE_DIR;
const std::string kCli = MINER_CLI;

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("miner_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  PipelineConfig config(const std::string& out) const {
    auto c = PipelineConfig::load(kFixtures / "pipeline.json");
    c.output_dir = dir_ / out;
    return c;
  }

  static std::string slurp(const fs::path& p) { return read_file(p.string()); }

  // The fixture config with every relative path made absolute, so variants
  // can be written outside the fixture directory.
  static json fixture_config() {
    auto j = json::parse(slurp(kFixtures / "pipeline.json"));
    auto abs = [](json& v) { v = (kFixtures / v.get<std::string>()).string(); };
    for (const char* k : {"taxonomy", "templates", "aliases"}) abs(j[k]);
    for (auto& c : j["corpora"]) {
      for (const char* k : {"reviews", "labeled", "sentiment_lexicon", "nouns"}) abs(c[k]);
      if (c["tokenizer"].contains("lexicon")) abs(c["tokenizer"]["lexicon"]);
    }
    return j;
  }

  fs::path write_config(const json& j) const {
    const auto path = dir_ / "config.json";
    std::ofstream(path) << j.dump(2);
    return path;
  }

  int cli(const std::string& args) const {
    const std::string cmd = kCli + " " + args + " > " + (dir_ / "cli.log").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

TEST_F(PipelineTest, GoldenRunIsByteIdentical) {
  std::ostringstream log;
  ASSERT_EQ(run_pipeline(config("a"), RunOptions{false, &log}), 0) << log.str();
  ASSERT_EQ(run_pipeline(config("b"), RunOptions{}), 0);
  for (const char* f : {"report.json", "report.md", "manifest.json", "polarity_zh.json",
                        "topics_en_smartphone.json", "aspects_zh_digital_camera.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
}

TEST_F(PipelineTest, ReportHasEverySectionAndRecomputableOs) {
  ASSERT_EQ(run_pipeline(config("a"), RunOptions{}), 0);
  auto report = json::parse(slurp(dir_ / "a" / "report.json"));
  for (const char* s : kReportSections) EXPECT_TRUE(report.at("sections").contains(s)) << s;
  const auto& products = report.at("sections").at("overall_sentiment").at("products");
  ASSERT_FALSE(products.empty());
  for (const auto& row : products) {
    const double pos = row.at("pos").get<double>();
    const double neg = row.at("neg").get<double>();
    EXPECT_DOUBLE_EQ(row.at("os").get<double>(), pos / (pos + neg));
  }
  auto manifest = json::parse(slurp(dir_ / "a" / "manifest.json"));
  EXPECT_FALSE(manifest.contains("failed_stage"));
}

TEST_F(PipelineTest, MissingSeedIsConfigError) {
  auto c = config("a");
  c.seed.reset();
  try {
    c.validate();
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), Stage::config);
    EXPECT_EQ(e.exit_code(), 2);
  }
  EXPECT_EQ(run_pipeline(c, RunOptions{}), 2);
}

TEST_F(PipelineTest, CliMissingSeedExitsWithConfigCode) {
  auto j = fixture_config();
  j.erase("seed");
  const auto cfg = write_config(j).string();
  EXPECT_EQ(cli("run --config " + cfg + " --out-dir " + (dir_ / "a").string()), 2);
  // --seed on the command line supplies it.
  EXPECT_EQ(cli("run --config " + cfg + " --seed 42 --out-dir " + (dir_ / "b").string()), 0);
  ASSERT_EQ(run_pipeline(config("c"), RunOptions{}), 0);
  EXPECT_EQ(slurp(dir_ / "b" / "report.json"), slurp(dir_ / "c" / "report.json"));
}

TEST_F(PipelineTest, CliRunMatchesLibraryRun) {
  ASSERT_EQ(run_pipeline(config("lib"), RunOptions{}), 0);
  ASSERT_EQ(cli("run --config " + (kFixtures / "pipeline.json").string() + " --out-dir " +
                (dir_ / "cli").string()),
            0);
  EXPECT_EQ(slurp(dir_ / "lib" / "report.json"), slurp(dir_ / "cli" / "report.json"));
}

TEST_F(PipelineTest, StagesRerunFromPersistedArtifacts) {
  const auto c = config("a");
  ASSERT_EQ(run_pipeline(c, RunOptions{}), 0);
  const auto report = slurp(dir_ / "a" / "report.json");
  const auto aspects = slurp(dir_ / "a" / "aspects_en_digital_camera.json");
  fs::remove(dir_ / "a" / "report.json");
  run_aspects_stage(c, RunOptions{});
  run_survey_stage(c, RunOptions{});
  EXPECT_EQ(slurp(dir_ / "a" / "aspects_en_digital_camera.json"), aspects);
  EXPECT_EQ(slurp(dir_ / "a" / "report.json"), report);
}

TEST_F(PipelineTest, CliSubcommandsRunSingleStages) {
  const auto cfg = (kFixtures / "pipeline.json").string();
  const auto out = (dir_ / "a").string();
  EXPECT_EQ(cli("train-polarity --config " + cfg + " --out-dir " + out), 0);
  EXPECT_EQ(cli("fit-topics --config " + cfg + " --out-dir " + out), 0);
  EXPECT_EQ(cli("aspects --config " + cfg + " --out-dir " + out), 0);
  EXPECT_EQ(cli("survey --config " + cfg + " --out-dir " + out), 0);
  ASSERT_EQ(run_pipeline(config("b"), RunOptions{}), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "report.json"), slurp(dir_ / "b" / "report.json"));
}

TEST_F(PipelineTest, SurveyWithoutUpstreamArtifactsFails) {
  const int code = cli("survey --config " + (kFixtures / "pipeline.json").string() + " --out-dir " +
                       (dir_ / "empty").string());
  EXPECT_EQ(code, 7);
}

TEST_F(PipelineTest, RefusesArtifactsFromDifferentConfig) {
  auto c = config("a");
  ASSERT_EQ(run_pipeline(c, RunOptions{}), 0);
  c.top = 5;
  try {
    run_survey_stage(c, RunOptions{});
    FAIL() << "expected hash mismatch";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), Stage::survey);
    EXPECT_NE(std::string(e.what()).find("hash"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(run_survey_stage(c, RunOptions{true, nullptr}));
}

TEST_F(PipelineTest, StageHashesTrackTheirInputs) {
  auto c = config("a");
  const auto base = compute_stage_hashes(c);
  c.top = 5;
  const auto changed = compute_stage_hashes(c);
  EXPECT_EQ(base.polarity, changed.polarity);
  EXPECT_EQ(base.topics, changed.topics);
  EXPECT_NE(base.aspects, changed.aspects);
  EXPECT_NE(base.survey, changed.survey);
  auto moved = config("elsewhere");
  EXPECT_EQ(compute_stage_hashes(moved).survey, base.survey);
}

TEST_F(PipelineTest, EvaluatePolarityReportsFolds) {
  auto cv = evaluate_polarity(config("a"), "en", 5);
  EXPECT_EQ(cv.folds.size(), 5u);
  EXPECT_EQ(cv.pooled.total(), 60u);
  EXPECT_GT(cv.pooled.accuracy, 0.5);
}

TEST_F(PipelineTest, MalformedConfigIsConfigError) {
  const auto cfg = dir_ / "bad.json";
  {
    std::ofstream out(cfg);
    out << "{ not json";
  }
  EXPECT_THROW(PipelineConfig::load(cfg), StageError);
  EXPECT_EQ(cli("run --config " + cfg.string()), 2);
}

}  // namespace
}  // namespace miner
