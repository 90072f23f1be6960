#include "miner/survey.h"

#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "miner/error.h"
#include "miner/report.h"
#include "miner/util.h"
#include "test_support.h"

namespace miner {
namespace {

using Groups = std::vector<std::pair<std::string, PolarityCounts>>;

ProductTaxonomy three_categories() {
  return ProductTaxonomy::from_json(nlohmann::json::parse(R"({
    "overall_label": "digital products",
    "categories": [
      {"id": "camera", "name": "digital cameras",
       "brands": [{"id": "canon", "name": "Cannon"}, {"id": "nikon", "name": "Nikon"}]},
      {"id": "phone", "name": "smartphones",
       "brands": [{"id": "apple", "name": "Apple"}, {"id": "samsung", "name": "Samsung"}]},
      {"id": "tablet", "name": "tablet computers",
       "brands": [{"id": "apple", "name": "Apple"}, {"id": "samsung", "name": "Samsung"}]}
    ]})"));
}

TEST(QuestionTest, BrandQuestionDisplay) {
  auto questions = generate_questions(three_categories(), TemplateSet::defaults());
  const Question* brand = nullptr;
  for (const auto& q : questions) {
    if (q.level == QuestionLevel::brand && q.category_id == "camera") brand = &q;
  }
  ASSERT_NE(brand, nullptr);
  EXPECT_EQ(brand->display(), "Which brand of digital cameras do you prefer? A. Cannon B. Nikon");
}

TEST(QuestionTest, OneOverallPlusFourPerCategory) {
  auto questions = generate_questions(three_categories(), TemplateSet::defaults());
  ASSERT_EQ(questions.size(), 13u);
  EXPECT_EQ(questions[0].level, QuestionLevel::overall);
  EXPECT_EQ(questions[0].text, "Do you like digital products?");
  EXPECT_EQ(questions[1].text, "Do you like digital cameras?");
  EXPECT_EQ(questions[3].text, "What aspects of digital cameras do you care about?");
  EXPECT_EQ(questions[4].text, "What aspects of digital cameras are you satisfied with?");
}

TEST(QuestionTest, SingleBrandCategoryHasNoBrandQuestion) {
  auto tax = three_categories();
  tax.categories[2].brands.resize(1);
  auto questions = generate_questions(tax, TemplateSet::defaults());
  EXPECT_EQ(questions.size(), 12u);
  ProductTaxonomy empty;
  EXPECT_THROW(generate_questions(empty, TemplateSet::defaults()), InvalidArgument);
}

TEST(TemplateTest, FillAndParseRoundTrip) {
  const auto set = TemplateSet::defaults();
  const auto& t = set.get(QuestionLevel::brand);
  for (const std::string slot : {"digital cameras", "", "平板电脑", "a ____ b"}) {
    EXPECT_EQ(parse_slot(t, fill_template(t, slot)), slot);
  }
  EXPECT_FALSE(parse_slot(t, "Do you like cameras?"));
}

TEST(TemplateTest, RejectsMalformedSets) {
  std::vector<QuestionTemplate> missing = {{QuestionLevel::overall, "Do you like ____?"}};
  EXPECT_THROW(TemplateSet{missing}, InvalidArgument);
  std::vector<QuestionTemplate> no_blank = {
      {QuestionLevel::overall, "Do you like it?"},
      {QuestionLevel::product, "Do you like ____?"},
      {QuestionLevel::brand, "Which brand of ____ do you prefer?"},
      {QuestionLevel::frequent_aspect, "What aspects of ____ do you care about?"},
      {QuestionLevel::popular_aspect, "What aspects of ____ are you satisfied with?"}};
  EXPECT_THROW(TemplateSet{no_blank}, InvalidArgument);
  auto j = nlohmann::json::parse(R"({"templates": [{"level": "overall", "template": "____?"}]})");
  EXPECT_THROW(TemplateSet::from_json(j), Error);
}

TEST(TemplateTest, FixtureTemplatesLoad) {
  auto set = TemplateSet::load(std::string(MINER_FIXTURE_DIR) + "/templates.json");
  EXPECT_EQ(set.get(QuestionLevel::brand).text, "Which brand of ____ do you prefer?");
}

TEST(OverallSentimentTest, Examples) {
  EXPECT_NEAR(overall_sentiment({8341, 1198}), 0.8744, 0.00005);
  EXPECT_DOUBLE_EQ(overall_sentiment({4054, 363}), 4054.0 / 4417.0);
  EXPECT_EQ(overall_sentiment({0, 5}), 0.0);
  EXPECT_EQ(overall_sentiment({5, 0}), 1.0);
  EXPECT_THROW(overall_sentiment({0, 0}), InvalidArgument);
  EXPECT_THROW(overall_sentiment({-1, 3}), InvalidArgument);
}

TEST(OverallSentimentTest, MacroAndMicroOverProducts) {
  const Groups zh = {{"camera", {4054, 363}}, {"phone", {3607, 777}}, {"tablet", {680, 58}}};
  auto macro = std::get<OverallAnswer>(answer_overall(zh, AggregationMode::macro));
  EXPECT_NEAR(macro.os, 0.8873, 0.0001);
  EXPECT_EQ(macro.pooled.pos, 8341);
  EXPECT_EQ(macro.pooled.neg, 1198);
  EXPECT_NEAR(macro.micro_os, 0.8744, 0.0001);
  auto micro = std::get<OverallAnswer>(answer_overall(zh, AggregationMode::micro));
  EXPECT_EQ(micro.os, micro.micro_os);
  ASSERT_EQ(micro.groups.size(), 3u);
  EXPECT_DOUBLE_EQ(micro.groups[1].os, 3607.0 / 4384.0);
}

TEST(OverallSentimentProperty, MicroIsCountWeightedMeanMacroIsPlainMean) {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    Groups groups;
    const auto n = 1 + uniform_index(rng, 5);
    for (std::uint64_t i = 0; i < n; ++i) {
      PolarityCounts c{static_cast<std::int64_t>(uniform_index(rng, 300)),
                       static_cast<std::int64_t>(1 + uniform_index(rng, 300))};
      groups.emplace_back(std::to_string(i), c);
    }
    double weighted = 0.0, plain = 0.0, total = 0.0;
    for (const auto& [name, c] : groups) {
      const double os = overall_sentiment(c);
      weighted += os * static_cast<double>(c.total());
      plain += os;
      total += static_cast<double>(c.total());
    }
    auto micro = std::get<OverallAnswer>(answer_overall(groups, AggregationMode::micro));
    auto macro = std::get<OverallAnswer>(answer_overall(groups, AggregationMode::macro));
    EXPECT_NEAR(micro.os, weighted / total, 1e-12);
    EXPECT_NEAR(macro.os, plain / static_cast<double>(n), 1e-12);
    EXPECT_EQ(macro.micro_os, micro.os);
  }
}

TEST(OverallSentimentTest, EmptyGroupIsInsufficient) {
  const Groups g = {{"camera", {3, 1}}, {"phone", {0, 0}}};
  EXPECT_TRUE(std::holds_alternative<InsufficientData>(answer_overall(g, AggregationMode::macro)));
  EXPECT_TRUE(std::holds_alternative<InsufficientData>(answer_overall(Groups{}, AggregationMode::micro)));
}

TEST(AggregationModeTest, Parses) {
  EXPECT_EQ(parse_aggregation_mode("micro"), AggregationMode::micro);
  EXPECT_EQ(parse_aggregation_mode("macro"), AggregationMode::macro);
  EXPECT_THROW(parse_aggregation_mode("weighted"), InvalidArgument);
}

TEST(BrandPreferenceTest, HigherOsWins) {
  const Groups g = {{"apple", {6401, 3599}}, {"samsung", {7548, 2452}}};
  auto a = std::get<BrandAnswer>(answer_brand(g));
  EXPECT_EQ(a.preferred, "samsung");
  EXPECT_NEAR(a.brands[0].os, 0.6401, 1e-12);
  EXPECT_NEAR(a.brands[1].os, 0.7548, 1e-12);
}

TEST(BrandPreferenceTest, TieGoesToLaterOption) {
  const Groups g = {{"canon", {3, 1}}, {"nikon", {6, 2}}};
  EXPECT_EQ(std::get<BrandAnswer>(answer_brand(g)).preferred, "nikon");
  const Groups first_wins = {{"canon", {4, 1}}, {"nikon", {6, 2}}};
  EXPECT_EQ(std::get<BrandAnswer>(answer_brand(first_wins)).preferred, "canon");
}

TEST(BrandPreferenceTest, InsufficientData) {
  const Groups one = {{"canon", {3, 1}}};
  EXPECT_TRUE(std::holds_alternative<InsufficientData>(answer_brand(one)));
  const Groups empty_brand = {{"canon", {3, 1}}, {"nikon", {0, 0}}};
  EXPECT_TRUE(std::holds_alternative<InsufficientData>(answer_brand(empty_brand)));
}

TEST(BrandPreferenceProperty, InvariantUnderPositiveScaling) {
  Rng rng(44);
  for (int trial = 0; trial < 1000; ++trial) {
    PolarityCounts a{static_cast<std::int64_t>(uniform_index(rng, 500)),
                     static_cast<std::int64_t>(uniform_index(rng, 500))};
    PolarityCounts b{static_cast<std::int64_t>(uniform_index(rng, 500)),
                     static_cast<std::int64_t>(uniform_index(rng, 500))};
    if (a.total() == 0 || b.total() == 0) continue;
    const auto base = std::get<BrandAnswer>(answer_brand(Groups{{"a", a}, {"b", b}})).preferred;
    const auto ka = static_cast<std::int64_t>(1 + uniform_index(rng, 20));
    const auto kb = static_cast<std::int64_t>(1 + uniform_index(rng, 20));
    PolarityCounts sa{a.pos * ka, a.neg * ka}, sb{b.pos * kb, b.neg * kb};
    EXPECT_EQ(std::get<BrandAnswer>(answer_brand(Groups{{"a", sa}, {"b", sb}})).preferred, base);
  }
}

TEST(DecisionFactorsTest, FrequentAndPopularRankings) {
  SentimentLexicon lex({{"好", 1}, {"差", -1}});
  std::vector<ReviewDocument> reviews;
  int id = 0;
  auto add = [&](std::vector<std::string> t) {
    reviews.push_back(testing::make_doc(std::to_string(id++), std::move(t)));
  };
  for (int i = 0; i < 5; ++i) add({"包装", "好"});
  add({"包装", "差"});
  for (int i = 0; i < 4; ++i) add({"正品", "好"});
  for (int i = 0; i < 2; ++i) add({"价格", "差"});
  add({"价格", "好"});
  std::vector<Aspect> candidates = {Aspect::single("价格"), Aspect::single("包装"),
                                    Aspect::single("正品"), Aspect::single("镜头")};
  auto [freq, pop] = answer_decision_factors(candidates, reviews, lex, 10);
  const auto& f = std::get<AspectAnswer>(freq);
  ASSERT_EQ(f.aspects.size(), 3u);
  EXPECT_EQ(f.aspects[0].aspect, "包装");
  EXPECT_EQ(f.aspects[1].aspect, "正品");
  EXPECT_EQ(f.aspects[2].aspect, "价格");
  EXPECT_TRUE(f.shortfall);
  const std::vector<std::int64_t> fa = {6, 4, 3};
  EXPECT_DOUBLE_EQ(f.entropy, entropy_frequent(fa));
  const auto& p = std::get<AspectAnswer>(pop);
  EXPECT_EQ(p.aspects[0].aspect, "正品");
  EXPECT_EQ(p.aspects[1].aspect, "包装");
  EXPECT_EQ(p.aspects[2].aspect, "价格");
  const std::vector<double> pa = {1.0, 5.0 / 6.0, 1.0 / 3.0};
  EXPECT_DOUBLE_EQ(p.entropy, entropy_popular(pa));
  EXPECT_EQ(p.zero_pa_aspects, 0u);
}

TEST(DecisionFactorsTest, ZeroPopularityAspectsAreCounted) {
  FrequentRanking r;
  AspectStats good, bad;
  good.aspect = "lens";
  good.pos = good.fa = 2;
  good.pa = 1.0;
  bad.aspect = "battery";
  bad.neg = bad.fa = 3;
  bad.pa = 0.0;
  r.aspects = {bad, good};
  r.requested = 2;
  auto [freq, pop] = answer_decision_factors(r);
  const auto& p = std::get<AspectAnswer>(pop);
  EXPECT_EQ(p.zero_pa_aspects, 1u);
  EXPECT_EQ(p.entropy, 0.0);
  EXPECT_EQ(p.aspects.back().aspect, "battery");
}

TEST(DecisionFactorsTest, NothingMentionedIsInsufficient) {
  auto [freq, pop] = answer_decision_factors(FrequentRanking{});
  EXPECT_TRUE(std::holds_alternative<InsufficientData>(freq));
  EXPECT_TRUE(std::holds_alternative<InsufficientData>(pop));
}

SurveyReport small_report() {
  SurveyReport r;
  r.metadata = {{"seed", 1}};
  r.taxonomy = three_categories();
  r.taxonomy.categories.resize(1);
  r.questions = generate_questions(r.taxonomy, TemplateSet::defaults());
  CorpusAnswers zh;
  zh.tag = "zh";
  zh.reviews = 6;
  const Groups products = {{"camera", {4, 2}}};
  const Groups brands = {{"canon", {3, 0}}, {"nikon", {0, 0}}};
  FrequentRanking ranking;
  AspectStats lens;
  lens.aspect = "镜头";
  lens.pos = 2;
  lens.neg = 1;
  lens.fa = 3;
  lens.pa = 2.0 / 3.0;
  ranking.aspects = {lens};
  ranking.requested = 10;
  ranking.shortfall = true;
  auto [freq, pop] = answer_decision_factors(ranking);
  zh.answers = {answer_overall(products, AggregationMode::macro),
                answer_overall(products, AggregationMode::micro), answer_brand(brands), freq, pop};
  r.corpora.push_back(zh);
  return r;
}

TEST(ReportTest, RendersAllSectionsDeterministically) {
  auto report = small_report();
  auto a = render_json(report).dump(2);
  auto b = render_json(small_report()).dump(2);
  EXPECT_EQ(a, b);
  auto j = render_json(report);
  for (const char* section : kReportSections) EXPECT_TRUE(j.at("sections").contains(section)) << section;
  EXPECT_EQ(render_markdown(report), render_markdown(small_report()));
}

TEST(ReportTest, BrandWithoutReviewsIsReportedNotFatal) {
  auto j = render_json(small_report());
  const auto dump = j.dump();
  EXPECT_NE(dump.find("insufficient"), std::string::npos);
  EXPECT_NE(render_markdown(small_report()).find("insufficient data"), std::string::npos);
}

}  // namespace
}  // namespace miner
