#include "miner/survey.h"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "miner/error.h"
#include "miner/util.h"

namespace miner {

using nlohmann::json;

namespace {

constexpr QuestionLevel kLevels[] = {QuestionLevel::overall, QuestionLevel::product,
                                     QuestionLevel::brand, QuestionLevel::frequent_aspect,
                                     QuestionLevel::popular_aspect};

std::size_t count_blanks(std::string_view text) {
  std::size_t count = 0;
  for (auto pos = text.find(kBlank); pos != std::string_view::npos;
       pos = text.find(kBlank, pos + kBlank.size())) {
    ++count;
  }
  return count;
}

}  // namespace

QuestionLevel parse_question_level(std::string_view name) {
  for (auto level : kLevels) {
    if (to_string(level) == name) return level;
  }
  throw InvalidArgument("unknown question level '" + std::string(name) + "'");
}

std::string_view to_string(QuestionLevel level) {
  switch (level) {
    case QuestionLevel::overall: return "overall";
    case QuestionLevel::product: return "product";
    case QuestionLevel::brand: return "brand";
    case QuestionLevel::frequent_aspect: return "frequent_aspect";
    case QuestionLevel::popular_aspect: return "popular_aspect";
  }
  return "unknown";
}

TemplateSet::TemplateSet(std::vector<QuestionTemplate> templates)
    : templates_(std::move(templates)) {
  for (auto level : kLevels) {
    auto n = std::count_if(templates_.begin(), templates_.end(),
                           [&](const QuestionTemplate& t) { return t.level == level; });
    if (n != 1) {
      throw InvalidArgument("template set needs exactly one '" + std::string(to_string(level)) +
                            "' template");
    }
  }
  for (const auto& t : templates_) {
    if (count_blanks(t.text) != 1) {
      throw InvalidArgument("template '" + t.text + "' must contain exactly one " +
                            std::string(kBlank));
    }
  }
}

TemplateSet TemplateSet::from_json(const json& j) {
  std::vector<QuestionTemplate> templates;
  for (const auto& item : j.at("templates")) {
    templates.push_back({parse_question_level(item.at("level").get<std::string>()),
                         item.at("template").get<std::string>()});
  }
  return TemplateSet(std::move(templates));
}

TemplateSet TemplateSet::load(const std::string& path) {
  try {
    return from_json(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw InputError(path, 0, e.what());
  }
}

TemplateSet TemplateSet::defaults() {
  return TemplateSet({{QuestionLevel::overall, "Do you like ____?"},
                      {QuestionLevel::product, "Do you like ____?"},
                      {QuestionLevel::brand, "Which brand of ____ do you prefer?"},
                      {QuestionLevel::frequent_aspect, "What aspects of ____ do you care about?"},
                      {QuestionLevel::popular_aspect,
                       "What aspects of ____ are you satisfied with?"}});
}

const QuestionTemplate& TemplateSet::get(QuestionLevel level) const {
  for (const auto& t : templates_) {
    if (t.level == level) return t;
  }
  throw InvalidArgument("no template for level " + std::string(to_string(level)));
}

std::string fill_template(const QuestionTemplate& tmpl, std::string_view slot) {
  std::string out = tmpl.text;
  out.replace(out.find(kBlank), kBlank.size(), slot);
  return out;
}

std::optional<std::string> parse_slot(const QuestionTemplate& tmpl, std::string_view text) {
  const std::string_view t(tmpl.text);
  const auto blank = t.find(kBlank);
  const auto prefix = t.substr(0, blank);
  const auto suffix = t.substr(blank + kBlank.size());
  if (text.size() < prefix.size() + suffix.size()) return std::nullopt;
  if (text.substr(0, prefix.size()) != prefix) return std::nullopt;
  if (text.substr(text.size() - suffix.size()) != suffix) return std::nullopt;
  return std::string(text.substr(prefix.size(), text.size() - prefix.size() - suffix.size()));
}

ProductTaxonomy ProductTaxonomy::from_json(const json& j) {
  ProductTaxonomy tax;
  tax.overall_label = j.at("overall_label").get<std::string>();
  std::set<std::string> ids;
  for (const auto& c : j.at("categories")) {
    Category cat{c.at("id").get<std::string>(), c.at("name").get<std::string>(), {}};
    if (!ids.insert(cat.id).second) {
      throw InvalidArgument("taxonomy: duplicate category '" + cat.id + "'");
    }
    std::set<std::string> brand_ids;
    for (const auto& b : c.value("brands", json::array())) {
      Brand brand{b.at("id").get<std::string>(), b.at("name").get<std::string>()};
      if (!brand_ids.insert(brand.id).second) {
        throw InvalidArgument("taxonomy: duplicate brand '" + brand.id + "' in " + cat.id);
      }
      cat.brands.push_back(std::move(brand));
    }
    tax.categories.push_back(std::move(cat));
  }
  return tax;
}

ProductTaxonomy ProductTaxonomy::load(const std::string& path) {
  try {
    return from_json(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw InputError(path, 0, e.what());
  }
}

const Category* ProductTaxonomy::find(const std::string& id) const {
  for (const auto& c : categories) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::string Question::display() const {
  std::string out = text;
  for (std::size_t i = 0; i < options.size(); ++i) {
    out += ' ';
    // Options past Z are not expected; taxonomies list a handful of brands.
    out += static_cast<char>('A' + static_cast<int>(i % 26));
    out += ". ";
    out += options[i].name;
  }
  return out;
}

json Question::to_json() const {
  json opts = json::array();
  for (const auto& b : options) opts.push_back({{"id", b.id}, {"name", b.name}});
  return json{{"level", to_string(level)},
              {"text", text},
              {"display", display()},
              {"slot", slot},
              {"category", category_id.empty() ? json(nullptr) : json(category_id)},
              {"options", opts}};
}

std::vector<Question> generate_questions(const ProductTaxonomy& taxonomy,
                                         const TemplateSet& templates) {
  if (taxonomy.categories.empty()) throw InvalidArgument("taxonomy has no categories");
  auto make = [&](QuestionLevel level, const std::string& slot, const std::string& category) {
    return Question{level, fill_template(templates.get(level), slot), slot, category, {}};
  };
  std::vector<Question> out;
  out.push_back(make(QuestionLevel::overall, taxonomy.overall_label, ""));
  for (const auto& c : taxonomy.categories) {
    out.push_back(make(QuestionLevel::product, c.name, c.id));
    if (c.brands.size() >= 2) {
      auto q = make(QuestionLevel::brand, c.name, c.id);
      q.options = c.brands;
      out.push_back(std::move(q));
    }
    out.push_back(make(QuestionLevel::frequent_aspect, c.name, c.id));
    out.push_back(make(QuestionLevel::popular_aspect, c.name, c.id));
  }
  return out;
}

double overall_sentiment(const PolarityCounts& counts) {
  if (counts.pos < 0 || counts.neg < 0) throw InvalidArgument("negative polarity count");
  if (counts.total() == 0) throw InvalidArgument("overall sentiment of an empty group");
  return static_cast<double>(counts.pos) / static_cast<double>(counts.total());
}

AggregationMode parse_aggregation_mode(std::string_view name) {
  if (name == "micro") return AggregationMode::micro;
  if (name == "macro") return AggregationMode::macro;
  throw InvalidArgument("unknown aggregation mode '" + std::string(name) + "'");
}

std::string_view to_string(AggregationMode mode) {
  return mode == AggregationMode::micro ? "micro" : "macro";
}

AnswerPayload answer_overall(std::span<const std::pair<std::string, PolarityCounts>> groups,
                             AggregationMode mode) {
  if (groups.empty()) return InsufficientData{"no review groups"};
  OverallAnswer answer;
  answer.mode = mode;
  double sum = 0.0;
  for (const auto& [name, counts] : groups) {
    if (counts.total() == 0) return InsufficientData{"no classified reviews for '" + name + "'"};
    const double os = overall_sentiment(counts);
    answer.groups.push_back({name, counts, os});
    answer.pooled += counts;
    sum += os;
  }
  answer.micro_os = overall_sentiment(answer.pooled);
  answer.os = mode == AggregationMode::micro ? answer.micro_os
                                             : sum / static_cast<double>(groups.size());
  return answer;
}

AnswerPayload answer_brand(std::span<const std::pair<std::string, PolarityCounts>> brands) {
  if (brands.size() < 2) return InsufficientData{"brand preference needs two brands"};
  BrandAnswer answer;
  for (const auto& [name, counts] : brands) {
    if (counts.total() == 0) return InsufficientData{"no classified reviews for brand '" + name + "'"};
    answer.brands.push_back({name, counts, overall_sentiment(counts)});
  }
  const GroupSentiment* best = &answer.brands.front();
  for (std::size_t i = 1; i < answer.brands.size(); ++i) {
    if (!(best->os > answer.brands[i].os)) best = &answer.brands[i];
  }
  answer.preferred = best->group;
  return answer;
}

std::pair<AnswerPayload, AnswerPayload> answer_decision_factors(const FrequentRanking& ranking) {
  if (ranking.aspects.empty()) {
    InsufficientData none{"no candidate aspect is mentioned in the reviews"};
    return {none, none};
  }
  AspectAnswer frequent;
  frequent.level = QuestionLevel::frequent_aspect;
  frequent.aspects = ranking.aspects;
  frequent.requested = ranking.requested;
  frequent.shortfall = ranking.shortfall;
  std::vector<std::int64_t> fa;
  for (const auto& a : frequent.aspects) fa.push_back(a.fa);
  frequent.entropy = entropy_frequent(fa);

  AspectAnswer popular = frequent;
  popular.level = QuestionLevel::popular_aspect;
  std::stable_sort(popular.aspects.begin(), popular.aspects.end(),
                   [](const AspectStats& a, const AspectStats& b) {
                     if (*a.pa != *b.pa) return *a.pa > *b.pa;
                     return a.aspect < b.aspect;
                   });
  std::vector<double> pa;
  for (const auto& a : popular.aspects) {
    if (*a.pa > 0.0) {
      pa.push_back(*a.pa);
    } else {
      ++popular.zero_pa_aspects;
    }
  }
  popular.entropy = pa.empty() ? 0.0 : entropy_popular(pa);
  return {frequent, popular};
}

std::pair<AnswerPayload, AnswerPayload> answer_decision_factors(
    std::span<const Aspect> candidates, std::span<const ReviewDocument> reviews,
    const SentimentLexicon& lexicon, std::size_t n) {
  return answer_decision_factors(top_frequent(candidates, reviews, lexicon, n));
}

namespace {

json group_json(const GroupSentiment& g) {
  return json{{"group", g.group},
              {"pos", g.counts.pos},
              {"neg", g.counts.neg},
              {"reviews", g.counts.total()},
              {"os", g.os}};
}

}  // namespace

json answer_to_json(const AnswerPayload& payload) {
  return std::visit(
      [](const auto& a) -> json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, InsufficientData>) {
          return json{{"status", "insufficient_data"}, {"reason", a.reason}};
        } else if constexpr (std::is_same_v<T, OverallAnswer>) {
          json groups = json::array();
          for (const auto& g : a.groups) groups.push_back(group_json(g));
          return json{{"status", "answered"},
                      {"kind", "overall_sentiment"},
                      {"mode", to_string(a.mode)},
                      {"os", a.os},
                      {"micro_os", a.micro_os},
                      {"pos", a.pooled.pos},
                      {"neg", a.pooled.neg},
                      {"reviews", a.pooled.total()},
                      {"groups", groups}};
        } else if constexpr (std::is_same_v<T, BrandAnswer>) {
          json brands = json::array();
          for (const auto& g : a.brands) brands.push_back(group_json(g));
          return json{{"status", "answered"},
                      {"kind", "brand_preference"},
                      {"preferred", a.preferred},
                      {"brands", brands}};
        } else {
          json aspects = json::array();
          for (const auto& s : a.aspects) aspects.push_back(s.to_json());
          return json{{"status", "answered"},
                      {"kind", to_string(a.level)},
                      {"aspects", aspects},
                      {"entropy", a.entropy},
                      {"requested", a.requested},
                      {"shortfall", a.shortfall},
                      {"zero_pa_aspects", a.zero_pa_aspects}};
        }
      },
      payload);
}

}  // namespace miner
