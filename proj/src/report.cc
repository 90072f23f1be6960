#include "miner/report.h"

#include <fmt/format.h>

namespace miner {

using nlohmann::json;

namespace {

const Question& question_at(const SurveyReport& r, std::size_t i) { return r.questions.at(i); }

json insufficient(const InsufficientData& d) {
  return json{{"status", "insufficient_data"}, {"reason", d.reason}};
}

std::string category_name(const SurveyReport& r, const std::string& id) {
  const Category* c = r.taxonomy.find(id);
  return c ? c->name : id;
}

std::string brand_name(const SurveyReport& r, const std::string& category,
                       const std::string& brand) {
  if (const Category* c = r.taxonomy.find(category)) {
    for (const auto& b : c->brands) {
      if (b.id == brand) return b.name;
    }
  }
  return brand;
}

json overall_section(const SurveyReport& r) {
  json overall = json::array();
  json products = json::array();
  for (const auto& corpus : r.corpora) {
    for (std::size_t i = 0; i < r.questions.size(); ++i) {
      const auto& q = question_at(r, i);
      if (q.level != QuestionLevel::overall && q.level != QuestionLevel::product) continue;
      json row{{"corpus", corpus.tag}};
      if (q.level == QuestionLevel::product) row["category"] = q.category_id;
      if (const auto* a = std::get_if<OverallAnswer>(&corpus.answers[i])) {
        row.update(json{{"status", "answered"},
                        {"mode", to_string(a->mode)},
                        {"reviews", a->pooled.total()},
                        {"pos", a->pooled.pos},
                        {"neg", a->pooled.neg},
                        {"os", a->os},
                        {"micro_os", a->micro_os}});
        if (a->mode == AggregationMode::macro) {
          json components = json::array();
          for (const auto& g : a->groups) {
            components.push_back(
                {{"group", g.group}, {"pos", g.counts.pos}, {"neg", g.counts.neg}, {"os", g.os}});
          }
          row["components"] = components;
        }
      } else {
        row.update(insufficient(std::get<InsufficientData>(corpus.answers[i])));
      }
      (q.level == QuestionLevel::overall ? overall : products).push_back(row);
    }
  }
  return json{{"overall", overall}, {"products", products}};
}

json brand_section(const SurveyReport& r) {
  json rows = json::array();
  for (const auto& corpus : r.corpora) {
    for (std::size_t i = 0; i < r.questions.size(); ++i) {
      const auto& q = question_at(r, i);
      if (q.level != QuestionLevel::brand) continue;
      json row{{"corpus", corpus.tag}, {"category", q.category_id}};
      if (const auto* a = std::get_if<BrandAnswer>(&corpus.answers[i])) {
        json brands = json::array();
        for (const auto& g : a->brands) {
          brands.push_back({{"brand", g.group},
                            {"reviews", g.counts.total()},
                            {"pos", g.counts.pos},
                            {"neg", g.counts.neg},
                            {"os", g.os}});
        }
        row.update(json{{"status", "answered"}, {"preferred", a->preferred}, {"brands", brands}});
      } else {
        row.update(insufficient(std::get<InsufficientData>(corpus.answers[i])));
      }
      rows.push_back(row);
    }
  }
  return rows;
}

// Pairs of (frequent, popular) answers per corpus and category.
template <typename Fn>
void for_each_aspect_pair(const SurveyReport& r, Fn&& fn) {
  for (const auto& corpus : r.corpora) {
    for (std::size_t i = 0; i < r.questions.size(); ++i) {
      const auto& q = question_at(r, i);
      if (q.level != QuestionLevel::frequent_aspect) continue;
      std::size_t j = i + 1;
      while (j < r.questions.size() && !(r.questions[j].level == QuestionLevel::popular_aspect &&
                                         r.questions[j].category_id == q.category_id)) {
        ++j;
      }
      const AnswerPayload* popular = j < r.questions.size() ? &corpus.answers[j] : nullptr;
      fn(corpus, q.category_id, corpus.answers[i], popular);
    }
  }
}

json aspects_section(const SurveyReport& r) {
  json rows = json::array();
  for_each_aspect_pair(r, [&](const CorpusAnswers& corpus, const std::string& category,
                              const AnswerPayload& frequent, const AnswerPayload* popular) {
    json row{{"corpus", corpus.tag}, {"category", category}};
    const auto* f = std::get_if<AspectAnswer>(&frequent);
    const auto* p = popular ? std::get_if<AspectAnswer>(popular) : nullptr;
    if (!f || !p) {
      row.update(insufficient(f ? InsufficientData{"no popular-aspect answer"}
                                : std::get<InsufficientData>(frequent)));
      rows.push_back(row);
      return;
    }
    json freq = json::array();
    for (const auto& s : f->aspects) {
      freq.push_back({{"aspect", s.aspect}, {"fa", s.fa}, {"pos", s.pos}, {"neg", s.neg}});
    }
    json pop = json::array();
    for (const auto& s : p->aspects) {
      pop.push_back({{"aspect", s.aspect}, {"pa", *s.pa}, {"pos", s.pos}, {"neg", s.neg}});
    }
    row.update(json{{"status", "answered"},
                    {"frequent", freq},
                    {"popular", pop},
                    {"requested", f->requested},
                    {"shortfall", f->shortfall}});
    rows.push_back(row);
  });
  return rows;
}

json entropy_section(const SurveyReport& r) {
  json rows = json::array();
  for_each_aspect_pair(r, [&](const CorpusAnswers& corpus, const std::string& category,
                              const AnswerPayload& frequent, const AnswerPayload* popular) {
    json row{{"corpus", corpus.tag}, {"category", category}};
    const auto* f = std::get_if<AspectAnswer>(&frequent);
    const auto* p = popular ? std::get_if<AspectAnswer>(popular) : nullptr;
    if (!f || !p) {
      row.update(insufficient(InsufficientData{"no ranked aspects"}));
    } else {
      row.update(json{{"status", "answered"},
                      {"frequent", f->entropy},
                      {"popular", p->entropy},
                      {"n_frequent", f->aspects.size()},
                      {"n_popular", p->aspects.size()},
                      {"zero_pa_aspects", p->zero_pa_aspects}});
    }
    rows.push_back(row);
  });
  return rows;
}

json alignment_section(const SurveyReport& r) {
  json rows = json::array();
  for (const auto& a : r.alignments) {
    json row{{"category", a.category}, {"source", a.source_tag}, {"target", a.target_tag}};
    if (const auto* al = std::get_if<Alignment>(&a.result)) {
      json pairs = json::array();
      for (const auto& p : al->pairs) {
        pairs.push_back({{"source_aspect", p.source.aspect},
                         {"target_aspect", p.target.aspect},
                         {"source_fa", p.source.fa},
                         {"target_fa", p.target.fa},
                         {"source_pa", *p.source.pa},
                         {"target_pa", *p.target.pa}});
      }
      row.update(json{{"status", "answered"},
                      {"pairs", pairs},
                      {"unmatched_source", al->unmatched_source},
                      {"unmatched_target", al->unmatched_target}});
    } else {
      row.update(insufficient(std::get<InsufficientData>(a.result)));
    }
    rows.push_back(row);
  }
  return rows;
}

std::string f4(double v) { return fmt::format("{:.4f}", v); }

}  // namespace

json render_json(const SurveyReport& r) {
  json questions = json::array();
  for (std::size_t i = 0; i < r.questions.size(); ++i) {
    json q = r.questions[i].to_json();
    q["index"] = i;
    questions.push_back(q);
  }
  json answers = json::object();
  json corpora = json::array();
  for (const auto& corpus : r.corpora) {
    json list = json::array();
    for (std::size_t i = 0; i < corpus.answers.size(); ++i) {
      json a = answer_to_json(corpus.answers[i]);
      a["question"] = i;
      list.push_back(a);
    }
    answers[corpus.tag] = list;
    corpora.push_back({{"tag", corpus.tag}, {"reviews", corpus.reviews}, {"dropped", corpus.dropped}});
  }
  return json{{"metadata", r.metadata},
              {"corpora", corpora},
              {"questions", questions},
              {"answers", answers},
              {"sections",
               {{"overall_sentiment", overall_section(r)},
                {"brand_preference", brand_section(r)},
                {"top_aspects", aspects_section(r)},
                {"entropy", entropy_section(r)},
                {"aspect_alignment", alignment_section(r)}}}};
}

std::string render_markdown(const SurveyReport& r) {
  const json doc = render_json(r);
  const json& sections = doc.at("sections");
  std::string out = "# Questionnaire report\n\n";

  out += "## Questions\n\n";
  for (std::size_t i = 0; i < r.questions.size(); ++i) {
    out += fmt::format("{}. {}\n", i + 1, r.questions[i].display());
  }

  out += "\n## Overall sentiment\n\n| Corpus | #Review | #Pos. | #Neg. | OS | Mode |\n"
         "|---|---|---|---|---|---|\n";
  for (const auto& row : sections.at("overall_sentiment").at("overall")) {
    if (row.at("status") != "answered") {
      out += fmt::format("| {} | insufficient data | | | | |\n", row.at("corpus").get<std::string>());
      continue;
    }
    out += fmt::format("| {} | {} | {} | {} | {} | {} |\n", row.at("corpus").get<std::string>(),
                       row.at("reviews").get<std::int64_t>(), row.at("pos").get<std::int64_t>(),
                       row.at("neg").get<std::int64_t>(), f4(row.at("os").get<double>()),
                       row.at("mode").get<std::string>());
  }

  out += "\n## Product sentiment\n\n| Corpus | Product | #Review | #Pos. | #Neg. | OS |\n"
         "|---|---|---|---|---|---|\n";
  for (const auto& row : sections.at("overall_sentiment").at("products")) {
    const auto name = category_name(r, row.at("category").get<std::string>());
    if (row.at("status") != "answered") {
      out += fmt::format("| {} | {} | insufficient data | | | |\n",
                         row.at("corpus").get<std::string>(), name);
      continue;
    }
    out += fmt::format("| {} | {} | {} | {} | {} | {} |\n", row.at("corpus").get<std::string>(),
                       name, row.at("reviews").get<std::int64_t>(),
                       row.at("pos").get<std::int64_t>(), row.at("neg").get<std::int64_t>(),
                       f4(row.at("os").get<double>()));
  }

  out += "\n## Brand preference\n\n| Corpus | Product | Brand | #Review | OS | Preferred |\n"
         "|---|---|---|---|---|---|\n";
  for (const auto& row : sections.at("brand_preference")) {
    const auto cat = row.at("category").get<std::string>();
    if (row.at("status") != "answered") {
      out += fmt::format("| {} | {} | insufficient data | | | |\n",
                         row.at("corpus").get<std::string>(), category_name(r, cat));
      continue;
    }
    const auto preferred = row.at("preferred").get<std::string>();
    for (const auto& b : row.at("brands")) {
      const auto id = b.at("brand").get<std::string>();
      out += fmt::format("| {} | {} | {} | {} | {} | {} |\n", row.at("corpus").get<std::string>(),
                         category_name(r, cat), brand_name(r, cat, id),
                         b.at("reviews").get<std::int64_t>(), f4(b.at("os").get<double>()),
                         id == preferred ? "yes" : "");
    }
  }

  out += "\n## Top aspects\n";
  for (const auto& row : sections.at("top_aspects")) {
    const auto cat = category_name(r, row.at("category").get<std::string>());
    out += fmt::format("\n### {} ({})\n\n", cat, row.at("corpus").get<std::string>());
    if (row.at("status") != "answered") {
      out += "insufficient data\n";
      continue;
    }
    out += "| Rank | Frequent aspect | FA | Popular aspect | PA |\n|---|---|---|---|---|\n";
    const auto& freq = row.at("frequent");
    const auto& pop = row.at("popular");
    for (std::size_t i = 0; i < freq.size(); ++i) {
      out += fmt::format("| {} | {} | {} | {} | {} |\n", i + 1,
                         freq[i].at("aspect").get<std::string>(),
                         freq[i].at("fa").get<std::int64_t>(),
                         pop[i].at("aspect").get<std::string>(),
                         f4(pop[i].at("pa").get<double>()));
    }
    if (row.at("shortfall").get<bool>()) {
      out += fmt::format("\nOnly {} of {} requested aspects are mentioned.\n", freq.size(),
                         row.at("requested").get<std::size_t>());
    }
  }

  out += "\n## Entropy\n\n| Corpus | Product | E_fre | E_pop |\n|---|---|---|---|\n";
  for (const auto& row : sections.at("entropy")) {
    const auto cat = category_name(r, row.at("category").get<std::string>());
    if (row.at("status") != "answered") {
      out += fmt::format("| {} | {} | insufficient data | |\n", row.at("corpus").get<std::string>(),
                         cat);
      continue;
    }
    out += fmt::format("| {} | {} | {} | {} |\n", row.at("corpus").get<std::string>(), cat,
                       f4(row.at("frequent").get<double>()), f4(row.at("popular").get<double>()));
  }

  out += "\n## Shared frequent aspects\n";
  for (const auto& row : sections.at("aspect_alignment")) {
    const auto src = row.at("source").get<std::string>();
    const auto tgt = row.at("target").get<std::string>();
    out += fmt::format("\n### {} ({} vs {})\n\n", category_name(r, row.at("category").get<std::string>()),
                       src, tgt);
    if (row.at("status") != "answered") {
      out += "insufficient data\n";
      continue;
    }
    out += fmt::format("| {} aspect | {} aspect | PA {} | PA {} |\n|---|---|---|---|\n", src, tgt,
                       src, tgt);
    for (const auto& p : row.at("pairs")) {
      out += fmt::format("| {} | {} | {} | {} |\n", p.at("source_aspect").get<std::string>(),
                         p.at("target_aspect").get<std::string>(),
                         f4(p.at("source_pa").get<double>()), f4(p.at("target_pa").get<double>()));
    }
  }
  return out;
}

}  // namespace miner
