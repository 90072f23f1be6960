#include "miner/topics.h"

#include <algorithm>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "miner/error.h"
#include "miner/util.h"

namespace miner {

using nlohmann::json;

std::ptrdiff_t TopicModel::word_id(const std::string& term) const {
  auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), term);
  if (it == vocabulary.end() || *it != term) return -1;
  return it - vocabulary.begin();
}

json TopicModel::to_json() const {
  return json{{"k", params.k},
              {"alpha", params.alpha},
              {"beta", params.beta},
              {"iterations", params.iterations},
              {"seed", params.seed},
              {"vocabulary", vocabulary},
              {"phi", phi},
              {"theta", theta}};
}

TopicModel TopicModel::from_json(const json& j) {
  TopicModel m;
  m.params.k = j.at("k").get<int>();
  m.params.alpha = j.at("alpha").get<double>();
  m.params.beta = j.at("beta").get<double>();
  m.params.iterations = j.at("iterations").get<int>();
  m.params.seed = j.at("seed").get<std::uint64_t>();
  m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  m.phi = j.at("phi").get<std::vector<std::vector<double>>>();
  m.theta = j.at("theta").get<std::vector<std::vector<double>>>();
  if (static_cast<int>(m.phi.size()) != m.params.k) {
    throw InvalidArgument("topic model: phi has wrong number of rows");
  }
  for (const auto& row : m.phi) {
    if (row.size() != m.vocabulary.size()) {
      throw InvalidArgument("topic model: phi row length differs from vocabulary");
    }
  }
  return m;
}

TopicModel fit_lda(std::span<const std::vector<std::string>> docs, const LdaParams& params,
                   const SweepObserver& observer) {
  if (params.k < 2) throw InvalidArgument("fit_lda: k must be >= 2");
  if (docs.empty()) throw InvalidArgument("fit_lda: empty corpus");
  if (!(params.alpha > 0.0) || !(params.beta > 0.0)) {
    throw InvalidArgument("fit_lda: alpha and beta must be > 0");
  }
  if (params.iterations < 0) throw InvalidArgument("fit_lda: negative iteration count");
  for (const auto& d : docs) {
    if (d.empty()) throw InvalidArgument("fit_lda: document without tokens");
  }

  const auto k = static_cast<std::size_t>(params.k);
  TopicModel model;
  model.params = params;

  std::map<std::string, std::size_t> ids;
  for (const auto& d : docs) {
    for (const auto& t : d) ids.emplace(t, 0);
  }
  model.vocabulary.reserve(ids.size());
  for (auto& [term, id] : ids) {
    id = model.vocabulary.size();
    model.vocabulary.push_back(term);
  }
  const std::size_t vocab = model.vocabulary.size();

  std::vector<std::vector<std::size_t>> words(docs.size());
  std::vector<std::vector<std::size_t>> z(docs.size());
  std::vector<std::vector<std::int64_t>> nw(vocab, std::vector<std::int64_t>(k, 0));
  std::vector<std::vector<std::int64_t>> nd(docs.size(), std::vector<std::int64_t>(k, 0));
  std::vector<std::int64_t> nt(k, 0);
  std::size_t token_count = 0;

  Rng rng(params.seed);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& t : docs[d]) {
      const std::size_t w = ids.at(t);
      const std::size_t topic = uniform_index(rng, k);
      words[d].push_back(w);
      z[d].push_back(topic);
      ++nw[w][topic];
      ++nd[d][topic];
      ++nt[topic];
      ++token_count;
    }
  }

  const GibbsState state{token_count, &nw, &nd, &nt};
  const double vbeta = static_cast<double>(vocab) * params.beta;
  std::vector<double> cumulative(k);
  for (int sweep = 1; sweep <= params.iterations; ++sweep) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const std::size_t w = words[d][i];
        std::size_t topic = z[d][i];
        --nw[w][topic];
        --nd[d][topic];
        --nt[topic];

        double total = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
          total += (static_cast<double>(nd[d][t]) + params.alpha) *
                   (static_cast<double>(nw[w][t]) + params.beta) /
                   (static_cast<double>(nt[t]) + vbeta);
          cumulative[t] = total;
        }
        const double u = uniform_unit(rng) * total;
        topic = static_cast<std::size_t>(
            std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        topic = std::min(topic, k - 1);

        z[d][i] = topic;
        ++nw[w][topic];
        ++nd[d][topic];
        ++nt[topic];
      }
    }
    if (observer) observer(sweep, state);
  }

  model.phi.assign(k, std::vector<double>(vocab));
  for (std::size_t t = 0; t < k; ++t) {
    const double denom = static_cast<double>(nt[t]) + vbeta;
    for (std::size_t w = 0; w < vocab; ++w) {
      model.phi[t][w] = (static_cast<double>(nw[w][t]) + params.beta) / denom;
    }
  }
  model.theta.assign(docs.size(), std::vector<double>(k));
  const double kalpha = static_cast<double>(k) * params.alpha;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const double denom = static_cast<double>(words[d].size()) + kalpha;
    for (std::size_t t = 0; t < k; ++t) {
      model.theta[d][t] = (static_cast<double>(nd[d][t]) + params.alpha) / denom;
    }
  }
  return model;
}

NounLexicon NounLexicon::load(const std::string& path) {
  std::set<std::string> entries;
  for (const auto& line : split_lines(read_file(path))) {
    auto term = trim(line);
    if (term.empty() || term.front() == '#') continue;
    entries.emplace(term);
  }
  return NounLexicon(std::move(entries));
}

NounLexicon NounLexicon::from_tagged(std::string_view tagged) {
  std::set<std::string> entries;
  std::istringstream in{std::string(tagged)};
  std::string item;
  while (in >> item) {
    const auto slash = item.rfind('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == item.size()) continue;
    const char tag = item[slash + 1];
    if (tag == 'N' || tag == 'n') entries.insert(item.substr(0, slash));
  }
  return NounLexicon(std::move(entries));
}

NounLexicon NounLexicon::normalized(const Tokenizer& tokenizer) const {
  std::set<std::string> out;
  for (const auto& e : entries_) {
    auto tokens = tokenizer.tokenize(e);
    out.insert(tokens.size() == 1 ? tokens.front() : e);
  }
  return NounLexicon(std::move(out));
}

std::vector<CandidateAspect> candidate_aspects(const TopicModel& model,
                                               const NounLexicon& nouns, int m) {
  if (m < 1) throw InvalidArgument("candidate_aspects: m must be >= 1");
  std::vector<CandidateAspect> out;
  for (std::size_t w = 0; w < model.vocabulary.size(); ++w) {
    if (!nouns.contains(model.vocabulary[w])) continue;
    double score = 0.0;
    for (const auto& row : model.phi) score += row[w];
    out.push_back({model.vocabulary[w], score});
  }
  if (out.empty()) throw InvalidArgument("candidate_aspects: no nouns present in vocabulary");
  std::sort(out.begin(), out.end(), [](const CandidateAspect& a, const CandidateAspect& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.term < b.term;
  });
  out.resize(std::min(out.size(), static_cast<std::size_t>(m)));
  return out;
}

}  // namespace miner
