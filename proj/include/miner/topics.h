#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "miner/tokenizer.h"

namespace miner {

struct LdaParams {
  int k = 10;
  double alpha = 5.0;  // 50 / k for the default k
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 0;

  static LdaParams with_default_alpha(int k) {
    LdaParams p;
    p.k = k;
    p.alpha = 50.0 / k;
    return p;
  }
};

struct TopicModel {
  LdaParams params;
  std::vector<std::string> vocabulary;        // sorted; column index = word id
  std::vector<std::vector<double>> phi;       // k x V
  std::vector<std::vector<double>> theta;     // D x k

  std::size_t topic_count() const { return phi.size(); }
  std::ptrdiff_t word_id(const std::string& term) const;

  nlohmann::json to_json() const;
  static TopicModel from_json(const nlohmann::json& j);
};

// Sampler counts, exposed to sweep observers.
struct GibbsState {
  std::size_t token_count = 0;
  const std::vector<std::vector<std::int64_t>>* word_topic = nullptr;  // V x k
  const std::vector<std::vector<std::int64_t>>* doc_topic = nullptr;    // D x k
  const std::vector<std::int64_t>* topic_totals = nullptr;              // k
};

// Called after every sweep with the 1-based sweep number.
using SweepObserver = std::function<void(int sweep, const GibbsState& state)>;

// Collapsed Gibbs sampling with symmetric Dirichlet priors. phi and theta are
// point estimates from the final state:
//   phi[t][w]   = (n_tw + beta)  / (n_t + V beta)
//   theta[d][t] = (n_dt + alpha) / (len_d + k alpha)
// Deterministic for a given seed.
TopicModel fit_lda(std::span<const std::vector<std::string>> docs, const LdaParams& params,
                   const SweepObserver& observer = {});

class NounLexicon {
 public:
  NounLexicon() = default;
  explicit NounLexicon(std::set<std::string> entries) : entries_(std::move(entries)) {}

  // One term per line; blank lines and '#' comments ignored.
  static NounLexicon load(const std::string& path);
  // Builds the lexicon from POS-tagged text of whitespace-separated
  // token/TAG pairs, keeping tokens whose tag starts with 'N' or 'n'.
  static NounLexicon from_tagged(std::string_view tagged);

  // Entries passed through `tokenizer` so they compare equal to document
  // tokens; entries that do not come out as a single token are kept as is.
  NounLexicon normalized(const Tokenizer& tokenizer) const;

  bool contains(const std::string& term) const { return entries_.count(term) > 0; }
  bool empty() const { return entries_.empty(); }
  const std::set<std::string>& entries() const { return entries_; }

 private:
  std::set<std::string> entries_;
};

struct CandidateAspect {
  std::string term;
  double score = 0.0;  // summed topic probability, in (0, k]
};

// Nouns ranked by the sum over topics of phi[topic][term]; top m, ties by
// term. Throws when no vocabulary term is a noun.
std::vector<CandidateAspect> candidate_aspects(const TopicModel& model,
                                               const NounLexicon& nouns, int m);

}  // namespace miner
