#include "miner/aspects.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>
#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "miner/error.h"
#include "miner/util.h"

namespace miner {

using nlohmann::json;

namespace {

std::string lowercase_utf8(std::string_view s) {
  std::string out;
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  int32_t i = 0;
  const auto n = static_cast<int32_t>(s.size());
  while (i < n) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) continue;
    c = u_tolower(c);
    char buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool err = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, c, err);
    if (!err) out.append(buf, static_cast<std::size_t>(len));
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

struct Span {
  std::size_t first;
  std::size_t last;
};

std::vector<Span> find_mentions(std::span<const std::string> tokens, const Aspect& aspect) {
  std::vector<Span> spans;
  for (const auto& alias : aspect.aliases) {
    if (alias.empty() || alias.size() > tokens.size()) continue;
    for (std::size_t i = 0; i + alias.size() <= tokens.size(); ++i) {
      if (std::equal(alias.begin(), alias.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        spans.push_back({i, i + alias.size() - 1});
      }
    }
  }
  return spans;
}

}  // namespace

SentimentLexicon::SentimentLexicon(std::map<std::string, int> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw InvalidArgument("sentiment lexicon is empty");
  for (const auto& [word, so] : entries_) {
    if (so != 1 && so != -1) {
      throw InvalidArgument("sentiment lexicon: orientation of '" + word + "' is not +1/-1");
    }
  }
}

SentimentLexicon SentimentLexicon::load(const std::string& path, bool lowercase) {
  std::map<std::string, int> entries;
  const auto lines = split_lines(read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 2) throw InputError(path, i + 1, "expected word<TAB>orientation");
    std::string word(trim(cols[0]));
    if (lowercase) word = lowercase_utf8(word);
    std::string score_text(trim(cols[1]));
    if (!score_text.empty() && score_text.front() == '+') score_text.erase(0, 1);
    double score = 0.0;
    auto [ptr, ec] =
        std::from_chars(score_text.data(), score_text.data() + score_text.size(), score);
    if (word.empty() || ec != std::errc() || ptr != score_text.data() + score_text.size() ||
        !std::isfinite(score)) {
      throw InputError(path, i + 1, "malformed lexicon entry");
    }
    if (score == 0.0) continue;
    const int so = score > 0.0 ? 1 : -1;
    auto [it, inserted] = entries.emplace(word, so);
    if (!inserted && it->second != so) {
      throw InputError(path, i + 1, "word '" + word + "' listed with both orientations");
    }
  }
  try {
    return SentimentLexicon(std::move(entries));
  } catch (const InvalidArgument& e) {
    throw InputError(path, 0, e.what());
  }
}

SentimentLexicon SentimentLexicon::negated() const {
  std::map<std::string, int> flipped;
  for (const auto& [word, so] : entries_) flipped.emplace(word, -so);
  return SentimentLexicon(std::move(flipped));
}

AliasFile AliasFile::parse(std::string_view text, const std::string& source) {
  AliasFile file;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() < 2 || cols.size() > 3) {
      throw InputError(source, i + 1, "expected source<TAB>target[<TAB>aliases]");
    }
    std::string from(trim(cols[0]));
    std::string to(trim(cols[1]));
    if (from.empty() || to.empty()) throw InputError(source, i + 1, "empty term");
    auto [it, inserted] = file.bilingual.emplace(from, to);
    if (!inserted && it->second != to) {
      throw InputError(source, i + 1, "'" + from + "' maps to more than one target");
    }
    if (cols.size() == 3) {
      auto& list = file.aliases[from];
      for (auto alias : split(cols[2], ',')) {
        alias = trim(alias);
        if (!alias.empty()) list.emplace_back(alias);
      }
    }
  }
  return file;
}

AliasFile AliasFile::load(const std::string& path) { return parse(read_file(path), path); }

AspectInventory::AspectInventory(const AliasFile& file, const Tokenizer& tokenizer) {
  for (const auto& [name, surfaces] : file.aliases) {
    Aspect aspect{name, {}};
    std::set<std::vector<std::string>> seen;
    auto add = [&](const std::string& surface) {
      auto tokens = tokenizer.tokenize(surface);
      if (tokens.empty() || !seen.insert(tokens).second) return;
      const std::string key = join(tokens);
      auto [it, inserted] = alias_owner_.emplace(key, name);
      if (!inserted && it->second != name) {
        throw InvalidArgument("alias '" + key + "' belongs to both '" + it->second +
                              "' and '" + name + "'");
      }
      aspect.aliases.push_back(std::move(tokens));
    };
    add(name);
    for (const auto& s : surfaces) add(s);
    by_name_.emplace(name, std::move(aspect));
  }
}

Aspect AspectInventory::resolve(const std::string& term) const {
  if (auto it = by_name_.find(term); it != by_name_.end()) return it->second;
  if (auto it = alias_owner_.find(term); it != alias_owner_.end()) {
    return by_name_.at(it->second);
  }
  return Aspect::single(term);
}

std::optional<double> aspect_score(std::span<const std::string> tokens, const Aspect& aspect,
                                   const SentimentLexicon& lexicon) {
  const auto spans = find_mentions(tokens, aspect);
  if (spans.empty()) return std::nullopt;

  // Nearest-mention distance for every position: inside a mention is 0,
  // otherwise the smaller of the distance back to the last mention end and
  // forward to the next mention start.
  const std::size_t n = tokens.size();
  constexpr std::size_t kFar = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> nearest(n, kFar);
  std::vector<int> cover(n + 1, 0);
  std::vector<bool> ends_here(n, false), starts_here(n, false);
  for (const auto& s : spans) {
    ++cover[s.first];
    --cover[s.last + 1];
    ends_here[s.last] = true;
    starts_here[s.first] = true;
  }
  int depth = 0;
  std::size_t last_end = kFar;
  for (std::size_t i = 0; i < n; ++i) {
    depth += cover[i];
    if (depth > 0) {
      nearest[i] = 0;
    } else if (last_end != kFar) {
      nearest[i] = i - last_end;
    }
    if (ends_here[i]) last_end = i;
  }
  std::size_t next_start = kFar;
  for (std::size_t i = n; i-- > 0;) {
    if (next_start != kFar) nearest[i] = std::min(nearest[i], next_start - i);
    if (starts_here[i]) next_start = i;
  }

  double score = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int so = lexicon.orientation(tokens[i]);
    if (so == 0) continue;
    score += static_cast<double>(so) / static_cast<double>(std::max<std::size_t>(1, nearest[i]));
  }
  return score;
}

std::optional<int> aspect_sentiment(std::span<const std::string> tokens, const Aspect& aspect,
                                    const SentimentLexicon& lexicon) {
  auto s = aspect_score(tokens, aspect, lexicon);
  if (!s) return std::nullopt;
  return *s > 0.0 ? 1 : -1;
}

json AspectStats::to_json() const {
  json j{{"aspect", aspect},
         {"aliases", aliases},
         {"pos", pos},
         {"neg", neg},
         {"fa", fa},
         {"mention_count", mention_count},
         {"zero_score_mentions", zero_score_mentions}};
  j["pa"] = pa ? json(*pa) : json(nullptr);
  return j;
}

AspectStats AspectStats::from_json(const json& j) {
  AspectStats s;
  s.aspect = j.at("aspect").get<std::string>();
  s.aliases = j.at("aliases").get<std::vector<std::string>>();
  s.pos = j.at("pos").get<std::int64_t>();
  s.neg = j.at("neg").get<std::int64_t>();
  s.fa = j.at("fa").get<std::int64_t>();
  s.mention_count = j.at("mention_count").get<std::int64_t>();
  s.zero_score_mentions = j.at("zero_score_mentions").get<std::int64_t>();
  if (!j.at("pa").is_null()) s.pa = j.at("pa").get<double>();
  return s;
}

AspectStats aspect_stats(const Aspect& aspect, std::span<const ReviewDocument> reviews,
                         const SentimentLexicon& lexicon) {
  AspectStats stats;
  stats.aspect = aspect.name;
  for (const auto& alias : aspect.aliases) stats.aliases.push_back(join(alias));
  for (const auto& review : reviews) {
    auto s = aspect_score(review.tokens, aspect, lexicon);
    if (!s) continue;
    ++stats.mention_count;
    if (*s > 0.0) {
      ++stats.pos;
    } else {
      ++stats.neg;
      if (*s == 0.0) ++stats.zero_score_mentions;
    }
  }
  stats.fa = stats.pos + stats.neg;
  if (stats.fa > 0) {
    stats.pa = static_cast<double>(stats.pos) / static_cast<double>(stats.fa);
  }
  return stats;
}

std::int64_t frequency_score(const Aspect& aspect, std::span<const ReviewDocument> reviews,
                             const SentimentLexicon& lexicon) {
  return aspect_stats(aspect, reviews, lexicon).fa;
}

double popularity_score(const Aspect& aspect, std::span<const ReviewDocument> reviews,
                        const SentimentLexicon& lexicon) {
  auto stats = aspect_stats(aspect, reviews, lexicon);
  if (!stats.pa) {
    throw InvalidArgument("popularity_score: aspect '" + aspect.name + "' is never mentioned");
  }
  return *stats.pa;
}

double popularity_from_polarities(std::span<const int> sp) {
  std::int64_t numerator = 0;
  std::int64_t magnitude = 0;
  for (int v : sp) {
    if (v != 1 && v != -1) throw InvalidArgument("SP values must be +1 or -1");
    numerator += v + 1;
    magnitude += v < 0 ? -v : v;
  }
  if (magnitude == 0) throw InvalidArgument("popularity needs at least one mention");
  return static_cast<double>(numerator) / static_cast<double>(2 * magnitude);
}

FrequentRanking top_frequent(std::span<const Aspect> candidates,
                             std::span<const ReviewDocument> reviews,
                             const SentimentLexicon& lexicon, std::size_t n) {
  if (n < 1) throw InvalidArgument("top_frequent: n must be >= 1");
  FrequentRanking ranking;
  ranking.requested = n;
  std::set<std::string> seen;
  for (const auto& aspect : candidates) {
    if (!seen.insert(aspect.name).second) continue;
    auto stats = aspect_stats(aspect, reviews, lexicon);
    if (stats.fa > 0) ranking.aspects.push_back(std::move(stats));
  }
  std::sort(ranking.aspects.begin(), ranking.aspects.end(),
            [](const AspectStats& a, const AspectStats& b) {
              if (a.fa != b.fa) return a.fa > b.fa;
              return a.aspect < b.aspect;
            });
  if (ranking.aspects.size() > n) ranking.aspects.resize(n);
  ranking.shortfall = ranking.aspects.size() < n;
  return ranking;
}

double entropy_frequent(std::span<const std::int64_t> fa) {
  if (fa.empty()) throw InvalidArgument("entropy_frequent: no values");
  double total = 0.0;
  for (auto v : fa) {
    if (v <= 0) throw InvalidArgument("entropy_frequent: FA values must be > 0");
    total += static_cast<double>(v);
  }
  double e = 0.0;
  for (auto v : fa) {
    const double p = static_cast<double>(v) / total;
    e -= p * std::log10(p);
  }
  return e;
}

double entropy_popular(std::span<const double> pa) {
  if (pa.empty()) throw InvalidArgument("entropy_popular: no values");
  double e = 0.0;
  for (double v : pa) {
    if (!(v > 0.0) || v > 1.0) {
      throw InvalidArgument("entropy_popular: PA values must be in (0, 1]");
    }
    e -= v * std::log10(v);
  }
  return e;
}

Alignment align_bilingual(std::span<const AspectStats> source,
                          std::span<const AspectStats> target,
                          const std::map<std::string, std::string>& bilingual) {
  Alignment out;
  std::vector<bool> used(target.size(), false);
  for (const auto& x : source) {
    auto it = bilingual.find(x.aspect);
    const std::string& wanted = it == bilingual.end() ? x.aspect : it->second;
    bool matched = false;
    for (std::size_t j = 0; j < target.size(); ++j) {
      if (!used[j] && target[j].aspect == wanted) {
        used[j] = true;
        out.pairs.push_back({x, target[j]});
        matched = true;
        break;
      }
    }
    if (!matched) out.unmatched_source.push_back(x.aspect);
  }
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (!used[j]) out.unmatched_target.push_back(target[j].aspect);
  }
  return out;
}

}  // namespace miner
