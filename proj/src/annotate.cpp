#include "rrgen/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "rrgen/error.hpp"
#include "rrgen/io.hpp"

namespace rrgen {

namespace {

const std::unordered_set<std::string> kNoNames;

// Lexicon and dictionary keys must match normalized review tokens, so keys
// are pushed through the normalizer once at load time.
bool normalize_key(const std::filesystem::path& path, const std::string& raw, std::string* out) {
  const std::vector<std::string> tokens = normalize(raw, kNoNames, kNoNames);
  if (tokens.size() != 1) {
    std::cerr << "warning: " << path.string() << ": entry \"" << raw
              << "\" does not normalize to a single token, skipped\n";
    return false;
  }
  *out = tokens[0];
  return true;
}

int clamp_strength(int v) { return std::clamp(v, -5, 5); }

}  // namespace

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
  SentimentLexicon lexicon;
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw IoError(path.string() + ":" + std::to_string(i + 1) + ": expected word<TAB>value");
    }
    std::string key;
    if (!normalize_key(path, line.substr(0, tab), &key)) continue;
    const std::string value = line.substr(tab + 1);

    const bool duplicate = lexicon.strengths.count(key) != 0 ||
                           lexicon.boosters.count(key) != 0 || lexicon.negations.count(key) != 0;
    if (duplicate) {
      std::cerr << "warning: " << path.string() << ":" << i + 1 << ": duplicate entry \"" << key
                << "\" ignored\n";
      continue;
    }

    if (value == "neg") {
      lexicon.negations.insert(key);
    } else if (value.size() > 1 && value[0] == 'b') {
      lexicon.boosters[key] = std::stoi(value.substr(1));
    } else {
      const int strength = std::stoi(value);
      if (strength == 0 || strength < -5 || strength > 5) {
        throw IoError(path.string() + ":" + std::to_string(i + 1) + ": strength " + value +
                      " outside {-5..-1} u {+1..+5}");
      }
      lexicon.strengths[key] = strength;
    }
  }
  return lexicon;
}

SentenceScore score_sentence(const std::vector<std::string>& tokens,
                             const SentimentLexicon& lexicon) {
  SentenceScore score;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = lexicon.strengths.find(tokens[i]);
    if (it == lexicon.strengths.end()) continue;
    int v = it->second;
    if (i > 0) {
      if (lexicon.negations.count(tokens[i - 1]) != 0) {
        v = -v;
      } else if (auto booster = lexicon.boosters.find(tokens[i - 1]);
                 booster != lexicon.boosters.end()) {
        v = clamp_strength(v + (v > 0 ? booster->second : -booster->second));
      }
    }
    if (v > 0) score.positive = std::max(score.positive, v);
    if (v < 0) score.negative = std::min(score.negative, v);
  }
  return score;
}

int sentence_sentiment(int positive, int negative) {
  if (positive < 1 || positive > 5 || negative > -1 || negative < -5) {
    throw ContractError("sentence_sentiment: scores (" + std::to_string(positive) + ", " +
                        std::to_string(negative) + ") outside [+1,+5] x [-5,-1]");
  }
  if (positive == 1 && negative == -1) return 0;
  // The scaled negative magnitude must lose to the positive score for the
  // sentence to count as positive.
  if (static_cast<double>(-negative) * 1.5 < static_cast<double>(positive)) return positive;
  return negative;
}

int review_sentiment(const std::vector<int>& sentence_scores) {
  if (sentence_scores.empty()) throw ContractError("review_sentiment: no sentence scores");
  const double mean = std::accumulate(sentence_scores.begin(), sentence_scores.end(), 0.0) /
                      static_cast<double>(sentence_scores.size());
  return clamp_strength(static_cast<int>(std::llround(mean)));
}

std::vector<std::vector<std::string>> split_sentences(const std::vector<std::string>& tokens) {
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> current;
  for (const std::string& token : tokens) {
    current.push_back(token);
    if (token == "." || token == "!" || token == "?") {
      sentences.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) sentences.push_back(std::move(current));
  return sentences;
}

int review_sentiment_of(const std::vector<std::string>& tokens, const SentimentLexicon& lexicon) {
  std::vector<int> scores;
  for (const auto& sentence : split_sentences(tokens)) {
    const SentenceScore s = score_sentence(sentence, lexicon);
    scores.push_back(sentence_sentiment(s.positive, s.negative));
  }
  if (scores.empty()) return 0;
  return review_sentiment(scores);
}

// ---- keyword topics --------------------------------------------------------

const std::vector<std::pair<std::string, std::string>>& KeywordDictionary::topic_symbols() {
  static const std::vector<std::pair<std::string, std::string>> topics = {
      {"app", "<A>"},
      {"GUI", "<GUI>"},
      {"contents", "<C>"},
      {"pricing", "<P>"},
      {"feature", "<F>"},
      {"improvement", "<I>"},
      {"updates/versions", "<U>"},
      {"resources", "<R>"},
      {"security", "<S>"},
      {"download", "<D>"},
      {"model", "<M>"},
      {"company", "<CO>"},
  };
  return topics;
}

KeywordDictionary KeywordDictionary::load(const std::filesystem::path& path) {
  std::unordered_map<std::string, std::string> topic_to_symbol;
  for (const auto& [topic, symbol] : topic_symbols()) topic_to_symbol[topic] = symbol;

  KeywordDictionary dict;
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw IoError(path.string() + ":" + std::to_string(i + 1) + ": expected topic<TAB>keyword");
    }
    const std::string topic = line.substr(0, tab);
    auto symbol = topic_to_symbol.find(topic);
    if (symbol == topic_to_symbol.end()) {
      throw IoError(path.string() + ":" + std::to_string(i + 1) + ": unknown topic \"" + topic + "\"");
    }
    std::string keyword;
    if (!normalize_key(path, line.substr(tab + 1), &keyword)) continue;
    auto [it, inserted] = dict.keyword_to_symbol_.emplace(keyword, symbol->second);
    if (!inserted && it->second != symbol->second) {
      std::cerr << "warning: " << path.string() << ":" << i + 1 << ": keyword \"" << keyword
                << "\" already mapped to " << it->second << ", keeping the first topic\n";
    }
  }
  return dict;
}

const std::string& KeywordDictionary::symbol_for(const std::string& token) const {
  static const std::string other = kOtherSymbol;
  auto it = keyword_to_symbol_.find(token);
  return it == keyword_to_symbol_.end() ? other : it->second;
}

std::vector<std::string> KeywordDictionary::tag(const std::vector<std::string>& tokens) const {
  std::vector<std::string> symbols;
  symbols.reserve(tokens.size());
  for (const std::string& token : tokens) symbols.push_back(symbol_for(token));
  return symbols;
}

std::int64_t KeywordDictionary::symbol_count() {
  return static_cast<std::int64_t>(topic_symbols().size()) + 1;
}

std::int64_t KeywordDictionary::symbol_index(const std::string& symbol) {
  if (symbol == kOtherSymbol) return 1;
  const auto& topics = topic_symbols();
  for (std::size_t i = 0; i < topics.size(); ++i) {
    if (topics[i].second == symbol) return static_cast<std::int64_t>(i) + 2;
  }
  throw IndexError("unknown keyword symbol " + symbol);
}

// ---- annotated records -----------------------------------------------------

std::int64_t sentiment_index(int sentiment) {
  if (sentiment < -5 || sentiment > 5) {
    throw IndexError("sentiment " + std::to_string(sentiment) + " outside [-5, +5]");
  }
  return sentiment + 6;
}

std::int64_t category_index(const std::vector<std::string>& categories,
                            const std::string& category) {
  auto it = std::find(categories.begin(), categories.end(), category);
  if (it == categories.end()) throw IndexError("unknown category \"" + category + "\"");
  return (it - categories.begin()) + 1;
}

AnnotatedReview annotate_review(ReviewRecord record,
                                const std::vector<std::string>& categories,
                                const LengthBucketizer& buckets,
                                const SentimentLexicon& lexicon,
                                const KeywordDictionary& keywords) {
  AnnotatedReview annotated;
  annotated.category_index = category_index(categories, record.category);
  annotated.length_bucket =
      buckets.bucketize(static_cast<std::int64_t>(record.review_tokens.size()));
  annotated.rating = record.rating;
  annotated.sentiment = review_sentiment_of(record.review_tokens, lexicon);
  annotated.keyword_symbols = keywords.tag(record.review_tokens);
  annotated.record = std::move(record);
  return annotated;
}

}  // namespace rrgen
