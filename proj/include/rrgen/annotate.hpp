#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rrgen/text.hpp"

namespace rrgen {

// Word-strength lexicon in the SentiStrength style: sentiment words carry a
// strength in {-5..-1} u {+1..+5}, booster words add to the magnitude of the
// sentiment word right after them, negation words flip its sign. Keys are
// stored in normalized form, so lookups against normalized review tokens are
// exact.
struct SentimentLexicon {
  std::unordered_map<std::string, int> strengths;
  std::unordered_map<std::string, int> boosters;
  std::unordered_set<std::string> negations;

  // word<TAB>value lines; value is an integer strength, b+N / b-N for a
  // booster modifier, or "neg" for a negation word. '#' starts a comment.
  static SentimentLexicon load(const std::filesystem::path& path);
};

struct SentenceScore {
  int positive = 1;  // in [+1, +5]
  int negative = -1;  // in [-5, -1]
};

// Maximum positive and minimum negative token strength in the sentence,
// defaulting to (+1, -1) when nothing matches.
SentenceScore score_sentence(const std::vector<std::string>& tokens,
                             const SentimentLexicon& lexicon);

// Dominance rule combining the two per-sentence strengths into one score:
// (+1, -1) is neutral (0); otherwise the positive score wins only when it
// exceeds 1.5 times the negative magnitude.
int sentence_sentiment(int positive, int negative);

// Rounded (half away from zero) average of sentence scores, clamped to
// [-5, +5].
int review_sentiment(const std::vector<int>& sentence_scores);

// Sentences end at '.', '!' or '?' tokens (terminator included); a trailing
// run without a terminator forms the last sentence.
std::vector<std::vector<std::string>> split_sentences(const std::vector<std::string>& tokens);

// split + score + combine over a whole normalized review.
int review_sentiment_of(const std::vector<std::string>& tokens, const SentimentLexicon& lexicon);

// ---- keyword topics --------------------------------------------------------

inline constexpr const char* kOtherSymbol = "<O>";

// The 12 review topics with their tag symbols, plus <O> for everything else.
// Keywords are normalized at load time and map to exactly one topic
// (first-listed wins, with a warning on duplicates).
class KeywordDictionary {
 public:
  static const std::vector<std::pair<std::string, std::string>>& topic_symbols();

  static KeywordDictionary load(const std::filesystem::path& path);

  // Tag symbol for one token; <O> when the token is no topic keyword.
  const std::string& symbol_for(const std::string& token) const;

  // kappa: one symbol per token, length preserved.
  std::vector<std::string> tag(const std::vector<std::string>& tokens) const;

  // Symbol alphabet [<O>, topic symbols...]; indices are 1-based and fixed
  // independently of any loaded file.
  static std::int64_t symbol_count();
  static std::int64_t symbol_index(const std::string& symbol);

 private:
  std::unordered_map<std::string, std::string> keyword_to_symbol_;
};

// ---- annotated records -----------------------------------------------------

struct AnnotatedReview {
  ReviewRecord record;
  std::int64_t category_index = 1;  // tau in [1, N_Gamma]
  std::int64_t length_bucket = 1;   // l' in [1, N_L]
  int rating = 1;                   // r in [1, 5]
  int sentiment = 0;                // s in [-5, +5]
  std::vector<std::string> keyword_symbols;  // same length as review tokens
};

// s in [-5,+5] mapped onto table row [1, 11].
std::int64_t sentiment_index(int sentiment);
inline constexpr std::int64_t kSentimentLevels = 11;
inline constexpr std::int64_t kRatingLevels = 5;

// 1-based position of `category` in the sorted category list.
std::int64_t category_index(const std::vector<std::string>& categories,
                            const std::string& category);

AnnotatedReview annotate_review(ReviewRecord record,
                                const std::vector<std::string>& categories,
                                const LengthBucketizer& buckets,
                                const SentimentLexicon& lexicon,
                                const KeywordDictionary& keywords);

}  // namespace rrgen
