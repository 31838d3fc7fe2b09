#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

namespace rrgen {

// Per-app modal value for each of <url>, <email> and <app>, harvested from
// the substitution log of the training responses. Ties go to the
// lexicographically smallest value.
class PlaceholderDictionary {
 public:
  struct Observation {
    std::string app_id;
    std::string placeholder;
    std::string value;
  };

  static PlaceholderDictionary build(const std::vector<Observation>& observations);

  // nullptr when the app never produced a value for that placeholder.
  const std::string* lookup(const std::string& app_id, const std::string& placeholder) const;

  void save(const std::filesystem::path& path) const;  // app<TAB>placeholder<TAB>value
  static PlaceholderDictionary load(const std::filesystem::path& path);

 private:
  std::map<std::string, std::map<std::string, std::string>> entries_;
};

struct SubstitutionResult {
  std::string text;
  // A placeholder with no dictionary entry stayed verbatim; the response
  // needs a human look regardless of the quality filter.
  bool missing_placeholder = false;
};

SubstitutionResult substitute(const std::vector<std::string>& response_tokens,
                              const std::string& app_id, const PlaceholderDictionary& dict);

struct FilterDecision {
  bool requires_check = false;
  double overlap_ratio = 0.0;       // omega
  std::int64_t response_length = 0;  // l, token count
  int rating = 1;                    // r
};

inline constexpr double kOverlapThreshold = 0.05;
inline constexpr std::int64_t kShortResponseLength = 38;  // first quartile in the full corpus
inline constexpr int kLowRatingLimit = 2;

// omega = |content(response) ∩ content(review)| / |content(response)| over
// token sets with stopwords and placeholders removed (0 when the response
// has no content tokens). Flags when omega < 0.05 or (l < 38 and r <= 2).
FilterDecision quality_filter(const std::vector<std::string>& response_tokens,
                              const std::vector<std::string>& review_tokens, int rating,
                              const std::unordered_set<std::string>& stopwords);

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

}  // namespace rrgen
