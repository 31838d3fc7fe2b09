#include "rrgen/postprocess.hpp"

#include <algorithm>
#include <sstream>

#include "rrgen/error.hpp"
#include "rrgen/io.hpp"
#include "rrgen/text.hpp"

namespace rrgen {

namespace {

bool substitutable(const std::string& token) {
  return token == kUrlToken || token == kEmailToken || token == kAppToken;
}

bool any_placeholder(const std::string& token) {
  return token == kUrlToken || token == kEmailToken || token == kAppToken ||
         token == kUserToken || token == kDigitToken;
}

}  // namespace

PlaceholderDictionary PlaceholderDictionary::build(const std::vector<Observation>& observations) {
  // (app, placeholder) -> value -> occurrences; ordered maps keep the
  // lexicographic tie-break implicit.
  std::map<std::string, std::map<std::string, std::map<std::string, std::int64_t>>> counts;
  for (const Observation& obs : observations) {
    ++counts[obs.app_id][obs.placeholder][obs.value];
  }
  PlaceholderDictionary dict;
  for (const auto& [app, per_placeholder] : counts) {
    for (const auto& [placeholder, values] : per_placeholder) {
      std::int64_t best_count = 0;
      const std::string* best_value = nullptr;
      for (const auto& [value, count] : values) {
        if (count > best_count) {  // first in sorted order wins ties
          best_count = count;
          best_value = &value;
        }
      }
      if (best_value != nullptr) dict.entries_[app][placeholder] = *best_value;
    }
  }
  return dict;
}

const std::string* PlaceholderDictionary::lookup(const std::string& app_id,
                                                 const std::string& placeholder) const {
  auto app = entries_.find(app_id);
  if (app == entries_.end()) return nullptr;
  auto it = app->second.find(placeholder);
  return it == app->second.end() ? nullptr : &it->second;
}

void PlaceholderDictionary::save(const std::filesystem::path& path) const {
  std::ostringstream out;
  for (const auto& [app, per_placeholder] : entries_) {
    for (const auto& [placeholder, value] : per_placeholder) {
      out << app << '\t' << placeholder << '\t' << value << '\n';
    }
  }
  atomic_write_text(path, out.str());
}

PlaceholderDictionary PlaceholderDictionary::load(const std::filesystem::path& path) {
  PlaceholderDictionary dict;
  for (const std::string& line : read_lines(path)) {
    if (line.empty()) continue;
    const std::size_t first = line.find('\t');
    const std::size_t second = first == std::string::npos ? std::string::npos
                                                          : line.find('\t', first + 1);
    if (second == std::string::npos) {
      throw IoError(path.string() + ": expected app<TAB>placeholder<TAB>value");
    }
    dict.entries_[line.substr(0, first)][line.substr(first + 1, second - first - 1)] =
        line.substr(second + 1);
  }
  return dict;
}

SubstitutionResult substitute(const std::vector<std::string>& response_tokens,
                              const std::string& app_id, const PlaceholderDictionary& dict) {
  SubstitutionResult result;
  std::string out;
  for (std::size_t i = 0; i < response_tokens.size(); ++i) {
    const std::string& token = response_tokens[i];
    if (i) out.push_back(' ');
    if (substitutable(token)) {
      const std::string* value = dict.lookup(app_id, token);
      if (value != nullptr) {
        out += *value;
      } else {
        out += token;
        result.missing_placeholder = true;
      }
    } else {
      out += token;
    }
  }
  result.text = std::move(out);
  return result;
}

FilterDecision quality_filter(const std::vector<std::string>& response_tokens,
                              const std::vector<std::string>& review_tokens, int rating,
                              const std::unordered_set<std::string>& stopwords) {
  auto content_set = [&stopwords](const std::vector<std::string>& tokens) {
    std::unordered_set<std::string> content;
    for (const std::string& token : tokens) {
      if (any_placeholder(token) || stopwords.count(token) != 0) continue;
      content.insert(token);
    }
    return content;
  };

  const auto response_content = content_set(response_tokens);
  const auto review_content = content_set(review_tokens);
  std::size_t shared = 0;
  for (const std::string& token : response_content) {
    if (review_content.count(token) != 0) ++shared;
  }

  FilterDecision decision;
  decision.response_length = static_cast<std::int64_t>(response_tokens.size());
  decision.rating = rating;
  decision.overlap_ratio = response_content.empty()
                               ? 0.0
                               : static_cast<double>(shared) /
                                     static_cast<double>(response_content.size());
  decision.requires_check =
      decision.overlap_ratio < kOverlapThreshold ||
      (decision.response_length < kShortResponseLength && rating <= kLowRatingLimit);
  return decision;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::unordered_set<std::string> stopwords;
  const std::unordered_set<std::string> no_names;
  for (const std::string& line : read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    for (const std::string& token : normalize(line, no_names, no_names)) {
      stopwords.insert(token);
    }
  }
  return stopwords;
}

}  // namespace rrgen
