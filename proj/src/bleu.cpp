#include "rrgen/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "rrgen/error.hpp"
#include "rrgen/io.hpp"

namespace rrgen {

namespace {

constexpr int kMaxOrder = 4;

// N-grams keyed by their tokens joined on an unprintable separator.
std::unordered_map<std::string, std::int64_t> ngram_counts(const std::vector<std::string>& tokens,
                                                           int order) {
  std::unordered_map<std::string, std::int64_t> counts;
  const std::int64_t n = static_cast<std::int64_t>(tokens.size());
  for (std::int64_t start = 0; start + order <= n; ++start) {
    std::string key;
    for (int i = 0; i < order; ++i) {
      if (i) key.push_back('\x1f');
      key += tokens[static_cast<std::size_t>(start + i)];
    }
    ++counts[key];
  }
  return counts;
}

std::int64_t clipped_matches(const std::vector<std::string>& hypothesis,
                             const std::vector<std::string>& reference, int order) {
  const auto hyp = ngram_counts(hypothesis, order);
  if (hyp.empty()) return 0;
  const auto ref = ngram_counts(reference, order);
  std::int64_t matched = 0;
  for (const auto& [key, count] : hyp) {
    auto it = ref.find(key);
    if (it != ref.end()) matched += std::min(count, it->second);
  }
  return matched;
}

double brevity_penalty(std::int64_t hyp_len, std::int64_t ref_len) {
  if (hyp_len == 0) return 0.0;
  if (hyp_len >= ref_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
}

}  // namespace

BleuReport corpus_bleu(const std::vector<std::vector<std::string>>& hypotheses,
                       const std::vector<std::vector<std::string>>& references) {
  if (hypotheses.size() != references.size()) {
    throw ContractError("corpus_bleu: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                        std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw ContractError("corpus_bleu: empty corpus");

  BleuReport report;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const auto& hyp = hypotheses[i];
    const auto& ref = references[i];
    report.hypothesis_length += static_cast<std::int64_t>(hyp.size());
    report.reference_length += static_cast<std::int64_t>(ref.size());
    for (int order = 1; order <= kMaxOrder; ++order) {
      report.matched[order - 1] += clipped_matches(hyp, ref, order);
      report.total[order - 1] +=
          std::max<std::int64_t>(0, static_cast<std::int64_t>(hyp.size()) - order + 1);
    }
  }

  report.brevity_penalty = brevity_penalty(report.hypothesis_length, report.reference_length);

  bool any_zero = false;
  double log_sum = 0.0;
  for (int order = 0; order < kMaxOrder; ++order) {
    const std::int64_t m = report.matched[order];
    const std::int64_t t = report.total[order];
    report.precisions[order] = t == 0 ? 0.0 : 100.0 * static_cast<double>(m) / static_cast<double>(t);
    if (m == 0 || t == 0) {
      any_zero = true;
    } else {
      log_sum += std::log(static_cast<double>(m) / static_cast<double>(t));
    }
  }
  report.bleu4 = any_zero ? 0.0 : 100.0 * report.brevity_penalty * std::exp(log_sum / kMaxOrder);
  return report;
}

double sentence_bleu_smoothed(const std::vector<std::string>& hypothesis,
                              const std::vector<std::string>& reference, double epsilon) {
  if (epsilon <= 0.0) throw ContractError("sentence_bleu_smoothed: epsilon must be > 0");
  if (hypothesis.empty()) return 0.0;

  double log_sum = 0.0;
  for (int order = 1; order <= kMaxOrder; ++order) {
    const std::int64_t total =
        std::max<std::int64_t>(0, static_cast<std::int64_t>(hypothesis.size()) - order + 1);
    const std::int64_t matched = total == 0 ? 0 : clipped_matches(hypothesis, reference, order);
    const double numerator = matched > 0 ? static_cast<double>(matched) : epsilon;
    const double denominator = static_cast<double>(std::max<std::int64_t>(total, 1));
    log_sum += std::log(numerator / denominator);
  }
  const double bp = brevity_penalty(static_cast<std::int64_t>(hypothesis.size()),
                                    static_cast<std::int64_t>(reference.size()));
  return 100.0 * bp * std::exp(log_sum / kMaxOrder);
}

std::string bleu_report_json(const BleuReport& report) {
  nlohmann::json doc{
      {"bleu4", report.bleu4},
      {"p1", report.precisions[0]},
      {"p2", report.precisions[1]},
      {"p3", report.precisions[2]},
      {"p4", report.precisions[3]},
      {"brevity_penalty", report.brevity_penalty},
      {"hypothesis_length", report.hypothesis_length},
      {"reference_length", report.reference_length},
  };
  return doc.dump();
}

std::string bleu_report_table(const BleuReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %8s %8s %8s %8s %8s %6s\n", "BLEU-4", "p1", "p2", "p3",
                "p4", "BP", "len");
  out << line;
  std::snprintf(line, sizeof(line), "%-8.2f %8.2f %8.2f %8.2f %8.2f %8.4f %6lld\n", report.bleu4,
                report.precisions[0], report.precisions[1], report.precisions[2],
                report.precisions[3], report.brevity_penalty,
                static_cast<long long>(report.hypothesis_length));
  out << line;
  return out.str();
}

}  // namespace rrgen
