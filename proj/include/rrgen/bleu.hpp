#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace rrgen {

// Corpus-level BLEU-4 report. Precisions and the score are percentages; the
// matched/total counts are the exact pooled integers behind them, kept so
// independent counters can be compared without rounding.
struct BleuReport {
  double bleu4 = 0.0;
  std::array<double, 4> precisions{};  // p1..p4
  double brevity_penalty = 1.0;
  std::int64_t hypothesis_length = 0;
  std::int64_t reference_length = 0;
  std::array<std::int64_t, 4> matched{};
  std::array<std::int64_t, 4> total{};
};

// Unsmoothed corpus BLEU-4: modified (clipped) n-gram precision pooled over
// all pairs for n = 1..4, uniform 1/4 weights, BP = min(1, e^(1 - r/c)).
// Any zero pooled precision zeroes the score.
BleuReport corpus_bleu(const std::vector<std::vector<std::string>>& hypotheses,
                       const std::vector<std::vector<std::string>>& references);

// Single-pair BLEU-4 with additive smoothing: zero n-gram match counts are
// replaced by epsilon before the geometric mean (denominators are floored at
// 1 for orders longer than the hypothesis). Empty hypotheses score 0.
double sentence_bleu_smoothed(const std::vector<std::string>& hypothesis,
                              const std::vector<std::string>& reference, double epsilon);

std::string bleu_report_json(const BleuReport& report);
std::string bleu_report_table(const BleuReport& report);

}  // namespace rrgen
