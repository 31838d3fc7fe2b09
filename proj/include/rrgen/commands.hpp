#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rrgen/bleu.hpp"
#include "rrgen/config.hpp"
#include "rrgen/model.hpp"

namespace rrgen {

// Subcommand entry points; the CLI binary is a thin wrapper over these so
// tests can drive whole runs in-process. Every artifact they write goes
// through an atomic rename, and identical (corpus, config, seed) inputs
// produce byte-identical artifacts.

struct PreprocessSummary {
  std::size_t kept_records = 0;
  std::size_t dropped_records = 0;
  std::size_t train_count = 0;
  std::size_t valid_count = 0;
  std::size_t test_count = 0;
  std::int64_t vocab_size = 0;
  std::vector<std::int64_t> bucket_edges;
  std::size_t category_count = 0;
};
PreprocessSummary cmd_preprocess(const RunConfig& config);

TrainResult cmd_train(const RunConfig& config);

struct GenerateSummary {
  std::size_t response_count = 0;
  std::size_t flagged_count = 0;
  std::filesystem::path responses_path;
};
GenerateSummary cmd_generate(const RunConfig& config, const std::string& checkpoint,
                             const std::string& split, bool dump_attention);

BleuReport cmd_evaluate(const RunConfig& config, const std::filesystem::path& responses_path,
                        const std::string& split);

struct BaselineSummary {
  BleuReport report;
  std::filesystem::path responses_path;
};
BaselineSummary cmd_baseline_random(const RunConfig& config, const std::string& split);
BaselineSummary cmd_baseline_nngen(const RunConfig& config, const std::string& split);

// Plain-text scoring: one whitespace-tokenized sequence per line, aligned.
BleuReport cmd_bleu(const std::filesystem::path& hypotheses_path,
                    const std::filesystem::path& references_path);

}  // namespace rrgen
