#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace rrgen {

// One human-editable JSON file drives every subcommand. Input paths must
// exist at load time, the output directory is created, and a seed is
// mandatory so nothing is implicitly nondeterministic. See
// docs/file_formats.md for the schema and configs/sample.json for a working
// example.
struct RunConfig {
  // paths
  std::filesystem::path corpus;
  std::filesystem::path lexicon;
  std::filesystem::path keyword_dict;
  std::filesystem::path app_names;
  std::filesystem::path user_names;
  std::filesystem::path stopwords;
  std::optional<std::filesystem::path> embeddings;  // pretrained word vectors
  std::filesystem::path output_dir;

  // model
  std::int64_t word_dim = 100;
  std::int64_t hidden_dim = 200;
  std::int64_t attr_dim = 90;
  std::int64_t max_length = 200;
  std::int64_t vocab_limit = 10000;
  std::int64_t length_buckets = 5;
  bool use_category = true;
  bool use_length = true;
  bool use_rating = true;
  bool use_sentiment = true;
  bool use_keywords = true;

  // training
  std::int64_t batch_size = 32;
  double learning_rate = 1e-3;
  std::int64_t epochs = 2;
  std::int64_t checkpoint_every = 200;
  std::uint64_t seed = 0;

  static RunConfig load(const std::filesystem::path& path);
};

}  // namespace rrgen
