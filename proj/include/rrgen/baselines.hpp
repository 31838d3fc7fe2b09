#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rrgen/text.hpp"

namespace rrgen {

// Smoothing used by the NNGen BLEU re-rank; reviews are short enough that
// unsmoothed BLEU-4 would almost always be zero.
inline constexpr double kNngenEpsilon = 0.1;

// Bag-of-words retrieval index over training reviews. Term-frequency vectors
// live on the in-vocabulary dimensions (reserved tokens excluded); reviews
// whose vector is empty fall back to the <unk> dimension alone.
class BowIndex {
 public:
  static BowIndex build(const std::vector<std::vector<std::string>>& train_reviews,
                        const std::vector<std::vector<std::string>>& train_responses,
                        const Vocabulary& vocab);

  std::size_t size() const { return entries_.size(); }
  const std::vector<std::string>& review_tokens(std::size_t i) const {
    return entries_[i].review;
  }
  const std::vector<std::string>& response_tokens(std::size_t i) const {
    return entries_[i].response;
  }
  std::uint64_t vocab_fingerprint() const { return vocab_fingerprint_; }

  struct SparseVector {
    std::vector<std::pair<std::int64_t, std::int64_t>> counts;  // index -> tf, sorted
    double norm = 0.0;
    std::int64_t unk_count = 0;
  };
  SparseVector vectorize(const std::vector<std::string>& tokens) const;

  // Cosine similarity of a query against entry i, with the <unk>-dimension
  // fallback applied when the query has no in-vocabulary mass.
  double cosine(const std::vector<std::string>& query_tokens, std::size_t i) const;
  double cosine(const SparseVector& query, std::size_t i) const;

  // Versioned binary file (vocab fingerprint + sparse vectors + token
  // sequences); loading verifies the fingerprint against `vocab`.
  void save(const std::filesystem::path& path) const;
  static BowIndex load(const std::filesystem::path& path, const Vocabulary& vocab);

 private:
  struct Entry {
    std::vector<std::string> review;
    std::vector<std::string> response;
    SparseVector vector;
  };
  std::vector<Entry> entries_;
  Vocabulary vocab_;
  std::uint64_t vocab_fingerprint_ = 0;

  BowIndex() = default;
};

struct NngenResult {
  std::vector<std::string> response;
  std::size_t train_index = 0;
  bool degenerate = false;  // empty query; candidate 0 returned
};

// Top-5 cosine candidates (ties to the lower training index), re-ranked by
// smoothed sentence BLEU-4 between the query review and each candidate
// review; the winning candidate's response is returned.
NngenResult nngen_response(const std::vector<std::string>& review_tokens, const BowIndex& index);

// Uniform pick from the training responses, deterministic per (seed, index).
std::vector<std::string> random_response(const std::vector<std::vector<std::string>>& train_responses,
                                         std::uint64_t seed, std::size_t test_index);

}  // namespace rrgen
