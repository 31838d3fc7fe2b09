#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rrgen {

// Placeholder tokens produced by normalization. The tokenizer treats them
// (and the reserved vocabulary tokens) as atomic, so normalized text
// re-normalizes to itself.
inline constexpr const char* kDigitToken = "<digit>";
inline constexpr const char* kEmailToken = "<email>";
inline constexpr const char* kUrlToken = "<url>";
inline constexpr const char* kAppToken = "<app>";
inline constexpr const char* kUserToken = "<user>";

// One concrete value that normalization replaced with a placeholder.
struct PlaceholderHit {
  std::string placeholder;
  std::string original;
};

// Lowercases (ASCII), substitutes URL/email/digit-run placeholders, splits
// punctuation into separate tokens, maps whole tokens on the app/user name
// lists to <app>/<user>, squeezes character runs of length >= 3 down to 2,
// and strips -ing/-ed/-es/-s suffixes to a fixpoint while the remaining stem
// keeps at least 3 characters. The exact regexes are listed in
// docs/file_formats.md. Idempotent over space-joined output.
std::vector<std::string> normalize(const std::string& text,
                                   const std::unordered_set<std::string>& app_names,
                                   const std::unordered_set<std::string>& user_names,
                                   std::vector<PlaceholderHit>* log = nullptr);

std::string join_tokens(const std::vector<std::string>& tokens);

// Review texts that are empty or a single alphabetic character after
// normalization are dropped from the corpus.
bool keepable_review(const std::vector<std::string>& tokens);

// Loads one lowercased name per line; blank lines and # comments skipped.
std::unordered_set<std::string> load_name_list(const std::filesystem::path& path);

// ---- vocabulary ------------------------------------------------------------

class Vocabulary {
 public:
  // Just the reserved tokens; build() or load() add the rest.
  Vocabulary();

  static constexpr std::int64_t kPad = 0;
  static constexpr std::int64_t kBos = 1;
  static constexpr std::int64_t kEos = 2;
  static constexpr std::int64_t kUnk = 3;
  static constexpr std::int64_t kReservedCount = 4;

  // Ranks tokens by total frequency over the given sequences (reviews and
  // responses together), breaking ties lexicographically, and keeps the top
  // max_size. Everything else encodes to <unk>.
  static Vocabulary build(const std::vector<const std::vector<std::string>*>& sequences,
                          std::int64_t max_size);

  std::int64_t encode(const std::string& token) const;
  std::vector<std::int64_t> encode_all(const std::vector<std::string>& tokens) const;
  const std::string& decode(std::int64_t index) const;
  std::int64_t size() const { return static_cast<std::int64_t>(index_to_token_.size()); }

  // FNV-1a over all tokens in index order; checkpoints and retrieval indexes
  // embed it to detect vocabulary mismatches.
  std::uint64_t fingerprint() const;

  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::unordered_map<std::string, std::int64_t> token_to_index_;
  std::vector<std::string> index_to_token_;
  std::vector<std::int64_t> counts_;  // aligned with index_to_token_; 0 for reserved
};

// ---- dataset split ---------------------------------------------------------

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
};

// Deterministic Fisher-Yates shuffle under `seed`, then floor(0.8n) train,
// floor(0.1n) validation, remainder test. Exact partition; needs n >= 10.
SplitIndices split_dataset(std::size_t count, std::uint64_t seed);

// ---- review length buckets -------------------------------------------------

// Quantile buckets over training review token counts. Duplicate quantile
// edges (and edges at the maximum) merge away, so the effective bucket count
// can be smaller than requested; all-identical lengths collapse to a single
// bucket with a warning on stderr.
class LengthBucketizer {
 public:
  static LengthBucketizer fit(const std::vector<std::int64_t>& lengths,
                              std::int64_t bucket_count);
  static LengthBucketizer from_edges(std::vector<std::int64_t> edges);

  // 1-based bucket index; every non-negative length maps to exactly one.
  std::int64_t bucketize(std::int64_t length) const;
  std::int64_t bucket_count() const { return static_cast<std::int64_t>(edges_.size()) + 1; }
  const std::vector<std::int64_t>& edges() const { return edges_; }

 private:
  std::vector<std::int64_t> edges_;  // strictly ascending upper bounds
};

// ---- corpus records --------------------------------------------------------

struct RawRecord {
  std::string app_id;
  std::string category;
  int rating = 0;
  std::string review;
  std::string response;
};

struct ReviewRecord {
  std::string app_id;
  std::string category;
  int rating = 0;
  std::string review_raw;
  std::string response_raw;
  std::vector<std::string> review_tokens;
  std::vector<std::string> response_tokens;
};

// Line-delimited JSON with fields app_id, category, rating, review,
// response. Malformed lines fail with their line number.
std::vector<RawRecord> read_corpus(const std::filesystem::path& path);

}  // namespace rrgen
