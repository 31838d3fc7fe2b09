#include "rrgen/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "rrgen/bleu.hpp"
#include "rrgen/error.hpp"
#include "rrgen/io.hpp"
#include "rrgen/tensor.hpp"

namespace rrgen {

namespace {

constexpr char kMagic[8] = {'R', 'R', 'G', 'N', 'N', 'I', 'X', '1'};
constexpr std::uint64_t kVersion = 1;

}  // namespace

BowIndex::SparseVector BowIndex::vectorize(const std::vector<std::string>& tokens) const {
  std::map<std::int64_t, std::int64_t> counts;
  std::int64_t unk = 0;
  for (const std::string& token : tokens) {
    const std::int64_t id = vocab_.encode(token);
    if (id == Vocabulary::kUnk) {
      ++unk;
    } else if (id >= Vocabulary::kReservedCount) {
      ++counts[id];
    }
  }
  SparseVector vec;
  vec.counts.assign(counts.begin(), counts.end());
  vec.unk_count = unk;
  double norm_sq = 0.0;
  for (const auto& [id, tf] : vec.counts) norm_sq += static_cast<double>(tf) * static_cast<double>(tf);
  vec.norm = std::sqrt(norm_sq);
  return vec;
}

BowIndex BowIndex::build(const std::vector<std::vector<std::string>>& train_reviews,
                         const std::vector<std::vector<std::string>>& train_responses,
                         const Vocabulary& vocab) {
  if (train_reviews.size() != train_responses.size()) {
    throw ContractError("BowIndex: " + std::to_string(train_reviews.size()) + " reviews vs " +
                        std::to_string(train_responses.size()) + " responses");
  }
  if (train_reviews.empty()) throw ContractError("BowIndex: empty training set");

  BowIndex index;
  index.vocab_ = vocab;
  index.vocab_fingerprint_ = vocab.fingerprint();
  index.entries_.reserve(train_reviews.size());
  for (std::size_t i = 0; i < train_reviews.size(); ++i) {
    Entry entry;
    entry.review = train_reviews[i];
    entry.response = train_responses[i];
    entry.vector = index.vectorize(entry.review);
    index.entries_.push_back(std::move(entry));
  }
  return index;
}

double BowIndex::cosine(const std::vector<std::string>& query_tokens, std::size_t i) const {
  return cosine(vectorize(query_tokens), i);
}

double BowIndex::cosine(const SparseVector& query, std::size_t i) const {
  const SparseVector& entry = entries_[i].vector;
  if (query.norm > 0.0 && entry.norm > 0.0) {
    double dot = 0.0;
    auto a = query.counts.begin();
    auto b = entry.counts.begin();
    while (a != query.counts.end() && b != entry.counts.end()) {
      if (a->first < b->first) {
        ++a;
      } else if (b->first < a->first) {
        ++b;
      } else {
        dot += static_cast<double>(a->second) * static_cast<double>(b->second);
        ++a;
        ++b;
      }
    }
    return dot / (query.norm * entry.norm);
  }
  // Fallback: cosine over the <unk> dimension alone.
  if (query.unk_count > 0 && entry.unk_count > 0) return 1.0;
  return 0.0;
}

void BowIndex::save(const std::filesystem::path& path) const {
  const std::filesystem::path partial = path.string() + ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + partial.string() + " for writing");
    out.write(kMagic, sizeof(kMagic));
    put_u64(out, kVersion);
    put_u64(out, vocab_fingerprint_);
    put_u64(out, entries_.size());
    auto put_tokens = [&out](const std::vector<std::string>& tokens) {
      put_u64(out, tokens.size());
      for (const std::string& token : tokens) put_string(out, token);
    };
    for (const Entry& entry : entries_) {
      put_tokens(entry.review);
      put_tokens(entry.response);
      put_u64(out, entry.vector.counts.size());
      for (const auto& [id, tf] : entry.vector.counts) {
        put_u64(out, static_cast<std::uint64_t>(id));
        put_u64(out, static_cast<std::uint64_t>(tf));
      }
      put_u64(out, static_cast<std::uint64_t>(entry.vector.unk_count));
    }
    if (!out) throw IoError("write failed for " + partial.string());
  }
  std::filesystem::rename(partial, path);
}

BowIndex BowIndex::load(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError(path.string() + " is not a retrieval index");
  }
  if (get_u64(in) != kVersion) throw IoError(path.string() + ": unsupported index version");

  BowIndex index;
  index.vocab_ = vocab;
  index.vocab_fingerprint_ = get_u64(in);
  if (index.vocab_fingerprint_ != vocab.fingerprint()) {
    throw ContractError(path.string() + " was built with a different vocabulary");
  }
  const std::uint64_t count = get_u64(in);
  auto get_tokens = [&in]() {
    const std::uint64_t n = get_u64(in);
    std::vector<std::string> tokens;
    tokens.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) tokens.push_back(get_string(in));
    return tokens;
  };
  index.entries_.reserve(count);
  for (std::uint64_t e = 0; e < count; ++e) {
    Entry entry;
    entry.review = get_tokens();
    entry.response = get_tokens();
    const std::uint64_t nnz = get_u64(in);
    entry.vector.counts.reserve(nnz);
    double norm_sq = 0.0;
    for (std::uint64_t i = 0; i < nnz; ++i) {
      const std::int64_t id = static_cast<std::int64_t>(get_u64(in));
      const std::int64_t tf = static_cast<std::int64_t>(get_u64(in));
      entry.vector.counts.emplace_back(id, tf);
      norm_sq += static_cast<double>(tf) * static_cast<double>(tf);
    }
    entry.vector.norm = std::sqrt(norm_sq);
    entry.vector.unk_count = static_cast<std::int64_t>(get_u64(in));
    index.entries_.push_back(std::move(entry));
  }
  return index;
}

NngenResult nngen_response(const std::vector<std::string>& review_tokens, const BowIndex& index) {
  if (index.size() == 0) throw ContractError("nngen_response: empty index");

  const BowIndex::SparseVector query = index.vectorize(review_tokens);
  if (query.norm == 0.0 && query.unk_count == 0) {
    // Nothing to compare on; surface candidate 0, flagged.
    return NngenResult{index.response_tokens(0), 0, true};
  }

  std::vector<std::size_t> order(index.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> sims(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) sims[i] = index.cosine(query, i);
  std::stable_sort(order.begin(), order.end(),
                   [&sims](std::size_t a, std::size_t b) { return sims[a] > sims[b]; });
  const std::size_t candidates = std::min<std::size_t>(5, order.size());

  std::size_t best = order[0];
  double best_bleu = -1.0;
  for (std::size_t c = 0; c < candidates; ++c) {
    const std::size_t i = order[c];
    const double bleu =
        sentence_bleu_smoothed(index.review_tokens(i), review_tokens, kNngenEpsilon);
    if (bleu > best_bleu || (bleu == best_bleu && i < best)) {
      best = i;
      best_bleu = bleu;
    }
  }
  return NngenResult{index.response_tokens(best), best, false};
}

std::vector<std::string> random_response(const std::vector<std::vector<std::string>>& train_responses,
                                         std::uint64_t seed, std::size_t test_index) {
  if (train_responses.empty()) throw ContractError("random_response: empty response pool");
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(test_index)));
  const std::int64_t pick = rng.below(static_cast<std::int64_t>(train_responses.size()));
  return train_responses[static_cast<std::size_t>(pick)];
}

}  // namespace rrgen
