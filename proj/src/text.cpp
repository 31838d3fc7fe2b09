#include "rrgen/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <iostream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rrgen/error.hpp"
#include "rrgen/io.hpp"
#include "rrgen/tensor.hpp"

namespace rrgen {

namespace {

const std::array<const char*, 9> kAtomicTokens = {
    kDigitToken, kEmailToken, kUrlToken, kAppToken, kUserToken,
    "<pad>", "<s>", "</s>", "<unk>"};

bool is_ascii_alpha(char c) { return c >= 'a' && c <= 'z'; }
bool is_word_char(char c) {
  const unsigned char u = static_cast<unsigned char>(c);
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || u >= 0x80;
}

std::string to_lower_ascii(const std::string& text) {
  std::string out = text;
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// The published normalization regexes (applied to lowercased text, URLs
// before emails before digit runs).
const std::regex& url_regex() {
  static const std::regex re(R"((https?://[^\s]+|www\.[^\s]+))");
  return re;
}
const std::regex& email_regex() {
  static const std::regex re(R"([a-z0-9._%+-]+@[a-z0-9.-]+\.[a-z]{2,})");
  return re;
}
const std::regex& digit_regex() {
  static const std::regex re(R"([0-9]+)");
  return re;
}

std::string substitute_pattern(const std::string& text, const std::regex& pattern,
                               const char* placeholder, bool log_original,
                               std::vector<PlaceholderHit>* log) {
  std::string out;
  out.reserve(text.size());
  auto begin = std::sregex_iterator(text.begin(), text.end(), pattern);
  auto end = std::sregex_iterator();
  std::size_t last = 0;
  for (auto it = begin; it != end; ++it) {
    const auto& match = *it;
    out.append(text, last, static_cast<std::size_t>(match.position()) - last);
    out.push_back(' ');
    out.append(placeholder);
    out.push_back(' ');
    if (log_original && log != nullptr) log->push_back({placeholder, match.str()});
    last = static_cast<std::size_t>(match.position() + match.length());
  }
  out.append(text, last, std::string::npos);
  return out;
}

// Emits placeholders as single tokens, words as maximal word-char runs and
// every other character as its own token.
std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
      continue;
    }
    if (c == '<') {
      bool matched = false;
      for (const char* atomic : kAtomicTokens) {
        const std::size_t len = std::string_view(atomic).size();
        if (text.compare(i, len, atomic) == 0) {
          tokens.emplace_back(atomic);
          i += len;
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    if (is_word_char(c)) {
      std::size_t j = i;
      while (j < text.size() && is_word_char(text[j])) ++j;
      tokens.emplace_back(text.substr(i, j - i));
      i = j;
      continue;
    }
    tokens.emplace_back(1, c);
    ++i;
  }
  return tokens;
}

bool is_placeholder(const std::string& token) {
  for (const char* atomic : kAtomicTokens) {
    if (token == atomic) return true;
  }
  return false;
}

std::string squeeze_runs(const std::string& token) {
  std::string out;
  out.reserve(token.size());
  for (std::size_t i = 0; i < token.size(); ++i) {
    const std::size_t n = out.size();
    const bool ascii = static_cast<unsigned char>(token[i]) < 0x80;
    if (ascii && n >= 2 && out[n - 1] == token[i] && out[n - 2] == token[i]) continue;
    out.push_back(token[i]);
  }
  return out;
}

bool all_ascii_alpha(const std::string& token) {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(), [](char c) { return is_ascii_alpha(c); });
}

// Suffix stripping runs to a fixpoint so normalizing already-normalized text
// changes nothing.
std::string strip_suffixes(std::string token) {
  static const std::array<const char*, 4> suffixes = {"ing", "ed", "es", "s"};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const char* suffix : suffixes) {
      const std::size_t len = std::string_view(suffix).size();
      if (token.size() >= len + 3 && token.compare(token.size() - len, len, suffix) == 0) {
        token.erase(token.size() - len);
        changed = true;
        break;
      }
    }
  }
  return token;
}

}  // namespace

std::vector<std::string> normalize(const std::string& text,
                                   const std::unordered_set<std::string>& app_names,
                                   const std::unordered_set<std::string>& user_names,
                                   std::vector<PlaceholderHit>* log) {
  std::string lowered = to_lower_ascii(text);
  lowered = substitute_pattern(lowered, url_regex(), kUrlToken, true, log);
  lowered = substitute_pattern(lowered, email_regex(), kEmailToken, true, log);
  lowered = substitute_pattern(lowered, digit_regex(), kDigitToken, false, nullptr);

  std::vector<std::string> tokens = tokenize(lowered);
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (std::string& token : tokens) {
    if (is_placeholder(token)) {
      out.push_back(std::move(token));
      continue;
    }
    if (app_names.count(token) != 0) {
      if (log != nullptr) log->push_back({kAppToken, token});
      out.emplace_back(kAppToken);
      continue;
    }
    if (user_names.count(token) != 0) {
      out.emplace_back(kUserToken);
      continue;
    }
    std::string squeezed = squeeze_runs(token);
    if (all_ascii_alpha(squeezed)) squeezed = strip_suffixes(std::move(squeezed));
    out.push_back(std::move(squeezed));
  }
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

bool keepable_review(const std::vector<std::string>& tokens) {
  if (tokens.empty()) return false;
  if (tokens.size() == 1 && tokens[0].size() == 1 && is_ascii_alpha(tokens[0][0])) return false;
  return true;
}

std::unordered_set<std::string> load_name_list(const std::filesystem::path& path) {
  std::unordered_set<std::string> names;
  for (const std::string& line : read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    names.insert(to_lower_ascii(line));
  }
  return names;
}

// ---- vocabulary ------------------------------------------------------------

Vocabulary::Vocabulary() {
  index_to_token_ = {"<pad>", "<s>", "</s>", "<unk>"};
  counts_.assign(index_to_token_.size(), 0);
  for (std::size_t i = 0; i < index_to_token_.size(); ++i) {
    token_to_index_[index_to_token_[i]] = static_cast<std::int64_t>(i);
  }
}

Vocabulary Vocabulary::build(const std::vector<const std::vector<std::string>*>& sequences,
                             std::int64_t max_size) {
  if (max_size < 1) throw ContractError("vocabulary max_size must be >= 1");
  std::unordered_map<std::string, std::int64_t> counts;
  std::int64_t total = 0;
  for (const auto* seq : sequences) {
    for (const std::string& token : *seq) {
      ++counts[token];
      ++total;
    }
  }
  if (total == 0) throw ContractError("cannot build a vocabulary from an empty corpus");

  std::vector<std::pair<std::string, std::int64_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<std::int64_t>(ranked.size()) > max_size) {
    ranked.resize(static_cast<std::size_t>(max_size));
  }

  Vocabulary vocab;
  for (auto& [token, count] : ranked) {
    if (vocab.token_to_index_.count(token) != 0) continue;  // reserved token in corpus
    vocab.token_to_index_[token] = vocab.size();
    vocab.index_to_token_.push_back(token);
    vocab.counts_.push_back(count);
  }
  return vocab;
}

std::int64_t Vocabulary::encode(const std::string& token) const {
  auto it = token_to_index_.find(token);
  return it == token_to_index_.end() ? kUnk : it->second;
}

std::vector<std::int64_t> Vocabulary::encode_all(const std::vector<std::string>& tokens) const {
  std::vector<std::int64_t> ids;
  ids.reserve(tokens.size());
  for (const std::string& token : tokens) ids.push_back(encode(token));
  return ids;
}

const std::string& Vocabulary::decode(std::int64_t index) const {
  if (index < 0 || index >= size()) {
    throw IndexError("vocabulary index " + std::to_string(index) + " out of range (size " +
                     std::to_string(size()) + ")");
  }
  return index_to_token_[static_cast<std::size_t>(index)];
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (const std::string& token : index_to_token_) {
    h = fnv1a64(token, h);
    h = fnv1a64("\n", h);
  }
  return h;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ostringstream out;
  for (std::int64_t i = kReservedCount; i < size(); ++i) {
    out << index_to_token_[static_cast<std::size_t>(i)] << '\t'
        << counts_[static_cast<std::size_t>(i)] << '\n';
  }
  atomic_write_text(path, out.str());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  Vocabulary vocab;
  for (const std::string& line : read_lines(path)) {
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw IoError(path.string() + ": malformed vocabulary line");
    const std::string token = line.substr(0, tab);
    vocab.token_to_index_[token] = vocab.size();
    vocab.index_to_token_.push_back(token);
    vocab.counts_.push_back(std::stoll(line.substr(tab + 1)));
  }
  return vocab;
}

// ---- dataset split ---------------------------------------------------------

SplitIndices split_dataset(std::size_t count, std::uint64_t seed) {
  if (count < 10) {
    throw ContractError("split_dataset needs at least 10 pairs, got " + std::to_string(count));
  }
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  const std::size_t n_train = count * 8 / 10;
  const std::size_t n_valid = count / 10;
  SplitIndices split;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.valid.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                     order.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), order.end());
  return split;
}

// ---- review length buckets -------------------------------------------------

LengthBucketizer LengthBucketizer::fit(const std::vector<std::int64_t>& lengths,
                                       std::int64_t bucket_count) {
  if (bucket_count < 2) throw ContractError("bucket_count must be >= 2");
  if (lengths.empty()) throw ContractError("cannot fit length buckets on an empty corpus");

  std::vector<std::int64_t> sorted = lengths;
  std::sort(sorted.begin(), sorted.end());
  const std::int64_t n = static_cast<std::int64_t>(sorted.size());
  const std::int64_t maximum = sorted.back();

  std::vector<std::int64_t> edges;
  for (std::int64_t k = 1; k < bucket_count; ++k) {
    // Lower empirical quantile at k / bucket_count.
    const std::int64_t pos = (k * n + bucket_count - 1) / bucket_count;  // ceil(k*n/B)
    const std::int64_t edge = sorted[static_cast<std::size_t>(std::max<std::int64_t>(pos - 1, 0))];
    if (edge >= maximum) continue;
    if (!edges.empty() && edges.back() >= edge) continue;
    edges.push_back(edge);
  }
  if (edges.empty()) {
    std::cerr << "warning: review lengths give a single bucket (all near " << maximum << ")\n";
  }
  return from_edges(std::move(edges));
}

LengthBucketizer LengthBucketizer::from_edges(std::vector<std::int64_t> edges) {
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] <= edges[i - 1]) throw ContractError("bucket edges must be strictly ascending");
  }
  LengthBucketizer b;
  b.edges_ = std::move(edges);
  return b;
}

std::int64_t LengthBucketizer::bucketize(std::int64_t length) const {
  std::int64_t bucket = 1;
  for (std::int64_t edge : edges_) {
    if (length > edge) ++bucket;
  }
  return bucket;
}

// ---- corpus records --------------------------------------------------------

std::vector<RawRecord> read_corpus(const std::filesystem::path& path) {
  std::vector<RawRecord> records;
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(lines[i]);
      RawRecord record;
      record.app_id = parsed.at("app_id").get<std::string>();
      record.category = parsed.at("category").get<std::string>();
      record.rating = parsed.at("rating").get<int>();
      record.review = parsed.at("review").get<std::string>();
      record.response = parsed.at("response").get<std::string>();
      if (record.rating < 1 || record.rating > 5) {
        throw IoError(path.string() + ":" + std::to_string(i + 1) + ": rating " +
                      std::to_string(record.rating) + " outside 1..5");
      }
      records.push_back(std::move(record));
    } catch (const nlohmann::json::exception& err) {
      throw IoError(path.string() + ":" + std::to_string(i + 1) + ": " + err.what());
    }
  }
  return records;
}

}  // namespace rrgen
