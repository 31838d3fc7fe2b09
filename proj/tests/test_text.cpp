#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "rrgen/io.hpp"
#include "rrgen/tensor.hpp"
#include "rrgen/text.hpp"

using namespace rrgen;

namespace {
const std::unordered_set<std::string> kNoNames;

std::vector<std::string> norm(const std::string& text) {
  return normalize(text, kNoNames, kNoNames);
}
}  // namespace

TEST_CASE("normalize the worked review") {
  CHECK(norm("Lot of ad!") == std::vector<std::string>{"lot", "of", "ad", "!"});
}

TEST_CASE("normalize emails and urls") {
  CHECK(norm("Email me at a@b.com, see https://x.y") ==
        std::vector<std::string>{"email", "me", "at", "<email>", ",", "see", "<url>"});
}

TEST_CASE("normalize squeezes, replaces digits and lemmatizes") {
  CHECK(norm("Sooooo good 5 stars") ==
        std::vector<std::string>{"soo", "good", "<digit>", "star"});
}

TEST_CASE("normalize maps app and user names") {
  std::unordered_set<std::string> apps{"vivavideo"};
  std::unordered_set<std::string> users{"bob"};
  std::vector<PlaceholderHit> log;
  const auto tokens = normalize("Bob loves VivaVideo", apps, users, &log);
  CHECK(tokens == std::vector<std::string>{"<user>", "lov", "<app>"});
  REQUIRE(log.size() == 1);  // only url/email/app values feed the dictionary
  CHECK(log[0].placeholder == "<app>");
  CHECK(log[0].original == "vivavideo");
}

TEST_CASE("normalize logs original values for the placeholder dictionary") {
  std::vector<PlaceholderHit> log;
  normalize("write a@b.com or visit http://ex.com/help", kNoNames, kNoNames, &log);
  REQUIRE(log.size() == 2);
  CHECK(log[0].placeholder == "<url>");
  CHECK(log[0].original == "http://ex.com/help");
  CHECK(log[1].placeholder == "<email>");
  CHECK(log[1].original == "a@b.com");
}

TEST_CASE("normalize is idempotent") {
  const std::vector<std::string> samples = {
      "Lot of ad!",
      "Email me at a@b.com, see https://x.y",
      "Sooooo good 5 stars",
      "address the ADDRESSES going gone!!!",
      "don't stop believing... 99 problems",
      "working  \t with   weird   spacing",
      "mixed punct;:-)(!? and_underscores",
  };
  for (const auto& sample : samples) {
    const auto once = norm(sample);
    CHECK(norm(join_tokens(once)) == once);
  }
}

TEST_CASE("normalize idempotence on pseudo-random soup") {
  const std::string alphabet = "abcdefg 012.!?@:/wxyz#$-";
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const std::int64_t len = 1 + rng.below(40);
    for (std::int64_t i = 0; i < len; ++i) {
      text.push_back(alphabet[static_cast<std::size_t>(rng.below(
          static_cast<std::int64_t>(alphabet.size())))]);
    }
    const auto once = norm(text);
    CHECK(norm(join_tokens(once)) == once);
  }
}

TEST_CASE("no raw digit email or url substring survives") {
  const auto tokens =
      norm("Call 555 0199, mail x.y+z@mail.co or www.example.org/a?b=1 today 2");
  for (const auto& token : tokens) {
    CHECK(token.find_first_of("0123456789") == std::string::npos);
    CHECK(token.find('@') == std::string::npos);
    CHECK(token.find("www") == std::string::npos);
    CHECK(token.find("http") == std::string::npos);
  }
}

TEST_CASE("review keep rule") {
  CHECK_FALSE(keepable_review({}));
  CHECK_FALSE(keepable_review({"a"}));
  CHECK(keepable_review({"ok"}));
  CHECK(keepable_review({"a", "b"}));
  CHECK(keepable_review({"!"}));  // single punctuation is not an alphabetic character
}

TEST_CASE("vocabulary ranks by frequency then lexicographically") {
  const std::vector<std::string> seq1{"a", "a", "b"};
  Vocabulary small = Vocabulary::build({&seq1}, 1);
  CHECK(small.size() == Vocabulary::kReservedCount + 1);
  CHECK(small.encode("a") == Vocabulary::kReservedCount);
  CHECK(small.encode("b") == Vocabulary::kUnk);

  const std::vector<std::string> tied{"b", "a", "b", "a"};
  Vocabulary tie = Vocabulary::build({&tied}, 1);
  CHECK(tie.encode("a") != Vocabulary::kUnk);
  CHECK(tie.encode("b") == Vocabulary::kUnk);
}

TEST_CASE("vocabulary round-trips in-vocab tokens") {
  const std::vector<std::string> seq{"cat", "dog", "cat", "bird"};
  Vocabulary vocab = Vocabulary::build({&seq}, 100);
  for (const auto& token : seq) {
    CHECK(vocab.decode(vocab.encode(token)) == token);
  }
  CHECK(vocab.encode("fish") == Vocabulary::kUnk);
  CHECK(vocab.decode(Vocabulary::kUnk) == "<unk>");
  CHECK_THROWS_AS(vocab.decode(vocab.size()), IndexError);
}

TEST_CASE("vocabulary build rejects an empty corpus") {
  const std::vector<std::string> empty;
  CHECK_THROWS_AS(Vocabulary::build({&empty}, 10), ContractError);
}

TEST_CASE("vocabulary save and load preserve order and fingerprint") {
  const std::vector<std::string> seq{"x", "y", "x", "z", "q", "q", "q"};
  Vocabulary vocab = Vocabulary::build({&seq}, 3);
  const auto path = std::filesystem::temp_directory_path() / "rrgen_vocab_test.tsv";
  vocab.save(path);
  Vocabulary loaded = Vocabulary::load(path);
  CHECK(loaded.size() == vocab.size());
  CHECK(loaded.fingerprint() == vocab.fingerprint());
  CHECK(loaded.encode("q") == vocab.encode("q"));
  std::filesystem::remove(path);
}

TEST_CASE("split sizes and determinism") {
  const SplitIndices split = split_dataset(10, 7);
  CHECK(split.train.size() == 8);
  CHECK(split.valid.size() == 1);
  CHECK(split.test.size() == 1);

  const SplitIndices again = split_dataset(10, 7);
  CHECK(again.train == split.train);
  CHECK(again.valid == split.valid);
  CHECK(again.test == split.test);

  CHECK_THROWS_AS(split_dataset(9, 7), ContractError);
}

TEST_CASE("split partitions exactly") {
  for (std::size_t n : {10u, 37u, 1000u}) {
    const SplitIndices split = split_dataset(n, 3);
    std::set<std::size_t> seen;
    for (const auto* part : {&split.train, &split.valid, &split.test}) {
      for (std::size_t i : *part) {
        CHECK(seen.insert(i).second);  // disjoint
        CHECK(i < n);
      }
    }
    CHECK(seen.size() == n);  // no loss
  }
}

TEST_CASE("split rounding rule at corpus scale") {
  // floor(0.8n) / floor(0.1n) / remainder, documented in the repo.
  const SplitIndices split = split_dataset(309246, 1);
  CHECK(split.train.size() == 247396);
  CHECK(split.valid.size() == 30924);
  CHECK(split.test.size() == 30926);
}

TEST_CASE("length buckets over a uniform range") {
  std::vector<std::int64_t> lengths(100);
  for (int i = 0; i < 100; ++i) lengths[static_cast<std::size_t>(i)] = i + 1;
  const LengthBucketizer buckets = LengthBucketizer::fit(lengths, 5);
  CHECK(buckets.edges() == std::vector<std::int64_t>{20, 40, 60, 80});
  CHECK(buckets.bucket_count() == 5);
  CHECK(buckets.bucketize(3) == 1);
  CHECK(buckets.bucketize(20) == 1);
  CHECK(buckets.bucketize(21) == 2);
  CHECK(buckets.bucketize(99) == 5);
  CHECK(buckets.bucketize(1000) == 5);
}

TEST_CASE("length buckets degenerate to one bucket") {
  const std::vector<std::int64_t> same(12, 7);
  const LengthBucketizer buckets = LengthBucketizer::fit(same, 5);
  CHECK(buckets.bucket_count() == 1);
  CHECK(buckets.bucketize(7) == 1);
  CHECK(buckets.bucketize(3) == 1);
  CHECK(buckets.bucketize(70) == 1);
}

TEST_CASE("length buckets separate five distinct lengths") {
  const LengthBucketizer buckets = LengthBucketizer::fit({1, 2, 3, 4, 5}, 5);
  CHECK(buckets.bucket_count() == 5);
  for (std::int64_t len = 1; len <= 5; ++len) CHECK(buckets.bucketize(len) == len);
  CHECK_THROWS_AS(LengthBucketizer::fit({1, 2}, 1), ContractError);
}

TEST_CASE("corpus reader reports the offending line") {
  const auto path = std::filesystem::temp_directory_path() / "rrgen_corpus_test.jsonl";
  {
    std::ofstream out(path);
    out << R"({"app_id":"a","category":"Tools","rating":5,"review":"nice","response":"thanks"})" << "\n";
    out << "{broken\n";
  }
  CHECK_THROWS_WITH_AS(read_corpus(path), doctest::Contains(":2"), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("corpus reader validates ratings") {
  const auto path = std::filesystem::temp_directory_path() / "rrgen_corpus_rating.jsonl";
  {
    std::ofstream out(path);
    out << R"({"app_id":"a","category":"Tools","rating":9,"review":"nice","response":"thanks"})" << "\n";
  }
  CHECK_THROWS_AS(read_corpus(path), IoError);
  std::filesystem::remove(path);
}
