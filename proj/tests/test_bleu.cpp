#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rrgen/bleu.hpp"
#include "rrgen/error.hpp"
#include "rrgen/tensor.hpp"
#include "testutil.hpp"

using namespace rrgen;
using testutil::oracle_corpus_bleu;
using testutil::random_token_corpus;

namespace {
std::vector<std::string> words(std::initializer_list<const char*> list) {
  return {list.begin(), list.end()};
}
}  // namespace

TEST_CASE("identity corpus scores 100") {
  const auto tokens = words({"a", "b", "c", "d"});
  const BleuReport report = corpus_bleu({tokens}, {tokens});
  CHECK(report.bleu4 == doctest::Approx(100.0).epsilon(1e-12));
  for (double p : report.precisions) CHECK(p == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(report.brevity_penalty == 1.0);
}

TEST_CASE("clipping example zeroes the score") {
  const auto hyp = words({"the", "the", "the", "the", "the", "the", "the"});
  const auto ref = words({"the", "cat", "is", "on", "the", "mat"});
  const BleuReport report = corpus_bleu({hyp}, {ref});
  CHECK(report.matched[0] == 2);
  CHECK(report.total[0] == 7);
  CHECK(report.precisions[0] == doctest::Approx(100.0 * 2.0 / 7.0).epsilon(1e-12));
  CHECK(report.matched[1] == 0);
  CHECK(report.precisions[1] == 0.0);
  CHECK(report.precisions[3] == 0.0);
  CHECK(report.bleu4 == 0.0);
  CHECK(report.brevity_penalty == 1.0);  // hypothesis is the longer side
}

TEST_CASE("pair order does not change the report") {
  Rng rng(71);
  auto hyps = random_token_corpus(rng, 12, 8, 6);
  auto refs = random_token_corpus(rng, 12, 8, 6);
  const BleuReport base = corpus_bleu(hyps, refs);

  std::vector<std::size_t> order(hyps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<std::vector<std::string>> hyps2, refs2;
  for (std::size_t i : order) {
    hyps2.push_back(hyps[i]);
    refs2.push_back(refs[i]);
  }
  const BleuReport shuffled = corpus_bleu(hyps2, refs2);
  CHECK(shuffled.bleu4 == base.bleu4);
  CHECK(shuffled.matched == base.matched);
  CHECK(shuffled.total == base.total);
  CHECK(shuffled.brevity_penalty == base.brevity_penalty);
}

TEST_CASE("corpus_bleu matches the brute-force counter") {
  Rng rng(5);
  for (int corpus = 0; corpus < 20; ++corpus) {
    const std::size_t pairs = 1 + static_cast<std::size_t>(rng.below(20));
    const auto hyps = random_token_corpus(rng, pairs, 9, 5);
    const auto refs = random_token_corpus(rng, pairs, 9, 5);
    const BleuReport report = corpus_bleu(hyps, refs);
    const auto oracle = oracle_corpus_bleu(hyps, refs);
    CHECK(report.matched == oracle.matched);
    CHECK(report.total == oracle.total);
    CHECK(report.bleu4 == oracle.bleu4);
    CHECK(report.brevity_penalty == oracle.brevity_penalty);
  }
}

TEST_CASE("self-corpus identity holds for hypotheses of length >= 4") {
  Rng rng(9);
  auto corpus = random_token_corpus(rng, 10, 10, 7);
  for (auto& tokens : corpus) {
    while (tokens.size() < 4) tokens.push_back("pad");
  }
  CHECK(corpus_bleu(corpus, corpus).bleu4 == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("brevity penalty is 1 exactly when hypotheses are not shorter") {
  const BleuReport longer = corpus_bleu({words({"a", "b", "c"})}, {words({"a", "b"})});
  CHECK(longer.brevity_penalty == 1.0);
  const BleuReport shorter = corpus_bleu({words({"a", "b"})}, {words({"a", "b", "c"})});
  CHECK(shorter.brevity_penalty < 1.0);
  CHECK(shorter.brevity_penalty == doctest::Approx(std::exp(1.0 - 1.5)).epsilon(1e-12));
}

TEST_CASE("contract errors") {
  CHECK_THROWS_AS(corpus_bleu({}, {}), ContractError);
  CHECK_THROWS_AS(corpus_bleu({words({"a"})}, {}), ContractError);
}

TEST_CASE("smoothed sentence bleu on identical sequences") {
  const auto tokens = words({"w", "x", "y", "z"});
  CHECK(sentence_bleu_smoothed(tokens, tokens, 0.1) == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("smoothed sentence bleu closed form on disjoint token sets") {
  const auto hyp = words({"a", "b", "c", "d", "e"});
  const auto ref = words({"v", "w", "x", "y", "z", "q"});
  const double epsilon = 0.1;
  double log_sum = 0.0;
  for (int order = 1; order <= 4; ++order) {
    log_sum += std::log(epsilon / static_cast<double>(5 - order + 1));
  }
  const double expected = 100.0 * std::exp(1.0 - 6.0 / 5.0) * std::exp(log_sum / 4);
  CHECK(sentence_bleu_smoothed(hyp, ref, epsilon) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("smoothed sentence bleu edge cases") {
  CHECK(sentence_bleu_smoothed({}, words({"a"}), 0.1) == 0.0);
  CHECK_THROWS_AS(sentence_bleu_smoothed(words({"a"}), words({"a"}), 0.0), ContractError);
  // Orders longer than the hypothesis fall back to epsilon over 1.
  const double score = sentence_bleu_smoothed(words({"a"}), words({"a"}), 0.1);
  CHECK(score > 0.0);
  CHECK(score < 100.0);
}

TEST_CASE("swapping a useless token for an available matching one never hurts") {
  // Enumerated hypothesis/reference pairs over a tiny alphabet; replacing a
  // token absent from the reference with one whose reference count is not
  // exhausted must not lower the smoothed score.
  const std::vector<std::string> alphabet{"a", "b", "c"};
  Rng rng(77);
  int checked = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    const auto make = [&rng, &alphabet](std::int64_t max_len) {
      std::vector<std::string> tokens;
      const std::int64_t len = 1 + rng.below(max_len);
      for (std::int64_t i = 0; i < len; ++i) {
        tokens.push_back(alphabet[static_cast<std::size_t>(rng.below(3))]);
      }
      return tokens;
    };
    auto hyp = make(6);
    const auto ref = make(6);

    auto count = [](const std::vector<std::string>& tokens, const std::string& t) {
      return std::count(tokens.begin(), tokens.end(), t);
    };
    // Find a hypothesis position holding a token the reference lacks.
    std::size_t position = hyp.size();
    for (std::size_t i = 0; i < hyp.size(); ++i) {
      if (count(ref, hyp[i]) == 0) {
        position = i;
        break;
      }
    }
    if (position == hyp.size()) continue;
    // And a replacement with spare reference occurrences.
    std::string replacement;
    for (const auto& token : alphabet) {
      if (count(ref, token) > count(hyp, token)) {
        replacement = token;
        break;
      }
    }
    if (replacement.empty()) continue;

    const double before = sentence_bleu_smoothed(hyp, ref, 0.1);
    hyp[position] = replacement;
    const double after = sentence_bleu_smoothed(hyp, ref, 0.1);
    CHECK(after >= before);
    ++checked;
  }
  CHECK(checked > 300);  // the enumeration actually exercised the property
}
