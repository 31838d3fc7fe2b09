#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "rrgen/checkpoint.hpp"
#include "rrgen/model.hpp"
#include "rrgen/optim.hpp"
#include "testutil.hpp"

using namespace rrgen;
using testutil::check_gradients;

namespace {

ModelConfig micro_config() {
  ModelConfig config;
  config.word_dim = 6;
  config.hidden_dim = 5;
  config.attr_dim = 3;
  config.vocab_size = 12;
  config.max_length = 8;
  config.category_count = 3;
  config.length_bucket_count = 2;
  config.seed = 424242;
  return config;
}

EncodedReview micro_review(std::vector<std::int64_t> ids, std::vector<std::int64_t> kappa) {
  EncodedReview review;
  review.token_ids = std::move(ids);
  review.keyword_ids = std::move(kappa);
  review.category_index = 2;
  review.length_bucket = 1;
  review.rating = 4;
  review.sentiment_index = 3;
  return review;
}

bool has_prefix(const ParamSet& params, const std::string& prefix) {
  for (const auto& [name, tensor] : params.items()) {
    if (name.starts_with(prefix)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("toggles control which parameters exist") {
  ModelConfig off = micro_config();
  off.use_category = off.use_length = off.use_rating = off.use_sentiment = false;
  off.use_keywords = false;
  const RrgenModel plain(off);
  CHECK_FALSE(has_prefix(plain.params(), "attr."));
  CHECK_FALSE(has_prefix(plain.params(), "keyword."));
  CHECK_FALSE(has_prefix(plain.params(), "enc.fuse"));

  ModelConfig rating_only = off;
  rating_only.use_rating = true;
  const RrgenModel rated(rating_only);
  CHECK(has_prefix(rated.params(), "attr.rating."));
  CHECK_FALSE(has_prefix(rated.params(), "attr.category."));
  CHECK_FALSE(has_prefix(rated.params(), "attr.sentiment."));
  CHECK(has_prefix(rated.params(), "enc.fuse"));

  const RrgenModel full(micro_config());
  for (const char* prefix : {"attr.category.", "attr.length.", "attr.rating.",
                             "attr.sentiment.", "keyword.", "enc.fuse"}) {
    CHECK(has_prefix(full.params(), prefix));
  }
}

TEST_CASE("parameter counts match the closed form") {
  std::vector<ModelConfig> configs;
  configs.push_back(micro_config());

  ModelConfig off = micro_config();
  off.use_category = off.use_length = off.use_rating = off.use_sentiment = false;
  off.use_keywords = false;
  configs.push_back(off);

  for (int which = 0; which < 5; ++which) {
    ModelConfig single = off;
    if (which == 0) single.use_category = true;
    if (which == 1) single.use_length = true;
    if (which == 2) single.use_rating = true;
    if (which == 3) single.use_sentiment = true;
    if (which == 4) single.use_keywords = true;
    configs.push_back(single);
  }

  for (const ModelConfig& config : configs) {
    const RrgenModel model(config);
    CHECK(model.params().total_size() == expected_parameter_count(config));
  }
}

TEST_CASE("ablation deltas are the attribute and keyword block sizes") {
  const ModelConfig full = micro_config();
  ModelConfig off = full;
  off.use_category = off.use_length = off.use_rating = off.use_sentiment = false;
  off.use_keywords = false;

  const std::int64_t d_a = full.attr_dim, d_w = full.word_dim, d_h = full.hidden_dim;
  const std::int64_t attr_tables =
      (full.category_count + full.length_bucket_count + full.rating_count +
       full.sentiment_count) * d_a + 4 * d_a * d_a;
  const std::int64_t keyword_block =
      full.keyword_symbol_count * d_a + d_a * d_a + d_w * (d_a + d_w);
  const std::int64_t fuse = d_h * (d_h + 4 * d_a);

  CHECK(RrgenModel(full).params().total_size() - RrgenModel(off).params().total_size() ==
        attr_tables + keyword_block + fuse);
}

TEST_CASE("encode produces one state per token") {
  const RrgenModel model(micro_config());
  const EncoderOutput one = model.encode(micro_review({4}, {1}));
  CHECK(one.states.size() == 1);
  CHECK(one.states[0].shape() == Shape{10});  // 2 * d_h
  CHECK(one.fused_context.shape() == Shape{5});
  CHECK(one.fused_context.all_finite());

  const EncoderOutput three = model.encode(micro_review({4, 5, 6}, {1, 2, 1}));
  CHECK(three.states.size() == 3);

  CHECK_THROWS_AS(model.encode(micro_review({}, {})), ContractError);
  CHECK_THROWS_AS(model.encode(micro_review({4, 5}, {1})), ContractError);
}

TEST_CASE("embed_attributes is deterministic and zero under zero weights") {
  RrgenModel model(micro_config());
  const EncodedReview review = micro_review({4}, {1});

  const auto first = model.embed_attributes(review);
  const auto second = model.embed_attributes(review);
  REQUIRE(first.size() == 4);
  for (std::size_t i = 0; i < first.size(); ++i) {
    for (std::int64_t j = 0; j < first[i].numel(); ++j) {
      CHECK(first[i].data()[j] == second[i].data()[j]);
    }
  }

  for (const auto& [name, tensor] : model.params().items()) {
    if (name.starts_with("attr.")) {
      Tensor t = tensor;
      std::fill(t.data(), t.data() + t.numel(), 0.0);
    }
  }
  for (const Tensor& h : model.embed_attributes(review)) {
    for (std::int64_t j = 0; j < h.numel(); ++j) CHECK(h.data()[j] == 0.0);
  }

  EncodedReview bad = review;
  bad.category_index = 9;
  CHECK_THROWS_AS(model.embed_attributes(bad), IndexError);
}

TEST_CASE("attention weights form a distribution") {
  const RrgenModel model(micro_config());
  const EncoderOutput enc = model.encode(micro_review({4, 5, 6, 7}, {1, 1, 2, 1}));
  Tensor state = enc.fused_context;

  auto [context, weights] = model.attention_step(state, enc.states);
  CHECK(weights.shape() == Shape{4});
  double total = 0.0;
  for (std::int64_t j = 0; j < 4; ++j) {
    CHECK(weights.data()[j] > 0.0);
    total += weights.data()[j];
  }
  CHECK(std::abs(total - 1.0) <= 1e-12);
  CHECK(context.shape() == Shape{10});

  // Single source state takes all the weight.
  const EncoderOutput single = model.encode(micro_review({4}, {1}));
  auto [context1, weights1] = model.attention_step(single.fused_context, single.states);
  CHECK(weights1.numel() == 1);
  CHECK(weights1.data()[0] == 1.0);
  for (std::int64_t j = 0; j < context1.numel(); ++j) {
    CHECK(context1.data()[j] == single.states[0].data()[j]);
  }

  // Identical source states split it evenly.
  std::vector<Tensor> twins{single.states[0], single.states[0]};
  auto [context2, weights2] = model.attention_step(single.fused_context, twins);
  CHECK(weights2.data()[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(weights2.data()[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("generation caps at max_length and breaks ties to the lowest index") {
  ModelConfig config = micro_config();
  config.max_length = 4;
  RrgenModel model(config);
  for (const auto& [name, tensor] : model.params().items()) {
    Tensor t = tensor;
    std::fill(t.data(), t.data() + t.numel(), 0.0);
  }

  Vocabulary vocab;  // reserved tokens only; ids < 12 still decode via pad fill
  ModelConfig tiny = config;
  tiny.vocab_size = Vocabulary::kReservedCount;
  RrgenModel zeroed(tiny);
  for (const auto& [name, tensor] : zeroed.params().items()) {
    Tensor t = tensor;
    std::fill(t.data(), t.data() + t.numel(), 0.0);
  }

  const EncodedReview review = micro_review({1, 2}, {1, 1});
  const GenerationResult result = zeroed.generate(review, vocab);
  // All logits equal: argmax lands on index 0 (<pad>) every step, so the
  // length cap is what stops decoding.
  CHECK(result.tokens.size() == 4);
  for (const auto& token : result.tokens) CHECK(token == "<pad>");
  CHECK(result.attention.size() == 4);
  for (const auto& row : result.attention) CHECK(row.size() == 2);
}

TEST_CASE("generate is deterministic and shapes its attention matrix") {
  const RrgenModel model(micro_config());
  Vocabulary vocab;
  const std::vector<std::string> seq{"t0", "t1", "t2", "t3", "t4", "t5", "t6", "t7"};
  vocab = Vocabulary::build({&seq}, 8);

  const EncodedReview review = micro_review({4, 5, 6}, {1, 2, 1});
  const GenerationResult a = model.generate(review, vocab);
  const GenerationResult b = model.generate(review, vocab);
  CHECK(a.tokens == b.tokens);
  CHECK(a.attention == b.attention);
  CHECK(a.log_probs == b.log_probs);
  CHECK(a.attention.size() >= a.tokens.size());  // one row per decode step
  for (const auto& row : a.attention) {
    CHECK(row.size() == 3);
    double total = 0.0;
    for (double w : row) total += w;
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
  for (double lp : a.log_probs) CHECK(lp <= 0.0);
}

TEST_CASE("full model gradients match finite differences") {
  ModelConfig config = micro_config();
  config.word_dim = 8;
  config.hidden_dim = 8;
  config.attr_dim = 4;
  config.vocab_size = 20;
  config.length_bucket_count = 3;
  RrgenModel model(config);

  // Varied pairs so every attribute table row family and both GRU directions
  // carry usable gradient mass.
  std::vector<EncodedReview> reviews;
  std::vector<std::vector<std::int64_t>> responses;
  Rng rng(7);
  for (int i = 0; i < 6; ++i) {
    EncodedReview review;
    const std::int64_t len = 3 + rng.below(3);
    for (std::int64_t t = 0; t < len; ++t) {
      review.token_ids.push_back(4 + rng.below(16));
      review.keyword_ids.push_back(1 + rng.below(13));
    }
    review.category_index = 1 + rng.below(3);
    review.length_bucket = 1 + rng.below(3);
    review.rating = 1 + rng.below(5);
    review.sentiment_index = 1 + rng.below(11);
    reviews.push_back(std::move(review));
    std::vector<std::int64_t> response;
    const std::int64_t response_len = 2 + rng.below(4);
    for (std::int64_t t = 0; t < response_len; ++t) response.push_back(4 + rng.below(16));
    responses.push_back(std::move(response));
  }

  auto loss_tensor = [&]() {
    std::vector<Tensor> rows;
    std::vector<std::int64_t> targets;
    for (std::size_t i = 0; i < reviews.size(); ++i) {
      auto forced = model.forced_rows(reviews[i], responses[i]);
      rows.insert(rows.end(), forced.logit_rows.begin(), forced.logit_rows.end());
      targets.insert(targets.end(), forced.targets.begin(), forced.targets.end());
    }
    return cross_entropy(stack_rows(rows), targets);
  };

  // A few optimizer steps move the model off its init point, where several
  // true gradients sit below the finite-difference noise floor.
  AdamState adam(model.params(), 1e-2);
  for (int step = 0; step < 30; ++step) {
    Tape tape;
    {
      TapeScope scope(tape);
      backward(loss_tensor(), tape);
    }
    adam_step(model.params(), adam);
    model.params().zero_grad();
  }

  model.params().zero_grad();
  Tape tape;
  {
    TapeScope scope(tape);
    backward(loss_tensor(), tape);
  }

  auto forward = [&]() { return loss_tensor().value(); };
  const auto check = check_gradients(model.params(), forward);
  CAPTURE(check.worst_param);
  CHECK(check.max_rel_error < 1e-4);
}

TEST_CASE("gradients flow only to parameters in the forward path") {
  ModelConfig config = micro_config();
  config.use_category = false;
  config.use_sentiment = false;
  RrgenModel model(config);
  model.params().zero_grad();

  Tape tape;
  {
    TapeScope scope(tape);
    auto forced = model.forced_rows(micro_review({4, 5}, {1, 2}), {6});
    backward(cross_entropy(stack_rows(forced.logit_rows), forced.targets), tape);
  }

  CHECK_FALSE(model.params().has("attr.category.table"));
  CHECK_FALSE(model.params().has("attr.sentiment.table"));

  auto grad_mass = [&model](const std::string& name) {
    const Tensor* t = model.params().find(name);
    REQUIRE(t != nullptr);
    REQUIRE(t->grad() != nullptr);
    double total = 0.0;
    for (std::int64_t i = 0; i < t->numel(); ++i) total += std::abs(t->grad()[i]);
    return total;
  };
  CHECK(grad_mass("attr.rating.table") > 0.0);
  CHECK(grad_mass("attr.length.table") > 0.0);
  CHECK(grad_mass("keyword.table") > 0.0);
  CHECK(grad_mass("out.proj") > 0.0);
}

TEST_CASE("teacher-forced loss on one pair decreases over ten adam steps") {
  RrgenModel model(micro_config());
  AdamState adam(model.params(), /*learning_rate=*/1e-2);
  const EncodedReview review = micro_review({4, 5, 6}, {1, 2, 1});
  const std::vector<std::int64_t> response{9, 10};

  std::vector<double> losses;
  for (int step = 0; step < 10; ++step) {
    Tape tape;
    Tensor loss;
    {
      TapeScope scope(tape);
      auto forced = model.forced_rows(review, response);
      loss = cross_entropy(stack_rows(forced.logit_rows), forced.targets);
      backward(loss, tape);
    }
    losses.push_back(loss.value());
    adam_step(model.params(), adam);
    model.params().zero_grad();
  }
  for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] < losses[i - 1]);
}

TEST_CASE("seeded construction and training are bit-identical") {
  const ModelConfig config = micro_config();
  const RrgenModel a(config);
  const RrgenModel b(config);
  auto items_a = a.params().items();
  auto items_b = b.params().items();
  REQUIRE(items_a.size() == items_b.size());
  for (std::size_t i = 0; i < items_a.size(); ++i) {
    CHECK(items_a[i].first == items_b[i].first);
    for (std::int64_t j = 0; j < items_a[i].second.numel(); ++j) {
      CHECK(items_a[i].second.data()[j] == items_b[i].second.data()[j]);
    }
  }
}

TEST_CASE("manifest and checkpoint round-trip through load_model") {
  const std::vector<std::string> seq{"t0", "t1", "t2", "t3", "t4", "t5", "t6", "t7"};
  const Vocabulary vocab = Vocabulary::build({&seq}, 8);
  const auto dir = std::filesystem::temp_directory_path() / "rrgen_model_test";
  std::filesystem::create_directories(dir);

  const RrgenModel model(micro_config());
  save_checkpoint(dir / "ckpt.bin", model.params());
  write_manifest(dir / "ckpt.manifest.json", model.config(), vocab.fingerprint(), {2, 4});

  const Manifest manifest = read_manifest(dir / "ckpt.manifest.json");
  CHECK(manifest.config.word_dim == 6);
  CHECK(manifest.bucket_edges == std::vector<std::int64_t>{2, 4});

  const RrgenModel restored = load_model(dir / "ckpt.bin", dir / "ckpt.manifest.json", vocab);
  const EncodedReview review = micro_review({4, 5}, {1, 1});
  const GenerationResult original = model.generate(review, vocab);
  const GenerationResult reloaded = restored.generate(review, vocab);
  CHECK(original.tokens == reloaded.tokens);
  CHECK(original.log_probs == reloaded.log_probs);

  const std::vector<std::string> other_seq{"different", "words", "here", "now"};
  const Vocabulary other = Vocabulary::build({&other_seq}, 8);
  CHECK_THROWS_AS(load_model(dir / "ckpt.bin", dir / "ckpt.manifest.json", other), ContractError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("inference over frozen parameters is thread-safe") {
  const RrgenModel model(micro_config());
  const std::vector<std::string> seq{"t0", "t1", "t2", "t3", "t4", "t5", "t6", "t7"};
  const Vocabulary vocab = Vocabulary::build({&seq}, 8);
  const EncodedReview review = micro_review({4, 5, 6}, {1, 2, 1});
  const GenerationResult expected = model.generate(review, vocab);

  std::vector<std::thread> workers;
  std::vector<GenerationResult> results(8);
  for (int t = 0; t < 8; ++t) {
    workers.emplace_back([&, t]() {
      for (int repeat = 0; repeat < 20; ++repeat) {
        results[static_cast<std::size_t>(t)] = model.generate(review, vocab);
      }
    });
  }
  for (auto& worker : workers) worker.join();
  for (const GenerationResult& result : results) {
    CHECK(result.tokens == expected.tokens);
    CHECK(result.log_probs == expected.log_probs);
  }
}

TEST_CASE("pretrained embeddings fill matching vocabulary rows") {
  const std::vector<std::string> seq{"alpha", "beta", "alpha"};
  const Vocabulary vocab = Vocabulary::build({&seq}, 8);
  ModelConfig config = micro_config();
  config.vocab_size = vocab.size();
  RrgenModel model(config);

  const auto path = std::filesystem::temp_directory_path() / "rrgen_emb_test.txt";
  {
    std::ofstream out(path);
    out << "alpha 1 2 3 4 5 6\n";
    out << "missing 9 9 9 9 9 9\n";
  }
  CHECK(load_pretrained_embeddings(model, vocab, path) == 1);
  const Tensor table = *model.params().find("embed.word");
  const std::int64_t row = vocab.encode("alpha");
  for (std::int64_t j = 0; j < 6; ++j) {
    CHECK(table.data()[row * 6 + j] == static_cast<double>(j + 1));
  }
  std::filesystem::remove(path);
}
