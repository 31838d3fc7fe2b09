#include "rrgen/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rrgen/bleu.hpp"
#include "rrgen/checkpoint.hpp"
#include "rrgen/error.hpp"
#include "rrgen/io.hpp"
#include "rrgen/optim.hpp"

namespace rrgen {

namespace {

constexpr double kInitScale = 0.08;

GruCell register_gru(ParamSet& params, const std::string& prefix, std::int64_t input_dim,
                     std::int64_t hidden_dim) {
  GruCell cell;
  cell.w_update = params.add(prefix + ".update.input", Tensor::zeros({hidden_dim, input_dim}));
  cell.u_update = params.add(prefix + ".update.state", Tensor::zeros({hidden_dim, hidden_dim}));
  cell.b_update = params.add(prefix + ".update.bias", Tensor::zeros({hidden_dim}));
  cell.w_reset = params.add(prefix + ".reset.input", Tensor::zeros({hidden_dim, input_dim}));
  cell.u_reset = params.add(prefix + ".reset.state", Tensor::zeros({hidden_dim, hidden_dim}));
  cell.b_reset = params.add(prefix + ".reset.bias", Tensor::zeros({hidden_dim}));
  cell.w_cand = params.add(prefix + ".cand.input", Tensor::zeros({hidden_dim, input_dim}));
  cell.u_cand = params.add(prefix + ".cand.state", Tensor::zeros({hidden_dim, hidden_dim}));
  cell.b_cand = params.add(prefix + ".cand.bias", Tensor::zeros({hidden_dim}));
  return cell;
}

void check_index(std::int64_t value, std::int64_t count, const char* what) {
  if (value < 1 || value > count) {
    throw IndexError(std::string(what) + " index " + std::to_string(value) +
                     " outside [1, " + std::to_string(count) + "]");
  }
}

double stable_log_prob(const Tensor& logits, std::int64_t index) {
  double mx = logits.data()[0];
  for (std::int64_t i = 1; i < logits.numel(); ++i) mx = std::max(mx, logits.data()[i]);
  double total = 0.0;
  for (std::int64_t i = 0; i < logits.numel(); ++i) total += std::exp(logits.data()[i] - mx);
  return logits.data()[index] - mx - std::log(total);
}

}  // namespace

void ModelConfig::validate() const {
  if (word_dim < 1 || hidden_dim < 1 || attr_dim < 1) {
    throw ContractError("model dims must be >= 1");
  }
  if (vocab_size < Vocabulary::kReservedCount) {
    throw ContractError("vocab_size must cover the reserved tokens");
  }
  if (max_length < 1) throw ContractError("max_length must be >= 1");
  if (use_category && category_count < 1) throw ContractError("category_count must be >= 1");
  if (use_length && length_bucket_count < 1) throw ContractError("length_bucket_count must be >= 1");
  if (use_keywords && keyword_symbol_count < 2) throw ContractError("keyword_symbol_count must be >= 2");
}

EncodedReview encode_review(const AnnotatedReview& review, const Vocabulary& vocab,
                            const KeywordDictionary& keywords, std::int64_t max_length) {
  EncodedReview encoded;
  const std::size_t limit = static_cast<std::size_t>(max_length);
  for (std::size_t t = 0; t < review.record.review_tokens.size() && t < limit; ++t) {
    encoded.token_ids.push_back(vocab.encode(review.record.review_tokens[t]));
    encoded.keyword_ids.push_back(keywords.symbol_index(review.keyword_symbols[t]));
  }
  encoded.category_index = review.category_index;
  encoded.length_bucket = review.length_bucket;
  encoded.rating = review.rating;
  encoded.sentiment_index = sentiment_index(review.sentiment);
  return encoded;
}

RrgenModel::RrgenModel(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::int64_t d_w = config_.word_dim;
  const std::int64_t d_h = config_.hidden_dim;
  const std::int64_t d_a = config_.attr_dim;

  params_.add("embed.word", Tensor::zeros({config_.vocab_size, d_w}));
  if (config_.use_category) {
    params_.add("attr.category.table", Tensor::zeros({config_.category_count, d_a}));
    params_.add("attr.category.proj", Tensor::zeros({d_a, d_a}));
  }
  if (config_.use_length) {
    params_.add("attr.length.table", Tensor::zeros({config_.length_bucket_count, d_a}));
    params_.add("attr.length.proj", Tensor::zeros({d_a, d_a}));
  }
  if (config_.use_rating) {
    params_.add("attr.rating.table", Tensor::zeros({config_.rating_count, d_a}));
    params_.add("attr.rating.proj", Tensor::zeros({d_a, d_a}));
  }
  if (config_.use_sentiment) {
    params_.add("attr.sentiment.table", Tensor::zeros({config_.sentiment_count, d_a}));
    params_.add("attr.sentiment.proj", Tensor::zeros({d_a, d_a}));
  }
  if (config_.use_keywords) {
    params_.add("keyword.table", Tensor::zeros({config_.keyword_symbol_count, d_a}));
    params_.add("keyword.proj", Tensor::zeros({d_a, d_a}));
    params_.add("keyword.fuse", Tensor::zeros({d_w, d_a + d_w}));
  }

  encoder_fwd_ = register_gru(params_, "enc.fwd", d_w, d_h);
  encoder_bwd_ = register_gru(params_, "enc.bwd", d_w, d_h);
  params_.add("enc.ctx.proj", Tensor::zeros({d_h, 2 * d_h}));
  if (config_.enabled_attribute_count() > 0) {
    params_.add("enc.fuse",
                Tensor::zeros({d_h, d_h + config_.enabled_attribute_count() * d_a}));
  }

  decoder_ = register_gru(params_, "dec", d_w + 2 * d_h, d_h);
  params_.add("attn.query", Tensor::zeros({d_h, d_h}));
  params_.add("attn.keys", Tensor::zeros({d_h, 2 * d_h}));
  params_.add("attn.score", Tensor::zeros({d_h}));
  params_.add("out.proj", Tensor::zeros({config_.vocab_size, d_h + 2 * d_h}));

  // Matrices and tables get small uniform weights, biases stay zero.
  Rng rng(config_.seed);
  for (const auto& [name, tensor] : params_.items()) {
    if (name.ends_with(".bias")) continue;
    Tensor t = tensor;
    for (std::int64_t i = 0; i < t.numel(); ++i) t.data()[i] = rng.uniform(-kInitScale, kInitScale);
  }
}

std::vector<Tensor> RrgenModel::embed_attributes(const EncodedReview& review) const {
  std::vector<Tensor> embedded;
  if (config_.use_category) {
    check_index(review.category_index, config_.category_count, "category");
    embedded.push_back(tanh(matmul(params_.at("attr.category.proj"),
                                   embedding(params_.at("attr.category.table"),
                                             review.category_index - 1))));
  }
  if (config_.use_length) {
    check_index(review.length_bucket, config_.length_bucket_count, "length bucket");
    embedded.push_back(tanh(matmul(params_.at("attr.length.proj"),
                                   embedding(params_.at("attr.length.table"),
                                             review.length_bucket - 1))));
  }
  if (config_.use_rating) {
    check_index(review.rating, config_.rating_count, "rating");
    embedded.push_back(tanh(matmul(params_.at("attr.rating.proj"),
                                   embedding(params_.at("attr.rating.table"), review.rating - 1))));
  }
  if (config_.use_sentiment) {
    check_index(review.sentiment_index, config_.sentiment_count, "sentiment");
    embedded.push_back(tanh(matmul(params_.at("attr.sentiment.proj"),
                                   embedding(params_.at("attr.sentiment.table"),
                                             review.sentiment_index - 1))));
  }
  return embedded;
}

EncoderOutput RrgenModel::encode(const EncodedReview& review) const {
  const std::int64_t length = static_cast<std::int64_t>(review.token_ids.size());
  if (length == 0) throw ContractError("encode: empty token sequence");
  if (config_.use_keywords &&
      review.keyword_ids.size() != review.token_ids.size()) {
    throw ContractError("encode: keyword sequence length " +
                        std::to_string(review.keyword_ids.size()) + " != token count " +
                        std::to_string(review.token_ids.size()));
  }

  const Tensor& word_table = params_.at("embed.word");
  std::vector<Tensor> inputs;
  inputs.reserve(static_cast<std::size_t>(length));
  for (std::int64_t t = 0; t < length; ++t) {
    const std::int64_t id = review.token_ids[static_cast<std::size_t>(t)];
    if (id < 0 || id >= config_.vocab_size) {
      throw IndexError("encode: token id " + std::to_string(id) + " outside vocabulary");
    }
    Tensor word = embedding(word_table, id);
    if (config_.use_keywords) {
      const std::int64_t kid = review.keyword_ids[static_cast<std::size_t>(t)];
      check_index(kid, config_.keyword_symbol_count, "keyword symbol");
      Tensor key = tanh(matmul(params_.at("keyword.proj"),
                               embedding(params_.at("keyword.table"), kid - 1)));
      const Tensor parts[] = {key, word};
      word = tanh(matmul(params_.at("keyword.fuse"), concat(parts)));
    }
    inputs.push_back(std::move(word));
  }

  std::vector<Tensor> forward(static_cast<std::size_t>(length));
  Tensor state = Tensor::zeros({config_.hidden_dim});
  for (std::int64_t t = 0; t < length; ++t) {
    state = gru_cell(inputs[static_cast<std::size_t>(t)], state, encoder_fwd_);
    forward[static_cast<std::size_t>(t)] = state;
  }
  std::vector<Tensor> backward_states(static_cast<std::size_t>(length));
  state = Tensor::zeros({config_.hidden_dim});
  for (std::int64_t t = length - 1; t >= 0; --t) {
    state = gru_cell(inputs[static_cast<std::size_t>(t)], state, encoder_bwd_);
    backward_states[static_cast<std::size_t>(t)] = state;
  }

  EncoderOutput out;
  out.states.reserve(static_cast<std::size_t>(length));
  for (std::int64_t t = 0; t < length; ++t) {
    const Tensor parts[] = {forward[static_cast<std::size_t>(t)],
                            backward_states[static_cast<std::size_t>(t)]};
    out.states.push_back(concat(parts));
  }

  const Tensor ends[] = {forward.back(), backward_states.front()};
  out.context = tanh(matmul(params_.at("enc.ctx.proj"), concat(ends)));

  std::vector<Tensor> fused_parts = {out.context};
  std::vector<Tensor> attrs = embed_attributes(review);
  fused_parts.insert(fused_parts.end(), attrs.begin(), attrs.end());
  if (fused_parts.size() == 1) {
    out.fused_context = out.context;  // pure NMT baseline
  } else {
    out.fused_context = tanh(matmul(params_.at("enc.fuse"), concat(fused_parts)));
  }
  return out;
}

std::vector<Tensor> RrgenModel::attention_keys(const std::vector<Tensor>& encoder_states) const {
  const Tensor& key_proj = params_.at("attn.keys");
  std::vector<Tensor> keys;
  keys.reserve(encoder_states.size());
  for (const Tensor& h : encoder_states) keys.push_back(matmul(key_proj, h));
  return keys;
}

namespace {

std::pair<Tensor, Tensor> attention_with_keys(const ParamSet& params,
                                              const Tensor& decoder_state_prev,
                                              const std::vector<Tensor>& encoder_states,
                                              const std::vector<Tensor>& keys) {
  if (encoder_states.empty()) throw ContractError("attention over no encoder states");
  Tensor query = matmul(params.at("attn.query"), decoder_state_prev);
  std::vector<Tensor> rows;
  rows.reserve(keys.size());
  for (const Tensor& key : keys) rows.push_back(tanh(add(query, key)));
  Tensor scores = matmul(stack_rows(rows), params.at("attn.score"));
  Tensor weights = softmax(scores);
  Tensor context = matmul(weights, stack_rows(encoder_states));
  return {context, weights};
}

}  // namespace

std::pair<Tensor, Tensor> RrgenModel::attention_step(
    const Tensor& decoder_state_prev, const std::vector<Tensor>& encoder_states) const {
  return attention_with_keys(params_, decoder_state_prev, encoder_states,
                             attention_keys(encoder_states));
}

RrgenModel::DecodeStep RrgenModel::decode_step(std::int64_t prev_token,
                                               const Tensor& decoder_state_prev,
                                               const EncoderOutput& encoder_output,
                                               const std::vector<Tensor>& keys) const {
  if (prev_token < 0 || prev_token >= config_.vocab_size) {
    throw IndexError("decode_step: token id " + std::to_string(prev_token) +
                     " outside vocabulary");
  }
  auto [context, weights] =
      attention_with_keys(params_, decoder_state_prev, encoder_output.states, keys);
  const Tensor input_parts[] = {embedding(params_.at("embed.word"), prev_token), context};
  Tensor state = gru_cell(concat(input_parts), decoder_state_prev, decoder_);
  const Tensor out_parts[] = {state, context};
  Tensor logits = matmul(params_.at("out.proj"), concat(out_parts));
  return DecodeStep{std::move(logits), std::move(state), std::move(weights)};
}

RrgenModel::ForcedRows RrgenModel::forced_rows(
    const EncodedReview& review, const std::vector<std::int64_t>& response_ids) const {
  EncoderOutput enc = encode(review);
  const std::vector<Tensor> keys = attention_keys(enc.states);

  ForcedRows rows;
  rows.targets.assign(response_ids.begin(), response_ids.end());
  rows.targets.push_back(Vocabulary::kEos);

  Tensor state = enc.fused_context;  // h'_1 = c'
  std::int64_t prev = Vocabulary::kBos;
  for (std::int64_t target : rows.targets) {
    DecodeStep step = decode_step(prev, state, enc, keys);
    rows.logit_rows.push_back(step.logits);
    state = step.state;
    prev = target;  // teacher forcing
  }
  return rows;
}

GenerationResult RrgenModel::generate(const EncodedReview& review, const Vocabulary& vocab) const {
  EncoderOutput enc = encode(review);
  const std::vector<Tensor> keys = attention_keys(enc.states);

  GenerationResult result;
  Tensor state = enc.fused_context;
  std::int64_t prev = Vocabulary::kBos;
  for (std::int64_t step_index = 0; step_index < config_.max_length; ++step_index) {
    DecodeStep step = decode_step(prev, state, enc, keys);
    // Greedy argmax; ties resolve to the lowest index.
    std::int64_t best = 0;
    for (std::int64_t i = 1; i < step.logits.numel(); ++i) {
      if (step.logits.data()[i] > step.logits.data()[best]) best = i;
    }
    result.attention.emplace_back(step.attention.data(),
                                  step.attention.data() + step.attention.numel());
    result.log_probs.push_back(stable_log_prob(step.logits, best));
    if (best == Vocabulary::kEos) break;
    result.tokens.push_back(vocab.decode(best));
    state = step.state;
    prev = best;
  }
  return result;
}

std::int64_t expected_parameter_count(const ModelConfig& c) {
  const std::int64_t d_w = c.word_dim, d_h = c.hidden_dim, d_a = c.attr_dim;
  auto gru = [](std::int64_t in, std::int64_t hidden) {
    return 3 * (hidden * in + hidden * hidden + hidden);
  };
  std::int64_t total = c.vocab_size * d_w;                      // embed.word
  if (c.use_category) total += c.category_count * d_a + d_a * d_a;
  if (c.use_length) total += c.length_bucket_count * d_a + d_a * d_a;
  if (c.use_rating) total += c.rating_count * d_a + d_a * d_a;
  if (c.use_sentiment) total += c.sentiment_count * d_a + d_a * d_a;
  if (c.use_keywords) total += c.keyword_symbol_count * d_a + d_a * d_a + d_w * (d_a + d_w);
  total += 2 * gru(d_w, d_h);                                   // encoder directions
  total += d_h * 2 * d_h;                                       // enc.ctx.proj
  const std::int64_t attrs = c.enabled_attribute_count();
  if (attrs > 0) total += d_h * (d_h + attrs * d_a);            // enc.fuse
  total += gru(d_w + 2 * d_h, d_h);                             // decoder
  total += d_h * d_h + d_h * 2 * d_h + d_h;                     // attention
  total += c.vocab_size * (d_h + 2 * d_h);                      // out.proj
  return total;
}

std::int64_t load_pretrained_embeddings(RrgenModel& model, const Vocabulary& vocab,
                                        const std::filesystem::path& path) {
  Tensor table = *model.params().find("embed.word");
  const std::int64_t d_w = model.config().word_dim;
  std::int64_t filled = 0;
  for (const std::string& line : read_lines(path)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    const std::int64_t index = vocab.encode(token);
    std::vector<double> row;
    double v;
    while (fields >> v) row.push_back(v);
    if (static_cast<std::int64_t>(row.size()) != d_w) {
      throw IoError(path.string() + ": embedding for \"" + token + "\" has " +
                    std::to_string(row.size()) + " dims, expected " + std::to_string(d_w));
    }
    if (index == Vocabulary::kUnk && token != "<unk>") continue;  // out of vocabulary
    std::copy(row.begin(), row.end(), table.data() + index * d_w);
    ++filled;
  }
  return filled;
}

// ---- training ----------------------------------------------------------------

namespace {

std::string checkpoint_name(std::int64_t batch) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ckpt-%06lld.bin", static_cast<long long>(batch));
  return buf;
}

double validation_bleu(const RrgenModel& model, const std::vector<TrainItem>& validation,
                       const Vocabulary& vocab) {
  if (validation.empty()) return 0.0;
  std::vector<std::vector<std::string>> hyps, refs;
  hyps.reserve(validation.size());
  refs.reserve(validation.size());
  for (const TrainItem& item : validation) {
    hyps.push_back(model.generate(item.review, vocab).tokens);
    refs.push_back(item.response_tokens);
  }
  return corpus_bleu(hyps, refs).bleu4;
}

}  // namespace

TrainResult train_model(RrgenModel& model, const std::vector<TrainItem>& training,
                        const std::vector<TrainItem>& validation, const TrainOptions& options,
                        const Vocabulary& vocab) {
  if (training.empty()) throw ContractError("train: empty training set");
  if (options.batch_size < 1) throw ContractError("train: batch_size must be >= 1");

  std::filesystem::create_directories(options.output_dir);
  AdamState adam(model.params(), options.learning_rate);
  TrainResult result;
  std::ostringstream log;
  std::int64_t batch_count = 0;

  auto save_and_score = [&](const std::string& name) {
    save_checkpoint(options.output_dir / name, model.params());
    write_manifest(options.output_dir / (name + ".manifest.json"), model.config(),
                   options.vocab_fingerprint, options.bucket_edges);
    const double bleu = validation_bleu(model, validation, vocab);
    log << nlohmann::json{{"batch", batch_count}, {"checkpoint", name}, {"validation_bleu", bleu}}
        << '\n';
    // Ties go to the later (more trained) checkpoint.
    if (result.best_checkpoint.empty() || bleu >= result.best_validation_bleu) {
      result.best_checkpoint = name;
      result.best_validation_bleu = bleu;
    }
  };

  std::vector<std::size_t> order(training.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::int64_t epoch = 0; epoch < options.epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(options.seed, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(options.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(options.batch_size));
      Tape tape;
      Tensor loss;
      {
        TapeScope scope(tape);
        std::vector<Tensor> rows;
        std::vector<std::int64_t> targets;
        for (std::size_t i = start; i < stop; ++i) {
          const TrainItem& item = training[order[i]];
          RrgenModel::ForcedRows forced = model.forced_rows(item.review, item.response_ids);
          rows.insert(rows.end(), forced.logit_rows.begin(), forced.logit_rows.end());
          targets.insert(targets.end(), forced.targets.begin(), forced.targets.end());
        }
        loss = cross_entropy(stack_rows(rows), targets);
        backward(loss, tape);
      }
      ++batch_count;
      const double batch_loss = loss.value();
      if (!std::isfinite(batch_loss)) {
        throw std::runtime_error("training aborted: non-finite loss in batch " +
                                 std::to_string(batch_count));
      }
      result.batch_losses.push_back(batch_loss);
      log << nlohmann::json{{"batch", batch_count}, {"loss", batch_loss}} << '\n';

      adam_step(model.params(), adam);
      model.params().zero_grad();

      if (options.checkpoint_every > 0 && batch_count % options.checkpoint_every == 0) {
        save_and_score(checkpoint_name(batch_count));
      }
    }
  }

  save_and_score("ckpt-final.bin");
  result.final_loss = result.batch_losses.empty() ? 0.0 : result.batch_losses.back();
  atomic_write_text(options.output_dir / "train_log.jsonl", log.str());
  atomic_write_text(options.output_dir / "best.txt", result.best_checkpoint + "\n");
  return result;
}

// ---- manifests ----------------------------------------------------------------

namespace {

std::string hex_u64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex_u64(const std::string& s) {
  return std::stoull(s, nullptr, 16);
}

}  // namespace

void write_manifest(const std::filesystem::path& path, const ModelConfig& config,
                    std::uint64_t vocab_fingerprint, const std::vector<std::int64_t>& bucket_edges) {
  nlohmann::json doc{
      {"format_version", 1},
      {"word_dim", config.word_dim},
      {"hidden_dim", config.hidden_dim},
      {"attr_dim", config.attr_dim},
      {"vocab_size", config.vocab_size},
      {"max_length", config.max_length},
      {"use_category", config.use_category},
      {"use_length", config.use_length},
      {"use_rating", config.use_rating},
      {"use_sentiment", config.use_sentiment},
      {"use_keywords", config.use_keywords},
      {"category_count", config.category_count},
      {"length_bucket_count", config.length_bucket_count},
      {"rating_count", config.rating_count},
      {"sentiment_count", config.sentiment_count},
      {"keyword_symbol_count", config.keyword_symbol_count},
      {"seed", config.seed},
      {"vocab_fingerprint", hex_u64(vocab_fingerprint)},
      {"bucket_edges", bucket_edges},
  };
  atomic_write_text(path, doc.dump(2) + "\n");
}

Manifest read_manifest(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& err) {
    throw IoError(path.string() + ": " + err.what());
  }
  Manifest manifest;
  ModelConfig& c = manifest.config;
  c.word_dim = doc.at("word_dim").get<std::int64_t>();
  c.hidden_dim = doc.at("hidden_dim").get<std::int64_t>();
  c.attr_dim = doc.at("attr_dim").get<std::int64_t>();
  c.vocab_size = doc.at("vocab_size").get<std::int64_t>();
  c.max_length = doc.at("max_length").get<std::int64_t>();
  c.use_category = doc.at("use_category").get<bool>();
  c.use_length = doc.at("use_length").get<bool>();
  c.use_rating = doc.at("use_rating").get<bool>();
  c.use_sentiment = doc.at("use_sentiment").get<bool>();
  c.use_keywords = doc.at("use_keywords").get<bool>();
  c.category_count = doc.at("category_count").get<std::int64_t>();
  c.length_bucket_count = doc.at("length_bucket_count").get<std::int64_t>();
  c.rating_count = doc.at("rating_count").get<std::int64_t>();
  c.sentiment_count = doc.at("sentiment_count").get<std::int64_t>();
  c.keyword_symbol_count = doc.at("keyword_symbol_count").get<std::int64_t>();
  c.seed = doc.at("seed").get<std::uint64_t>();
  manifest.vocab_fingerprint = parse_hex_u64(doc.at("vocab_fingerprint").get<std::string>());
  manifest.bucket_edges = doc.at("bucket_edges").get<std::vector<std::int64_t>>();
  return manifest;
}

RrgenModel load_model(const std::filesystem::path& checkpoint_path,
                      const std::filesystem::path& manifest_path, const Vocabulary& vocab) {
  const Manifest manifest = read_manifest(manifest_path);
  if (manifest.vocab_fingerprint != vocab.fingerprint()) {
    throw ContractError("checkpoint " + checkpoint_path.string() +
                        " was trained with a different vocabulary");
  }
  if (manifest.config.vocab_size != vocab.size()) {
    throw ContractError("checkpoint vocabulary size " + std::to_string(manifest.config.vocab_size) +
                        " != provided " + std::to_string(vocab.size()));
  }
  RrgenModel model(manifest.config);
  load_checkpoint(checkpoint_path, model.params());
  return model;
}

}  // namespace rrgen
