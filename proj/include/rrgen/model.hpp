#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rrgen/annotate.hpp"
#include "rrgen/params.hpp"
#include "rrgen/tensor.hpp"
#include "rrgen/text.hpp"

namespace rrgen {

struct ModelConfig {
  std::int64_t word_dim = 100;    // d_w
  std::int64_t hidden_dim = 200;  // d_h per direction
  std::int64_t attr_dim = 90;     // d_a
  std::int64_t vocab_size = 0;    // includes reserved tokens
  std::int64_t max_length = 200;

  bool use_category = true;
  bool use_length = true;
  bool use_rating = true;
  bool use_sentiment = true;
  bool use_keywords = true;

  std::int64_t category_count = 0;       // N_Gamma, from the corpus
  std::int64_t length_bucket_count = 0;  // N_L, from the bucketizer
  std::int64_t rating_count = kRatingLevels;
  std::int64_t sentiment_count = kSentimentLevels;
  std::int64_t keyword_symbol_count = 13;  // N_K

  std::uint64_t seed = 1;

  std::int64_t enabled_attribute_count() const {
    return (use_category ? 1 : 0) + (use_length ? 1 : 0) + (use_rating ? 1 : 0) +
           (use_sentiment ? 1 : 0);
  }
  void validate() const;
};

// A review ready for the network: vocabulary ids plus 1-based attribute and
// keyword-symbol indices.
struct EncodedReview {
  std::vector<std::int64_t> token_ids;
  std::vector<std::int64_t> keyword_ids;  // 1-based, aligned with token_ids
  std::int64_t category_index = 1;
  std::int64_t length_bucket = 1;
  std::int64_t rating = 1;
  std::int64_t sentiment_index = 6;  // neutral
};

EncodedReview encode_review(const AnnotatedReview& review, const Vocabulary& vocab,
                            const KeywordDictionary& keywords, std::int64_t max_length);

struct EncoderOutput {
  std::vector<Tensor> states;  // one [2*d_h] state per source token
  Tensor context;              // c, [d_h]
  Tensor fused_context;        // c', [d_h]; equals c when no attribute is enabled
};

struct GenerationResult {
  std::vector<std::string> tokens;  // placeholders intact, no <s>/</s>
  std::vector<std::vector<double>> attention;  // T_y rows of length T_x
  std::vector<double> log_probs;
};

// Bidirectional GRU encoder with attribute-fused context and keyword-fused
// token embeddings, and an attentional GRU decoder over [embedding; a_t]
// inputs. Parameters for disabled attributes are never created, so ablations
// change capacity exactly.
class RrgenModel {
 public:
  explicit RrgenModel(ModelConfig config);

  const ModelConfig& config() const { return config_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  // tanh(W . table[index]) for every enabled attribute, in category, length,
  // rating, sentiment order.
  std::vector<Tensor> embed_attributes(const EncodedReview& review) const;

  EncoderOutput encode(const EncodedReview& review) const;

  // Additive attention: score_j = v . tanh(W q + U h_j). Returns the context
  // vector a_t and the weight row (softmax over source positions).
  std::pair<Tensor, Tensor> attention_step(const Tensor& decoder_state_prev,
                                           const std::vector<Tensor>& encoder_states) const;

  // U h_j for every source state, computed once per sequence.
  std::vector<Tensor> attention_keys(const std::vector<Tensor>& encoder_states) const;

  struct DecodeStep {
    Tensor logits;
    Tensor state;
    Tensor attention;
  };
  DecodeStep decode_step(std::int64_t prev_token, const Tensor& decoder_state_prev,
                         const EncoderOutput& encoder_output,
                         const std::vector<Tensor>& keys) const;

  // Teacher-forced logit rows for one pair; targets are response ids plus the
  // closing </s>.
  struct ForcedRows {
    std::vector<Tensor> logit_rows;
    std::vector<std::int64_t> targets;
  };
  ForcedRows forced_rows(const EncodedReview& review,
                         const std::vector<std::int64_t>& response_ids) const;

  // Greedy decoding from <s> until </s> or max_length, with per-step
  // attention rows and log-probabilities.
  GenerationResult generate(const EncodedReview& review, const Vocabulary& vocab) const;

 private:
  ModelConfig config_;
  ParamSet params_;
  GruCell encoder_fwd_;
  GruCell encoder_bwd_;
  GruCell decoder_;
};

// Expected parameter count for a configuration; ablation tests compare the
// real census against this closed form.
std::int64_t expected_parameter_count(const ModelConfig& config);

// Optional word-embedding bootstrap from "token v1 ... v_dw" lines; returns
// the number of vocabulary rows filled.
std::int64_t load_pretrained_embeddings(RrgenModel& model, const Vocabulary& vocab,
                                        const std::filesystem::path& path);

// ---- training --------------------------------------------------------------

struct TrainItem {
  EncodedReview review;
  std::vector<std::int64_t> response_ids;       // truncated to max_length
  std::vector<std::string> response_tokens;     // reference for validation BLEU
};

struct TrainOptions {
  std::int64_t batch_size = 32;
  double learning_rate = 1e-3;
  std::int64_t epochs = 2;
  std::int64_t checkpoint_every = 200;  // batches
  std::uint64_t seed = 1;
  std::filesystem::path output_dir;
  std::uint64_t vocab_fingerprint = 0;
  std::vector<std::int64_t> bucket_edges;
};

struct TrainResult {
  std::vector<double> batch_losses;
  double final_loss = 0.0;
  std::string best_checkpoint;  // filename relative to output_dir
  double best_validation_bleu = 0.0;
};

// Minibatch Adam over the teacher-forced cross-entropy, checkpointing every
// checkpoint_every batches, scoring each checkpoint by validation BLEU-4 and
// keeping the best. Writes train_log.jsonl, checkpoints with manifests and
// best.txt under options.output_dir. A non-finite loss aborts, naming the
// batch.
TrainResult train_model(RrgenModel& model, const std::vector<TrainItem>& training,
                        const std::vector<TrainItem>& validation, const TrainOptions& options,
                        const Vocabulary& vocab);

// Self-describing checkpoint sidecar.
void write_manifest(const std::filesystem::path& path, const ModelConfig& config,
                    std::uint64_t vocab_fingerprint, const std::vector<std::int64_t>& bucket_edges);

struct Manifest {
  ModelConfig config;
  std::uint64_t vocab_fingerprint = 0;
  std::vector<std::int64_t> bucket_edges;
};
Manifest read_manifest(const std::filesystem::path& path);

// Rebuilds a model from checkpoint + manifest, rejecting a vocabulary whose
// fingerprint does not match.
RrgenModel load_model(const std::filesystem::path& checkpoint_path,
                      const std::filesystem::path& manifest_path, const Vocabulary& vocab);

}  // namespace rrgen
