#include "rrgen/commands.hpp"

#include <algorithm>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rrgen/annotate.hpp"
#include "rrgen/baselines.hpp"
#include "rrgen/error.hpp"
#include "rrgen/io.hpp"
#include "rrgen/postprocess.hpp"
#include "rrgen/text.hpp"

namespace rrgen {

namespace {

namespace paths {
constexpr const char* kAnnotated = "annotated.jsonl";
constexpr const char* kVocab = "vocab.tsv";
constexpr const char* kCategories = "categories.txt";
constexpr const char* kBuckets = "buckets.json";
constexpr const char* kSubstLog = "subst_log.tsv";
constexpr const char* kPlaceholders = "placeholders.tsv";
constexpr const char* kBest = "best.txt";
constexpr const char* kNngenIndex = "nngen.idx";
}  // namespace paths

nlohmann::json annotated_to_json(const AnnotatedReview& review, std::size_t index) {
  return nlohmann::json{
      {"index", index},
      {"app_id", review.record.app_id},
      {"category", review.record.category},
      {"rating", review.record.rating},
      {"review_tokens", review.record.review_tokens},
      {"response_tokens", review.record.response_tokens},
      {"category_index", review.category_index},
      {"length_bucket", review.length_bucket},
      {"sentiment", review.sentiment},
      {"keyword_symbols", review.keyword_symbols},
  };
}

AnnotatedReview annotated_from_json(const nlohmann::json& doc) {
  AnnotatedReview review;
  review.record.app_id = doc.at("app_id").get<std::string>();
  review.record.category = doc.at("category").get<std::string>();
  review.record.rating = doc.at("rating").get<int>();
  review.record.review_tokens = doc.at("review_tokens").get<std::vector<std::string>>();
  review.record.response_tokens = doc.at("response_tokens").get<std::vector<std::string>>();
  review.category_index = doc.at("category_index").get<std::int64_t>();
  review.length_bucket = doc.at("length_bucket").get<std::int64_t>();
  review.rating = review.record.rating;
  review.sentiment = doc.at("sentiment").get<int>();
  review.keyword_symbols = doc.at("keyword_symbols").get<std::vector<std::string>>();
  return review;
}

std::vector<AnnotatedReview> read_annotated(const std::filesystem::path& path) {
  std::vector<AnnotatedReview> records;
  for (const std::string& line : read_lines(path)) {
    if (line.empty()) continue;
    try {
      records.push_back(annotated_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& err) {
      throw IoError(path.string() + ": " + err.what());
    }
  }
  return records;
}

std::vector<std::size_t> read_split_indices(const std::filesystem::path& path, std::size_t limit) {
  std::vector<std::size_t> indices;
  for (const std::string& line : read_lines(path)) {
    if (line.empty()) continue;
    const std::size_t index = static_cast<std::size_t>(std::stoull(line));
    if (index >= limit) {
      throw IoError(path.string() + ": index " + line + " outside the annotated corpus");
    }
    indices.push_back(index);
  }
  return indices;
}

std::filesystem::path split_file(const RunConfig& config, const std::string& split) {
  if (split != "train" && split != "valid" && split != "test") {
    throw ContractError("unknown split \"" + split + "\" (expected train, valid or test)");
  }
  return config.output_dir / "splits" / (split + ".idx");
}

void require_artifact(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ContractError("missing artifact " + path.string() + "; run preprocess first");
  }
}

struct Artifacts {
  std::vector<AnnotatedReview> records;
  Vocabulary vocab;
  LengthBucketizer buckets = LengthBucketizer::from_edges({});
  std::vector<std::string> categories;
};

Artifacts load_artifacts(const RunConfig& config) {
  for (const char* name : {paths::kAnnotated, paths::kVocab, paths::kCategories, paths::kBuckets}) {
    require_artifact(config.output_dir / name);
  }
  Artifacts artifacts;
  artifacts.records = read_annotated(config.output_dir / paths::kAnnotated);
  artifacts.vocab = Vocabulary::load(config.output_dir / paths::kVocab);
  artifacts.categories = read_lines(config.output_dir / paths::kCategories);
  while (!artifacts.categories.empty() && artifacts.categories.back().empty()) {
    artifacts.categories.pop_back();
  }
  const auto buckets_doc =
      nlohmann::json::parse(read_text_file(config.output_dir / paths::kBuckets));
  artifacts.buckets =
      LengthBucketizer::from_edges(buckets_doc.at("edges").get<std::vector<std::int64_t>>());
  return artifacts;
}

ModelConfig model_config_from(const RunConfig& config, const Artifacts& artifacts) {
  ModelConfig model;
  model.word_dim = config.word_dim;
  model.hidden_dim = config.hidden_dim;
  model.attr_dim = config.attr_dim;
  model.vocab_size = artifacts.vocab.size();
  model.max_length = config.max_length;
  model.use_category = config.use_category;
  model.use_length = config.use_length;
  model.use_rating = config.use_rating;
  model.use_sentiment = config.use_sentiment;
  model.use_keywords = config.use_keywords;
  model.category_count = static_cast<std::int64_t>(artifacts.categories.size());
  model.length_bucket_count = artifacts.buckets.bucket_count();
  model.keyword_symbol_count = KeywordDictionary::symbol_count();
  model.seed = config.seed;
  return model;
}

TrainItem make_train_item(const AnnotatedReview& record, const Vocabulary& vocab,
                          std::int64_t max_length) {
  TrainItem item;
  item.review.token_ids = vocab.encode_all(record.record.review_tokens);
  for (const std::string& symbol : record.keyword_symbols) {
    item.review.keyword_ids.push_back(KeywordDictionary::symbol_index(symbol));
  }
  if (static_cast<std::int64_t>(item.review.token_ids.size()) > max_length) {
    item.review.token_ids.resize(static_cast<std::size_t>(max_length));
    item.review.keyword_ids.resize(static_cast<std::size_t>(max_length));
  }
  item.review.category_index = record.category_index;
  item.review.length_bucket = record.length_bucket;
  item.review.rating = record.rating;
  item.review.sentiment_index = sentiment_index(record.sentiment);
  item.response_ids = vocab.encode_all(record.record.response_tokens);
  if (static_cast<std::int64_t>(item.response_ids.size()) > max_length) {
    item.response_ids.resize(static_cast<std::size_t>(max_length));
  }
  item.response_tokens = record.record.response_tokens;
  return item;
}

std::filesystem::path resolve_checkpoint(const RunConfig& config, const std::string& checkpoint) {
  if (checkpoint.empty()) {
    require_artifact(config.output_dir / paths::kBest);
    std::string name = read_text_file(config.output_dir / paths::kBest);
    while (!name.empty() && (name.back() == '\n' || name.back() == '\r')) name.pop_back();
    return config.output_dir / name;
  }
  const std::filesystem::path given(checkpoint);
  return given.is_absolute() || std::filesystem::exists(given) ? given
                                                               : config.output_dir / given;
}

std::vector<std::vector<std::string>> references_for(const Artifacts& artifacts,
                                                     const std::vector<std::size_t>& indices) {
  std::vector<std::vector<std::string>> refs;
  refs.reserve(indices.size());
  for (std::size_t i : indices) refs.push_back(artifacts.records[i].record.response_tokens);
  return refs;
}

void persist_report(const RunConfig& config, const std::string& stem, const BleuReport& report) {
  atomic_write_text(config.output_dir / (stem + ".json"), bleu_report_json(report) + "\n");
  std::cout << bleu_report_json(report) << "\n" << bleu_report_table(report);
}

}  // namespace

PreprocessSummary cmd_preprocess(const RunConfig& config) {
  const std::vector<RawRecord> raw = read_corpus(config.corpus);
  const auto app_names = load_name_list(config.app_names);
  const auto user_names = load_name_list(config.user_names);
  const SentimentLexicon lexicon = SentimentLexicon::load(config.lexicon);
  const KeywordDictionary keywords = KeywordDictionary::load(config.keyword_dict);

  struct Kept {
    ReviewRecord record;
    std::vector<PlaceholderHit> response_hits;
  };
  std::vector<Kept> kept;
  std::size_t dropped = 0;
  for (const RawRecord& raw_record : raw) {
    ReviewRecord record;
    record.app_id = raw_record.app_id;
    record.category = raw_record.category;
    record.rating = raw_record.rating;
    record.review_raw = raw_record.review;
    record.response_raw = raw_record.response;
    record.review_tokens = normalize(raw_record.review, app_names, user_names);
    std::vector<PlaceholderHit> hits;
    record.response_tokens = normalize(raw_record.response, app_names, user_names, &hits);
    if (!keepable_review(record.review_tokens)) {
      ++dropped;
      continue;
    }
    const std::size_t limit = static_cast<std::size_t>(config.max_length);
    if (record.review_tokens.size() > limit) record.review_tokens.resize(limit);
    if (record.response_tokens.size() > limit) record.response_tokens.resize(limit);
    kept.push_back(Kept{std::move(record), std::move(hits)});
  }
  if (kept.size() < 10) {
    throw ContractError("corpus keeps only " + std::to_string(kept.size()) +
                        " usable pairs; at least 10 are required");
  }

  std::set<std::string> category_set;
  for (const Kept& k : kept) category_set.insert(k.record.category);
  const std::vector<std::string> categories(category_set.begin(), category_set.end());

  const SplitIndices split = split_dataset(kept.size(), config.seed);

  std::vector<const std::vector<std::string>*> train_sequences;
  std::vector<std::int64_t> train_review_lengths;
  for (std::size_t i : split.train) {
    train_sequences.push_back(&kept[i].record.review_tokens);
    train_sequences.push_back(&kept[i].record.response_tokens);
    train_review_lengths.push_back(static_cast<std::int64_t>(kept[i].record.review_tokens.size()));
  }
  const Vocabulary vocab = Vocabulary::build(train_sequences, config.vocab_limit);
  const LengthBucketizer buckets =
      LengthBucketizer::fit(train_review_lengths, config.length_buckets);

  // Substitution log over training responses feeds the placeholder values.
  std::vector<PlaceholderDictionary::Observation> observations;
  std::ostringstream subst_log;
  for (std::size_t i : split.train) {
    for (const PlaceholderHit& hit : kept[i].response_hits) {
      observations.push_back({kept[i].record.app_id, hit.placeholder, hit.original});
      subst_log << i << '\t' << kept[i].record.app_id << '\t' << hit.placeholder << '\t'
                << hit.original << '\n';
    }
  }
  const PlaceholderDictionary placeholder_dict = PlaceholderDictionary::build(observations);

  std::ostringstream annotated_out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const AnnotatedReview annotated =
        annotate_review(kept[i].record, categories, buckets, lexicon, keywords);
    annotated_out << annotated_to_json(annotated, i).dump() << '\n';
  }

  std::filesystem::create_directories(config.output_dir / "splits");
  atomic_write_text(config.output_dir / paths::kAnnotated, annotated_out.str());
  vocab.save(config.output_dir / paths::kVocab);
  {
    std::ostringstream out;
    for (const std::string& category : categories) out << category << '\n';
    atomic_write_text(config.output_dir / paths::kCategories, out.str());
  }
  atomic_write_text(config.output_dir / paths::kBuckets,
                    nlohmann::json{{"edges", buckets.edges()}}.dump() + "\n");
  auto write_indices = [&config](const char* name, const std::vector<std::size_t>& indices) {
    std::ostringstream out;
    for (std::size_t i : indices) out << i << '\n';
    atomic_write_text(config.output_dir / "splits" / name, out.str());
  };
  write_indices("train.idx", split.train);
  write_indices("valid.idx", split.valid);
  write_indices("test.idx", split.test);
  atomic_write_text(config.output_dir / paths::kSubstLog, subst_log.str());
  placeholder_dict.save(config.output_dir / paths::kPlaceholders);

  PreprocessSummary summary;
  summary.kept_records = kept.size();
  summary.dropped_records = dropped;
  summary.train_count = split.train.size();
  summary.valid_count = split.valid.size();
  summary.test_count = split.test.size();
  summary.vocab_size = vocab.size();
  summary.bucket_edges = buckets.edges();
  summary.category_count = categories.size();

  std::cout << "kept " << summary.kept_records << " pairs (dropped " << summary.dropped_records
            << "), split " << summary.train_count << "/" << summary.valid_count << "/"
            << summary.test_count << ", vocab " << summary.vocab_size << ", "
            << summary.category_count << " categories, bucket edges [";
  for (std::size_t i = 0; i < summary.bucket_edges.size(); ++i) {
    if (i) std::cout << ", ";
    std::cout << summary.bucket_edges[i];
  }
  std::cout << "]\n";
  return summary;
}

TrainResult cmd_train(const RunConfig& config) {
  const Artifacts artifacts = load_artifacts(config);
  const auto train_indices =
      read_split_indices(split_file(config, "train"), artifacts.records.size());
  const auto valid_indices =
      read_split_indices(split_file(config, "valid"), artifacts.records.size());

  std::vector<TrainItem> training, validation;
  training.reserve(train_indices.size());
  for (std::size_t i : train_indices) {
    training.push_back(make_train_item(artifacts.records[i], artifacts.vocab, config.max_length));
  }
  for (std::size_t i : valid_indices) {
    validation.push_back(make_train_item(artifacts.records[i], artifacts.vocab, config.max_length));
  }

  RrgenModel model(model_config_from(config, artifacts));
  if (config.embeddings) {
    const std::int64_t filled = load_pretrained_embeddings(model, artifacts.vocab, *config.embeddings);
    std::cout << "loaded pretrained vectors for " << filled << " vocabulary rows\n";
  }

  TrainOptions options;
  options.batch_size = config.batch_size;
  options.learning_rate = config.learning_rate;
  options.epochs = config.epochs;
  options.checkpoint_every = config.checkpoint_every;
  options.seed = config.seed;
  options.output_dir = config.output_dir;
  options.vocab_fingerprint = artifacts.vocab.fingerprint();
  options.bucket_edges = artifacts.buckets.edges();

  const TrainResult result = train_model(model, training, validation, options, artifacts.vocab);
  std::cout << "trained " << result.batch_losses.size() << " batches, final loss "
            << result.final_loss << ", best checkpoint " << result.best_checkpoint
            << " (validation BLEU-4 " << result.best_validation_bleu << ")\n";
  return result;
}

GenerateSummary cmd_generate(const RunConfig& config, const std::string& checkpoint,
                             const std::string& split, bool dump_attention) {
  const Artifacts artifacts = load_artifacts(config);
  const auto indices = read_split_indices(split_file(config, split), artifacts.records.size());
  const auto checkpoint_path = resolve_checkpoint(config, checkpoint);
  require_artifact(checkpoint_path);
  const RrgenModel model = load_model(
      checkpoint_path, checkpoint_path.string() + ".manifest.json", artifacts.vocab);
  const PlaceholderDictionary placeholder_dict =
      PlaceholderDictionary::load(config.output_dir / paths::kPlaceholders);
  const auto stopwords = load_stopwords(config.stopwords);

  if (dump_attention) std::filesystem::create_directories(config.output_dir / "attention");

  GenerateSummary summary;
  std::ostringstream out;
  for (std::size_t i : indices) {
    const AnnotatedReview& record = artifacts.records[i];
    const TrainItem item = make_train_item(record, artifacts.vocab, config.max_length);
    const GenerationResult generated = model.generate(item.review, artifacts.vocab);

    const SubstitutionResult substituted =
        substitute(generated.tokens, record.record.app_id, placeholder_dict);
    const FilterDecision decision =
        quality_filter(generated.tokens, record.record.review_tokens, record.rating, stopwords);
    const bool requires_check = decision.requires_check || substituted.missing_placeholder;
    if (requires_check) ++summary.flagged_count;

    out << nlohmann::json{
               {"index", i},
               {"app_id", record.record.app_id},
               {"tokens", generated.tokens},
               {"text", substituted.text},
               {"omega", decision.overlap_ratio},
               {"length", decision.response_length},
               {"rating", decision.rating},
               {"filter_flagged", decision.requires_check},
               {"missing_placeholder", substituted.missing_placeholder},
               {"requires_check", requires_check},
               {"log_probs", generated.log_probs},
           }.dump()
        << '\n';

    if (dump_attention) {
      std::ostringstream matrix;
      for (const auto& row : generated.attention) {
        for (std::size_t j = 0; j < row.size(); ++j) {
          if (j) matrix << '\t';
          matrix << format_double(row[j]);
        }
        matrix << '\n';
      }
      atomic_write_text(config.output_dir / "attention" /
                            ("attn-" + std::to_string(i) + ".tsv"),
                        matrix.str());
    }
    ++summary.response_count;
  }

  summary.responses_path = config.output_dir / ("responses_" + split + ".jsonl");
  atomic_write_text(summary.responses_path, out.str());
  std::cout << "generated " << summary.response_count << " responses (" << summary.flagged_count
            << " flagged for check) -> " << summary.responses_path.string() << "\n";
  return summary;
}

BleuReport cmd_evaluate(const RunConfig& config, const std::filesystem::path& responses_path,
                        const std::string& split) {
  const Artifacts artifacts = load_artifacts(config);
  const auto indices = read_split_indices(split_file(config, split), artifacts.records.size());
  require_artifact(responses_path);

  std::vector<std::vector<std::string>> hypotheses;
  for (const std::string& line : read_lines(responses_path)) {
    if (line.empty()) continue;
    try {
      hypotheses.push_back(
          nlohmann::json::parse(line).at("tokens").get<std::vector<std::string>>());
    } catch (const nlohmann::json::exception& err) {
      throw IoError(responses_path.string() + ": " + err.what());
    }
  }
  if (hypotheses.size() != indices.size()) {
    throw ContractError("response count " + std::to_string(hypotheses.size()) +
                        " does not match split size " + std::to_string(indices.size()));
  }
  const BleuReport report = corpus_bleu(hypotheses, references_for(artifacts, indices));
  persist_report(config, "bleu_" + split, report);
  return report;
}

BaselineSummary cmd_baseline_random(const RunConfig& config, const std::string& split) {
  const Artifacts artifacts = load_artifacts(config);
  const auto train_indices =
      read_split_indices(split_file(config, "train"), artifacts.records.size());
  const auto eval_indices = read_split_indices(split_file(config, split), artifacts.records.size());
  if (train_indices.empty()) throw ContractError("empty training split");

  std::vector<std::vector<std::string>> pool;
  pool.reserve(train_indices.size());
  for (std::size_t i : train_indices) pool.push_back(artifacts.records[i].record.response_tokens);

  std::ostringstream out;
  std::vector<std::vector<std::string>> hypotheses;
  for (std::size_t ordinal = 0; ordinal < eval_indices.size(); ++ordinal) {
    auto tokens = random_response(pool, config.seed, ordinal);
    out << nlohmann::json{{"index", eval_indices[ordinal]}, {"tokens", tokens}}.dump() << '\n';
    hypotheses.push_back(std::move(tokens));
  }

  BaselineSummary summary;
  summary.responses_path = config.output_dir / ("responses_random_" + split + ".jsonl");
  atomic_write_text(summary.responses_path, out.str());
  summary.report = corpus_bleu(hypotheses, references_for(artifacts, eval_indices));
  persist_report(config, "bleu_random_" + split, summary.report);
  return summary;
}

BaselineSummary cmd_baseline_nngen(const RunConfig& config, const std::string& split) {
  const Artifacts artifacts = load_artifacts(config);
  const auto train_indices =
      read_split_indices(split_file(config, "train"), artifacts.records.size());
  const auto eval_indices = read_split_indices(split_file(config, split), artifacts.records.size());
  if (train_indices.empty()) throw ContractError("empty training split");

  const auto index_path = config.output_dir / paths::kNngenIndex;
  BowIndex index = [&]() {
    if (std::filesystem::exists(index_path)) {
      return BowIndex::load(index_path, artifacts.vocab);
    }
    std::vector<std::vector<std::string>> reviews, responses;
    reviews.reserve(train_indices.size());
    for (std::size_t i : train_indices) {
      reviews.push_back(artifacts.records[i].record.review_tokens);
      responses.push_back(artifacts.records[i].record.response_tokens);
    }
    BowIndex built = BowIndex::build(reviews, responses, artifacts.vocab);
    built.save(index_path);
    return built;
  }();

  std::ostringstream out;
  std::vector<std::vector<std::string>> hypotheses;
  for (std::size_t i : eval_indices) {
    const NngenResult result = nngen_response(artifacts.records[i].record.review_tokens, index);
    out << nlohmann::json{{"index", i},
                          {"tokens", result.response},
                          {"train_index", result.train_index},
                          {"degenerate", result.degenerate}}
               .dump()
        << '\n';
    hypotheses.push_back(result.response);
  }

  BaselineSummary summary;
  summary.responses_path = config.output_dir / ("responses_nngen_" + split + ".jsonl");
  atomic_write_text(summary.responses_path, out.str());
  summary.report = corpus_bleu(hypotheses, references_for(artifacts, eval_indices));
  persist_report(config, "bleu_nngen_" + split, summary.report);
  return summary;
}

BleuReport cmd_bleu(const std::filesystem::path& hypotheses_path,
                    const std::filesystem::path& references_path) {
  auto read_sequences = [](const std::filesystem::path& path) {
    std::vector<std::vector<std::string>> sequences;
    for (const std::string& line : read_lines(path)) {
      std::istringstream fields(line);
      std::vector<std::string> tokens;
      std::string token;
      while (fields >> token) tokens.push_back(token);
      sequences.push_back(std::move(tokens));
    }
    return sequences;
  };
  const BleuReport report = corpus_bleu(read_sequences(hypotheses_path),
                                        read_sequences(references_path));
  std::cout << bleu_report_json(report) << "\n" << bleu_report_table(report);
  return report;
}

}  // namespace rrgen
