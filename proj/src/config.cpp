#include "rrgen/config.hpp"

#include <nlohmann/json.hpp>

#include "rrgen/error.hpp"
#include "rrgen/io.hpp"

namespace rrgen {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  const std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

void require_exists(const std::filesystem::path& path, const char* field) {
  if (!std::filesystem::exists(path)) {
    throw ContractError(std::string("config: ") + field + " path does not exist: " + path.string());
  }
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& err) {
    throw IoError(path.string() + ": " + err.what());
  }

  RunConfig config;
  const std::filesystem::path base = path.parent_path();
  try {
    const auto& paths = doc.at("paths");
    config.corpus = resolve(base, paths.at("corpus").get<std::string>());
    config.lexicon = resolve(base, paths.at("lexicon").get<std::string>());
    config.keyword_dict = resolve(base, paths.at("keyword_dict").get<std::string>());
    config.app_names = resolve(base, paths.at("app_names").get<std::string>());
    config.user_names = resolve(base, paths.at("user_names").get<std::string>());
    config.stopwords = resolve(base, paths.at("stopwords").get<std::string>());
    if (paths.contains("embeddings") && !paths.at("embeddings").is_null()) {
      config.embeddings = resolve(base, paths.at("embeddings").get<std::string>());
    }
    config.output_dir = resolve(base, paths.at("output_dir").get<std::string>());

    if (doc.contains("model")) {
      const auto& model = doc.at("model");
      auto read_int = [&model](const char* key, std::int64_t& out) {
        if (model.contains(key)) out = model.at(key).get<std::int64_t>();
      };
      auto read_bool = [&model](const char* key, bool& out) {
        if (model.contains(key)) out = model.at(key).get<bool>();
      };
      read_int("word_dim", config.word_dim);
      read_int("hidden_dim", config.hidden_dim);
      read_int("attr_dim", config.attr_dim);
      read_int("max_length", config.max_length);
      read_int("vocab_limit", config.vocab_limit);
      read_int("length_buckets", config.length_buckets);
      read_bool("use_category", config.use_category);
      read_bool("use_length", config.use_length);
      read_bool("use_rating", config.use_rating);
      read_bool("use_sentiment", config.use_sentiment);
      read_bool("use_keywords", config.use_keywords);
    }

    const auto& training = doc.at("training");
    if (!training.contains("seed")) {
      throw ContractError("config: training.seed is required");
    }
    config.seed = training.at("seed").get<std::uint64_t>();
    if (training.contains("batch_size")) config.batch_size = training.at("batch_size").get<std::int64_t>();
    if (training.contains("learning_rate")) config.learning_rate = training.at("learning_rate").get<double>();
    if (training.contains("epochs")) config.epochs = training.at("epochs").get<std::int64_t>();
    if (training.contains("checkpoint_every")) {
      config.checkpoint_every = training.at("checkpoint_every").get<std::int64_t>();
    }
  } catch (const nlohmann::json::exception& err) {
    throw IoError(path.string() + ": " + err.what());
  }

  require_exists(config.corpus, "corpus");
  require_exists(config.lexicon, "lexicon");
  require_exists(config.keyword_dict, "keyword_dict");
  require_exists(config.app_names, "app_names");
  require_exists(config.user_names, "user_names");
  require_exists(config.stopwords, "stopwords");
  if (config.embeddings) require_exists(*config.embeddings, "embeddings");
  std::filesystem::create_directories(config.output_dir);
  return config;
}

}  // namespace rrgen
