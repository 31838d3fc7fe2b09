#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rrgen/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"RRGen: attribute- and keyword-conditioned review response generation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string checkpoint;
  std::string split = "test";
  std::optional<std::uint64_t> seed_override;
  bool dump_attention = false;
  std::string hyp_path, ref_path;

  auto add_config = [&config_path](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file")->required();
  };
  auto add_seed = [&seed_override](CLI::App* cmd) {
    cmd->add_option("--seed", seed_override, "override the config seed");
  };
  auto add_split = [&split](CLI::App* cmd) {
    cmd->add_option("--split", split, "dataset split")->check(CLI::IsMember({"train", "valid", "test"}));
  };

  CLI::App* preprocess = app.add_subcommand("preprocess", "normalize, annotate and split the corpus");
  add_config(preprocess);
  add_seed(preprocess);

  CLI::App* train = app.add_subcommand("train", "train the response generator");
  add_config(train);
  add_seed(train);

  CLI::App* generate = app.add_subcommand("generate", "generate responses for a split");
  add_config(generate);
  add_split(generate);
  generate->add_option("--checkpoint", checkpoint, "checkpoint file (default: best from training)");
  generate->add_flag("--dump-attention", dump_attention, "write per-pair attention matrices");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score generated responses with corpus BLEU-4");
  add_config(evaluate);
  add_split(evaluate);
  std::string responses_path;
  evaluate->add_option("--responses", responses_path, "responses file (default: responses_<split>.jsonl)");

  CLI::App* baseline_random = app.add_subcommand("baseline-random", "random-pick baseline");
  add_config(baseline_random);
  add_seed(baseline_random);
  add_split(baseline_random);

  CLI::App* baseline_nngen = app.add_subcommand("baseline-nngen", "retrieval baseline (cosine top-5 + BLEU re-rank)");
  add_config(baseline_nngen);
  add_split(baseline_nngen);

  CLI::App* bleu = app.add_subcommand("bleu", "corpus BLEU-4 between two token files");
  bleu->add_option("--hyp", hyp_path, "hypotheses, one tokenized sequence per line")->required();
  bleu->add_option("--ref", ref_path, "references, one tokenized sequence per line")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (bleu->parsed()) {
      rrgen::cmd_bleu(hyp_path, ref_path);
      return 0;
    }

    rrgen::RunConfig config = rrgen::RunConfig::load(config_path);
    if (seed_override) config.seed = *seed_override;

    if (preprocess->parsed()) {
      rrgen::cmd_preprocess(config);
    } else if (train->parsed()) {
      rrgen::cmd_train(config);
    } else if (generate->parsed()) {
      rrgen::cmd_generate(config, checkpoint, split, dump_attention);
    } else if (evaluate->parsed()) {
      const auto responses = responses_path.empty()
                                 ? config.output_dir / ("responses_" + split + ".jsonl")
                                 : std::filesystem::path(responses_path);
      rrgen::cmd_evaluate(config, responses, split);
    } else if (baseline_random->parsed()) {
      rrgen::cmd_baseline_random(config, split);
    } else if (baseline_nngen->parsed()) {
      rrgen::cmd_baseline_nngen(config, split);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
