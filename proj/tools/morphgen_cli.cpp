// morphgen command-line driver. Exit codes: 0 ok, 1 usage, 2 data,
// 3 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "morphgen/kernels.hpp"
#include "morphgen/pipeline.hpp"

namespace fs = std::filesystem;
using namespace morphgen;

int main(int argc, char** argv) {
  CLI::App app{"Gender/number morphology generation for simplified Spanish"};
  app.require_subcommand(1);

  std::string config_path;
  std::int64_t seed = -1;
  bool trace = false;
  bool fail_fast = false;
  std::string isa;
  app.add_option("--config", config_path, "Pipeline config file (key = value)");
  app.add_option("--seed", seed, "Override the config seed");
  app.add_flag("--trace", trace, "Write per-stage intermediate files");
  app.add_flag("--fail-fast", fail_fast, "Stop at the first failing sentence");
  app.add_option("--isa", isa, "Force the kernel variant")->check(CLI::IsMember({"scalar", "avx2"}));

  auto* synth = app.add_subcommand("synthesize-corpus", "Generate the synthetic agreement corpus");
  auto* prepare = app.add_subcommand("prepare", "Build vocabularies, datasets, LM and priors");

  auto* train_cmd = app.add_subcommand("train", "Train one classifier");
  std::string task_name;
  std::int64_t epochs = -1;
  train_cmd->add_option("--task", task_name, "gender or number")->required();
  train_cmd->add_option("--epochs", epochs, "Override the configured epoch count");

  auto* generate = app.add_subcommand("generate", "Restore gender/number on simplified tagged text");
  GenerateOptions gen;
  generate->add_option("--input", gen.input, "Simplified tagged input")->required();
  generate->add_option("--output", gen.output, "Surface text output (default stdout)");
  generate->add_option("--tags-output", gen.tags_output, "Chosen full tags");
  generate->add_option("--nbest", gen.nbest_output, "N-best list output");
  generate->add_option("--from-predictions", gen.predictions_input, "Reuse a predictions trace");
  generate->add_option("--trace-dir", gen.trace_dir, "Trace directory (default <work_dir>/trace)");
  generate->add_option("--trace-rules", gen.rules_output, "Rule applications as TSV");
  generate->add_flag("--oracle", gen.oracle, "Input is fully tagged; decode with gold classes");

  auto* evaluate = app.add_subcommand("evaluate", "Score hypothesis tags and text against references");
  EvaluateOptions ev;
  evaluate->add_option("--hypothesis-tags", ev.hypothesis_tags);
  evaluate->add_option("--reference-tags", ev.reference_tags);
  evaluate->add_option("--nbest-tags", ev.nbest_tags, "Candidate tags from a generate trace (oracle score)");
  evaluate->add_option("--hypothesis-text", ev.hypothesis_text);
  evaluate->add_option("--reference-text", ev.reference_text);
  evaluate->add_option("--rules-trace", ev.rules_trace);

  auto* tune = app.add_subcommand("tune-lambda", "Grid-search the LM weight on the dev split");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!isa.empty()) kernels::set_active_isa(isa == "avx2" ? kernels::Isa::Avx2 : kernels::Isa::Scalar);
    PipelineConfig cfg = config_path.empty() ? PipelineConfig::from(KeyValueConfig{}, fs::current_path())
                                             : PipelineConfig::load(config_path);
    if (seed >= 0) cfg.set_seed(static_cast<std::uint64_t>(seed));

    if (synth->parsed()) {
      cmd_synthesize_corpus(cfg, std::cerr);
    } else if (prepare->parsed()) {
      cmd_prepare(cfg, std::cerr);
    } else if (train_cmd->parsed()) {
      const Task task = parse_task(task_name);
      if (epochs >= 0) cfg.hyper(task).epochs = static_cast<std::size_t>(epochs);
      const auto result = cmd_train(cfg, task, std::cerr);
      const auto& kept = result.epochs[result.best_epoch - 1];
      std::cerr << "train: wrote " << cfg.model_path(task).string() << " (epoch " << kept.epoch
                << ", dev accuracy " << kept.selection_accuracy << ", held-out accuracy " << kept.heldout_accuracy
                << ")\n";
    } else if (generate->parsed()) {
      gen.fail_fast = fail_fast;
      if (trace && gen.trace_dir.empty()) gen.trace_dir = cfg.work_dir / "trace";
      const auto summary = cmd_generate(cfg, gen, std::cout, std::cerr);
      std::cerr << "generate: " << summary.sentences << " sentences, " << summary.failed << " failed, "
                << summary.lemma_fallbacks << " lemma fallbacks\n";
      if (summary.failed > 0) return 2;
    } else if (evaluate->parsed()) {
      cmd_evaluate(cfg, ev).write(std::cout);
    } else if (tune->parsed()) {
      std::cout << cmd_tune_lambda(cfg, std::cerr) << '\n';
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
