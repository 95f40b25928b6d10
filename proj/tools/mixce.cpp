// SPDX-License-Identifier: Apache-2.0
//
// mixce command line front end.
//
//   mixce generate|train|evaluate|sweep [--config <path>] [--seed <u64>]
//         [--preset desk|paper] [--out <dir>] [--workers <n>] [--dry-run]
//         [--method di|sip]
//
// Resolution order: built-in defaults, then the config file, then the
// preset, then explicit flags.

#include <CLI11.hpp>
#include <iostream>

#include "mixce/experiment.hpp"
#include "mixce/sweep.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string preset;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
  mixce::RunOptions options;
};

void add_common_flags(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--config", args.config_path, "Experiment config file (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Master seed")
      ->each([&args](const std::string&) { args.seed_given = true; });
  cmd->add_option("--preset", args.preset, "Size preset")
      ->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--out", args.out, "Output directory");
  cmd->add_option("--workers", args.options.workers,
                  "Operating points processed in parallel")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--dry-run", args.options.dry_run,
                "Print the plan without writing anything");
}

mixce::ExperimentConfig resolve_config(const CliArgs& args) {
  mixce::ExperimentConfig cfg =
      args.config_path.empty()
          ? mixce::ExperimentConfig::defaults()
          : mixce::ExperimentConfig::load_file(args.config_path);
  if (!args.preset.empty()) cfg.apply_preset(args.preset);
  if (args.seed_given) cfg.master_seed = args.seed;
  if (!args.out.empty()) cfg.out_dir = args.out;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixce: mixed-resolution ADC channel estimation workbench"};
  app.require_subcommand(1);

  CliArgs args;
  CLI::App* generate =
      app.add_subcommand("generate", "Write train/val/test dataset files");
  CLI::App* train =
      app.add_subcommand("train", "Train estimators from dataset files");
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Evaluate methods and write the report CSV");
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Full generate/train/evaluate pipeline per operating point");
  for (CLI::App* cmd : {generate, train, evaluate, sweep}) {
    add_common_flags(cmd, args);
  }
  train->add_option("--method", args.options.method,
                    "Train only this estimator")
      ->check(CLI::IsMember({"di", "sip"}));

  CLI11_PARSE(app, argc, argv);

  try {
    mixce::ExperimentConfig cfg = resolve_config(args);
    if (generate->parsed()) return mixce::cmd_generate(cfg, args.options);
    if (train->parsed()) return mixce::cmd_train(cfg, args.options);
    if (evaluate->parsed()) return mixce::cmd_evaluate(cfg, args.options);
    return mixce::cmd_sweep(cfg, args.options);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
