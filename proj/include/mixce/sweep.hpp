// SPDX-License-Identifier: Apache-2.0
//
// Command layer behind the CLI: dataset/model persistence per operating
// point, idempotent sweep orchestration, and report merging.
//
// Output layout under cfg.out_dir:
//   config.json                resolved configuration snapshot
//   manifest.json              config hash, master seed, creation time
//   report.csv                 merged report (evaluate / sweep)
//   points/<id>/train.bin val.bin test.bin
//   points/<id>/manifest.json  per-point seeds and config hash
//   points/<id>/di.ckpt r.ckpt mp.ckpt di.json sip.json
//   points/<id>/trace_di.csv trace_r.csv trace_mp.csv
//   points/<id>/report.csv status.json

#pragma once

#include <filesystem>
#include <string>

#include "mixce/eval.hpp"
#include "mixce/pipelines.hpp"

namespace mixce {

struct RunOptions {
  int workers = 1;
  bool dry_run = false;
  std::string method;  // train: "di", "sip", or "" for all configured
};

// Bundle manifest (kind, c, partition, checkpoint file names) next to the
// referenced checkpoints.
void save_bundle(const std::filesystem::path& dir, const EstimatorBundle& bundle,
                 const std::string& name);
EstimatorBundle load_bundle(const std::filesystem::path& manifest_path);

int cmd_generate(const ExperimentConfig& cfg, const RunOptions& options);
int cmd_train(const ExperimentConfig& cfg, const RunOptions& options);
int cmd_evaluate(const ExperimentConfig& cfg, const RunOptions& options);
int cmd_sweep(const ExperimentConfig& cfg, const RunOptions& options);

}  // namespace mixce
