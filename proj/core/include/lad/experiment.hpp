#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lad/report.hpp"
#include "lad/trainer.hpp"

namespace lad {

/// A reproducible multi-run experiment: n_runs trainings with seeds
/// seed, seed+1, ..., each writing predictions, learning curves and a
/// report into its own run directory, plus an aggregate over all runs.
struct ExperimentConfig {
  std::string mode = "lad";  // "lad" or "baseline"
  std::filesystem::path source_path;
  std::filesystem::path target_path;
  std::filesystem::path target_labels_path;  // optional diagnostics
  TrainConfig train;
  int n_runs = 10;
  int jobs = 1;
  std::filesystem::path out_dir;
  std::string task;  // defaults to "<source-stem>-to-<target-stem>"
};

struct ExperimentResult {
  AggregateReport aggregate_report;
  std::vector<RunReport> runs;  // ordered by run index
};

/// Validates, loads the data, runs every seed (in parallel up to
/// cfg.jobs), writes per-run artifacts under out_dir/run_<i>/ and the
/// aggregate + effective config at the top level. No partial outputs are
/// written when validation fails.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// The merged effective configuration, written into every experiment
/// directory for bit-exact reproduction.
void write_effective_config_json(const ExperimentConfig& cfg, const std::filesystem::path& path);

/// Attaches diagnostic labels from a labels-only CSV (`id,label` header)
/// to an unlabeled target dataset; row counts and ids must agree.
void attach_target_labels(FeatureDataset& target, const std::filesystem::path& labels_path);

}  // namespace lad
