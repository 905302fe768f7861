#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lad/trainer.hpp"

namespace lad {

inline constexpr int kReportSchemaVersion = 1;

/// One training run's summary; serialized as schema-versioned JSON.
struct RunReport {
  int schema_version = kReportSchemaVersion;
  std::string task;
  std::string method;  // "lad" or "baseline"
  std::string config_digest;
  std::uint64_t seed = 0;
  std::optional<double> final_target_accuracy;  // absent without diagnostic labels
  std::vector<double> per_class_accuracy;       // empty without diagnostic labels
  std::optional<double> discriminator_accuracy; // absent for baseline runs
  std::string history_file;
  double runtime_seconds = 0.0;
};

struct TaskAggregate {
  std::string task;
  std::string method;
  int run_count = 0;
  std::optional<double> mean_accuracy;
  std::optional<double> std_accuracy;  // sample std (n-1); 0 when run_count == 1
};

struct AggregateReport {
  int schema_version = kReportSchemaVersion;
  std::vector<TaskAggregate> tasks;  // sorted by (task, method)
};

/// Stable FNV-1a digest of every hyperparameter except the seed; two runs
/// share a digest iff they share a configuration.
std::string config_digest(const TrainConfig& config, const std::string& method);

/// Mean and sample standard deviation per (task, method) group;
/// permutation-invariant and deterministically ordered.
AggregateReport aggregate(const std::vector<RunReport>& reports);

/// Learning-curve CSV: `# schema_version=1`, then
/// epoch,source_loss,target_loss,target_acc,disc_acc with empty cells for
/// absent diagnostics. Deterministic bytes for a deterministic history.
void emit_history_csv(const TrainHistory& history, const std::filesystem::path& path);

void emit_report_json(const RunReport& report, const std::filesystem::path& path);
RunReport read_report_json(const std::filesystem::path& path);

void emit_aggregate_json(const AggregateReport& report, const std::filesystem::path& path);

}  // namespace lad
