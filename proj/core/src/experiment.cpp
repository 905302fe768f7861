#include "lad/experiment.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "lad/dataset.hpp"
#include "lad/error.hpp"
#include "lad/log.hpp"
#include "lad/metrics.hpp"

namespace lad {
namespace {

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.mode != "lad" && cfg.mode != "baseline") {
    throw ConfigError("mode must be 'lad' or 'baseline', got '" + cfg.mode + "'");
  }
  if (cfg.n_runs < 1) throw ConfigError("runs must be >= 1");
  if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (cfg.out_dir.empty()) throw ConfigError("output directory is required");
  if (cfg.source_path.empty()) throw ConfigError("source path is required");
  if (cfg.target_path.empty()) throw ConfigError("target path is required");
  if (!std::filesystem::exists(cfg.source_path)) {
    throw ConfigError("source file does not exist: " + cfg.source_path.string());
  }
  if (!std::filesystem::exists(cfg.target_path)) {
    throw ConfigError("target file does not exist: " + cfg.target_path.string());
  }
  if (!cfg.target_labels_path.empty() && !std::filesystem::exists(cfg.target_labels_path)) {
    throw ConfigError("target labels file does not exist: " + cfg.target_labels_path.string());
  }
}

void write_predictions_csv(const std::vector<int>& predictions, const FeatureDataset& target,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "id,prediction\n";
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (i < target.ids.size()) {
      out << target.ids[i];
    } else {
      out << i;
    }
    out << ',' << predictions[i] << "\n";
  }
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace

void attach_target_labels(FeatureDataset& target, const std::filesystem::path& labels_path) {
  const FeatureDataset labels = load_features(labels_path);
  if (!labels.labeled()) {
    throw DataError("target labels file has no label column: " + labels_path.string());
  }
  if (labels.size() != target.size()) {
    throw DataError("target labels row count " + std::to_string(labels.size()) +
                    " does not match target rows " + std::to_string(target.size()));
  }
  if (!labels.ids.empty() && !target.ids.empty() && labels.ids != target.ids) {
    throw DataError("target labels ids do not match target ids: " + labels_path.string());
  }
  if (target.num_classes > 0 && labels.num_classes > target.num_classes) {
    throw DataError("target labels declare more classes than the target dataset");
  }
  target.labels = labels.labels;
  if (labels.num_classes > target.num_classes) target.num_classes = labels.num_classes;
}

void write_effective_config_json(const ExperimentConfig& cfg,
                                 const std::filesystem::path& path) {
  nlohmann::json j;
  j["mode"] = cfg.mode;
  j["source"] = cfg.source_path.string();
  j["target"] = cfg.target_path.string();
  j["target_labels"] = cfg.target_labels_path.string();
  j["task"] = cfg.task;
  j["runs"] = cfg.n_runs;
  j["jobs"] = cfg.jobs;
  j["out"] = cfg.out_dir.string();
  j["lr"] = cfg.train.learning_rate;
  j["momentum"] = cfg.train.momentum;
  j["batch_size"] = cfg.train.batch_size;
  j["epochs"] = cfg.train.n_epochs;
  j["hidden"] = cfg.train.hidden_width;
  j["dropout"] = cfg.train.dropout_rate;
  j["use_class_weights"] = cfg.train.use_class_weights;
  j["seed"] = cfg.train.seed;
  j["record_every"] = cfg.train.record_every;
  j["real32"] = cfg.train.real32;
  j["grl_enabled"] = cfg.train.grl_enabled;
  j["checkpoint_every"] = cfg.train.checkpoint_every;
  j["config_digest"] = config_digest(cfg.train, cfg.mode);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw DataError("write failed: " + path.string());
}

ExperimentResult run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  validate_config(cfg);

  FeatureDataset source = load_features(cfg.source_path);
  FeatureDataset target = load_features(cfg.target_path);
  if (!cfg.target_labels_path.empty()) attach_target_labels(target, cfg.target_labels_path);
  if (cfg.task.empty()) {
    cfg.task = cfg.source_path.stem().string() + "-to-" + cfg.target_path.stem().string();
  }

  std::filesystem::create_directories(cfg.out_dir);
  write_effective_config_json(cfg, cfg.out_dir / "config.json");

  const std::string digest = config_digest(cfg.train, cfg.mode);
  std::vector<RunReport> reports(static_cast<std::size_t>(cfg.n_runs));

  std::atomic<int> next_run{0};
  std::mutex error_mu;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const int run = next_run.fetch_add(1);
      if (run >= cfg.n_runs) return;
      try {
        TrainConfig train_cfg = cfg.train;
        train_cfg.seed = cfg.train.seed + static_cast<std::uint64_t>(run);
        const std::filesystem::path run_dir =
            cfg.out_dir / ("run_" + std::to_string(run));
        std::filesystem::create_directories(run_dir);
        if (train_cfg.checkpoint_every > 0) {
          train_cfg.checkpoint_path = (run_dir / "checkpoint.bin").string();
        }

        const auto t0 = std::chrono::steady_clock::now();
        const TrainResult result = cfg.mode == "lad" ? lad_train(source, target, train_cfg)
                                                     : baseline_train(source, target, train_cfg);
        const double runtime =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        write_predictions_csv(result.predictions, target, run_dir / "predictions.csv");
        emit_history_csv(result.history, run_dir / "history.csv");

        RunReport report;
        report.task = cfg.task;
        report.method = cfg.mode;
        report.config_digest = digest;
        report.seed = train_cfg.seed;
        if (target.labeled()) {
          report.final_target_accuracy = accuracy(result.predictions, target.labels);
          report.per_class_accuracy =
              per_class_accuracy(result.predictions, target.labels, source.num_classes);
        }
        if (!result.history.records.empty()) {
          report.discriminator_accuracy = result.history.records.back().discriminator_accuracy;
        }
        report.history_file = "history.csv";
        report.runtime_seconds = runtime;
        emit_report_json(report, run_dir / "report.json");
        reports[static_cast<std::size_t>(run)] = std::move(report);
        log::info("run " + std::to_string(run) + " (" + cfg.mode + ", seed " +
                  std::to_string(train_cfg.seed) + ") finished in " + std::to_string(runtime) +
                  " s");
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_workers = std::min(cfg.jobs, cfg.n_runs);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  ExperimentResult result;
  result.runs = std::move(reports);
  result.aggregate_report = aggregate(result.runs);
  emit_aggregate_json(result.aggregate_report, cfg.out_dir / "aggregate.json");
  return result;
}

}  // namespace lad
