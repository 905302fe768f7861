// lad: train and evaluate label-alignment domain adaptation on
// pre-extracted feature CSVs.
//
// Subcommands:
//   gen-synth  generate a synthetic source/target pair from a JSON spec
//   train      run n seeded trainings and write run artifacts + aggregate
//   report     print a task x method table of mean+-std over run dirs
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lad/dataset.hpp"
#include "lad/error.hpp"
#include "lad/experiment.hpp"
#include "lad/log.hpp"
#include "lad/report.hpp"
#include "lad/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

int cmd_gen_synth(const fs::path& spec_path, const fs::path& out_dir) {
  const lad::SyntheticSpec spec = lad::synthetic_spec_from_json(spec_path);
  auto [source, target] = lad::synth_gaussian_shift(spec);

  fs::create_directories(out_dir);
  lad::save_features(source, out_dir / "source.csv");

  // The target file ships unlabeled; diagnostic labels go to a separate
  // labels-only file (id,label).
  lad::FeatureDataset labels_only;
  labels_only.features.resize(target.size(), 0);
  labels_only.labels = target.labels;
  labels_only.num_classes = target.num_classes;
  labels_only.ids = target.ids;
  lad::save_features(labels_only, out_dir / "target_labels.csv");

  target.labels.clear();
  lad::save_features(target, out_dir / "target.csv");

  std::cout << "wrote " << (out_dir / "source.csv").string() << " ("
            << source.size() << " rows), " << (out_dir / "target.csv").string() << " ("
            << target.size() << " rows), " << (out_dir / "target_labels.csv").string() << "\n";
  return kExitOk;
}

struct TrainCli {
  std::string config_file;
  std::string mode;
  std::string source, target, target_labels, out, task;
  int epochs = 0;
  double lr = 0.0, momentum = 0.0, dropout = 0.0;
  long batch_size = 0, hidden = 0;
  bool no_class_weights = false;
  int runs = 0, jobs = 0, record_every = 0;
  std::uint64_t seed = 0;
};

// Precedence: built-in defaults < config file < command-line flags.
lad::ExperimentConfig merge_train_config(const TrainCli& cli, const CLI::App* sub) {
  lad::ExperimentConfig cfg;
  bool epochs_set = false;

  if (!cli.config_file.empty()) {
    std::ifstream in(cli.config_file);
    if (!in) throw lad::ConfigError("cannot open config file: " + cli.config_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw lad::ConfigError("config file " + cli.config_file + ": " + e.what());
    }
    try {
      if (j.contains("mode")) cfg.mode = j["mode"].get<std::string>();
      if (j.contains("source")) cfg.source_path = j["source"].get<std::string>();
      if (j.contains("target")) cfg.target_path = j["target"].get<std::string>();
      if (j.contains("target_labels")) cfg.target_labels_path = j["target_labels"].get<std::string>();
      if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
      if (j.contains("task")) cfg.task = j["task"].get<std::string>();
      if (j.contains("runs")) cfg.n_runs = j["runs"].get<int>();
      if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
      if (j.contains("lr")) cfg.train.learning_rate = j["lr"].get<double>();
      if (j.contains("momentum")) cfg.train.momentum = j["momentum"].get<double>();
      if (j.contains("batch_size")) cfg.train.batch_size = j["batch_size"].get<long>();
      if (j.contains("epochs")) { cfg.train.n_epochs = j["epochs"].get<int>(); epochs_set = true; }
      if (j.contains("hidden")) cfg.train.hidden_width = j["hidden"].get<long>();
      if (j.contains("dropout")) cfg.train.dropout_rate = j["dropout"].get<double>();
      if (j.contains("use_class_weights")) cfg.train.use_class_weights = j["use_class_weights"].get<bool>();
      if (j.contains("seed")) cfg.train.seed = j["seed"].get<std::uint64_t>();
      if (j.contains("record_every")) cfg.train.record_every = j["record_every"].get<int>();
      if (j.contains("real32")) cfg.train.real32 = j["real32"].get<bool>();
      if (j.contains("grl_enabled")) cfg.train.grl_enabled = j["grl_enabled"].get<bool>();
      if (j.contains("checkpoint_every")) cfg.train.checkpoint_every = j["checkpoint_every"].get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw lad::ConfigError("config file " + cli.config_file + ": " + e.what());
    }
  }

  auto given = [&](const std::string& flag) { return sub->count(flag) > 0; };
  if (given("--mode")) cfg.mode = cli.mode;
  if (given("--source")) cfg.source_path = cli.source;
  if (given("--target")) cfg.target_path = cli.target;
  if (given("--target-labels")) cfg.target_labels_path = cli.target_labels;
  if (given("--out")) cfg.out_dir = cli.out;
  if (given("--task")) cfg.task = cli.task;
  if (given("--runs")) cfg.n_runs = cli.runs;
  if (given("--jobs")) cfg.jobs = cli.jobs;
  if (given("--lr")) cfg.train.learning_rate = cli.lr;
  if (given("--momentum")) cfg.train.momentum = cli.momentum;
  if (given("--batch-size")) cfg.train.batch_size = cli.batch_size;
  if (given("--epochs")) { cfg.train.n_epochs = cli.epochs; epochs_set = true; }
  if (given("--hidden")) cfg.train.hidden_width = cli.hidden;
  if (given("--dropout")) cfg.train.dropout_rate = cli.dropout;
  if (given("--no-class-weights")) cfg.train.use_class_weights = false;
  if (given("--seed")) cfg.train.seed = cli.seed;
  if (given("--record-every")) cfg.train.record_every = cli.record_every;

  // Protocol defaults: 1000 epochs for LAD, 100 for the no-adaptation
  // baseline, unless set explicitly.
  if (!epochs_set) cfg.train.n_epochs = cfg.mode == "baseline" ? 100 : 1000;
  return cfg;
}

std::string percent1(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * fraction);
  return buf;
}

int cmd_train(const TrainCli& cli, const CLI::App* sub) {
  const lad::ExperimentConfig cfg = merge_train_config(cli, sub);
  const lad::ExperimentResult result = lad::run_experiment(cfg);
  for (const auto& t : result.aggregate_report.tasks) {
    std::cout << t.task << " " << t.method << ": ";
    if (t.mean_accuracy) {
      std::cout << percent1(*t.mean_accuracy) << "+-" << percent1(t.std_accuracy.value_or(0.0));
    } else {
      std::cout << "n/a (no diagnostic target labels)";
    }
    std::cout << " over " << t.run_count << " run(s)\n";
  }
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out_file) {
  std::vector<lad::RunReport> reports;
  std::vector<std::string> problems;
  for (const auto& dir : dirs) {
    bool found = false;
    std::vector<fs::path> candidates;
    if (fs::exists(fs::path(dir) / "report.json")) {
      candidates.push_back(fs::path(dir) / "report.json");
    }
    if (fs::is_directory(dir)) {
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory() && entry.path().filename().string().starts_with("run_")) {
          const fs::path p = entry.path() / "report.json";
          if (fs::exists(p)) candidates.push_back(p);
        }
      }
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& p : candidates) {
      try {
        reports.push_back(lad::read_report_json(p));
        found = true;
      } catch (const std::exception& e) {
        problems.emplace_back(e.what());
      }
    }
    if (!found && candidates.empty()) {
      problems.push_back("no report.json under " + dir);
    }
  }
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "error: " << p << "\n";
    return kExitData;
  }
  if (reports.empty()) {
    std::cerr << "error: no reports found\n";
    return kExitData;
  }

  const lad::AggregateReport agg = lad::aggregate(reports);
  std::set<std::string> tasks, methods;
  std::map<std::pair<std::string, std::string>, const lad::TaskAggregate*> cells;
  for (const auto& t : agg.tasks) {
    tasks.insert(t.task);
    methods.insert(t.method);
    cells[{t.task, t.method}] = &t;
  }

  std::ostringstream table;
  table << "method";
  for (const auto& task : tasks) table << "\t" << task;
  table << "\n";
  for (const auto& method : methods) {
    table << method;
    for (const auto& task : tasks) {
      table << "\t";
      const auto it = cells.find({task, method});
      if (it != cells.end() && it->second->mean_accuracy) {
        table << percent1(*it->second->mean_accuracy) << "+-"
              << percent1(it->second->std_accuracy.value_or(0.0));
      } else {
        table << "-";
      }
    }
    table << "\n";
  }
  std::cout << table.str();
  if (!out_file.empty()) {
    std::ofstream out(out_file, std::ios::binary);
    if (!out) throw lad::DataError("cannot open for writing: " + out_file);
    out << table.str();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LAD: adversarial alignment of class-prediction uncertainties for "
               "unsupervised domain adaptation on pre-extracted features"};
  app.require_subcommand(1);

  // gen-synth
  std::string synth_spec, synth_out;
  CLI::App* gen = app.add_subcommand("gen-synth", "Generate a synthetic source/target pair");
  gen->add_option("--spec", synth_spec, "SyntheticSpec JSON file")->required();
  gen->add_option("--out", synth_out, "Output directory")->required();

  // train
  TrainCli cli;
  CLI::App* train = app.add_subcommand("train", "Train and evaluate over multiple seeds");
  train->add_option("--config", cli.config_file, "Experiment config JSON; flags override");
  train->add_option("--mode", cli.mode, "lad | baseline")->default_str("lad");
  train->add_option("--source", cli.source, "Labeled source feature CSV");
  train->add_option("--target", cli.target, "Unlabeled target feature CSV");
  train->add_option("--target-labels", cli.target_labels, "Diagnostic target labels CSV");
  train->add_option("--epochs", cli.epochs, "Epochs (default 1000; 100 for baseline)");
  train->add_option("--lr", cli.lr, "Learning rate (default 0.001)");
  train->add_option("--momentum", cli.momentum, "Nesterov momentum (default 0.9)");
  train->add_option("--batch-size", cli.batch_size, "Minibatch size (default 32)");
  train->add_option("--hidden", cli.hidden, "Hidden layer width (default 1024)");
  train->add_option("--dropout", cli.dropout, "Hidden dropout rate (default 0.5)");
  train->add_flag("--no-class-weights", cli.no_class_weights, "Disable class weighting");
  train->add_option("--runs", cli.runs, "Number of seeded runs (default 10)");
  train->add_option("--seed", cli.seed, "Base seed; run i uses seed+i");
  train->add_option("--jobs", cli.jobs, "Parallel runs (default 1)");
  train->add_option("--record-every", cli.record_every, "Epochs between history rows");
  train->add_option("--out", cli.out, "Output directory");
  train->add_option("--task", cli.task, "Task name for reports");

  // report
  std::vector<std::string> report_dirs;
  std::string report_out;
  CLI::App* report = app.add_subcommand("report", "Aggregate run directories into a table");
  report->add_option("dirs", report_dirs, "Experiment output directories")->required();
  report->add_option("--out", report_out, "Also write the table to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_gen_synth(synth_spec, synth_out);
    if (train->parsed()) return cmd_train(cli, train);
    if (report->parsed()) return cmd_report(report_dirs, report_out);
  } catch (const lad::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lad::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitConfig;
}
