#include "lad/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lad/error.hpp"

namespace lad {
namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string config_digest(const TrainConfig& config, const std::string& method) {
  std::ostringstream canon;
  canon << "method=" << method << ";lr=" << fmt17(config.learning_rate)
        << ";momentum=" << fmt17(config.momentum) << ";batch_size=" << config.batch_size
        << ";n_epochs=" << config.n_epochs << ";hidden_width=" << config.hidden_width
        << ";dropout_rate=" << fmt17(config.dropout_rate)
        << ";use_class_weights=" << config.use_class_weights
        << ";record_every=" << config.record_every << ";real32=" << config.real32
        << ";grl_enabled=" << config.grl_enabled;
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canon.str())));
  return buf;
}

AggregateReport aggregate(const std::vector<RunReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate: no reports");
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  std::map<std::pair<std::string, std::string>, int> counts;
  for (const auto& r : reports) {
    const auto key = std::make_pair(r.task, r.method);
    ++counts[key];
    if (r.final_target_accuracy) groups[key].push_back(*r.final_target_accuracy);
  }
  AggregateReport out;
  for (const auto& [key, n] : counts) {
    TaskAggregate agg;
    agg.task = key.first;
    agg.method = key.second;
    agg.run_count = n;
    const auto it = groups.find(key);
    if (it != groups.end() && !it->second.empty()) {
      const auto& vals = it->second;
      double sum = 0.0;
      for (double v : vals) sum += v;
      const double mean = sum / static_cast<double>(vals.size());
      agg.mean_accuracy = mean;
      if (vals.size() > 1) {
        double ss = 0.0;
        for (double v : vals) ss += (v - mean) * (v - mean);
        agg.std_accuracy = std::sqrt(ss / static_cast<double>(vals.size() - 1));
      } else {
        agg.std_accuracy = 0.0;  // single run; run_count flags n=1
      }
    }
    out.tasks.push_back(std::move(agg));
  }
  // std::map already orders by (task, method).
  return out;
}

void emit_history_csv(const TrainHistory& history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "# schema_version=" << kReportSchemaVersion << "\n";
  out << "epoch,source_loss,target_loss,target_acc,disc_acc\n";
  for (const auto& r : history.records) {
    out << r.epoch << ',' << fmt17(r.source_class_loss) << ',';
    if (r.target_class_loss) out << fmt17(*r.target_class_loss);
    out << ',';
    if (r.target_accuracy) out << fmt17(*r.target_accuracy);
    out << ',';
    if (r.discriminator_accuracy) out << fmt17(*r.discriminator_accuracy);
    out << "\n";
  }
  if (!out) throw DataError("write failed: " + path.string());
}

namespace {

nlohmann::json report_to_json(const RunReport& r) {
  nlohmann::json j;
  j["schema_version"] = r.schema_version;
  j["task"] = r.task;
  j["method"] = r.method;
  j["config_digest"] = r.config_digest;
  j["seed"] = r.seed;
  if (r.final_target_accuracy) {
    j["final_target_accuracy"] = *r.final_target_accuracy;
  } else {
    j["final_target_accuracy"] = nullptr;
  }
  nlohmann::json per_class = nlohmann::json::array();
  for (double v : r.per_class_accuracy) {
    if (std::isnan(v)) {
      per_class.push_back(nullptr);
    } else {
      per_class.push_back(v);
    }
  }
  j["per_class_accuracy"] = per_class;
  if (r.discriminator_accuracy) {
    j["discriminator_accuracy"] = *r.discriminator_accuracy;
  } else {
    j["discriminator_accuracy"] = nullptr;
  }
  j["history_file"] = r.history_file;
  j["runtime_seconds"] = r.runtime_seconds;
  return j;
}

}  // namespace

void emit_report_json(const RunReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << report_to_json(report).dump(2) << "\n";
  if (!out) throw DataError("write failed: " + path.string());
}

RunReport read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open report: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("report " + path.string() + ": " + e.what());
  }
  RunReport r;
  try {
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw DataError("report " + path.string() + ": schema_version " +
                      std::to_string(r.schema_version) + ", expected " +
                      std::to_string(kReportSchemaVersion));
    }
    r.task = j.at("task").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.config_digest = j.at("config_digest").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("final_target_accuracy").is_null()) {
      r.final_target_accuracy = j.at("final_target_accuracy").get<double>();
    }
    for (const auto& v : j.at("per_class_accuracy")) {
      r.per_class_accuracy.push_back(v.is_null() ? std::nan("") : v.get<double>());
    }
    if (!j.at("discriminator_accuracy").is_null()) {
      r.discriminator_accuracy = j.at("discriminator_accuracy").get<double>();
    }
    r.history_file = j.at("history_file").get<std::string>();
    r.runtime_seconds = j.at("runtime_seconds").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("report " + path.string() + ": " + e.what());
  }
  return r;
}

void emit_aggregate_json(const AggregateReport& report, const std::filesystem::path& path) {
  nlohmann::json j;
  j["schema_version"] = report.schema_version;
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& t : report.tasks) {
    nlohmann::json jt;
    jt["task"] = t.task;
    jt["method"] = t.method;
    jt["run_count"] = t.run_count;
    jt["mean_accuracy"] = t.mean_accuracy ? nlohmann::json(*t.mean_accuracy)
                                          : nlohmann::json(nullptr);
    jt["std_accuracy"] = t.std_accuracy ? nlohmann::json(*t.std_accuracy)
                                        : nlohmann::json(nullptr);
    tasks.push_back(std::move(jt));
  }
  j["tasks"] = tasks;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace lad
