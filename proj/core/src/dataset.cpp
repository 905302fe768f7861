#include "lad/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lad/error.hpp"

namespace lad {
namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line_no,
                             const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double(std::string_view field, const std::filesystem::path& path,
                    std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    parse_fail(path, line_no, "non-numeric cell '" + std::string(field) + "'");
  }
  return value;
}

int parse_int(std::string_view field, const std::filesystem::path& path, std::size_t line_no) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    parse_fail(path, line_no, "non-integer cell '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

FeatureDataset load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature file: " + path.string());

  FeatureDataset ds;
  ds.name = path.stem().string();

  std::string line;
  std::size_t line_no = 0;
  int header_classes = 0;

  // Comment lines may precede the header; only num_classes is meaningful.
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      constexpr std::string_view kKey = "# num_classes=";
      if (line.starts_with(kKey)) {
        header_classes = parse_int(std::string_view(line).substr(kKey.size()), path, line_no);
        if (header_classes < 1) parse_fail(path, line_no, "num_classes must be >= 1");
      }
      continue;
    }
    break;
  }
  if (line.empty() || line[0] == '#') {
    throw DataError(path.string() + ": missing header line");
  }

  const auto header = split_csv(line);
  if (header.empty() || header[0] != "id") {
    parse_fail(path, line_no, "header must start with 'id'");
  }
  const bool labeled = header.size() > 1 && header[1] == "label";
  const std::size_t feat_start = labeled ? 2 : 1;
  const std::size_t d = header.size() - feat_start;
  for (std::size_t j = 0; j < d; ++j) {
    const std::string expected = "f" + std::to_string(j);
    if (header[feat_start + j] != expected) {
      parse_fail(path, line_no,
                 "feature column " + std::to_string(j) + " must be named '" + expected + "'");
    }
  }

  std::vector<double> values;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      parse_fail(path, line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    ds.ids.emplace_back(fields[0]);
    if (labeled) {
      const int y = parse_int(fields[1], path, line_no);
      if (y < 0) parse_fail(path, line_no, "negative label " + std::to_string(y));
      if (y > max_label) max_label = y;
      ds.labels.push_back(y);
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double v = parse_double(fields[feat_start + j], path, line_no);
      if (!std::isfinite(v)) parse_fail(path, line_no, "non-finite feature value");
      values.push_back(v);
    }
  }

  const Index n = static_cast<Index>(ds.ids.size());
  ds.features.resize(n, static_cast<Index>(d));
  for (Index i = 0; i < ds.features.size(); ++i) {
    ds.features.data()[i] = values[static_cast<std::size_t>(i)];
  }
  if (labeled) {
    ds.num_classes = header_classes > 0 ? header_classes : max_label + 1;
    if (max_label >= ds.num_classes) {
      throw DataError(path.string() + ": label " + std::to_string(max_label) +
                      " outside declared num_classes=" + std::to_string(ds.num_classes));
    }
  } else {
    ds.num_classes = header_classes;
  }
  return ds;
}

void save_features(const FeatureDataset& dataset, const std::filesystem::path& path) {
  if (dataset.labeled() &&
      static_cast<Index>(dataset.labels.size()) != dataset.size()) {
    throw std::invalid_argument("save_features: label count does not match row count");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());

  if (dataset.num_classes > 0) {
    out << "# num_classes=" << dataset.num_classes << "\n";
  }
  out << "id";
  if (dataset.labeled()) out << ",label";
  for (Index j = 0; j < dataset.dim(); ++j) out << ",f" << j;
  out << "\n";

  char buf[40];
  for (Index i = 0; i < dataset.size(); ++i) {
    if (static_cast<Index>(dataset.ids.size()) > i) {
      out << dataset.ids[static_cast<std::size_t>(i)];
    } else {
      out << i;
    }
    if (dataset.labeled()) out << ',' << dataset.labels[static_cast<std::size_t>(i)];
    for (Index j = 0; j < dataset.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", dataset.features(i, j));
      out << ',' << buf;
    }
    out << "\n";
  }
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace lad
