#include "lad/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "lad/error.hpp"
#include "lad/rng.hpp"

namespace lad {
namespace {

void validate(const SyntheticSpec& spec) {
  const int k = spec.num_classes;
  if (k < 2) throw std::invalid_argument("SyntheticSpec: num_classes must be >= 2");
  if (spec.dim < 1) throw std::invalid_argument("SyntheticSpec: dim must be >= 1");
  if (spec.n_source < k) throw std::invalid_argument("SyntheticSpec: n_source must be >= num_classes");
  if (spec.n_target < k) throw std::invalid_argument("SyntheticSpec: n_target must be >= num_classes");
  if (spec.class_spread <= 0.0) throw std::invalid_argument("SyntheticSpec: class_spread must be > 0");
  if (spec.class_means.rows() != k || spec.class_means.cols() != spec.dim) {
    throw std::invalid_argument("SyntheticSpec: class_means must be num_classes x dim");
  }
  if (spec.shift_translation.size() != 0 && spec.shift_translation.size() != spec.dim) {
    throw std::invalid_argument("SyntheticSpec: shift_translation length must equal dim");
  }
  if (spec.shift_rotation_degrees != 0.0 && spec.dim < 2) {
    throw std::invalid_argument("SyntheticSpec: rotation needs dim >= 2");
  }
  if (static_cast<int>(spec.target_class_proportions.size()) != k) {
    throw std::invalid_argument("SyntheticSpec: target_class_proportions length must equal num_classes");
  }
  double sum = 0.0;
  for (double p : spec.target_class_proportions) {
    if (p < 0.0) throw std::invalid_argument("SyntheticSpec: target_class_proportions must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("SyntheticSpec: target_class_proportions must sum to 1");
  }
}

// Largest-remainder apportionment of n rows over K classes; deterministic,
// ties toward the lower class index.
std::vector<Index> apportion(const std::vector<double>& proportions, Index n) {
  const std::size_t k = proportions.size();
  std::vector<Index> counts(k);
  std::vector<std::pair<double, std::size_t>> remainders(k);
  Index assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double exact = proportions[c] * static_cast<double>(n);
    counts[c] = static_cast<Index>(std::floor(exact));
    assigned += counts[c];
    remainders[c] = {exact - std::floor(exact), c};
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (Index i = 0; i < n - assigned; ++i) {
    ++counts[remainders[static_cast<std::size_t>(i) % k].second];
  }
  return counts;
}

FeatureDataset sample_domain(const SyntheticSpec& spec, const std::vector<Index>& counts,
                             bool shifted, Rng& rng, const std::string& name) {
  const Index n = std::accumulate(counts.begin(), counts.end(), Index(0));
  const int d = spec.dim;
  FeatureDataset ds;
  ds.features.resize(n, d);
  ds.labels.reserve(static_cast<std::size_t>(n));
  ds.num_classes = spec.num_classes;
  ds.name = name;

  const double theta = spec.shift_rotation_degrees * M_PI / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  Index row = 0;
  Vector x(d);
  for (int cls = 0; cls < spec.num_classes; ++cls) {
    for (Index i = 0; i < counts[static_cast<std::size_t>(cls)]; ++i) {
      for (int j = 0; j < d; ++j) {
        x(j) = spec.class_means(cls, j) + spec.class_spread * rng.normal();
      }
      if (shifted) {
        if (theta != 0.0) {
          const double x0 = x(0), x1 = x(1);
          x(0) = c * x0 - s * x1;
          x(1) = s * x0 + c * x1;
        }
        if (spec.shift_translation.size() == d) x += spec.shift_translation;
      }
      ds.features.row(row++) = x.transpose();
      ds.labels.push_back(cls);
    }
  }

  // Rows come out grouped by class; shuffle them so files and batch
  // statistics look like real data.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  rng.shuffle(order);
  FeatureDataset shuffled;
  shuffled.features.resize(n, d);
  shuffled.labels.resize(static_cast<std::size_t>(n));
  shuffled.num_classes = ds.num_classes;
  shuffled.name = ds.name;
  shuffled.ids.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    shuffled.features.row(i) = ds.features.row(order[static_cast<std::size_t>(i)]);
    shuffled.labels[static_cast<std::size_t>(i)] =
        ds.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    shuffled.ids.push_back(std::to_string(i));
  }
  return shuffled;
}

}  // namespace

std::pair<FeatureDataset, FeatureDataset> synth_gaussian_shift(const SyntheticSpec& spec) {
  validate(spec);
  Rng root(spec.seed);
  Rng rng_source = root.fork("source");
  Rng rng_target = root.fork("target");

  const std::vector<double> balanced(static_cast<std::size_t>(spec.num_classes),
                                     1.0 / spec.num_classes);
  const auto source_counts = apportion(balanced, spec.n_source);
  const auto target_counts = apportion(spec.target_class_proportions, spec.n_target);

  FeatureDataset source = sample_domain(spec, source_counts, false, rng_source, "source");
  FeatureDataset target = sample_domain(spec, target_counts, true, rng_target, "target");
  return {std::move(source), std::move(target)};
}

SyntheticSpec synthetic_spec_from_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open synthetic spec: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("synthetic spec " + path.string() + ": " + e.what());
  }
  SyntheticSpec spec;
  try {
    spec.num_classes = j.at("num_classes").get<int>();
    spec.dim = j.at("dim").get<int>();
    spec.n_source = j.at("n_source").get<Index>();
    spec.n_target = j.at("n_target").get<Index>();
    spec.class_spread = j.at("class_spread").get<double>();
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.shift_rotation_degrees = j.value("shift_rotation_degrees", 0.0);
    const auto means = j.at("class_means").get<std::vector<std::vector<double>>>();
    spec.class_means.resize(static_cast<Index>(means.size()),
                            means.empty() ? 0 : static_cast<Index>(means[0].size()));
    for (std::size_t r = 0; r < means.size(); ++r) {
      if (static_cast<Index>(means[r].size()) != spec.class_means.cols()) {
        throw ConfigError("synthetic spec: class_means rows have unequal lengths");
      }
      for (std::size_t c = 0; c < means[r].size(); ++c) {
        spec.class_means(static_cast<Index>(r), static_cast<Index>(c)) = means[r][c];
      }
    }
    if (j.contains("shift_translation")) {
      const auto t = j.at("shift_translation").get<std::vector<double>>();
      spec.shift_translation.resize(static_cast<Index>(t.size()));
      for (std::size_t i = 0; i < t.size(); ++i) spec.shift_translation(static_cast<Index>(i)) = t[i];
    }
    spec.target_class_proportions =
        j.value("target_class_proportions",
                std::vector<double>(static_cast<std::size_t>(std::max(spec.num_classes, 0)),
                                    spec.num_classes > 0 ? 1.0 / spec.num_classes : 0.0));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("synthetic spec " + path.string() + ": " + e.what());
  }
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

SyntheticSpec reference_shift_spec() {
  SyntheticSpec spec;
  spec.num_classes = 5;
  spec.dim = 16;
  spec.n_source = 600;
  spec.n_target = 600;
  spec.class_spread = 0.85;
  spec.shift_rotation_degrees = 30.0;
  spec.seed = 2024;
  spec.class_means.setZero(5, 16);
  constexpr double kRadius = 3.0;
  for (int k = 0; k < 5; ++k) {
    const double angle = 2.0 * M_PI * k / 5.0;
    spec.class_means(k, 0) = kRadius * std::cos(angle);
    spec.class_means(k, 1) = kRadius * std::sin(angle);
  }
  spec.shift_translation = Vector::Zero(16);
  spec.shift_translation(2) = 0.5;
  spec.target_class_proportions.assign(5, 0.2);
  return spec;
}

SyntheticSpec reference_zero_shift_spec() {
  SyntheticSpec spec = reference_shift_spec();
  spec.shift_rotation_degrees = 0.0;
  spec.shift_translation.setZero();
  return spec;
}

}  // namespace lad
