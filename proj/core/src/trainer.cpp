#include "lad/trainer.hpp"

#include <fstream>
#include <stdexcept>

#include "lad/checkpoint.hpp"
#include "lad/class_weights.hpp"
#include "lad/error.hpp"
#include "train_engine.hpp"

namespace lad {

TrainResult lad_train(const FeatureDataset& source, const FeatureDataset& target,
                      const TrainConfig& config) {
  if (config.real32) return detail::train_fresh<float>(source, target, config, false);
  return detail::train_fresh<double>(source, target, config, false);
}

TrainResult baseline_train(const FeatureDataset& source, const FeatureDataset& target,
                           const TrainConfig& config) {
  if (config.real32) return detail::train_fresh<float>(source, target, config, true);
  return detail::train_fresh<double>(source, target, config, true);
}

double discriminator_accuracy(const LadModel& model, const FeatureDataset& source,
                              const FeatureDataset& target) {
  if (model.discriminator.layers.empty()) {
    throw std::invalid_argument("discriminator_accuracy: model has no discriminator");
  }
  if (source.size() == 0 || target.size() == 0) {
    throw std::invalid_argument("discriminator_accuracy: empty domain");
  }
  Tensor2 probs_source, probs_target, chunk;
  Trace scratch;
  detail::predict_probs(model.classifier, source.features, probs_source, scratch, chunk);
  detail::predict_probs(model.classifier, target.features, probs_target, scratch, chunk);
  return detail::domain_accuracy_from_probs(model.discriminator, probs_source, probs_target,
                                            scratch);
}

std::vector<double> recompute_target_weights(const LadModel& model,
                                             const FeatureDataset& target) {
  if (target.size() == 0) throw std::invalid_argument("recompute_target_weights: empty target");
  Tensor2 probs, chunk;
  Trace scratch;
  detail::predict_probs(model.classifier, target.features, probs, scratch, chunk);
  const std::vector<int> pseudo = pseudo_labels(probs);
  const int k = static_cast<int>(model.classifier.output_dim());
  const ClassWeightTable table = target_class_weights(pseudo, k);
  std::vector<double> weights(pseudo.size());
  for (std::size_t i = 0; i < pseudo.size(); ++i) weights[i] = table.weight_for(pseudo[i]);
  return weights;
}

CheckpointInfo read_checkpoint_info(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path.string());
  return detail::read_checkpoint_header(in, path.string()).info;
}

TrainResult resume_training(const std::filesystem::path& path, const FeatureDataset& source,
                            const FeatureDataset& target, int total_epochs) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path.string());
  const detail::CheckpointHeader header = detail::read_checkpoint_header(in, path.string());

  const int k = detail::validate_inputs(source, target, header.info.config);
  if (header.guards.n_source != source.size() || header.guards.dim != source.dim() ||
      header.guards.n_target != target.size() || header.guards.num_classes != k) {
    throw DataError("checkpoint " + path.string() + " was written for different datasets");
  }
  const int total = total_epochs > 0 ? total_epochs : header.info.config.n_epochs;
  if (total < header.info.epoch_done) {
    throw ConfigError("checkpoint is already past the requested epoch count");
  }

  if (header.info.real32) {
    auto st = detail::read_state<float>(in, header);
    return detail::run_engine(source, target, header.info.config, header.info.baseline_mode,
                              std::move(st), total, k);
  }
  auto st = detail::read_state<double>(in, header);
  return detail::run_engine(source, target, header.info.config, header.info.baseline_mode,
                            std::move(st), total, k);
}

}  // namespace lad
