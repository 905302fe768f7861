#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lad/dataset.hpp"
#include "lad/nn.hpp"
#include "lad/optimizer.hpp"

namespace lad {

/// All training hyperparameters. Defaults follow the experimental
/// protocol: SGD with learning rate 0.001 and Nesterov momentum 0.9,
/// batch size 32, 1000 epochs (baseline runs conventionally use 100),
/// two hidden layers of width 1024 with 0.5 dropout.
struct TrainConfig {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  Index batch_size = 32;
  int n_epochs = 1000;
  Index hidden_width = 1024;
  double dropout_rate = 0.5;
  bool use_class_weights = true;
  std::uint64_t seed = 0;
  int record_every = 10;  // epochs between history snapshots; the final epoch is always recorded

  bool real32 = false;      // run the training math in float32
  bool grl_enabled = true;  // ablation switch: detach the reversed domain gradient
  int checkpoint_every = 0; // write a checkpoint every N epochs (0 = off)
  std::string checkpoint_path;
};

/// Classifier C (d -> h -> h -> K, ReLU + dropout on hidden layers,
/// softmax output) and discriminator D (K -> h -> h -> 2, ReLU, no
/// dropout, softmax output), each with its own optimizer state. The
/// discriminator consumes the classifier's probability vector.
template <class S>
struct LadModelT {
  MlpT<S> classifier;
  MlpT<S> discriminator;
  OptimizerStateT<S> classifier_opt;
  OptimizerStateT<S> discriminator_opt;
};
using LadModel = LadModelT<double>;

struct EpochRecord {
  int epoch = 0;
  int steps = 0;  // training steps run this epoch, = ceil(|S| / batch_size)
  double source_class_loss = 0.0;                // unweighted, full source, eval mode
  std::optional<double> target_class_loss;       // needs diagnostic target labels
  std::optional<double> target_accuracy;         // needs diagnostic target labels
  std::optional<double> discriminator_accuracy;  // absent in baseline mode
  double wallclock_seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> records;
};

struct TrainResult {
  LadModel model;  // discriminator left empty by baseline_train
  TrainHistory history;
  std::vector<int> predictions;  // final-epoch argmax labels for the target set
};

/// Adversarial training, alternating per step: (a) one SGD step on the
/// weighted source loss using a source batch, then (b) one SGD step on the
/// weighted domain loss over the concatenated source+target batch, where
/// the discriminator descends and the classifier receives the negated
/// domain gradient through the gradient reversal layer. Target weights
/// start at 1 and are recomputed from fresh pseudo-labels at the end of
/// every epoch. Runs exactly config.n_epochs epochs; no early stopping.
TrainResult lad_train(const FeatureDataset& source, const FeatureDataset& target,
                      const TrainConfig& config);

/// No-adaptation baseline: the classifier alone, trained on the weighted
/// source loss; predictions by argmax on the target.
TrainResult baseline_train(const FeatureDataset& source, const FeatureDataset& target,
                           const TrainConfig& config);

/// Fraction of instances whose domain D(C(x)) predicts correctly
/// (eval mode, ties toward the target class).
double discriminator_accuracy(const LadModel& model, const FeatureDataset& source,
                              const FeatureDataset& target);

/// Full-target prediction sweep in eval mode; pseudo-label class weights
/// mapped back to one weight per instance.
std::vector<double> recompute_target_weights(const LadModel& model, const FeatureDataset& target);

}  // namespace lad
