#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lad/tensor.hpp"

namespace lad {

/// Probabilities below this floor are clamped inside the log (and inside
/// the gradient denominator) so saturated softmax outputs keep losses and
/// gradients finite.
inline constexpr double kProbFloor = 1e-12;

template <class S>
struct LabeledBatchT {
  Tensor2T<S> features;
  std::vector<int> labels;       // class ids in [0, K)
  VectorT<S> instance_weights;   // > 0, one per row
};
using LabeledBatch = LabeledBatchT<double>;

template <class S>
struct DomainBatchT {
  Tensor2T<S> features;
  std::vector<int> domain_ids;   // 1 = source, 0 = target
  VectorT<S> instance_weights;
};
using DomainBatch = DomainBatchT<double>;

/// Weighted mean cross-entropy: (1/B) * sum_i w_i * (-log p[i, y_i]).
template <class S>
double cross_entropy(const Tensor2T<S>& probs, const std::vector<int>& labels,
                     const VectorT<S>& instance_weights) {
  const Index n = probs.rows();
  if (n == 0) throw std::invalid_argument("cross_entropy: empty batch");
  if (static_cast<Index>(labels.size()) != n || instance_weights.size() != n) {
    throw std::invalid_argument("cross_entropy: row counts of probs/labels/weights disagree");
  }
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= probs.cols()) {
      throw std::invalid_argument("cross_entropy: label " + std::to_string(y) +
                                  " out of range [0, " + std::to_string(probs.cols()) + ")");
    }
    const double p = std::max(static_cast<double>(probs(i, y)), kProbFloor);
    total += static_cast<double>(instance_weights(i)) * (-std::log(p));
  }
  return total / static_cast<double>(n);
}

/// Gradient of the weighted mean cross-entropy with respect to probs:
/// zero except at the true class, where it is -w_i / (B * max(p, floor)).
template <class S>
void cross_entropy_grad(const Tensor2T<S>& probs, const std::vector<int>& labels,
                        const VectorT<S>& instance_weights, Tensor2T<S>& grad) {
  const Index n = probs.rows();
  if (static_cast<Index>(labels.size()) != n || instance_weights.size() != n) {
    throw std::invalid_argument("cross_entropy_grad: row counts disagree");
  }
  grad.resize(n, probs.cols());
  grad.setZero();
  const S inv_n = S(1) / static_cast<S>(n);
  for (Index i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    const S p = std::max(probs(i, y), static_cast<S>(kProbFloor));
    grad(i, y) = -instance_weights(i) * inv_n / p;
  }
}

/// Batch estimator of the weighted source loss L_S: cross-entropy with
/// per-instance class weights. With all weights 1 this is the plain
/// unweighted loss.
template <class S>
double weighted_label_loss(const Tensor2T<S>& classifier_probs, const LabeledBatchT<S>& batch) {
  return cross_entropy(classifier_probs, batch.labels, batch.instance_weights);
}

/// Batch estimator of the weighted domain loss L_D. Discriminator probs
/// are a 2-way softmax over {target = 0, source = 1}. Source rows
/// contribute w * -log p[1] averaged over the source rows; target rows
/// contribute w * -log p[0] averaged over the target rows; the two
/// averages are summed.
template <class S>
double weighted_domain_loss(const Tensor2T<S>& discriminator_probs, const DomainBatchT<S>& batch) {
  const Index n = discriminator_probs.rows();
  if (discriminator_probs.cols() != 2) {
    throw std::invalid_argument("weighted_domain_loss: discriminator probs must have 2 columns");
  }
  if (static_cast<Index>(batch.domain_ids.size()) != n || batch.instance_weights.size() != n) {
    throw std::invalid_argument("weighted_domain_loss: row counts disagree");
  }
  Index n_source = 0;
  for (int d : batch.domain_ids) {
    if (d != 0 && d != 1) throw std::invalid_argument("weighted_domain_loss: domain ids must be 0 or 1");
    n_source += d;
  }
  const Index n_target = n - n_source;
  if (n_source == 0 || n_target == 0) {
    throw std::invalid_argument("weighted_domain_loss: batch needs rows from both domains");
  }
  double source_sum = 0.0;
  double target_sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    const int d = batch.domain_ids[static_cast<std::size_t>(i)];
    const double p = std::max(static_cast<double>(discriminator_probs(i, d)), kProbFloor);
    const double term = static_cast<double>(batch.instance_weights(i)) * (-std::log(p));
    (d == 1 ? source_sum : target_sum) += term;
  }
  return source_sum / static_cast<double>(n_source) + target_sum / static_cast<double>(n_target);
}

/// Gradient of weighted_domain_loss with respect to the discriminator
/// probabilities.
template <class S>
void weighted_domain_loss_grad(const Tensor2T<S>& discriminator_probs,
                               const DomainBatchT<S>& batch, Tensor2T<S>& grad) {
  const Index n = discriminator_probs.rows();
  Index n_source = 0;
  for (int d : batch.domain_ids) n_source += d;
  const Index n_target = n - n_source;
  if (n_source == 0 || n_target == 0) {
    throw std::invalid_argument("weighted_domain_loss_grad: batch needs rows from both domains");
  }
  grad.resize(n, 2);
  grad.setZero();
  const S inv_src = S(1) / static_cast<S>(n_source);
  const S inv_tgt = S(1) / static_cast<S>(n_target);
  for (Index i = 0; i < n; ++i) {
    const int d = batch.domain_ids[static_cast<std::size_t>(i)];
    const S p = std::max(discriminator_probs(i, d), static_cast<S>(kProbFloor));
    grad(i, d) = -batch.instance_weights(i) * (d == 1 ? inv_src : inv_tgt) / p;
  }
}

}  // namespace lad
