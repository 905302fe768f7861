#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lad/nn.hpp"
#include "lad/tensor.hpp"

namespace lad {

/// One velocity tensor per parameter tensor, shapes mirrored exactly;
/// fresh state is all-zero.
template <class S>
struct OptimizerStateT {
  std::vector<Tensor2T<S>> weight_velocity;
  std::vector<VectorT<S>> bias_velocity;
  double learning_rate = 1e-3;
  double momentum = 0.9;
};
using OptimizerState = OptimizerStateT<double>;

template <class S>
OptimizerStateT<S> make_optimizer_state(const MlpT<S>& net, double learning_rate,
                                        double momentum) {
  OptimizerStateT<S> state;
  state.learning_rate = learning_rate;
  state.momentum = momentum;
  state.weight_velocity.reserve(net.layers.size());
  state.bias_velocity.reserve(net.layers.size());
  for (const auto& layer : net.layers) {
    state.weight_velocity.push_back(Tensor2T<S>::Zero(layer.fan_in(), layer.fan_out()));
    state.bias_velocity.push_back(VectorT<S>::Zero(layer.fan_out()));
  }
  return state;
}

namespace detail {

// Nesterov momentum in the form common frameworks implement:
//   v <- mu * v - lr * g
//   p <- p + mu * v - lr * g      (with the already-updated v)
// mu = 0 reduces to plain SGD, p <- p - lr * g.
template <class P, class G, class V, class S>
void nesterov_update(P& params, const G& grads, V& velocity, S lr, S mu) {
  S* v = velocity.data();
  S* p = params.data();
  const S* g = grads.data();
  const Index n = params.size();
  for (Index i = 0; i < n; ++i) {
    const S vn = mu * v[i] - lr * g[i];
    v[i] = vn;
    p[i] += mu * vn - lr * g[i];
  }
}

}  // namespace detail

/// Single-tensor Nesterov step; see detail::nesterov_update for the exact
/// update formula.
template <class S>
void sgd_nesterov_step(Tensor2T<S>& params, const Tensor2T<S>& grads, Tensor2T<S>& velocity,
                       double learning_rate, double momentum) {
  if (params.rows() != grads.rows() || params.cols() != grads.cols() ||
      params.rows() != velocity.rows() || params.cols() != velocity.cols()) {
    throw std::invalid_argument("sgd_nesterov_step: params/grads/velocity shapes disagree");
  }
  detail::nesterov_update(params, grads, velocity, static_cast<S>(learning_rate),
                          static_cast<S>(momentum));
}

/// Whole-network Nesterov step over every weight and bias tensor.
template <class S>
void sgd_nesterov_step(MlpT<S>& net, const GradientsT<S>& grads, OptimizerStateT<S>& state) {
  const std::size_t n = net.layers.size();
  if (grads.weight_grads.size() != n || grads.bias_grads.size() != n ||
      state.weight_velocity.size() != n || state.bias_velocity.size() != n) {
    throw std::invalid_argument("sgd_nesterov_step: gradient/velocity layer counts disagree");
  }
  const S lr = static_cast<S>(state.learning_rate);
  const S mu = static_cast<S>(state.momentum);
  for (std::size_t i = 0; i < n; ++i) {
    DenseLayerT<S>& layer = net.layers[i];
    if (grads.weight_grads[i].rows() != layer.fan_in() ||
        grads.weight_grads[i].cols() != layer.fan_out() ||
        grads.bias_grads[i].size() != layer.fan_out()) {
      throw std::invalid_argument("sgd_nesterov_step: gradient shape mismatch at layer " +
                                  std::to_string(i));
    }
    detail::nesterov_update(layer.weights, grads.weight_grads[i], state.weight_velocity[i], lr,
                            mu);
    detail::nesterov_update(layer.bias, grads.bias_grads[i], state.bias_velocity[i], lr, mu);
  }
}

}  // namespace lad
