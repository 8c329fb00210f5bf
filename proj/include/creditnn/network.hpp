#pragma once

#include <memory>
#include <vector>

#include "creditnn/layers.hpp"
#include "creditnn/rng.hpp"
#include "creditnn/tensor.hpp"

namespace creditnn {

// Ordered stack of layers trained by plain SGD. Copyable (deep-copies layers)
// so snapshots for early stopping are cheap to express.
class Network {
 public:
  Network() = default;
  Network(const Network& o);
  Network& operator=(const Network& o);
  Network(Network&&) = default;
  Network& operator=(Network&&) = default;

  void add(std::unique_ptr<Layer> layer);
  std::size_t depth() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }

  // He-uniform weights (limit sqrt(6/fan_in)), zero biases, zero grads.
  void init_params(Rng& rng);

  // Runs the stack; training mode enables dropout (rng required then).
  Tensor forward(const Tensor& input, bool training = false, Rng* rng = nullptr);

  // Backpropagates grad wrt the last forward's output, accumulating parameter
  // gradients; returns grad wrt the input.
  Tensor backward(const Tensor& grad_output);

  void zero_grads();
  // params -= lr * grads for every trainable layer.
  void sgd_update(double lr);

  std::vector<LayerParams*> params();
  Index param_count() const;

  // Flat copies of all parameters, in layer order (weights then biases).
  Eigen::VectorXd snapshot() const;
  void restore(const Eigen::VectorXd& flat);

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
  bool forward_done_ = false;
};

}  // namespace creditnn
