#include "creditnn/network.hpp"

#include <cmath>
#include <utility>

#include "creditnn/errors.hpp"

namespace creditnn {

Network::Network(const Network& o) {
  layers_.reserve(o.layers_.size());
  for (const auto& l : o.layers_) layers_.push_back(l->clone());
}

Network& Network::operator=(const Network& o) {
  if (this == &o) return *this;
  layers_.clear();
  layers_.reserve(o.layers_.size());
  for (const auto& l : o.layers_) layers_.push_back(l->clone());
  forward_done_ = false;
  return *this;
}

void Network::add(std::unique_ptr<Layer> layer) {
  if (!layer) throw ConfigError("network: null layer");
  layers_.push_back(std::move(layer));
}

void Network::init_params(Rng& rng) {
  for (auto& l : layers_) {
    LayerParams* p = l->params();
    if (!p) continue;
    const Index fan = l->fan_in();
    if (fan <= 0) throw StateError("network: layer " + l->name() + " has no fan-in");
    const double limit = std::sqrt(6.0 / static_cast<double>(fan));
    for (Index i = 0; i < p->weights.size(); ++i) p->weights.data[i] = rng.uniform(-limit, limit);
    p->biases.data.setZero();
    p->zero_grads();
  }
}

Tensor Network::forward(const Tensor& input, bool training, Rng* rng) {
  if (layers_.empty()) throw StateError("network: no layers");
  Tensor x = input;
  for (auto& l : layers_) x = l->forward(x, training, rng);
  forward_done_ = true;
  return x;
}

Tensor Network::backward(const Tensor& grad_output) {
  if (!forward_done_) throw StateError("network: backward before forward");
  Tensor g = grad_output;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

void Network::zero_grads() {
  for (auto& l : layers_)
    if (LayerParams* p = l->params()) p->zero_grads();
}

void Network::sgd_update(double lr) {
  for (auto& l : layers_)
    if (LayerParams* p = l->params()) {
      p->weights.data -= lr * p->weight_grad.data;
      p->biases.data -= lr * p->bias_grad.data;
    }
}

std::vector<LayerParams*> Network::params() {
  std::vector<LayerParams*> out;
  for (auto& l : layers_)
    if (LayerParams* p = l->params()) out.push_back(p);
  return out;
}

Index Network::param_count() const {
  Index n = 0;
  for (const auto& l : layers_)
    if (const LayerParams* p = std::as_const(*l).params()) n += p->count();
  return n;
}

Eigen::VectorXd Network::snapshot() const {
  Index n = param_count();
  Eigen::VectorXd flat(n);
  Index at = 0;
  for (const auto& l : layers_)
    if (const LayerParams* p = std::as_const(*l).params()) {
      flat.segment(at, p->weights.size()) = p->weights.data;
      at += p->weights.size();
      flat.segment(at, p->biases.size()) = p->biases.data;
      at += p->biases.size();
    }
  return flat;
}

void Network::restore(const Eigen::VectorXd& flat) {
  if (flat.size() != param_count())
    throw DimensionError("network: snapshot of " + std::to_string(flat.size()) +
                         " values for " + std::to_string(param_count()) + " parameters");
  Index at = 0;
  for (auto& l : layers_)
    if (LayerParams* p = l->params()) {
      p->weights.data = flat.segment(at, p->weights.size());
      at += p->weights.size();
      p->biases.data = flat.segment(at, p->biases.size());
      at += p->biases.size();
    }
}

}  // namespace creditnn
