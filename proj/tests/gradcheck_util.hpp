#pragma once

#include <cmath>
#include <creditnn/layers.hpp>
#include <creditnn/loss.hpp>
#include <creditnn/network.hpp>
#include <creditnn/rng.hpp>

// Central finite-difference verification of layer gradients: phi(theta) =
// sum(c . layer(x)) for a fixed random direction c, differentiated against
// every input and parameter coordinate with step h.
namespace gradcheck {

using creditnn::Index;
using creditnn::Layer;
using creditnn::LayerParams;
using creditnn::Rng;
using creditnn::Tensor;

inline double rel_err(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-6});
  return std::abs(a - b) / denom;
}

struct Result {
  double max_rel_err = 0.0;
  Index coords_checked = 0;
};

// `training` is only true for dropout layers with a frozen mask.
inline Result check_layer(Layer& layer, Tensor input, Rng& rng, bool training = false,
                          double h = 1e-5) {
  Tensor out = layer.forward(input, training, nullptr);
  Tensor dir = out;
  for (Index i = 0; i < dir.size(); ++i) dir.data[i] = rng.uniform(-1.0, 1.0);

  auto phi = [&](const Tensor& x) {
    Tensor y = layer.forward(x, training, nullptr);
    return y.data.dot(dir.data);
  };

  if (LayerParams* p = layer.params()) p->zero_grads();
  layer.forward(input, training, nullptr);
  Tensor dx = layer.backward(dir);

  Result r;
  for (Index i = 0; i < input.size(); ++i) {
    Tensor plus = input, minus = input;
    plus.data[i] += h;
    minus.data[i] -= h;
    const double fd = (phi(plus) - phi(minus)) / (2.0 * h);
    r.max_rel_err = std::max(r.max_rel_err, rel_err(dx.data[i], fd));
    ++r.coords_checked;
  }
  if (LayerParams* p = layer.params()) {
    auto sweep = [&](Tensor& param, const Tensor& grad) {
      for (Index i = 0; i < param.size(); ++i) {
        const double keep = param.data[i];
        param.data[i] = keep + h;
        const double up = phi(input);
        param.data[i] = keep - h;
        const double dn = phi(input);
        param.data[i] = keep;
        const double fd = (up - dn) / (2.0 * h);
        r.max_rel_err = std::max(r.max_rel_err, rel_err(grad.data[i], fd));
        ++r.coords_checked;
      }
    };
    sweep(p->weights, p->weight_grad);
    sweep(p->biases, p->bias_grad);
  }
  return r;
}

inline Tensor random_tensor(std::vector<Index> shape, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (Index i = 0; i < t.size(); ++i) t.data[i] = rng.uniform(lo, hi);
  return t;
}

inline void random_params(Layer& layer, Rng& rng, double scale = 0.8) {
  if (LayerParams* p = layer.params()) {
    for (Index i = 0; i < p->weights.size(); ++i) p->weights.data[i] = rng.uniform(-scale, scale);
    for (Index i = 0; i < p->biases.size(); ++i) p->biases.data[i] = rng.uniform(-scale, scale);
  }
}

// Finite differences of the softmax cross-entropy against its logits.
inline Result check_softmax_loss(Index batch, Index classes, Rng& rng, double h = 1e-5) {
  Tensor logits = random_tensor({batch, classes}, rng, -2.0, 2.0);
  std::vector<int> labels;
  for (Index b = 0; b < batch; ++b)
    labels.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(classes))));

  creditnn::LossValue loss = creditnn::softmax_cross_entropy(logits, labels);
  Tensor grad = creditnn::softmax_cross_entropy_grad(loss, labels);

  Result r;
  for (Index i = 0; i < logits.size(); ++i) {
    Tensor plus = logits, minus = logits;
    plus.data[i] += h;
    minus.data[i] -= h;
    const double fd = (creditnn::softmax_cross_entropy(plus, labels).value -
                       creditnn::softmax_cross_entropy(minus, labels).value) /
                      (2.0 * h);
    r.max_rel_err = std::max(r.max_rel_err, rel_err(grad.data[i], fd));
    ++r.coords_checked;
  }
  return r;
}

// End-to-end check: loss(net(x)) differentiated against every parameter.
inline Result check_network(creditnn::Network& net, const Tensor& input,
                            const std::vector<int>& labels, double h = 1e-5) {
  auto loss_at = [&]() {
    Tensor out = net.forward(input, false, nullptr);
    return creditnn::softmax_cross_entropy(out, labels).value;
  };
  Tensor out = net.forward(input, false, nullptr);
  creditnn::LossValue loss = creditnn::softmax_cross_entropy(out, labels);
  net.zero_grads();
  net.backward(creditnn::softmax_cross_entropy_grad(loss, labels));

  Result r;
  for (LayerParams* p : net.params()) {
    auto sweep = [&](Tensor& param, const Tensor& grad) {
      for (Index i = 0; i < param.size(); ++i) {
        const double keep = param.data[i];
        param.data[i] = keep + h;
        const double up = loss_at();
        param.data[i] = keep - h;
        const double dn = loss_at();
        param.data[i] = keep;
        const double fd = (up - dn) / (2.0 * h);
        r.max_rel_err = std::max(r.max_rel_err, rel_err(grad.data[i], fd));
        ++r.coords_checked;
      }
    };
    sweep(p->weights, p->weight_grad);
    sweep(p->biases, p->bias_grad);
  }
  return r;
}

}  // namespace gradcheck
