#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "creditnn/rng.hpp"
#include "creditnn/tensor.hpp"

namespace creditnn {

enum class Activation { identity, relu };

// Trainable weights/biases with gradient accumulators of identical shapes.
struct LayerParams {
  Tensor weights;
  Tensor biases;
  Tensor weight_grad;
  Tensor bias_grad;

  static LayerParams zeros(std::vector<Index> w_shape, std::vector<Index> b_shape);
  void zero_grads();
  Index count() const { return weights.size() + biases.size(); }
};

// --- Forward ops -----------------------------------------------------------
//
// These are the pure computations; the Layer classes below wrap them with the
// caching needed for backpropagation.

// input (batch, in) -> (batch, out) as input*W + b, then activation.
// weights shape (in, out), biases (out).
Tensor dense_forward(const LayerParams& p, const Tensor& input, Activation act);

// Valid (unpadded) cross-correlation over (batch, length, channels).
// weights shape (kernel, in_channels, filters), biases (filters).
Tensor conv1d_forward(const LayerParams& p, const Tensor& input, Index stride,
                      Activation act = Activation::identity);

// Same-padded cross-correlation over (batch, rows, cols, channels); output
// spatial dims are ceil(dim/stride). weights (kr, kc, in_channels, filters).
Tensor conv2d_forward(const LayerParams& p, const Tensor& input, Index stride,
                      Activation act = Activation::identity);

// Per-window maximum along the length axis of (batch, length, channels);
// channel count unchanged. Ties resolve to the first position.
Tensor maxpool_forward(const Tensor& input, Index window, Index stride);

// One LSTM recurrence step. x_t (batch, in), h_prev/c_prev (batch, units).
// weights ((in + units), 4*units) with gate order [input, forget, candidate,
// output]; biases (4*units). Returns (h_t, c_t).
std::pair<Tensor, Tensor> lstm_step(const LayerParams& p, const Tensor& x_t,
                                    const Tensor& h_prev, const Tensor& c_prev);

// Inverted dropout: in training mode each unit is zeroed with probability
// `rate` and survivors are scaled by 1/(1-rate); inference is the identity.
Tensor dropout_apply(const Tensor& input, double rate, bool training, Rng& rng);

// --- Layers ----------------------------------------------------------------

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& input, bool training, Rng* rng) = 0;
  // grad_output has the forward output's shape; returns grad wrt input and
  // accumulates parameter gradients.
  virtual Tensor backward(const Tensor& grad_output) = 0;
  virtual LayerParams* params() { return nullptr; }
  virtual const LayerParams* params() const { return nullptr; }
  // Fan-in used for weight initialisation; 0 for parameterless layers.
  virtual Index fan_in() const { return 0; }
  virtual std::string name() const = 0;
  virtual std::unique_ptr<Layer> clone() const = 0;
};

class DenseLayer final : public Layer {
 public:
  DenseLayer(Index in, Index out, Activation act);
  Tensor forward(const Tensor& input, bool training, Rng* rng) override;
  Tensor backward(const Tensor& grad_output) override;
  LayerParams* params() override { return &params_; }
  const LayerParams* params() const override { return &params_; }
  std::string name() const override { return "dense"; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<DenseLayer>(*this); }

  Index fan_in() const override { return in_; }
  Index units() const { return out_; }

 private:
  Index in_, out_;
  Activation act_;
  LayerParams params_;
  Tensor cached_input_;
  Tensor cached_pre_;
  bool has_cache_ = false;
};

class Conv1DLayer final : public Layer {
 public:
  Conv1DLayer(Index in_channels, Index filters, Index kernel, Index stride, Activation act);
  Tensor forward(const Tensor& input, bool training, Rng* rng) override;
  Tensor backward(const Tensor& grad_output) override;
  LayerParams* params() override { return &params_; }
  const LayerParams* params() const override { return &params_; }
  std::string name() const override { return "conv1d"; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv1DLayer>(*this); }

  Index fan_in() const override { return kernel_ * in_channels_; }
  Index filters() const { return filters_; }
  Index kernel() const { return kernel_; }
  Index stride() const { return stride_; }

 private:
  Index in_channels_, filters_, kernel_, stride_;
  Activation act_;
  LayerParams params_;
  Eigen::MatrixXd cached_patches_;  // (batch*out_len, kernel*in_channels)
  std::vector<Index> cached_in_shape_;
  Tensor cached_pre_;
  bool has_cache_ = false;
};

class Conv2DLayer final : public Layer {
 public:
  Conv2DLayer(Index in_channels, Index filters, Index kernel, Index stride, Activation act);
  Tensor forward(const Tensor& input, bool training, Rng* rng) override;
  Tensor backward(const Tensor& grad_output) override;
  LayerParams* params() override { return &params_; }
  const LayerParams* params() const override { return &params_; }
  std::string name() const override { return "conv2d"; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv2DLayer>(*this); }

  Index fan_in() const override { return kernel_ * kernel_ * in_channels_; }
  Index filters() const { return filters_; }
  Index kernel() const { return kernel_; }

 private:
  Index in_channels_, filters_, kernel_, stride_;
  Activation act_;
  LayerParams params_;
  Eigen::MatrixXd cached_patches_;  // (batch*outR*outC, k*k*in_channels)
  std::vector<Index> cached_in_shape_;
  Index pad_top_ = 0, pad_left_ = 0;
  Tensor cached_pre_;
  bool has_cache_ = false;
};

class MaxPool1DLayer final : public Layer {
 public:
  MaxPool1DLayer(Index window, Index stride);
  Tensor forward(const Tensor& input, bool training, Rng* rng) override;
  Tensor backward(const Tensor& grad_output) override;
  std::string name() const override { return "maxpool1d"; }
  std::unique_ptr<Layer> clone() const override {
    return std::make_unique<MaxPool1DLayer>(*this);
  }

 private:
  Index window_, stride_;
  std::vector<Index> cached_in_shape_;
  std::vector<Index> argmax_;  // flat input index per output element
  bool has_cache_ = false;
};

class FlattenLayer final : public Layer {
 public:
  Tensor forward(const Tensor& input, bool training, Rng* rng) override;
  Tensor backward(const Tensor& grad_output) override;
  std::string name() const override { return "flatten"; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<FlattenLayer>(*this); }

 private:
  std::vector<Index> cached_in_shape_;
  bool has_cache_ = false;
};

class DropoutLayer final : public Layer {
 public:
  explicit DropoutLayer(double rate);
  Tensor forward(const Tensor& input, bool training, Rng* rng) override;
  Tensor backward(const Tensor& grad_output) override;
  std::string name() const override { return "dropout"; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<DropoutLayer>(*this); }

  double rate() const { return rate_; }
  // Test hook: reuse the mask from the last training forward on subsequent
  // training forwards, so finite differences see a fixed function.
  void freeze_mask(bool frozen) { mask_frozen_ = frozen; }

 private:
  double rate_;
  Eigen::VectorXd mask_;  // scale factors from the last training pass
  bool mask_frozen_ = false;
  bool was_training_ = false;
  bool has_cache_ = false;
};

// Consumes (batch, time, features) and emits the final hidden state
// (batch, units). Gradients flow back through all time steps.
class LSTMLayer final : public Layer {
 public:
  LSTMLayer(Index in_features, Index units);
  Tensor forward(const Tensor& input, bool training, Rng* rng) override;
  Tensor backward(const Tensor& grad_output) override;
  LayerParams* params() override { return &params_; }
  const LayerParams* params() const override { return &params_; }
  std::string name() const override { return "lstm"; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<LSTMLayer>(*this); }

  Index fan_in() const override { return in_features_ + units_; }
  Index units() const { return units_; }

 private:
  struct StepCache {
    Eigen::MatrixXd x, h_prev, c_prev;      // (batch, in) / (batch, units)
    Eigen::MatrixXd gi, gf, gg, go, c, tc;  // gate outputs, cell, tanh(cell)
  };
  Index in_features_, units_;
  LayerParams params_;
  std::vector<StepCache> steps_;
  bool has_cache_ = false;
};

}  // namespace creditnn
