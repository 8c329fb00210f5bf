#include "creditnn/layers.hpp"

#include <cmath>

#include "creditnn/errors.hpp"

namespace creditnn {

namespace {

void apply_activation(Eigen::VectorXd& v, Activation act) {
  if (act == Activation::relu) v = v.cwiseMax(0.0);
}

// Multiplies grad by act'(pre) in place.
void activation_backward(Eigen::VectorXd& grad, const Eigen::VectorXd& pre, Activation act) {
  if (act == Activation::relu) {
    for (Index i = 0; i < grad.size(); ++i)
      if (pre[i] <= 0.0) grad[i] = 0.0;
  }
}

void require_rank(const Tensor& t, int rank, const char* what) {
  if (t.rank() != rank)
    throw DimensionError(std::string(what) + ": expected rank " + std::to_string(rank) +
                         " input, got shape " + shape_str(t.shape));
}

Index conv_out_len(Index length, Index kernel, Index stride) {
  if (length < kernel)
    throw DimensionError("conv window of " + std::to_string(kernel) + " exceeds input length " +
                         std::to_string(length));
  return (length - kernel) / stride + 1;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

LayerParams LayerParams::zeros(std::vector<Index> w_shape, std::vector<Index> b_shape) {
  LayerParams p;
  p.weights = Tensor::zeros(w_shape);
  p.biases = Tensor::zeros(b_shape);
  p.weight_grad = Tensor::zeros(std::move(w_shape));
  p.bias_grad = Tensor::zeros(std::move(b_shape));
  return p;
}

void LayerParams::zero_grads() {
  weight_grad.data.setZero();
  bias_grad.data.setZero();
}

// --- Dense -------------------------------------------------------------------

Tensor dense_forward(const LayerParams& p, const Tensor& input, Activation act) {
  require_rank(input, 2, "dense");
  const Index batch = input.dim(0), in = input.dim(1);
  const Index out = p.weights.dim(1);
  if (p.weights.dim(0) != in)
    throw DimensionError("dense: input width " + std::to_string(in) + " vs weights " +
                         shape_str(p.weights.shape));
  Tensor y = Tensor::zeros({batch, out});
  y.mat(batch, out).noalias() = input.mat(batch, in) * p.weights.mat(in, out);
  y.mat(batch, out).rowwise() += Eigen::RowVectorXd::Map(p.biases.data.data(), out);
  apply_activation(y.data, act);
  return y;
}

DenseLayer::DenseLayer(Index in, Index out, Activation act)
    : in_(in), out_(out), act_(act), params_(LayerParams::zeros({in, out}, {out})) {
  if (in <= 0 || out <= 0) throw DimensionError("dense: dimensions must be positive");
}

Tensor DenseLayer::forward(const Tensor& input, bool, Rng*) {
  require_rank(input, 2, "dense");
  const Index batch = input.dim(0);
  Tensor pre = Tensor::zeros({batch, out_});
  pre.mat(batch, out_).noalias() = input.mat(batch, in_) * params_.weights.mat(in_, out_);
  pre.mat(batch, out_).rowwise() += Eigen::RowVectorXd::Map(params_.biases.data.data(), out_);
  cached_input_ = input;
  cached_pre_ = pre;
  has_cache_ = true;
  apply_activation(pre.data, act_);
  return pre;
}

Tensor DenseLayer::backward(const Tensor& grad_output) {
  if (!has_cache_) throw StateError("dense: backward before forward");
  const Index batch = cached_input_.dim(0);
  if (grad_output.rank() != 2 || grad_output.dim(0) != batch || grad_output.dim(1) != out_)
    throw DimensionError("dense: gradient shape " + shape_str(grad_output.shape) + " vs output (" +
                         std::to_string(batch) + "," + std::to_string(out_) + ")");
  Tensor dpre = grad_output;
  activation_backward(dpre.data, cached_pre_.data, act_);
  auto dpre_m = dpre.mat(batch, out_);
  params_.weight_grad.mat(in_, out_).noalias() +=
      cached_input_.mat(batch, in_).transpose() * dpre_m;
  params_.bias_grad.data += dpre_m.colwise().sum().transpose();
  Tensor dx = Tensor::zeros({batch, in_});
  dx.mat(batch, in_).noalias() = dpre_m * params_.weights.mat(in_, out_).transpose();
  return dx;
}

// --- Conv1D ------------------------------------------------------------------

namespace {

// Gathers sliding windows of (batch, length, channels) into a
// (batch*out_len, kernel*channels) matrix whose column order matches the
// row-major flattening of conv1d weights (kernel, channels, filters).
Eigen::MatrixXd im2col_1d(const Tensor& x, Index kernel, Index stride, Index out_len) {
  const Index batch = x.dim(0), length = x.dim(1), channels = x.dim(2);
  Eigen::MatrixXd patches(batch * out_len, kernel * channels);
  const double* src = x.data.data();
  for (Index b = 0; b < batch; ++b) {
    const double* plane = src + b * length * channels;
    for (Index o = 0; o < out_len; ++o) {
      for (Index k = 0; k < kernel; ++k) {
        const double* at = plane + (o * stride + k) * channels;
        for (Index c = 0; c < channels; ++c) patches(b * out_len + o, k * channels + c) = at[c];
      }
    }
  }
  return patches;
}

}  // namespace

Tensor conv1d_forward(const LayerParams& p, const Tensor& input, Index stride, Activation act) {
  require_rank(input, 3, "conv1d");
  if (stride <= 0) throw ConfigError("conv1d: stride must be positive");
  const Index batch = input.dim(0), length = input.dim(1), channels = input.dim(2);
  const Index kernel = p.weights.dim(0), filters = p.weights.dim(2);
  if (p.weights.dim(1) != channels)
    throw DimensionError("conv1d: input has " + std::to_string(channels) +
                         " channels but weights expect " + std::to_string(p.weights.dim(1)));
  const Index out_len = conv_out_len(length, kernel, stride);
  Eigen::MatrixXd patches = im2col_1d(input, kernel, stride, out_len);
  Tensor y = Tensor::zeros({batch, out_len, filters});
  y.mat(batch * out_len, filters).noalias() =
      patches * p.weights.mat(kernel * channels, filters);
  y.mat(batch * out_len, filters).rowwise() +=
      Eigen::RowVectorXd::Map(p.biases.data.data(), filters);
  apply_activation(y.data, act);
  return y;
}

Conv1DLayer::Conv1DLayer(Index in_channels, Index filters, Index kernel, Index stride,
                         Activation act)
    : in_channels_(in_channels),
      filters_(filters),
      kernel_(kernel),
      stride_(stride),
      act_(act),
      params_(LayerParams::zeros({kernel, in_channels, filters}, {filters})) {
  if (in_channels <= 0 || filters <= 0 || kernel <= 0 || stride <= 0)
    throw DimensionError("conv1d: dimensions must be positive");
}

Tensor Conv1DLayer::forward(const Tensor& input, bool, Rng*) {
  require_rank(input, 3, "conv1d");
  if (input.dim(2) != in_channels_)
    throw DimensionError("conv1d: input has " + std::to_string(input.dim(2)) +
                         " channels, layer expects " + std::to_string(in_channels_));
  const Index batch = input.dim(0), length = input.dim(1);
  const Index out_len = conv_out_len(length, kernel_, stride_);
  cached_patches_ = im2col_1d(input, kernel_, stride_, out_len);
  cached_in_shape_ = input.shape;
  Tensor pre = Tensor::zeros({batch, out_len, filters_});
  pre.mat(batch * out_len, filters_).noalias() =
      cached_patches_ * params_.weights.mat(kernel_ * in_channels_, filters_);
  pre.mat(batch * out_len, filters_).rowwise() +=
      Eigen::RowVectorXd::Map(params_.biases.data.data(), filters_);
  cached_pre_ = pre;
  has_cache_ = true;
  apply_activation(pre.data, act_);
  return pre;
}

Tensor Conv1DLayer::backward(const Tensor& grad_output) {
  if (!has_cache_) throw StateError("conv1d: backward before forward");
  const Index batch = cached_in_shape_[0], length = cached_in_shape_[1];
  const Index out_len = (length - kernel_) / stride_ + 1;
  if (grad_output.shape != std::vector<Index>{batch, out_len, filters_})
    throw DimensionError("conv1d: gradient shape " + shape_str(grad_output.shape));
  Tensor dpre = grad_output;
  activation_backward(dpre.data, cached_pre_.data, act_);
  auto dpre_m = dpre.mat(batch * out_len, filters_);
  params_.weight_grad.mat(kernel_ * in_channels_, filters_).noalias() +=
      cached_patches_.transpose() * dpre_m;
  params_.bias_grad.data += dpre_m.colwise().sum().transpose();
  Eigen::MatrixXd dpatches =
      dpre_m * params_.weights.mat(kernel_ * in_channels_, filters_).transpose();
  Tensor dx = Tensor::zeros(cached_in_shape_);
  double* dst = dx.data.data();
  for (Index b = 0; b < batch; ++b) {
    double* plane = dst + b * length * in_channels_;
    for (Index o = 0; o < out_len; ++o) {
      for (Index k = 0; k < kernel_; ++k) {
        double* at = plane + (o * stride_ + k) * in_channels_;
        for (Index c = 0; c < in_channels_; ++c)
          at[c] += dpatches(b * out_len + o, k * in_channels_ + c);
      }
    }
  }
  return dx;
}

// --- Conv2D ------------------------------------------------------------------

namespace {

struct Pad2D {
  Index out_rows, out_cols, top, left;
};

// Same-convolution geometry: output spatial dims are ceil(dim/stride) and any
// odd padding puts the extra cell on the bottom/right.
Pad2D same_pad(Index rows, Index cols, Index kernel, Index stride) {
  Pad2D g;
  g.out_rows = (rows + stride - 1) / stride;
  g.out_cols = (cols + stride - 1) / stride;
  const Index pad_r = std::max<Index>((g.out_rows - 1) * stride + kernel - rows, 0);
  const Index pad_c = std::max<Index>((g.out_cols - 1) * stride + kernel - cols, 0);
  g.top = pad_r / 2;
  g.left = pad_c / 2;
  return g;
}

Eigen::MatrixXd im2col_2d(const Tensor& x, Index kernel, Index stride, const Pad2D& g) {
  const Index batch = x.dim(0), rows = x.dim(1), cols = x.dim(2), channels = x.dim(3);
  Eigen::MatrixXd patches =
      Eigen::MatrixXd::Zero(batch * g.out_rows * g.out_cols, kernel * kernel * channels);
  const double* src = x.data.data();
  for (Index b = 0; b < batch; ++b) {
    const double* vol = src + b * rows * cols * channels;
    for (Index orow = 0; orow < g.out_rows; ++orow) {
      for (Index ocol = 0; ocol < g.out_cols; ++ocol) {
        const Index prow = (b * g.out_rows + orow) * g.out_cols + ocol;
        for (Index kr = 0; kr < kernel; ++kr) {
          const Index r = orow * stride - g.top + kr;
          if (r < 0 || r >= rows) continue;
          for (Index kc = 0; kc < kernel; ++kc) {
            const Index c = ocol * stride - g.left + kc;
            if (c < 0 || c >= cols) continue;
            const double* at = vol + (r * cols + c) * channels;
            const Index col0 = (kr * kernel + kc) * channels;
            for (Index ch = 0; ch < channels; ++ch) patches(prow, col0 + ch) = at[ch];
          }
        }
      }
    }
  }
  return patches;
}

}  // namespace

Tensor conv2d_forward(const LayerParams& p, const Tensor& input, Index stride, Activation act) {
  require_rank(input, 4, "conv2d");
  if (stride <= 0) throw ConfigError("conv2d: stride must be positive");
  const Index batch = input.dim(0), rows = input.dim(1), cols = input.dim(2),
              channels = input.dim(3);
  const Index kernel = p.weights.dim(0), filters = p.weights.dim(3);
  if (p.weights.dim(2) != channels)
    throw DimensionError("conv2d: input has " + std::to_string(channels) +
                         " channels but weights expect " + std::to_string(p.weights.dim(2)));
  const Pad2D g = same_pad(rows, cols, kernel, stride);
  Eigen::MatrixXd patches = im2col_2d(input, kernel, stride, g);
  Tensor y = Tensor::zeros({batch, g.out_rows, g.out_cols, filters});
  y.mat(batch * g.out_rows * g.out_cols, filters).noalias() =
      patches * p.weights.mat(kernel * kernel * channels, filters);
  y.mat(batch * g.out_rows * g.out_cols, filters).rowwise() +=
      Eigen::RowVectorXd::Map(p.biases.data.data(), filters);
  apply_activation(y.data, act);
  return y;
}

Conv2DLayer::Conv2DLayer(Index in_channels, Index filters, Index kernel, Index stride,
                         Activation act)
    : in_channels_(in_channels),
      filters_(filters),
      kernel_(kernel),
      stride_(stride),
      act_(act),
      params_(LayerParams::zeros({kernel, kernel, in_channels, filters}, {filters})) {
  if (in_channels <= 0 || filters <= 0 || kernel <= 0 || stride <= 0)
    throw DimensionError("conv2d: dimensions must be positive");
}

Tensor Conv2DLayer::forward(const Tensor& input, bool, Rng*) {
  require_rank(input, 4, "conv2d");
  if (input.dim(3) != in_channels_)
    throw DimensionError("conv2d: input has " + std::to_string(input.dim(3)) +
                         " channels, layer expects " + std::to_string(in_channels_));
  const Index batch = input.dim(0), rows = input.dim(1), cols = input.dim(2);
  const Pad2D g = same_pad(rows, cols, kernel_, stride_);
  cached_patches_ = im2col_2d(input, kernel_, stride_, g);
  cached_in_shape_ = input.shape;
  pad_top_ = g.top;
  pad_left_ = g.left;
  Tensor pre = Tensor::zeros({batch, g.out_rows, g.out_cols, filters_});
  pre.mat(batch * g.out_rows * g.out_cols, filters_).noalias() =
      cached_patches_ * params_.weights.mat(kernel_ * kernel_ * in_channels_, filters_);
  pre.mat(batch * g.out_rows * g.out_cols, filters_).rowwise() +=
      Eigen::RowVectorXd::Map(params_.biases.data.data(), filters_);
  cached_pre_ = pre;
  has_cache_ = true;
  apply_activation(pre.data, act_);
  return pre;
}

Tensor Conv2DLayer::backward(const Tensor& grad_output) {
  if (!has_cache_) throw StateError("conv2d: backward before forward");
  const Index batch = cached_in_shape_[0], rows = cached_in_shape_[1],
              cols = cached_in_shape_[2];
  const Index out_rows = (rows + stride_ - 1) / stride_;
  const Index out_cols = (cols + stride_ - 1) / stride_;
  if (grad_output.shape != std::vector<Index>{batch, out_rows, out_cols, filters_})
    throw DimensionError("conv2d: gradient shape " + shape_str(grad_output.shape));
  Tensor dpre = grad_output;
  activation_backward(dpre.data, cached_pre_.data, act_);
  auto dpre_m = dpre.mat(batch * out_rows * out_cols, filters_);
  params_.weight_grad.mat(kernel_ * kernel_ * in_channels_, filters_).noalias() +=
      cached_patches_.transpose() * dpre_m;
  params_.bias_grad.data += dpre_m.colwise().sum().transpose();
  Eigen::MatrixXd dpatches =
      dpre_m * params_.weights.mat(kernel_ * kernel_ * in_channels_, filters_).transpose();
  Tensor dx = Tensor::zeros(cached_in_shape_);
  double* dst = dx.data.data();
  for (Index b = 0; b < batch; ++b) {
    double* vol = dst + b * rows * cols * in_channels_;
    for (Index orow = 0; orow < out_rows; ++orow) {
      for (Index ocol = 0; ocol < out_cols; ++ocol) {
        const Index prow = (b * out_rows + orow) * out_cols + ocol;
        for (Index kr = 0; kr < kernel_; ++kr) {
          const Index r = orow * stride_ - pad_top_ + kr;
          if (r < 0 || r >= rows) continue;
          for (Index kc = 0; kc < kernel_; ++kc) {
            const Index c = ocol * stride_ - pad_left_ + kc;
            if (c < 0 || c >= cols) continue;
            double* at = vol + (r * cols + c) * in_channels_;
            const Index col0 = (kr * kernel_ + kc) * in_channels_;
            for (Index ch = 0; ch < in_channels_; ++ch) at[ch] += dpatches(prow, col0 + ch);
          }
        }
      }
    }
  }
  return dx;
}

// --- MaxPool1D ---------------------------------------------------------------

Tensor maxpool_forward(const Tensor& input, Index window, Index stride) {
  require_rank(input, 3, "maxpool1d");
  if (window <= 0 || stride <= 0) throw ConfigError("maxpool1d: window/stride must be positive");
  const Index batch = input.dim(0), length = input.dim(1), channels = input.dim(2);
  if (length < window)
    throw DimensionError("maxpool1d: window " + std::to_string(window) + " exceeds length " +
                         std::to_string(length));
  const Index out_len = (length - window) / stride + 1;
  Tensor y = Tensor::zeros({batch, out_len, channels});
  for (Index b = 0; b < batch; ++b)
    for (Index o = 0; o < out_len; ++o)
      for (Index c = 0; c < channels; ++c) {
        double best = input(b, o * stride, c);
        for (Index k = 1; k < window; ++k) {
          const double v = input(b, o * stride + k, c);
          if (v > best) best = v;
        }
        y(b, o, c) = best;
      }
  return y;
}

MaxPool1DLayer::MaxPool1DLayer(Index window, Index stride) : window_(window), stride_(stride) {
  if (window <= 0 || stride <= 0) throw ConfigError("maxpool1d: window/stride must be positive");
}

Tensor MaxPool1DLayer::forward(const Tensor& input, bool, Rng*) {
  require_rank(input, 3, "maxpool1d");
  const Index batch = input.dim(0), length = input.dim(1), channels = input.dim(2);
  if (length < window_)
    throw DimensionError("maxpool1d: window " + std::to_string(window_) + " exceeds length " +
                         std::to_string(length));
  const Index out_len = (length - window_) / stride_ + 1;
  Tensor y = Tensor::zeros({batch, out_len, channels});
  cached_in_shape_ = input.shape;
  argmax_.assign(static_cast<std::size_t>(batch * out_len * channels), 0);
  for (Index b = 0; b < batch; ++b)
    for (Index o = 0; o < out_len; ++o)
      for (Index c = 0; c < channels; ++c) {
        Index best_pos = o * stride_;
        double best = input(b, best_pos, c);
        for (Index k = 1; k < window_; ++k) {
          const double v = input(b, o * stride_ + k, c);
          if (v > best) {  // strict: ties keep the first position
            best = v;
            best_pos = o * stride_ + k;
          }
        }
        y(b, o, c) = best;
        argmax_[static_cast<std::size_t>((b * out_len + o) * channels + c)] =
            (b * length + best_pos) * channels + c;
      }
  has_cache_ = true;
  return y;
}

Tensor MaxPool1DLayer::backward(const Tensor& grad_output) {
  if (!has_cache_) throw StateError("maxpool1d: backward before forward");
  const Index batch = cached_in_shape_[0], length = cached_in_shape_[1],
              channels = cached_in_shape_[2];
  const Index out_len = (length - window_) / stride_ + 1;
  if (grad_output.shape != std::vector<Index>{batch, out_len, channels})
    throw DimensionError("maxpool1d: gradient shape " + shape_str(grad_output.shape));
  Tensor dx = Tensor::zeros(cached_in_shape_);
  for (std::size_t i = 0; i < argmax_.size(); ++i)
    dx.data[argmax_[i]] += grad_output.data[static_cast<Index>(i)];
  return dx;
}

// --- Flatten -----------------------------------------------------------------

Tensor FlattenLayer::forward(const Tensor& input, bool, Rng*) {
  if (input.rank() < 1) throw DimensionError("flatten: empty input");
  cached_in_shape_ = input.shape;
  has_cache_ = true;
  return Tensor({input.dim(0), input.trailing(1)}, input.data);
}

Tensor FlattenLayer::backward(const Tensor& grad_output) {
  if (!has_cache_) throw StateError("flatten: backward before forward");
  if (grad_output.size() != shape_product(cached_in_shape_))
    throw DimensionError("flatten: gradient shape " + shape_str(grad_output.shape));
  return Tensor(cached_in_shape_, grad_output.data);
}

// --- Dropout -----------------------------------------------------------------

Tensor dropout_apply(const Tensor& input, double rate, bool training, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0)
    throw ConfigError("dropout: rate must be in [0,1), got " + std::to_string(rate));
  if (!training || rate == 0.0) return input;
  Tensor y = input;
  const double scale = 1.0 / (1.0 - rate);
  for (Index i = 0; i < y.size(); ++i) y.data[i] = rng.uniform() < rate ? 0.0 : y.data[i] * scale;
  return y;
}

DropoutLayer::DropoutLayer(double rate) : rate_(rate) {
  if (rate < 0.0 || rate >= 1.0)
    throw ConfigError("dropout: rate must be in [0,1), got " + std::to_string(rate));
}

Tensor DropoutLayer::forward(const Tensor& input, bool training, Rng* rng) {
  was_training_ = training && rate_ > 0.0;
  has_cache_ = true;
  if (!was_training_) return input;
  if (!(mask_frozen_ && mask_.size() == input.size())) {
    if (rng == nullptr) throw StateError("dropout: training forward needs an rng");
    const double scale = 1.0 / (1.0 - rate_);
    mask_.resize(input.size());
    for (Index i = 0; i < mask_.size(); ++i) mask_[i] = rng->uniform() < rate_ ? 0.0 : scale;
  }
  Tensor y = input;
  y.data.array() *= mask_.array();
  return y;
}

Tensor DropoutLayer::backward(const Tensor& grad_output) {
  if (!has_cache_) throw StateError("dropout: backward before forward");
  if (!was_training_) return grad_output;
  if (grad_output.size() != mask_.size())
    throw DimensionError("dropout: gradient shape " + shape_str(grad_output.shape));
  Tensor dx = grad_output;
  dx.data.array() *= mask_.array();
  return dx;
}

// --- LSTM --------------------------------------------------------------------

std::pair<Tensor, Tensor> lstm_step(const LayerParams& p, const Tensor& x_t,
                                    const Tensor& h_prev, const Tensor& c_prev) {
  require_rank(x_t, 2, "lstm");
  require_rank(h_prev, 2, "lstm");
  require_rank(c_prev, 2, "lstm");
  const Index batch = x_t.dim(0), in = x_t.dim(1);
  const Index units = h_prev.dim(1);
  if (h_prev.dim(0) != batch || c_prev.dim(0) != batch || c_prev.dim(1) != units)
    throw DimensionError("lstm: mismatched state shapes");
  if (p.weights.dim(0) != in + units || p.weights.dim(1) != 4 * units)
    throw DimensionError("lstm: weights " + shape_str(p.weights.shape) + " vs expected (" +
                         std::to_string(in + units) + "," + std::to_string(4 * units) + ")");
  Eigen::MatrixXd xh(batch, in + units);
  xh.leftCols(in) = x_t.mat(batch, in);
  xh.rightCols(units) = h_prev.mat(batch, units);
  Eigen::MatrixXd z = xh * p.weights.mat(in + units, 4 * units);
  z.rowwise() += Eigen::RowVectorXd::Map(p.biases.data.data(), 4 * units);
  Tensor h = Tensor::zeros({batch, units});
  Tensor c = Tensor::zeros({batch, units});
  for (Index b = 0; b < batch; ++b)
    for (Index u = 0; u < units; ++u) {
      const double gi = sigmoid(z(b, u));
      const double gf = sigmoid(z(b, units + u));
      const double gg = std::tanh(z(b, 2 * units + u));
      const double go = sigmoid(z(b, 3 * units + u));
      const double cc = gf * c_prev(b, u) + gi * gg;
      c(b, u) = cc;
      h(b, u) = go * std::tanh(cc);
    }
  return {std::move(h), std::move(c)};
}

LSTMLayer::LSTMLayer(Index in_features, Index units)
    : in_features_(in_features),
      units_(units),
      params_(LayerParams::zeros({in_features + units, 4 * units}, {4 * units})) {
  if (in_features <= 0 || units <= 0) throw DimensionError("lstm: dimensions must be positive");
}

Tensor LSTMLayer::forward(const Tensor& input, bool, Rng*) {
  require_rank(input, 3, "lstm");
  if (input.dim(2) != in_features_)
    throw DimensionError("lstm: input has " + std::to_string(input.dim(2)) +
                         " features, layer expects " + std::to_string(in_features_));
  const Index batch = input.dim(0), time = input.dim(1);
  steps_.clear();
  steps_.reserve(static_cast<std::size_t>(time));
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(batch, units_);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(batch, units_);
  auto w = params_.weights.mat(in_features_ + units_, 4 * units_);
  const auto bias = Eigen::RowVectorXd::Map(params_.biases.data.data(), 4 * units_);
  for (Index t = 0; t < time; ++t) {
    StepCache sc;
    sc.x.resize(batch, in_features_);
    for (Index b = 0; b < batch; ++b)
      for (Index f = 0; f < in_features_; ++f) sc.x(b, f) = input(b, t, f);
    sc.h_prev = h;
    sc.c_prev = c;
    Eigen::MatrixXd xh(batch, in_features_ + units_);
    xh.leftCols(in_features_) = sc.x;
    xh.rightCols(units_) = h;
    Eigen::MatrixXd z = xh * w;
    z.rowwise() += bias;
    sc.gi = z.leftCols(units_).unaryExpr([](double v) { return sigmoid(v); });
    sc.gf = z.middleCols(units_, units_).unaryExpr([](double v) { return sigmoid(v); });
    sc.gg = z.middleCols(2 * units_, units_).array().tanh();
    sc.go = z.rightCols(units_).unaryExpr([](double v) { return sigmoid(v); });
    c = sc.gf.cwiseProduct(sc.c_prev) + sc.gi.cwiseProduct(sc.gg);
    sc.c = c;
    sc.tc = c.array().tanh();
    h = sc.go.cwiseProduct(sc.tc);
    steps_.push_back(std::move(sc));
  }
  has_cache_ = true;
  Tensor out = Tensor::zeros({batch, units_});
  out.mat(batch, units_) = h;
  return out;
}

Tensor LSTMLayer::backward(const Tensor& grad_output) {
  if (!has_cache_ || steps_.empty()) throw StateError("lstm: backward before forward");
  const Index batch = steps_.front().x.rows();
  if (grad_output.rank() != 2 || grad_output.dim(0) != batch || grad_output.dim(1) != units_)
    throw DimensionError("lstm: gradient shape " + shape_str(grad_output.shape));
  const Index time = static_cast<Index>(steps_.size());
  auto w = params_.weights.mat(in_features_ + units_, 4 * units_);
  auto wgrad = params_.weight_grad.mat(in_features_ + units_, 4 * units_);
  Eigen::MatrixXd dh = grad_output.mat(batch, units_);
  Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(batch, units_);
  Tensor dx = Tensor::zeros({batch, time, in_features_});
  for (Index t = time - 1; t >= 0; --t) {
    const StepCache& sc = steps_[static_cast<std::size_t>(t)];
    Eigen::MatrixXd dgo = dh.cwiseProduct(sc.tc);
    dc += dh.cwiseProduct(sc.go).cwiseProduct(
        (1.0 - sc.tc.array().square()).matrix());
    Eigen::MatrixXd dgi = dc.cwiseProduct(sc.gg);
    Eigen::MatrixXd dgg = dc.cwiseProduct(sc.gi);
    Eigen::MatrixXd dgf = dc.cwiseProduct(sc.c_prev);
    Eigen::MatrixXd dc_prev = dc.cwiseProduct(sc.gf);
    Eigen::MatrixXd dz(batch, 4 * units_);
    dz.leftCols(units_) =
        dgi.cwiseProduct(sc.gi.cwiseProduct((1.0 - sc.gi.array()).matrix()));
    dz.middleCols(units_, units_) =
        dgf.cwiseProduct(sc.gf.cwiseProduct((1.0 - sc.gf.array()).matrix()));
    dz.middleCols(2 * units_, units_) =
        dgg.cwiseProduct((1.0 - sc.gg.array().square()).matrix());
    dz.rightCols(units_) =
        dgo.cwiseProduct(sc.go.cwiseProduct((1.0 - sc.go.array()).matrix()));
    Eigen::MatrixXd xh(batch, in_features_ + units_);
    xh.leftCols(in_features_) = sc.x;
    xh.rightCols(units_) = sc.h_prev;
    wgrad.noalias() += xh.transpose() * dz;
    params_.bias_grad.data += dz.colwise().sum().transpose();
    Eigen::MatrixXd dxh = dz * w.transpose();
    for (Index b = 0; b < batch; ++b)
      for (Index f = 0; f < in_features_; ++f) dx(b, t, f) = dxh(b, f);
    dh = dxh.rightCols(units_);
    dc = dc_prev;
  }
  return dx;
}

}  // namespace creditnn
