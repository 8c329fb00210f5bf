#include "creditnn/model_zoo.hpp"

#include <memory>

#include "creditnn/errors.hpp"
#include "creditnn/layers.hpp"

namespace creditnn {

std::string arch_name(Arch a) {
  switch (a) {
    case Arch::mlp: return "mlp";
    case Arch::cnn: return "cnn";
    case Arch::cnn2d: return "cnn2d";
    case Arch::lstm: return "lstm";
  }
  throw ConfigError("unknown architecture tag");
}

Arch arch_from_name(const std::string& name) {
  for (Arch a : all_architectures())
    if (arch_name(a) == name) return a;
  throw ConfigError("unknown architecture '" + name + "' (expected mlp, cnn, cnn2d or lstm)");
}

std::vector<Arch> all_architectures() { return {Arch::mlp, Arch::cnn, Arch::cnn2d, Arch::lstm}; }

void ModelSpec::validate() const {
  if (input_features <= 0) throw ConfigError("model: input_features must be positive");
  if (n_classes <= 0) throw ConfigError("model: n_classes must be positive");
  const bool sequential = architecture == Arch::cnn2d || architecture == Arch::lstm;
  if (sequential && window != 4)
    throw ConfigError("model: " + arch_name(architecture) + " requires window 4");
  if (!sequential && window != 1)
    throw ConfigError("model: " + arch_name(architecture) + " requires window 1");
  switch (architecture) {
    case Arch::mlp:
      if (hidden_units <= 0 || hidden_layers <= 0)
        throw ConfigError("model: mlp hidden sizes must be positive");
      break;
    case Arch::cnn:
      if (conv_filters1 <= 0 || conv_filters2 <= 0 || conv_kernel <= 0 || conv_stride <= 0 ||
          dense_units1 <= 0 || dense_units2 <= 0)
        throw ConfigError("model: cnn layer sizes must be positive");
      if (input_features < 2 * (conv_kernel - 1) + 1)
        throw DimensionError("model: cnn needs at least " +
                             std::to_string(2 * (conv_kernel - 1) + 1) + " features, got " +
                             std::to_string(input_features));
      break;
    case Arch::cnn2d:
      if (conv_filters1 <= 0 || conv_filters2 <= 0 || conv_kernel <= 0 || conv_stride <= 0 ||
          dense_units1 <= 0 || dense_units2 <= 0)
        throw ConfigError("model: cnn2d layer sizes must be positive");
      if (input_features < conv_kernel)
        throw DimensionError("model: cnn2d needs at least " + std::to_string(conv_kernel) +
                             " features, got " + std::to_string(input_features));
      break;
    case Arch::lstm:
      if (lstm_units <= 0 || dense_units1 <= 0 || dense_units2 <= 0)
        throw ConfigError("model: lstm layer sizes must be positive");
      break;
  }
}

ModelSpec make_mlp(Index input_features, Index n_classes, Index hidden_units,
                   Index hidden_layers) {
  ModelSpec s;
  s.architecture = Arch::mlp;
  s.input_features = input_features;
  s.window = 1;
  s.n_classes = n_classes;
  s.hidden_units = hidden_units;
  s.hidden_layers = hidden_layers;
  s.validate();
  return s;
}

ModelSpec make_cnn(Index input_features, Index n_classes) {
  ModelSpec s;
  s.architecture = Arch::cnn;
  s.input_features = input_features;
  s.window = 1;
  s.n_classes = n_classes;
  s.validate();
  return s;
}

ModelSpec make_cnn2d(Index input_features, Index n_classes) {
  ModelSpec s;
  s.architecture = Arch::cnn2d;
  s.input_features = input_features;
  s.window = 4;
  s.n_classes = n_classes;
  s.validate();
  return s;
}

ModelSpec make_lstm(Index input_features, Index n_classes) {
  ModelSpec s;
  s.architecture = Arch::lstm;
  s.input_features = input_features;
  s.window = 4;
  s.n_classes = n_classes;
  s.validate();
  return s;
}

ModelSpec make_spec(Arch arch, Index input_features, Index n_classes) {
  switch (arch) {
    case Arch::mlp: return make_mlp(input_features, n_classes);
    case Arch::cnn: return make_cnn(input_features, n_classes);
    case Arch::cnn2d: return make_cnn2d(input_features, n_classes);
    case Arch::lstm: return make_lstm(input_features, n_classes);
  }
  throw ConfigError("unknown architecture tag");
}

std::vector<Index> input_shape(const ModelSpec& spec, Index batch) {
  switch (spec.architecture) {
    case Arch::mlp: return {batch, spec.input_features};
    case Arch::cnn: return {batch, spec.input_features, 1};
    case Arch::cnn2d: return {batch, spec.window, spec.input_features, 1};
    case Arch::lstm: return {batch, spec.window, spec.input_features};
  }
  throw ConfigError("unknown architecture tag");
}

namespace {

// Length after one valid convolution.
Index valid_len(Index length, Index kernel, Index stride) {
  return (length - kernel) / stride + 1;
}

void add_dense_head(Network& net, Index in_width, const ModelSpec& spec, double dropout_rate) {
  net.add(std::make_unique<DenseLayer>(in_width, spec.dense_units1, Activation::relu));
  net.add(std::make_unique<DropoutLayer>(dropout_rate));
  net.add(std::make_unique<DenseLayer>(spec.dense_units1, spec.dense_units2, Activation::relu));
  net.add(std::make_unique<DropoutLayer>(dropout_rate));
  net.add(std::make_unique<DenseLayer>(spec.dense_units2, spec.n_classes, Activation::identity));
}

}  // namespace

Network build_network(const ModelSpec& spec, double dropout_rate) {
  spec.validate();
  Network net;
  switch (spec.architecture) {
    case Arch::mlp: {
      Index width = spec.input_features;
      for (Index l = 0; l < spec.hidden_layers; ++l) {
        net.add(std::make_unique<DenseLayer>(width, spec.hidden_units, Activation::relu));
        net.add(std::make_unique<DropoutLayer>(dropout_rate));
        width = spec.hidden_units;
      }
      net.add(std::make_unique<DenseLayer>(width, spec.n_classes, Activation::identity));
      break;
    }
    case Arch::cnn: {
      net.add(std::make_unique<Conv1DLayer>(1, spec.conv_filters1, spec.conv_kernel,
                                            spec.conv_stride, Activation::relu));
      net.add(std::make_unique<Conv1DLayer>(spec.conv_filters1, spec.conv_filters2,
                                            spec.conv_kernel, spec.conv_stride,
                                            Activation::relu));
      net.add(std::make_unique<FlattenLayer>());
      const Index len1 = valid_len(spec.input_features, spec.conv_kernel, spec.conv_stride);
      const Index len2 = valid_len(len1, spec.conv_kernel, spec.conv_stride);
      add_dense_head(net, len2 * spec.conv_filters2, spec, dropout_rate);
      break;
    }
    case Arch::cnn2d: {
      net.add(std::make_unique<Conv2DLayer>(1, spec.conv_filters1, spec.conv_kernel,
                                            spec.conv_stride, Activation::relu));
      net.add(std::make_unique<Conv2DLayer>(spec.conv_filters1, spec.conv_filters2,
                                            spec.conv_kernel, spec.conv_stride,
                                            Activation::relu));
      net.add(std::make_unique<FlattenLayer>());
      // Same-padding at stride 1 keeps the 4 x features grid intact.
      const Index rows = (spec.window + spec.conv_stride - 1) / spec.conv_stride;
      const Index cols = (spec.input_features + spec.conv_stride - 1) / spec.conv_stride;
      add_dense_head(net, rows * cols * spec.conv_filters2, spec, dropout_rate);
      break;
    }
    case Arch::lstm: {
      net.add(std::make_unique<LSTMLayer>(spec.input_features, spec.lstm_units));
      add_dense_head(net, spec.lstm_units, spec, dropout_rate);
      break;
    }
  }
  return net;
}

Network build_network(const ModelSpec& spec) {
  return build_network(spec, spec.train.dropout_rate);
}

Index param_count(const ModelSpec& spec) {
  spec.validate();
  auto dense = [](Index in, Index out) { return in * out + out; };
  const Index head = [&] {
    switch (spec.architecture) {
      case Arch::cnn: {
        const Index len1 = valid_len(spec.input_features, spec.conv_kernel, spec.conv_stride);
        const Index len2 = valid_len(len1, spec.conv_kernel, spec.conv_stride);
        return dense(len2 * spec.conv_filters2, spec.dense_units1);
      }
      case Arch::cnn2d: {
        const Index rows = (spec.window + spec.conv_stride - 1) / spec.conv_stride;
        const Index cols = (spec.input_features + spec.conv_stride - 1) / spec.conv_stride;
        return dense(rows * cols * spec.conv_filters2, spec.dense_units1);
      }
      case Arch::lstm: return dense(spec.lstm_units, spec.dense_units1);
      default: return Index{0};
    }
  }();
  switch (spec.architecture) {
    case Arch::mlp: {
      Index n = dense(spec.input_features, spec.hidden_units);
      for (Index l = 1; l < spec.hidden_layers; ++l) n += dense(spec.hidden_units, spec.hidden_units);
      return n + dense(spec.hidden_units, spec.n_classes);
    }
    case Arch::cnn:
      return spec.conv_kernel * 1 * spec.conv_filters1 + spec.conv_filters1 +
             spec.conv_kernel * spec.conv_filters1 * spec.conv_filters2 + spec.conv_filters2 +
             head + dense(spec.dense_units1, spec.dense_units2) +
             dense(spec.dense_units2, spec.n_classes);
    case Arch::cnn2d:
      return spec.conv_kernel * spec.conv_kernel * 1 * spec.conv_filters1 + spec.conv_filters1 +
             spec.conv_kernel * spec.conv_kernel * spec.conv_filters1 * spec.conv_filters2 +
             spec.conv_filters2 + head + dense(spec.dense_units1, spec.dense_units2) +
             dense(spec.dense_units2, spec.n_classes);
    case Arch::lstm:
      return 4 * (spec.lstm_units * (spec.input_features + spec.lstm_units) + spec.lstm_units) +
             head + dense(spec.dense_units1, spec.dense_units2) +
             dense(spec.dense_units2, spec.n_classes);
  }
  throw ConfigError("unknown architecture tag");
}

Tensor dry_run(const ModelSpec& spec) {
  Network net = build_network(spec, 0.0);
  Tensor zero = Tensor::zeros(input_shape(spec, 1));
  Tensor out = net.forward(zero, false, nullptr);
  if (out.rank() != 2 || out.dim(0) != 1 || out.dim(1) != spec.n_classes)
    throw DimensionError("model: dry run produced " + shape_str(out.shape) + ", expected (1," +
                         std::to_string(spec.n_classes) + ")");
  return out;
}

std::string describe(const ModelSpec& spec) {
  switch (spec.architecture) {
    case Arch::mlp:
      return "mlp-" + std::to_string(spec.hidden_units) + "x" + std::to_string(spec.hidden_layers);
    case Arch::cnn:
      return "cnn-" + std::to_string(spec.conv_filters1) + "-" + std::to_string(spec.conv_filters2);
    case Arch::cnn2d:
      return "cnn2d-" + std::to_string(spec.conv_filters1) + "-" +
             std::to_string(spec.conv_filters2);
    case Arch::lstm: return "lstm-" + std::to_string(spec.lstm_units);
  }
  throw ConfigError("unknown architecture tag");
}

}  // namespace creditnn
