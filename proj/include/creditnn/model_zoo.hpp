#pragma once

#include <string>
#include <vector>

#include "creditnn/network.hpp"
#include "creditnn/train.hpp"

namespace creditnn {

enum class Arch { mlp, cnn, cnn2d, lstm };

std::string arch_name(Arch a);
Arch arch_from_name(const std::string& name);  // ConfigError on unknown name
std::vector<Arch> all_architectures();

// Declarative description of one architecture. MLP and CNN read one quarter
// (window 1); CNN2D and LSTM read four consecutive quarters (window 4).
struct ModelSpec {
  Arch architecture = Arch::mlp;
  Index input_features = 0;
  Index window = 1;
  Index n_classes = 0;

  Index hidden_units = 41;  // mlp
  Index hidden_layers = 3;  // mlp

  Index conv_filters1 = 64;  // cnn / cnn2d
  Index conv_filters2 = 32;
  Index conv_kernel = 3;
  Index conv_stride = 1;

  Index lstm_units = 32;  // lstm

  Index dense_units1 = 128;  // cnn / cnn2d / lstm head
  Index dense_units2 = 128;

  TrainConfig train;

  void validate() const;
};

ModelSpec make_mlp(Index input_features, Index n_classes, Index hidden_units = 41,
                   Index hidden_layers = 3);
ModelSpec make_cnn(Index input_features, Index n_classes);
ModelSpec make_cnn2d(Index input_features, Index n_classes);
ModelSpec make_lstm(Index input_features, Index n_classes);
ModelSpec make_spec(Arch arch, Index input_features, Index n_classes);

// Expected input tensor shape for a batch of the given size.
std::vector<Index> input_shape(const ModelSpec& spec, Index batch);

// Instantiates the layer stack; parameters are zero until init_params.
Network build_network(const ModelSpec& spec, double dropout_rate);
Network build_network(const ModelSpec& spec);  // uses spec.train.dropout_rate

// Closed-form trainable parameter count.
Index param_count(const ModelSpec& spec);

// Pushes a zero batch of one sample through a freshly built network and
// returns the output; proves the declared shapes compose.
Tensor dry_run(const ModelSpec& spec);

std::string describe(const ModelSpec& spec);  // e.g. "mlp-41x3", "lstm-32"

}  // namespace creditnn
