#pragma once

#include <cstdint>
#include <vector>

#include "creditnn/network.hpp"
#include "creditnn/tensor.hpp"

namespace creditnn {

// Hyperparameters of one SGD run. Defaults: lr 0.05, dropout 0.5 on hidden
// dense layers, a 10% internal monitor split for early stopping.
struct TrainConfig {
  double learning_rate = 0.05;
  Index max_epochs = 200;  // 0 = return the initialized, untrained model
  Index batch_size = 32;
  double dropout_rate = 0.5;
  Index early_stop_patience = 6;  // 0 disables early stopping
  double early_stop_fraction = 0.1;
  std::uint64_t rng_seed = 0;

  void validate() const;  // throws ConfigError naming the bad field
};

// Classification data: inputs stacked along dim 0, one class index per row.
struct Dataset {
  Tensor inputs;
  std::vector<int> labels;

  Index size() const { return inputs.rank() == 0 ? 0 : inputs.dim(0); }
  void validate(Index n_classes) const;
  Dataset subset(const std::vector<Index>& rows) const;
};

struct TrainHistory {
  std::vector<double> train_loss;    // mean mini-batch loss per epoch
  std::vector<double> monitor_loss;  // per epoch; empty without a monitor split
  std::vector<Index> monitor_indices;
  Index best_epoch = 0;  // 1-based; 0 = no monitor tracking
  Index epochs_run = 0;
  bool stopped_early = false;
};

// Copies the selected dim-0 slices into a new tensor of shape
// (rows.size(), trailing dims...).
Tensor gather_rows(const Tensor& t, const std::vector<Index>& rows);

// Argmax class per row of the final network output; ties take the lowest
// class index.
std::vector<int> predict(Network& net, const Tensor& inputs);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& labels);

}  // namespace creditnn
