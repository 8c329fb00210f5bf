#pragma once

#include <vector>

#include "creditnn/tensor.hpp"

namespace creditnn {

struct LossValue {
  double value = 0.0;  // mean cross-entropy over the batch
  Tensor probs;        // (batch, classes) softmax probabilities
};

// Softmax cross-entropy of logits (batch, classes) against integer labels.
// The softmax subtracts the per-row maximum before exponentiating.
LossValue softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels);

// Gradient of the mean loss wrt logits: (probs - onehot) / batch.
Tensor softmax_cross_entropy_grad(const LossValue& loss, const std::vector<int>& labels);

// Row-wise softmax of logits, same shape back.
Tensor softmax(const Tensor& logits);

}  // namespace creditnn
