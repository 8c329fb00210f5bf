#include "creditnn/loss.hpp"

#include <cmath>

#include "creditnn/errors.hpp"

namespace creditnn {

Tensor softmax(const Tensor& logits) {
  if (logits.rank() != 2)
    throw DimensionError("softmax: expected rank 2 logits, got " + shape_str(logits.shape));
  const Index batch = logits.dim(0), classes = logits.dim(1);
  Tensor p = logits;
  for (Index b = 0; b < batch; ++b) {
    double mx = p(b, 0);
    for (Index k = 1; k < classes; ++k) mx = std::max(mx, p(b, k));
    double sum = 0.0;
    for (Index k = 0; k < classes; ++k) {
      const double e = std::exp(p(b, k) - mx);
      p(b, k) = e;
      sum += e;
    }
    for (Index k = 0; k < classes; ++k) p(b, k) /= sum;
  }
  return p;
}

LossValue softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
  if (logits.rank() != 2)
    throw DimensionError("cross-entropy: expected rank 2 logits, got " + shape_str(logits.shape));
  const Index batch = logits.dim(0), classes = logits.dim(1);
  if (static_cast<Index>(labels.size()) != batch)
    throw DimensionError("cross-entropy: " + std::to_string(labels.size()) + " labels for batch " +
                         std::to_string(batch));
  for (int y : labels)
    if (y < 0 || y >= classes)
      throw LabelError("cross-entropy: label " + std::to_string(y) + " outside [0," +
                       std::to_string(classes) + ")");
  LossValue out;
  out.probs = softmax(logits);
  double total = 0.0;
  for (Index b = 0; b < batch; ++b) {
    const double p = out.probs(b, labels[static_cast<std::size_t>(b)]);
    total += -std::log(std::max(p, 1e-300));
  }
  out.value = total / static_cast<double>(batch);
  return out;
}

Tensor softmax_cross_entropy_grad(const LossValue& loss, const std::vector<int>& labels) {
  const Index batch = loss.probs.dim(0);
  if (static_cast<Index>(labels.size()) != batch)
    throw DimensionError("cross-entropy grad: label count mismatch");
  Tensor g = loss.probs;
  for (Index b = 0; b < batch; ++b) g(b, labels[static_cast<std::size_t>(b)]) -= 1.0;
  g.data /= static_cast<double>(batch);
  return g;
}

}  // namespace creditnn
