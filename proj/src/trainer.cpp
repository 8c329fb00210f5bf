#include "creditnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "creditnn/errors.hpp"
#include "creditnn/loss.hpp"

namespace creditnn {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be positive");
  if (max_epochs < 0) throw ConfigError("train: max_epochs must be non-negative");
  if (batch_size <= 0) throw ConfigError("train: batch_size must be positive");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0)
    throw ConfigError("train: dropout_rate must be in [0,1)");
  if (early_stop_patience < 0) throw ConfigError("train: early_stop_patience must be >= 0");
  if (!(early_stop_fraction > 0.0 && early_stop_fraction < 1.0))
    throw ConfigError("train: early_stop_fraction must be in (0,1)");
}

void Dataset::validate(Index n_classes) const {
  if (size() == 0) throw DataError("dataset: no samples");
  if (static_cast<Index>(labels.size()) != size())
    throw DataError("dataset: " + std::to_string(labels.size()) + " labels for " +
                    std::to_string(size()) + " samples");
  for (int y : labels)
    if (y < 0 || y >= n_classes)
      throw LabelError("dataset: label " + std::to_string(y) + " outside [0," +
                       std::to_string(n_classes) + ")");
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
  Dataset out;
  out.inputs = gather_rows(inputs, rows);
  out.labels.reserve(rows.size());
  for (Index r : rows) out.labels.push_back(labels.at(static_cast<std::size_t>(r)));
  return out;
}

Tensor gather_rows(const Tensor& t, const std::vector<Index>& rows) {
  if (t.rank() == 0) throw DimensionError("gather_rows: empty tensor");
  const Index n = t.dim(0), width = t.trailing(1);
  std::vector<Index> shape = t.shape;
  shape[0] = static_cast<Index>(rows.size());
  Tensor out = Tensor::zeros(shape);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Index r = rows[i];
    if (r < 0 || r >= n)
      throw DimensionError("gather_rows: row " + std::to_string(r) + " outside [0," +
                           std::to_string(n) + ")");
    out.data.segment(static_cast<Index>(i) * width, width) = t.data.segment(r * width, width);
  }
  return out;
}

std::vector<int> predict(Network& net, const Tensor& inputs) {
  Tensor out = net.forward(inputs, false, nullptr);
  if (out.rank() != 2) throw DimensionError("predict: network output " + shape_str(out.shape));
  const Index n = out.dim(0), k = out.dim(1);
  std::vector<int> classes(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Index best = 0;
    for (Index j = 1; j < k; ++j)
      if (out(i, j) > out(i, best)) best = j;  // strict: ties keep lowest index
    classes[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return classes;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& labels) {
  if (predicted.size() != labels.size())
    throw DimensionError("accuracy: " + std::to_string(predicted.size()) + " predictions vs " +
                         std::to_string(labels.size()) + " labels");
  if (predicted.empty()) throw EvalError("accuracy: empty sample set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

TrainOutcome train(const ModelSpec& spec, const Dataset& data, const TrainConfig& config) {
  config.validate();
  spec.validate();
  data.validate(spec.n_classes);
  const std::vector<Index> want = input_shape(spec, data.size());
  if (data.inputs.shape != want)
    throw DimensionError("train: data shape " + shape_str(data.inputs.shape) + " vs expected " +
                         shape_str(want));

  Rng rng(config.rng_seed);
  const Index n = data.size();

  // The monitor split is drawn before initialization so every candidate in a
  // grid search shares it.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  rng.shuffle(order);
  Index monitor_n = 0;
  if (n >= 2)
    monitor_n = std::clamp<Index>(
        static_cast<Index>(std::llround(static_cast<double>(n) * config.early_stop_fraction)), 1,
        n - 1);
  std::vector<Index> fit_idx(order.begin(), order.end() - monitor_n);
  std::vector<Index> monitor_idx(order.end() - monitor_n, order.end());

  TrainOutcome out;
  out.model = build_network(spec, config.dropout_rate);
  out.model.init_params(rng);
  out.history.monitor_indices = monitor_idx;
  if (config.max_epochs == 0) return out;

  Dataset monitor = monitor_n ? data.subset(monitor_idx) : Dataset{};
  double best_loss = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_params;
  Index bad_epochs = 0;

  for (Index epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(fit_idx);
    double epoch_loss = 0.0;
    for (std::size_t at = 0; at < fit_idx.size(); at += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(at + static_cast<std::size_t>(config.batch_size),
                                        fit_idx.size());
      std::vector<Index> batch(fit_idx.begin() + static_cast<std::ptrdiff_t>(at),
                               fit_idx.begin() + static_cast<std::ptrdiff_t>(stop));
      Dataset b = data.subset(batch);
      Tensor logits = out.model.forward(b.inputs, true, &rng);
      LossValue loss = softmax_cross_entropy(logits, b.labels);
      if (!std::isfinite(loss.value))
        throw NumericError("train: loss diverged at epoch " + std::to_string(epoch));
      epoch_loss += loss.value * static_cast<double>(batch.size());
      out.model.zero_grads();
      out.model.backward(softmax_cross_entropy_grad(loss, b.labels));
      out.model.sgd_update(config.learning_rate);
    }
    out.history.train_loss.push_back(epoch_loss / static_cast<double>(fit_idx.size()));
    out.history.epochs_run = epoch;

    if (monitor_n) {
      Tensor mlogits = out.model.forward(monitor.inputs, false, nullptr);
      const double mloss = softmax_cross_entropy(mlogits, monitor.labels).value;
      if (!std::isfinite(mloss))
        throw NumericError("train: monitor loss diverged at epoch " + std::to_string(epoch));
      out.history.monitor_loss.push_back(mloss);
      if (mloss < best_loss) {
        best_loss = mloss;
        out.history.best_epoch = epoch;
        best_params = out.model.snapshot();
        bad_epochs = 0;
      } else {
        ++bad_epochs;
        if (config.early_stop_patience > 0 && bad_epochs >= config.early_stop_patience) {
          out.history.stopped_early = true;
          break;
        }
      }
    }
  }
  if (best_params.size() > 0) out.model.restore(best_params);
  return out;
}

TrainOutcome train(const ModelSpec& spec, const Dataset& data) {
  return train(spec, data, spec.train);
}

GridSearchResult grid_search(const std::vector<ModelSpec>& grid, const Dataset& data,
                             const TrainConfig& config) {
  if (grid.empty()) throw ConfigError("grid search: empty grid");
  GridSearchResult result;
  double best_score = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    TrainOutcome outcome = train(grid[i], data, config);
    const std::vector<Index>& midx = outcome.history.monitor_indices;
    double score;
    if (!midx.empty()) {
      Dataset monitor = data.subset(midx);
      score = accuracy(predict(outcome.model, monitor.inputs), monitor.labels);
    } else {
      score = accuracy(predict(outcome.model, data.inputs), data.labels);
    }
    result.scores.push_back({i, describe(grid[i]), score});
    if (score > best_score) {  // strict: ties keep the earliest candidate
      best_score = score;
      result.best_index = i;
    }
  }
  return result;
}

}  // namespace creditnn
