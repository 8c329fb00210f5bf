#include <doctest.h>

#include <algorithm>
#include <creditnn/errors.hpp>
#include <creditnn/loss.hpp>
#include <creditnn/trainer.hpp>

using namespace creditnn;

namespace {

// Two well-separated gaussian blobs in the plane.
Dataset blobs(Index n_per_class, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  d.inputs = Tensor::zeros({2 * n_per_class, 2});
  for (Index i = 0; i < 2 * n_per_class; ++i) {
    const int label = i < n_per_class ? 0 : 1;
    const double cx = label == 0 ? 2.0 : -2.0;
    d.inputs(i, 0) = cx + rng.normal(0.0, 0.5);
    d.inputs(i, 1) = cx + rng.normal(0.0, 0.5);
    d.labels.push_back(label);
  }
  return d;
}

// XOR of coordinate signs: not separable by a single hidden unit.
Dataset xor_quadrants(Index n_per_quadrant, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  d.inputs = Tensor::zeros({4 * n_per_quadrant, 2});
  Index row = 0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (Index i = 0; i < n_per_quadrant; ++i, ++row) {
        d.inputs(row, 0) = sx * 1.0 + rng.normal(0.0, 0.15);
        d.inputs(row, 1) = sy * 1.0 + rng.normal(0.0, 0.15);
        d.labels.push_back(sx * sy > 0 ? 1 : 0);
      }
  return d;
}

TrainConfig fast_config() {
  TrainConfig c;
  c.learning_rate = 0.1;
  c.max_epochs = 120;
  c.batch_size = 16;
  c.dropout_rate = 0.0;
  c.early_stop_patience = 0;
  c.early_stop_fraction = 0.1;
  c.rng_seed = 7;
  return c;
}

}  // namespace

TEST_CASE("config and dataset validation name the offending field") {
  TrainConfig c;
  c.learning_rate = 0.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("learning_rate"), ConfigError);
  c = TrainConfig{};
  c.batch_size = 0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("batch_size"), ConfigError);
  c = TrainConfig{};
  c.dropout_rate = 1.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("dropout_rate"), ConfigError);
  c = TrainConfig{};
  c.early_stop_fraction = 0.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("early_stop_fraction"), ConfigError);
  c.early_stop_fraction = 1.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("early_stop_fraction"), ConfigError);
  c = TrainConfig{};
  c.max_epochs = -1;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("max_epochs"), ConfigError);
  CHECK_NOTHROW(TrainConfig{}.validate());

  Dataset empty;
  CHECK_THROWS_AS(empty.validate(4), DataError);
  Dataset d = blobs(3, 1);
  d.labels.back() = 2;
  CHECK_THROWS_AS(d.validate(2), LabelError);
  d.labels.pop_back();
  CHECK_THROWS_AS(d.validate(2), DataError);
}

TEST_CASE("predict takes the first argmax and accuracy counts matches") {
  Network net;
  net.add(std::make_unique<DenseLayer>(2, 3, Activation::identity));
  Rng rng(5);
  net.init_params(rng);  // zero biases, then overwrite weights below
  LayerParams* p = net.layer(0).params();
  p->weights.data.setZero();
  p->biases = Tensor::of({3}, {1.0, 1.0, 0.0});  // tie between 0 and 1
  Tensor x = Tensor::zeros({2, 2});
  std::vector<int> pred = predict(net, x);
  CHECK(pred == std::vector<int>{0, 0});
  CHECK(accuracy(pred, {0, 1}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(accuracy(pred, {0}), DimensionError);
  CHECK_THROWS_AS(accuracy({}, {}), EvalError);
}

TEST_CASE("training is bitwise deterministic for a fixed seed") {
  Dataset data = blobs(24, 11);
  ModelSpec spec = make_mlp(2, 2, 8, 1);
  TrainConfig c = fast_config();
  c.max_epochs = 25;
  TrainOutcome a = train(spec, data, c);
  TrainOutcome b = train(spec, data, c);
  CHECK(a.model.snapshot() == b.model.snapshot());
  CHECK(a.history.train_loss == b.history.train_loss);
  CHECK(a.history.monitor_loss == b.history.monitor_loss);
  CHECK(a.history.epochs_run == b.history.epochs_run);
  CHECK(a.history.best_epoch == b.history.best_epoch);

  c.rng_seed = 8;
  TrainOutcome other = train(spec, data, c);
  CHECK(a.model.snapshot() != other.model.snapshot());
}

TEST_CASE("a small mlp separates gaussian blobs") {
  Dataset data = blobs(40, 13);
  ModelSpec spec = make_mlp(2, 2, 8, 1);
  TrainOutcome out = train(spec, data, fast_config());
  const double acc = accuracy(predict(out.model, data.inputs), data.labels);
  CHECK(acc >= 0.95);
  CHECK(out.history.train_loss.front() > out.history.train_loss.back());
}

TEST_CASE("max_epochs zero returns the initialized, untrained model") {
  Dataset data = blobs(10, 17);
  ModelSpec spec = make_mlp(2, 2, 4, 1);
  TrainConfig c = fast_config();
  c.max_epochs = 0;
  TrainOutcome out = train(spec, data, c);
  CHECK(out.history.epochs_run == 0);
  CHECK(out.history.best_epoch == 0);
  CHECK(out.history.train_loss.empty());
  CHECK_FALSE(out.history.stopped_early);
  CHECK_FALSE(out.history.monitor_indices.empty());
  Tensor logits = out.model.forward(data.inputs, false, nullptr);
  CHECK(logits.all_finite());
}

TEST_CASE("the restored model reproduces the best monitor loss") {
  Dataset data = blobs(30, 19);
  ModelSpec spec = make_mlp(2, 2, 8, 1);
  TrainConfig c = fast_config();
  c.learning_rate = 0.4;  // noisy enough that the last epoch is rarely the best
  c.early_stop_patience = 3;
  c.max_epochs = 60;
  TrainOutcome out = train(spec, data, c);
  REQUIRE_FALSE(out.history.monitor_loss.empty());
  const double best =
      *std::min_element(out.history.monitor_loss.begin(), out.history.monitor_loss.end());
  Dataset monitor = data.subset(out.history.monitor_indices);
  Tensor logits = out.model.forward(monitor.inputs, false, nullptr);
  const double replay = softmax_cross_entropy(logits, monitor.labels).value;
  CHECK(replay == doctest::Approx(best).epsilon(1e-12));
  CHECK(out.history.best_epoch >= 1);
  CHECK(out.history.best_epoch <= out.history.epochs_run);
  if (out.history.stopped_early) CHECK(out.history.epochs_run < c.max_epochs);
}

TEST_CASE("patience bounds the number of epochs past the best one") {
  Dataset data = blobs(30, 23);
  ModelSpec spec = make_mlp(2, 2, 8, 1);
  TrainConfig c = fast_config();
  c.learning_rate = 0.6;
  c.early_stop_patience = 2;
  c.max_epochs = 500;
  TrainOutcome out = train(spec, data, c);
  if (out.history.stopped_early) {
    // Stops exactly `patience` epochs after the last improvement.
    Index bad = 0;
    double best = std::numeric_limits<double>::infinity();
    for (double v : out.history.monitor_loss) {
      if (v < best) {
        best = v;
        bad = 0;
      } else {
        ++bad;
      }
    }
    CHECK(bad == c.early_stop_patience);
  }
}

TEST_CASE("training rejects inputs shaped for a different architecture") {
  Dataset data = blobs(10, 29);
  ModelSpec spec = make_lstm(2, 2);  // wants rank-3 (batch, window, features)
  CHECK_THROWS_AS(train(spec, data, fast_config()), DimensionError);
}

TEST_CASE("grid search scores every candidate on the shared monitor split") {
  Dataset data = blobs(30, 31);
  std::vector<ModelSpec> grid = {make_mlp(2, 2, 41, 1), make_mlp(2, 2, 82, 1),
                                 make_mlp(2, 2, 164, 1)};
  TrainConfig c = fast_config();
  c.max_epochs = 15;
  GridSearchResult result = grid_search(grid, data, c);
  REQUIRE(result.scores.size() == 3);
  CHECK(result.scores[0].label == "mlp-41x1");
  CHECK(result.scores[1].label == "mlp-82x1");
  CHECK(result.scores[2].label == "mlp-164x1");
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(result.scores[i].index == i);
    CHECK(result.scores[i].monitor_accuracy >= 0.0);
    CHECK(result.scores[i].monitor_accuracy <= 1.0);
  }
  CHECK(result.best_index < 3);
  double best = -1.0;
  std::size_t first_best = 0;
  for (const auto& s : result.scores)
    if (s.monitor_accuracy > best) {
      best = s.monitor_accuracy;
      first_best = s.index;
    }
  CHECK(result.best_index == first_best);

  CHECK_THROWS_AS(grid_search({}, data, c), ConfigError);
  GridSearchResult solo = grid_search({make_mlp(2, 2, 8, 1)}, data, c);
  CHECK(solo.best_index == 0);
  CHECK(solo.scores.size() == 1);
}

TEST_CASE("grid search prefers capacity when the task demands it") {
  Dataset data = xor_quadrants(30, 37);
  std::vector<ModelSpec> grid = {make_mlp(2, 2, 1, 1), make_mlp(2, 2, 16, 1)};
  TrainConfig c = fast_config();
  c.learning_rate = 0.2;
  c.max_epochs = 200;
  c.early_stop_fraction = 0.25;
  GridSearchResult result = grid_search(grid, data, c);
  CHECK(result.best_index == 1);
  CHECK(result.scores[1].monitor_accuracy > result.scores[0].monitor_accuracy);
}
