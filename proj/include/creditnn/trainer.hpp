#pragma once

#include <string>
#include <vector>

#include "creditnn/model_zoo.hpp"
#include "creditnn/train.hpp"

namespace creditnn {

struct TrainOutcome {
  Network model;
  TrainHistory history;
};

// Mini-batch SGD with dropout and best-epoch early stopping. A monitor split
// of config.early_stop_fraction is carved from `data` before initialization;
// the returned model carries the best monitor epoch's parameters. Fully
// deterministic given config.rng_seed.
TrainOutcome train(const ModelSpec& spec, const Dataset& data, const TrainConfig& config);
TrainOutcome train(const ModelSpec& spec, const Dataset& data);  // spec.train config

struct GridCandidateScore {
  std::size_t index = 0;
  std::string label;
  double monitor_accuracy = 0.0;
};

struct GridSearchResult {
  std::size_t best_index = 0;
  std::vector<GridCandidateScore> scores;  // grid order
};

// Trains every candidate under the same config/seed and scores each on the
// shared monitor split; ties keep the earliest grid entry.
GridSearchResult grid_search(const std::vector<ModelSpec>& grid, const Dataset& data,
                             const TrainConfig& config);

}  // namespace creditnn
