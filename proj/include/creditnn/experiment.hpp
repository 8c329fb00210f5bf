#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "creditnn/model_zoo.hpp"
#include "creditnn/panel.hpp"
#include "creditnn/ratios.hpp"
#include "creditnn/split.hpp"
#include "creditnn/train.hpp"

namespace creditnn {

enum class FeatureMode { ratios20, all_features };

std::string feature_mode_name(FeatureMode m);
FeatureMode feature_mode_from_name(const std::string& name);  // ConfigError on unknown

// One of the four experimental designs. Cases 1-3 draw `replicates` seeded
// random splits; case 4 sweeps every target year as the held-out test set.
struct CaseSpec {
  int case_id = 3;
  std::string sector;
  FeatureMode features = FeatureMode::all_features;
  std::vector<Arch> architectures;  // must match the case (see validate)
  SplitPlan split;
  int replicates = 15;
  TrainConfig train;
  std::uint64_t seed = 0;
  bool fix_split = false;  // replicates re-randomize initialization only
  bool standardize = true;
  FieldMapping mapping;  // case 1: accounting item -> feature column

  void validate() const;
};

// Canonical spec for a case: its feature mode, split kind and architecture
// roster, with default training hyperparameters.
CaseSpec case_spec(int case_id, const std::string& sector);

struct ExperimentResult {
  int case_id = 0;
  std::string sector;
  std::string arch;        // describe() label, e.g. "mlp-41x3"
  std::string allocation;  // replicate id "r00".."r14" or held-out year
  double train_acc = 0.0;
  double test_acc = 0.0;
  Index epochs = 0;
  double seconds = 0.0;
};

// Append-only result collection with a canonical CSV round trip:
// case,sector,arch,allocation,train_acc,test_acc,epochs,seconds.
struct ResultStore {
  std::vector<ExperimentResult> rows;

  void append(ExperimentResult r) { rows.push_back(std::move(r)); }
  void append(const ResultStore& other);
  void sort();  // (case, sector, arch, allocation)

  void save_csv(const std::string& path) const;
  static ResultStore load_csv(const std::string& path);  // IoError / ParseError
};

struct RunOptions {
  bool timing = false;  // measure wall time; off keeps result bytes seed-determined
  int jobs = 1;         // allocations per architecture run on this many threads
  std::optional<Arch> only_arch;  // run a single architecture from the roster
  std::function<void(const ExperimentResult&)> on_result;  // progress hook, any order
};

// Runs every (architecture, allocation) cell of the case on the panel:
// impute -> (ratios for case 1) -> window -> split -> standardize on the
// training side -> train -> evaluate. Deterministic given spec.seed.
ResultStore run_case(const CaseSpec& spec, const Panel& panel);
ResultStore run_case(const CaseSpec& spec, const Panel& panel, const RunOptions& options);

// Fraction of samples whose predicted class equals the label; EvalError on
// an empty set.
double evaluate(Network& model, const Dataset& data);

struct SummaryRow {
  int case_id = 0;
  std::string sector;
  std::string arch;
  int n = 0;
  double test_mean = 0.0;
  double test_std = 0.0;  // n-1 denominator; 0 for a single row
  double train_mean = 0.0;
  double train_std = 0.0;
};

// Per-(case, sector, arch) mean and sample standard deviation of accuracy,
// in canonical order.
std::vector<SummaryRow> summarize(const ResultStore& store);

std::string format_mean_std(double mean, double stddev);  // "0.8359(0.0200)"

}  // namespace creditnn
