#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "creditnn/tensor.hpp"

namespace creditnn {

// One company-quarter row. NaN marks a missing feature value until imputation.
struct PanelRecord {
  std::string company_id;
  std::string sector;
  int year = 0;
  int quarter = 0;  // 1..4
  std::string rating;
  Eigen::VectorXd features;
};

// Quarterly panel, records sorted by (company_id, year, quarter).
struct Panel {
  std::vector<PanelRecord> records;
  std::vector<std::string> feature_names;
  std::string sector;

  Index n_features() const { return static_cast<Index>(feature_names.size()); }
  Index n_records() const { return static_cast<Index>(records.size()); }

  void sort_records();
  void validate() const;  // IntegrityError on key/shape violations
};

// CSV schema: company_id,sector,year,quarter,rating,<feature columns>;
// empty feature cell = missing.
Panel load_panel(const std::string& path);
void save_panel(const std::string& path, const Panel& panel);

struct ImputeResult {
  Panel panel;
  std::vector<Index> missing_per_feature;
  Index missing_cells = 0;
};

// Replaces every missing value with 0.0 and reports per-feature counts.
ImputeResult impute_zero(const Panel& panel);

// Per-feature z-scoring with training statistics only; zero-variance
// features map to 0.
struct FeatureScaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_dev;  // n-1 denominator; 0 where the feature is constant

  static FeatureScaler fit(const Panel& train);
  static FeatureScaler fit(const Panel& train, const std::vector<Index>& rows);
  Panel apply(const Panel& panel) const;
};

// Canonical S&P ladder, best to worst: AAA, AA+, ..., C, D.
const std::vector<std::string>& sp_rating_ladder();

// Rating symbols present in the training data, canonical order; index 0 is
// the best present rating.
struct LabelCodec {
  std::vector<std::string> symbols;

  Index size() const { return static_cast<Index>(symbols.size()); }
  int index_of(const std::string& symbol) const;   // LabelError if absent
  const std::string& symbol_of(int index) const;   // LabelError if out of range
};

LabelCodec encode_labels(const Panel& panel);

// One training sample: `window` consecutive quarters of one company, oldest
// row first, ending at the target (year, quarter).
struct WindowedSample {
  std::string company_id;
  int year = 0;
  int quarter = 0;
  Tensor values;  // (window, features)
  int label = 0;
};

// One sample per company-quarter with window-1 gap-free preceding quarters;
// Q4 of year y precedes Q1 of year y+1.
std::vector<WindowedSample> make_windows(const Panel& panel, const LabelCodec& codec,
                                         Index window);

}  // namespace creditnn
