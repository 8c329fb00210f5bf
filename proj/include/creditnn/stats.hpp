#pragma once

#include <string>
#include <vector>

#include "creditnn/errors.hpp"

namespace creditnn {

struct SampleSummary {
  double mean = 0.0;
  double stddev = 0.0;  // n-1 denominator
  int n = 0;

  static SampleSummary of(const std::vector<double>& values);
};

struct TTestResult {
  double t = 0.0;
  double df = 0.0;     // Welch-Satterthwaite
  double p_one_sided = 0.0;  // H_a: mean_a > mean_b
};

// Welch two-sample t test, one-sided alternative mean_a > mean_b.
TTestResult welch_one_sided(const SampleSummary& a, const SampleSummary& b);

struct AnovaRow {
  std::string name;
  double ss = 0.0;
  int df = 0;
  double f = 0.0;
  double p = 0.0;
  bool has_f = false;  // residual rows carry no F
};

struct AnovaTable {
  std::vector<AnovaRow> rows;  // effects first, residual last
  double total_ss = 0.0;
  int total_df = 0;

  const AnovaRow& residual() const { return rows.back(); }
  const AnovaRow& effect(const std::string& name) const;
};

// Classical one-way decomposition (between/within).
AnovaTable one_way_anova(const std::vector<std::vector<double>>& groups,
                         const std::string& factor_name = "between");

// Two factors plus interaction. Balanced designs use the classical cell-mean
// decomposition; unbalanced designs use Type II sums of squares from nested
// least-squares fits. Every (a,b) cell must be non-empty.
AnovaTable two_way_anova(const std::vector<double>& response,
                         const std::vector<std::string>& factor_a,
                         const std::vector<std::string>& factor_b,
                         const std::string& name_a = "A", const std::string& name_b = "B");

struct TukeyComparison {
  int level_i = 0;  // indices into TukeyGrouping::levels
  int level_j = 0;
  double diff = 0.0;  // mean_i - mean_j
  double q = 0.0;
  double p_adj = 0.0;
  bool significant = false;
};

struct TukeyGrouping {
  std::vector<std::string> levels;  // rank order, highest mean first
  std::vector<double> means;        // aligned with levels
  std::vector<int> group_sizes;
  std::vector<TukeyComparison> comparisons;
  // Connected components of the "not significantly different" relation,
  // ordered by their best-ranked member; indices into `levels`.
  std::vector<std::vector<int>> groups;
  double ms_within = 0.0;
  int df_within = 0;
  double alpha = 0.05;
};

// All-pairs Tukey comparison at level alpha; unequal group sizes use the
// Tukey-Kramer standard error. Rank 1 is the highest mean.
TukeyGrouping tukey_hsd(const std::vector<std::vector<double>>& groups,
                        const std::vector<std::string>& level_names, double alpha = 0.05);

// One row per sector: levels in rank order, non-distinguishable sets
// bracketed, e.g. "[lstm cnn2d] | cnn | mlp".
std::string format_grouping(const TukeyGrouping& g);
std::vector<std::string> rank_table(
    const std::vector<std::pair<std::string, TukeyGrouping>>& per_sector);

}  // namespace creditnn
