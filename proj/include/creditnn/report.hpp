#pragma once

#include <string>
#include <vector>

#include "creditnn/experiment.hpp"
#include "creditnn/stats.hpp"

namespace creditnn {

// One sector x architecture cell of the case-3 vs case-4 comparison.
// `arch` is the family name (mlp, cnn, lstm, cnn2d), not the sized label.
struct ComparisonCell {
  std::string sector;
  std::string arch;
  SampleSummary case3;
  SampleSummary case4;
};

// Collapse per-run rows into comparison cells keyed by (sector, family).
// Rows from other cases are ignored; DesignError if a family has rows on
// only one side of the comparison.
std::vector<ComparisonCell> comparison_grid(const ResultStore& store);

// Published-summary CSV with header
//   sector,arch,case3_mean,case3_std,case3_n,case4_mean,case4_std,case4_n
std::vector<ComparisonCell> load_comparison_grid(const std::string& path);

// Markdown grid of one-sided Welch p-values (rows: architectures, columns:
// sectors), alternative "case 3 mean exceeds case 4 mean".
std::string render_ttest_grid(const std::vector<ComparisonCell>& cells);

// Markdown two-way ANOVA (sector x architecture) on per-run test accuracy
// for one case. DesignError when the design is not estimable from the rows.
std::string render_anova2(const ResultStore& store, int case_id);

// Markdown rank rows, one per sector, architectures in descending-mean order
// with statistically indistinguishable sets bracketed.
std::string render_tukey_ranks(const ResultStore& store, int case_id);

// Full markdown report shaped like the published tables; sections without
// matching rows carry a "(no data)" row. Deterministic bytes.
std::string render_report(const ResultStore& store);

}  // namespace creditnn
